"""Run the iteration on a small set, inspect the certificate, then tamper with it.

Run with ``python demos/03_certificate.py``.
"""

import copy
import json

from bohr_forge import GroupSpec, a_norm, check_certificate, indicator, run_iteration

G = GroupSpec.cyclic(16)
A = range(5)           # density 5/16, obstruction 3/16 at |V| = 4
res = run_iteration(G, A, M=8)
cert = res.to_certificate()

print(f"termination: {res.reason} after {len(res.rounds)} round(s)")
for r in cert["rounds"]:
    print(f"  round {r['k']}: case {r['case']}, delta {r['delta']} -> delta'' {r['delta2']}, "
          f"Lambda {r['lambda']}, annulus mass m = {r['m']:.5f}")

report = check_certificate(cert, A)
print(f"\ncheck: {report.verdict}, certified bound {report.bound:.4f} "
      f"<= ||1_A||_A = {a_norm(G, indicator(G, A)):.4f}")

bad = copy.deepcopy(cert)
bad["rounds"][0]["m"] *= 1.1
report = check_certificate(bad, A)
print(f"after inflating m_0 by 10%: {report.verdict} ({report.clause}: {report.detail})")

print("\ncertificate excerpt:")
print(json.dumps({k: cert[k] for k in ("schema", "group", "M", "alpha", "obstruction",
                                        "claimed_bound")}, indent=2))
