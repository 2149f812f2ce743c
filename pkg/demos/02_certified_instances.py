"""The shipped instance gallery and what each one certifies.

Every entry was reconstruction-searched and is re-certified from scratch
by the exact solver (or the best-response search) on demand.
"""

from cspgame.catalog import catalog

for entry in catalog():
    print(f"== {entry.name}  {entry.params}")
    print(f"   {entry.provenance}")
    print(f"   claim: {entry.certificate}")
    if entry.heavy:
        print("   (verification sweeps 280 priority classes; run it via"
              " `csp verify --suite catalog`)")
        continue
    report = entry.verify(10**7)
    print(f"   verified: {report.ok}")
    for line in report.details:
        print(f"     - {line}")
