"""How the recursion fares for odd a, outside the theorem's hypothesis.

Odd a puts odd weights in the class; the recursion is run with odd weights
allowed and compared with the ghost polygon.  Mismatches are reported only.
"""

import argparse
import collections
import os

from ghostslopes.verify import SweepConfig, sweep

ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
ap.add_argument("--k-max", type=int, default=300)
ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
args = ap.parse_args()

for p in (11, 13):
    odd = tuple(range(1, p - 4, 2))
    reports = sweep(SweepConfig(p_list=(p,), a_list=odd, b_list=(0,), k_max=args.k_max), ("main",), jobs=args.jobs)
    by_a = collections.Counter((r.params["a"], r.status) for r in reports)
    for a in odd:
        print(f"p={p} a={a}: pass={by_a[(a, 'pass')]} noted={by_a[(a, 'noted')]} fail={by_a[(a, 'fail')]}")
    noted = [r for r in reports if r.status == "noted"][:3]
    for r in noted:
        print("   ", r.params, r.witness)
