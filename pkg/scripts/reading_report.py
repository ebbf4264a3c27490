"""Main-theorem sweep under each alternative reading of the printed case 3.

Prints, per reading, whether it is falsified on the grid or indistinguishable
from the default.
"""

import argparse
import json
import os

from ghostslopes.slopes import DEFAULT_READINGS, Readings
from ghostslopes.verify import SweepConfig, reading_outcome

READINGS = [
    DEFAULT_READINGS,
    Readings(case3_b_plus_one=False),
    Readings(case3_branch_a_printed=True),
    Readings(case3_b_plus_one=False, case3_branch_a_printed=True),
]

ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
ap.add_argument("--k-max", type=int, default=500)
ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
args = ap.parse_args()

cfg = SweepConfig(p_list=(11, 13), k_max=args.k_max)
for r in READINGS:
    res = reading_outcome(cfg, r, jobs=args.jobs)
    first = res["first_mismatch"]
    print(f"{res['reading']:<40} {res['outcome']:<20} {res['mismatches']:>6}/{res['tuples']}")
    if first:
        print("    first:", json.dumps(first["params"], sort_keys=True), json.dumps(first["witness"], sort_keys=True))
