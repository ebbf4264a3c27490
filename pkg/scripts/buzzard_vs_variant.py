"""Buzzard's original recursion fed with abstract ghost dimensions vs the variant.

The original recursion keeps one character throughout, so agreement is only
expected where neither needs a twisted recursive call; this prints where they
agree and where they part.
"""

from ghostslopes.dims import GhostParams, in_class
from ghostslopes.errors import MissingDimension, RecursionInvariantError
from ghostslopes.slopes import DimProvider, buzzard_original, case_params, variant_slopes


def case1_tree(params, s, k):
    if k < params.p + 3 or not in_class(params, s, k):
        return True
    cp = case_params(params, s, k)
    return cp.case_id == 1 and all(case1_tree(params, c, w) for c, w in
                                   ((cp.char1, cp.k1), (cp.char2, cp.k2), (cp.char3, cp.k3)))


for p, a in ((11, 2), (13, 4)):
    params = GhostParams(p, a)
    for s in range(p - 1):
        provider = DimProvider.from_ghost(params, s)
        rows = {"agree": 0, "differ": 0, "error": 0}
        first = None
        for k in range(4, 402, 2):
            if not in_class(params, s, k):
                continue
            try:
                same = buzzard_original(provider, p, k) == variant_slopes(params, s, k)
            except (MissingDimension, RecursionInvariantError):
                rows["error"] += 1
                continue
            rows["agree" if same else "differ"] += 1
            if not same and first is None:
                first = (k, case1_tree(params, s, k))
        print(f"p={p} a={a} s_eps={s}: {rows}" + (f"  first difference k={first[0]} case1-tree={first[1]}" if first else ""))
