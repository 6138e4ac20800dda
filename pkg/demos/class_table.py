"""Print the 33 boundary classes and a sampled frequency count.

    python3 demos/class_table.py [n_samples]
"""
import sys
from collections import Counter

import numpy as np

from seasonlv import Degenerate, class_table, classify, expected_positive_fp, sample_params

n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
rng = np.random.default_rng(1)
freq = Counter()
for _ in range(n):
    try:
        freq[classify(sample_params(rng)).class_id.id] += 1
    except Degenerate:
        freq["degenerate"] += 1

print(f"{'id':>3}  {'signature':<18} {'det A':>5} {'sum':>4}  {'interior':<13} {'sampled':>7}")
for e in class_table():
    det = {0: "any", 1: "+", -1: "-"}[e.det_a_sign]
    print(f"{e.id:>3}  {e.description:<18} {det:>5} {e.boundary_index_sum:>4}  "
          f"{expected_positive_fp(e.id):<13} {freq[e.id]:>7}")
print(f"degenerate draws: {freq['degenerate']} of {n}")
