"""
Generate the small families and certify them from the sequences alone.

Run:  python demos/families.py
"""

import numpy as np

from zakzcz import seqanalysis, zczgen
from zakzcz.zakcore import fzt, to_exponents

np.set_printoptions(linewidth=120)

# R=1, T=4: one set of four period-16 sequences, shown as exponents of w_4
fam = zczgen.generate_family("T1", 1, 4)
print("index row:", fam.index_matrix[0])
print(to_exponents(fam.sequences[0], 4))

# the Zak matrix of each sequence is a scaled permutation pattern
X = fam.zak(0)[1]
print("support of X_1:\n", (np.abs(X) > 1e-9).astype(int))
assert np.allclose(fzt(fam.sequences[0, 1], 4, 4), X)

# R=3, T=5: two sets, period 75
fam = zczgen.generate_family("T2", 3, 5, q=1, rows=[0, 1])
rep = seqanalysis.certify_family(fam.sequences, R=3, T=5)
for m, c in enumerate(rep["sets"]):
    print(f"set {m}: (N, T, Z) = ({c.N}, {c.T_set_size}, {c.Z_measured}), perfect={c.perfect}, distinct={c.all_distinct}")
inter = rep["inter_set"]
print(f"inter-set |theta| in [{inter['theta_min']:.6f}, {inter['theta_c']:.6f}], 5*sqrt(3) = {5 * np.sqrt(3):.6f}")
print("Sarwate LHS:", rep["sarwate_lhs"])

# one profile: zero zone of width RT=15 between two sequences of set 0
prof = seqanalysis.pccf(fam.sequences[0, 1], fam.sequences[0, 2]).magnitude
print("|theta(tau)| for tau < 20:", np.round(prof[:20], 3))

# the generator refuses an index row that breaks the in-set conditions
try:
    zczgen.generate_family("T1", 1, 6, q=5)
except ValueError as exc:
    print("rejected:", exc)

# families for every construction, checked against the admissibility conditions
for th, R, T in [("T1", 1, 7), ("C1", 1, 7), ("T2", 5, 7), ("C2", 3, 7), ("T3", 2, 8), ("C3", 4, 5)]:
    f = zczgen.generate_family(th, R, T)
    rep = seqanalysis.certify_family(f.sequences, R=R, T=T)
    print(f"{th} R={R} T={T}: N={f.N} M={f.M} Z={rep['sets'][0].Z_measured} "
          f"admissible={zczgen.check_family(f)['admissible']} certified={rep['promised']}")
