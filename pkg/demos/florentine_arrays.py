"""
Circular Florentine arrays: prime base arrays, their extensions, and search.

Run:  python demos/florentine_arrays.py
"""

from math import factorial

from zakzcz import florentine as fl

F = fl.base_array_prime(5)
print("base array for T=5:\n", F)

# each q picks one tail ordering of {2..T-1}; q=0 is the base itself
for q in range(1, factorial(3)):
    print(f"q={q}, first row {fl.extend_construction1(F, q)[0]}")
print("all valid:", all(fl.verify(E) for E in fl.all_extensions(F)))

# a violation report names the offending rows and symbols
v = fl.verify([[0, 1, 2, 3, 4], [0, 1, 3, 2, 4]])
print(v.valid, v.violations[0])

# no two-row array exists for even T; odd composite 9 has one
for T, rows in [(4, 2), (6, 2), (9, 2)]:
    a = fl.search_small(T, rows)
    print(f"T={T}, {rows} rows:", "none" if a is None else a.tolist())

# every ordered symbol pair is seen at most once per step across the rows
E = fl.known_array(15)
print("T=15 array with", len(E), "rows, valid:", bool(fl.verify(E)))
print("shift counts:", {z: fl.unique_shift_property(E, 0, 1, z) for z in range(4)})
print(fl.write_array_csv(E[:2]), end="")
