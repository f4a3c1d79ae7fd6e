"""Exact counting without enumerating a single solution.

The counter sweeps coordinate pairs, quotients each stage's prefix-count
matrix by two congruences, reconstructs the quotient from its margins, and
reads the final count off the last column sums. Everything is exact integer
arithmetic, so astronomically large counts are fine.

Run:  python3 demos/04_counting.py
"""

from countcsp import Instance, NotBalancedError, count, find_maltsev, oracle_count
from countcsp.fixtures import rank_defect_structure, xor3_structure

st = xor3_structure()
phi = find_maltsev(st)

inst = Instance(4, [("XOR3", (0, 1, 2)), ("XOR3", (1, 2, 3))])
print("fast count:", count(st, phi, inst))
print("brute force:", oracle_count(st, inst))

# Unconstrained variables contribute a factor q each, so counts scale far
# past anything enumerable.
big = Instance(200, [("XOR3", (0, 1, 2))])
print("\n200 variables, one constraint:")
print(" ", count(st, phi, big))

# A trace exposes each stage: the pair support, the two congruences, the
# reconstructed quotient matrix, and the stage counts.
trace = []
count(st, phi, inst, verify=True, trace=trace)
for step in trace:
    print(
        "stage (%d,%d): support %d pairs, counts %r"
        % (step.i, step.j, len(step.support), step.counts.values)
    )

# The seven-element language admits a Mal'tsev operation but is not
# balanced. Some instances still count fine; others break the margin
# invariants, and the counter reports that instead of guessing.
hard = rank_defect_structure()
hphi = find_maltsev(hard)
print("\nstraight scope:", count(hard, hphi, Instance(3, [("R", (0, 1, 2))])))
try:
    count(hard, hphi, Instance(3, [("R", (1, 2, 0))]))
except NotBalancedError as e:
    print("permuted scope:", e)
