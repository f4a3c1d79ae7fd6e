"""Finding a Mal'tsev operation, or a certificate that none exists.

Run:  python3 demos/02_maltsev.py
"""

import itertools

from countcsp import (
    apply,
    enumerate_maltsev,
    find_maltsev,
    find_maltsev_with_certificate,
    free_entries,
)
from countcsp.fixtures import or_structure, xor3_structure

st = xor3_structure()

# A Mal'tsev operation satisfies phi(a,b,b) = phi(b,b,a) = a, so only the
# entries with a distinct middle argument are free.
print("free entries at q=2:", free_entries(2))

op = find_maltsev(st)
print("\nXOR3 operation found:")
for a, b, c in itertools.product(range(2), repeat=3):
    print("  phi(%d,%d,%d) = %d" % (a, b, c, op(a, b, c)))

# Coordinatewise application maps solution triples to solutions.
t = apply(op, (0, 0, 0), (0, 1, 1), (1, 1, 0))
print("applied to three XOR3 tuples:", t)

# The search returns the lexicographically least table; enumeration yields
# every preserving completion.
all_ops = list(enumerate_maltsev(st))
print("\npreserving completions:", len(all_ops))
print("search result is the least:", op.table == min(o.table for o in all_ops))

# OR has none, and the refusal comes with a checkable witness: a triple of
# relation tuples whose forced image leaves the relation.
op2, violation = find_maltsev_with_certificate(or_structure())
print("\nOR operation:", op2)
print("violation triple:", violation.triple)
print("forced image outside OR:", violation.image)
