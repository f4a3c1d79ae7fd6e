"""Classifying constraint languages: tractable counting or #P-complete.

Run:  python3 demos/05_dichotomy.py
"""

from countcsp import (
    decide_strong_balance,
    find_automorphism,
    patterns,
    refute_balance,
    verdict_to_text,
)
from countcsp.fixtures import (
    even_parity4_structure,
    or_structure,
    rank_defect_structure,
    xor3_structure,
)

# Balance reduces to automorphisms of the sixth power with two prescribed
# point images. Power elements are base-q digit strings.
p = patterns(2, 0, 1, 0, 1)
print("pattern elements:", p.fixed, p.source, p.target)
print("as digit strings:", p.fixed_digits, p.source_digits, p.target_digits)

# The searcher also answers direct questions, like "does the 0/1 swap
# preserve the language?" (it must map every relation tuple to one).
print("\nswap on even-parity-4:", find_automorphism(even_parity4_structure(), 1, {0: 1}))
print("swap on XOR3:", find_automorphism(xor3_structure(), 1, {0: 1}))

# Cheap disproof first: a small formula whose pairwise solution-count
# matrix is not a rank-one block matrix settles hardness immediately.
ref = refute_balance(rank_defect_structure())
print("\nrefuting formula:", ref.formula)
print("matrix:", ref.matrix.to_lists())

# The full decision procedure, on each fixture language.
for name, st in [
    ("XOR3", xor3_structure()),
    ("OR", or_structure()),
    ("seven-element", rank_defect_structure()),
]:
    v = decide_strong_balance(st)
    print("\n%s -> %s (tractable: %s)" % (name, v.kind, v.tractable))
    print(verdict_to_text(v).splitlines()[0:2])
