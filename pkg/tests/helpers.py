"""Independent reference implementations used to check the package.

Nothing here imports the fast-path internals beyond public data types; the
point is to recompute expected values a second way.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from countcsp import CountMatrix, Relation


def fraction_rank(rows) -> int:
    """Rank over the rationals by Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        pivot = None
        for r in range(rank, len(m)):
            if m[r][c]:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][c]
        m[rank] = [v * inv for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def rank_one_block_oracle(matrix: CountMatrix) -> bool:
    """Definitional check: connected components of the nonzero support,
    each component's full row-by-column submatrix of rank one. A connected
    rank-one component is automatically complete, so completeness needs no
    separate test."""
    adj_rows: dict = {}
    adj_cols: dict = {}
    for r, c in matrix.support():
        adj_rows.setdefault(r, set()).add(c)
        adj_cols.setdefault(c, set()).add(r)
    seen_rows: set = set()
    for start in adj_rows:
        if start in seen_rows:
            continue
        rows = {start}
        cols = set()
        frontier = [("r", start)]
        while frontier:
            side, x = frontier.pop()
            if side == "r":
                for c in adj_rows[x]:
                    if c not in cols:
                        cols.add(c)
                        frontier.append(("c", c))
            else:
                for r in adj_cols[x]:
                    if r not in rows:
                        rows.add(r)
                        frontier.append(("r", r))
        seen_rows |= rows
        sub = [[matrix.get(r, c) for c in sorted(cols)] for r in sorted(rows)]
        if fraction_rank(sub) != 1:
            return False
    return True


def brute_pair_counts(solutions, i: int, j: int) -> dict:
    out: dict = {}
    for t in solutions:
        key = (t[i], t[j])
        out[key] = out.get(key, 0) + 1
    return out


def brute_prefix_counts(solutions, i: int, j: int) -> dict:
    """values[y] = number of distinct length-(i+1) prefixes among solutions
    taking value y at position j."""
    seen: dict = {}
    for t in solutions:
        seen.setdefault(t[j], set()).add(t[: i + 1])
    return {y: len(p) for y, p in seen.items()}


def naive_maltsev_closure(rows, op) -> set:
    """Fixpoint closure under coordinatewise application, the slow way."""
    current = {tuple(r) for r in rows}
    while True:
        new = set()
        items = sorted(current)
        for a in items:
            for b in items:
                for c in items:
                    t = tuple(op(x, y, z) for x, y, z in zip(a, b, c))
                    if t not in current:
                        new.add(t)
        if not new:
            return current
        current |= new


def brute_solutions(structure, instance):
    q = structure.domain_size
    checks = [(structure.relation(name), scope) for name, scope in instance.constraints]
    return [
        t
        for t in itertools.product(range(q), repeat=instance.num_vars)
        if all(tuple(t[v] for v in scope) in rel for rel, scope in checks)
    ]


def is_power_automorphism(structure, k: int, mapping) -> bool:
    """Check a candidate map explicitly against every power-relation tuple."""
    q = structure.domain_size
    size = q ** k
    if sorted(mapping) != list(range(size)):
        return False

    def decode(x):
        out = []
        for _ in range(k):
            x, d = divmod(x, q)
            out.append(d)
        return tuple(reversed(out))

    def encode(digs):
        x = 0
        for d in digs:
            x = x * q + d
        return x

    for rel in structure.relations.values():
        for choice in itertools.product(list(rel), repeat=k):
            elems = [encode([choice[d][p] for d in range(k)]) for p in range(rel.arity)]
            image = [mapping[e] for e in elems]
            digs = [decode(e) for e in image]
            for d in range(k):
                if tuple(s[d] for s in digs) not in rel:
                    return False
    return True
