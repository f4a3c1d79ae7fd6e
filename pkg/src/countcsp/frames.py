"""Compact generating sets ("frames") for Mal'tsev-closed solution sets.

A constraint formula over a language preserved by a Mal'tsev operation phi
has a solution set R closed under coordinatewise phi. R can be exponentially
large, but it is always generated under phi by a frame: a sub-relation F
that (a) hits every value of every coordinate projection of R, and (b) for
each position i carries, per class of the "shares a length-i prefix in R"
equivalence, witness rows with one common prefix. Frames support linear-time
membership tests and can be rebuilt after conjoining one more constraint,
which is how build_frame processes a whole instance without ever
materializing R.

Positions are 0-based throughout. A frame's witness maps (value, position)
to a row index.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .maltsev import MaltsevOp, apply
from .relations import Partition, Relation, partition_from_groups, project


class Frame:
    """Rows of a generating sub-relation plus the witness map.

    The empty frame (no rows) generates the empty relation; an arity-0 frame
    with one empty row represents the relation containing the empty tuple.
    """

    __slots__ = ("arity", "rows", "witness")

    def __init__(self, arity: int, rows: Sequence[tuple], witness: Mapping):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        rows = tuple(tuple(r) for r in rows)
        for r in rows:
            if len(r) != arity:
                raise ValueError("row %r does not have arity %d" % (r, arity))
        witness = dict(witness)
        for (a, i), k in witness.items():
            if not 0 <= i < arity:
                raise ValueError("witness position %d out of range" % i)
            if not 0 <= k < len(rows):
                raise ValueError("witness row index %d out of range" % k)
            if rows[k][i] != a:
                raise ValueError("witness row for (%r, %d) has wrong value" % (a, i))
        self.arity = arity
        self.rows = rows
        self.witness = witness

    def __len__(self) -> int:
        return len(self.rows)

    def is_empty(self) -> bool:
        return not self.rows

    def projection(self, i: int) -> tuple:
        """Sorted values of the generated relation at position i."""
        if not 0 <= i < self.arity:
            raise ValueError("position out of range")
        return tuple(sorted(a for (a, p) in self.witness if p == i))

    def witness_row(self, a: int, i: int) -> tuple:
        return self.rows[self.witness[(a, i)]]

    def position_classes(self, i: int) -> Partition:
        """Classes of the shared-prefix equivalence at position i, read off
        the witness map (equivalent values carry identical witness prefixes)."""
        groups: dict = {}
        for (a, p), k in self.witness.items():
            if p == i:
                groups.setdefault(self.rows[k][:i], []).append(a)
        return Partition.from_classes(groups.values())

    def __repr__(self) -> str:
        return "Frame(arity=%d, rows=%d)" % (self.arity, len(self.rows))


def empty_frame(arity: int) -> Frame:
    return Frame(arity, (), {})


def _maltsev_perms(a: int, b: int, c: int):
    # arrangements of the index multiset {a >= b >= c} whose middle entry
    # differs from both outer ones
    if a == b:
        if b == c:
            return ()
        return ((a, c, a),)
    if b == c:
        return ((b, a, b),)
    return ((a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a))


def closure_project(rows: Iterable[tuple], phi: MaltsevOp, indices) -> list:
    """Close a tuple set under phi, tracking only the projection onto the
    given positions; returns full tuples, one per projection value reached.

    Coordinatewise application commutes with projection, so the loop runs on
    the projected tuples and applies phi to a full carrier only when a new
    projection appears. Seeds are deduplicated on the projection (first one
    kept), and the loop stops early once all q^|indices| projections exist.
    The projection of the result equals the projection of the full closure.
    """
    idx = tuple(sorted(set(indices)))
    if not idx:
        raise ValueError("need at least one projection index")
    table = phi.table
    q = phi.q
    full: list = []
    proj: list = []
    seen: set = set()
    for t in rows:
        p = tuple(t[i] for i in idx)
        if p not in seen:
            seen.add(p)
            full.append(tuple(t))
            proj.append(p)
    limit = q ** len(idx)

    def close() -> None:
        j1 = 1
        while j1 < len(proj):
            if len(proj) >= limit:
                return
            for j2 in range(j1 + 1):
                for j3 in range(j2 + 1):
                    for k1, k2, k3 in _maltsev_perms(j1, j2, j3):
                        pa, pb, pc = proj[k1], proj[k2], proj[k3]
                        u = tuple(
                            table[(x * q + y) * q + z]
                            for x, y, z in zip(pa, pb, pc)
                        )
                        if u not in seen:
                            seen.add(u)
                            full.append(apply(phi, full[k1], full[k2], full[k3]))
                            proj.append(u)
                            if len(proj) >= limit:
                                return
            j1 += 1

    close()
    return full


def span(frame: Frame, phi: MaltsevOp) -> Relation:
    """Materialize the generated relation. Exponential in general; meant for
    small frames, demos, and tests."""
    if frame.arity < 1:
        raise ValueError("span needs positive arity")
    rows = closure_project(frame.rows, phi, range(frame.arity))
    return Relation(frame.arity, rows)


def initial_frame(n: int, q: int) -> Frame:
    """Frame of the full relation D^n: the all-zero row plus one row per
    (position, nonzero value) pair; size n(q-1)+1."""
    if n < 1 or q < 1:
        raise ValueError("need n >= 1 and q >= 1")
    base = (0,) * n
    rows = [base]
    witness = {(0, i): 0 for i in range(n)}
    for i in range(n):
        for a in range(1, q):
            rows.append(base[:i] + (a,) + base[i + 1:])
            witness[(a, i)] = len(rows) - 1
    return Frame(n, rows, witness)


def frame_from_rows(arity: int, rows: Iterable[tuple]) -> Frame:
    """Adopt an explicit tuple set as a frame of the relation it generates.

    Valid only when, at every position, each shared-prefix class has some
    single prefix covering all of its values (true for any strongly
    rectangular relation given all of its rows, and for hand-built frames);
    otherwise raises ValueError.
    """
    rows = sorted(set(tuple(r) for r in rows))
    if not rows:
        return empty_frame(arity)
    for r in rows:
        if len(r) != arity:
            raise ValueError("row %r does not have arity %d" % (r, arity))
    index = {r: k for k, r in enumerate(rows)}
    witness: dict = {}
    for i in range(arity):
        by_prefix: dict = {}
        for r in rows:
            by_prefix.setdefault(r[:i], set()).add(r[i])
        classes = partition_from_groups(by_prefix.values())
        for cls in classes:
            cover = sorted(
                prefix for prefix, vals in by_prefix.items() if vals >= cls
            )
            if not cover:
                raise ValueError(
                    "rows are not a frame: no common prefix covers class %s "
                    "at position %d" % (sorted(cls), i)
                )
            v = cover[0]
            for a in cls:
                witness[(a, i)] = index[min(r for r in rows if r[:i] == v and r[i] == a)]
    return Frame(arity, rows, witness)


def member(frame: Frame, phi: MaltsevOp, t: Sequence[int]) -> bool:
    """Membership in the generated relation by the witness-walk scan.

    Maintains a generated tuple agreeing with t on a growing prefix; at each
    position the two witness rows of the current value and the target value
    share a prefix exactly when the values are exchangeable there, and one
    phi application swaps the target value in without disturbing the prefix.
    """
    t = tuple(t)
    if len(t) != frame.arity:
        raise ValueError("tuple arity mismatch")
    if not frame.rows:
        return False
    if frame.arity == 0:
        return True
    w = frame.witness
    k = w.get((t[0], 0))
    if k is None:
        return False
    cur = frame.rows[k]
    for i in range(1, frame.arity):
        a = t[i]
        if cur[i] == a:
            continue
        ka = w.get((a, i))
        if ka is None:
            return False
        kc = w.get((cur[i], i))
        if kc is None:
            return False
        wa = frame.rows[ka]
        wc = frame.rows[kc]
        if wa[:i] != wc[:i]:
            return False
        cur = apply(phi, cur, wc, wa)
    return True


def shrink_to_small(frame: Frame, phi: MaltsevOp) -> Frame:
    """Same generated relation, at most n(q-1)+1 rows.

    Picks the first row f and rebases every witness in f's class at each
    position onto f's prefix with one phi application; other classes keep
    their original witnesses.
    """
    if frame.is_empty():
        return frame
    n = frame.arity
    if n == 0:
        return Frame(0, ((),), {})
    f = frame.rows[0]
    rows: list = [f]
    seen: dict = {f: 0}
    witness: dict = {}

    def add(row: tuple) -> int:
        k = seen.get(row)
        if k is None:
            k = len(rows)
            rows.append(row)
            seen[row] = k
        return k

    for i in range(n):
        g = frame.witness_row(f[i], i)
        pivot_prefix = g[:i]
        groups: dict = {}
        for (a, p), k in frame.witness.items():
            if p == i:
                groups.setdefault(frame.rows[k][:i], []).append(a)
        for prefix, members in groups.items():
            if prefix == pivot_prefix:
                for a in sorted(members):
                    if a == f[i]:
                        witness[(a, i)] = 0
                    else:
                        h = frame.witness_row(a, i)
                        witness[(a, i)] = add(apply(phi, f, g, h))
            else:
                for a in sorted(members):
                    witness[(a, i)] = add(frame.witness_row(a, i))
    return Frame(n, rows, witness)


def _fix_first(frame: Frame, phi: MaltsevOp, a: int) -> Frame:
    """Frame for the section "first coordinate pinned to a", one arity lower.

    For each later position, the pair closure with position 0 supplies one
    tuple through (a, b) per reachable value b; a shared-prefix class either
    meets the section wholly or not at all, and one phi application moves
    each class witness onto the prefix of the class's in-section tuple.
    """
    n = frame.arity
    if n < 1:
        raise ValueError("nothing to pin in an arity-0 frame")
    if frame.is_empty() or (a, 0) not in frame.witness:
        return empty_frame(n - 1)
    if n == 1:
        return Frame(0, ((),), {})
    rows: list = []
    seen: dict = {}
    witness: dict = {}
    for i in range(1, n):
        present: dict = {}
        for t in closure_project(frame.rows, phi, (0, i)):
            if t[0] == a and t[i] not in present:
                present[t[i]] = t
        groups: dict = {}
        for (b, p), k in frame.witness.items():
            if p == i:
                groups.setdefault(frame.rows[k][:i], []).append(b)
        for members in groups.values():
            hit = sorted(b for b in members if b in present)
            if not hit:
                continue
            t_ab = present[hit[0]]
            g = frame.witness_row(hit[0], i)
            for c in sorted(members):
                if c == hit[0]:
                    w = t_ab[1:]
                else:
                    h = frame.witness_row(c, i)
                    w = apply(phi, t_ab, g, h)[1:]
                k = seen.get(w)
                if k is None:
                    k = len(rows)
                    rows.append(w)
                    seen[w] = k
                witness[(c, i - 1)] = k
    return Frame(n - 1, rows, witness)


def fix_prefix(frame: Frame, phi: MaltsevOp, values: Sequence[int]) -> Frame:
    """Frame for the relation with its first len(values) coordinates pinned,
    over the remaining coordinates. Empty iff no extension exists."""
    g = frame
    for a in values:
        g = _fix_first(g, phi, a)
    return g


class SectionCache:
    """Memoized prefix sections of one fixed frame.

    Counting and congruence computations pin many nested prefixes of the
    same frame; caching by prefix makes each single-coordinate section pay
    for itself once.
    """

    def __init__(self, frame: Frame, phi: MaltsevOp):
        self.phi = phi
        self._cache: dict = {(): frame}

    def get(self, values: Sequence[int]) -> Frame:
        values = tuple(values)
        f = self._cache.get(values)
        if f is None:
            f = _fix_first(self.get(values[:-1]), self.phi, values[-1])
            self._cache[values] = f
        return f


def collapse_scope(relation: Relation, scope: Sequence[int]):
    """Replace repeated scope variables by intersecting with the diagonal:
    the result has distinct variables (in order of first occurrence) and may
    be empty."""
    scope = tuple(scope)
    if len(scope) != relation.arity:
        raise ValueError("scope length does not match relation arity")
    if len(set(scope)) == len(scope):
        return relation, scope
    distinct: list = []
    for v in scope:
        if v not in distinct:
            distinct.append(v)
    pos = {v: k for k, v in enumerate(distinct)}
    kept = []
    for t in relation:
        img: list = [None] * len(distinct)
        ok = True
        for v, x in zip(scope, t):
            k = pos[v]
            if img[k] is None:
                img[k] = x
            elif img[k] != x:
                ok = False
                break
        if ok:
            kept.append(tuple(img))
    return Relation(len(distinct), kept), tuple(distinct)


def add_constraint(frame: Frame, phi: MaltsevOp, relation: Relation, scope) -> Frame:
    """Small frame for (generated relation) AND relation(scope variables).

    Per position i: project the current relation onto scope + {i} and filter
    by the constraint to learn which position-i values survive, then pin the
    prefix of a surviving tuple and redo the filtered projection inside that
    section to harvest one whole shared-prefix class of the conjunction with
    common-prefix witnesses. Repeats until every surviving value has a
    witness, then shrinks.
    """
    n = frame.arity
    relation, scope = collapse_scope(relation, scope)
    for v in scope:
        if not 0 <= v < n:
            raise ValueError("scope variable %d out of range" % v)
    if frame.is_empty() or not relation.tuples:
        return empty_frame(n)
    scope_set = set(scope)
    sections = SectionCache(frame, phi)
    rows: list = []
    seen: dict = {}
    witness: dict = {}
    for i in range(n):
        J = sorted(scope_set | {i})
        sat = sorted(
            t
            for t in closure_project(frame.rows, phi, J)
            if tuple(t[v] for v in scope) in relation
        )
        if not sat:
            return empty_frame(n)
        remaining = {t[i] for t in sat}
        while remaining:
            t = next(tt for tt in sat if tt[i] in remaining)
            sec = sections.get(t[:i])
            Jp = sorted({v - i for v in scope_set if v >= i} | {0})
            prefix = t[:i]
            found: dict = {}
            for s in closure_project(sec.rows, phi, Jp):
                full = prefix + s
                if s[0] not in found and tuple(full[v] for v in scope) in relation:
                    found[s[0]] = full
            if t[i] not in found:
                raise ValueError("inputs violate the frame invariants")
            for a in sorted(found):
                w = found[a]
                k = seen.get(w)
                if k is None:
                    k = len(rows)
                    rows.append(w)
                    seen[w] = k
                witness[(a, i)] = k
            remaining -= set(found)
    return shrink_to_small(Frame(n, rows, witness), phi)


def add_constraint_split(frame: Frame, phi: MaltsevOp, relation: Relation, scope) -> Frame:
    """Add a constraint through its chain of prefix projections: conjoin the
    projection onto the first k scope variables for k = 1..arity. Generates
    the same relation as add_constraint; the intermediate frames differ."""
    relation, scope = collapse_scope(relation, scope)
    g = frame
    for k in range(1, relation.arity + 1):
        if g.is_empty():
            return empty_frame(frame.arity)
        g = add_constraint(g, phi, project(relation, range(k)), scope[:k])
    return g


class Instance:
    """A conjunctive formula: a variable count and (relation name, scope)
    constraints with 0-based, possibly repeating scope variables."""

    __slots__ = ("num_vars", "constraints")

    def __init__(self, num_vars: int, constraints: Iterable = ()):
        if num_vars < 0:
            raise ValueError("variable count must be nonnegative")
        cons = []
        for name, scope in constraints:
            scope = tuple(scope)
            if not scope:
                raise ValueError("empty scope")
            for v in scope:
                if not 0 <= v < num_vars:
                    raise ValueError("scope variable %d out of range" % v)
            cons.append((str(name), scope))
        self.num_vars = num_vars
        self.constraints = tuple(cons)

    def constrained_variables(self) -> tuple:
        return tuple(sorted({v for _, scope in self.constraints for v in scope}))

    def __eq__(self, other):
        return (
            isinstance(other, Instance)
            and self.num_vars == other.num_vars
            and self.constraints == other.constraints
        )

    def __repr__(self):
        return "Instance(vars=%d, constraints=%d)" % (
            self.num_vars,
            len(self.constraints),
        )


def build_frame(structure, phi: MaltsevOp, instance: Instance, split: bool = False) -> Frame:
    """Small frame for the instance's solution set, built one constraint at
    a time in file order."""
    n = instance.num_vars
    if n == 0:
        return Frame(0, ((),), {})
    f = initial_frame(n, structure.domain_size)
    add = add_constraint_split if split else add_constraint
    for name, scope in instance.constraints:
        f = add(f, phi, structure.relation(name), scope)
        if f.is_empty():
            return f
    return f


def dump(frame: Frame) -> str:
    """Textual form: a header, the rows, then the witness triples.

    Positions are 0-based and row indices refer to the emitted row order.
    """
    lines = ["frame n=%d rows=%d" % (frame.arity, len(frame.rows))]
    for r in frame.rows:
        lines.append(" ".join(str(v) for v in r))
    for (a, i), k in sorted(frame.witness.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        lines.append("witness a=%d i=%d row=%d" % (a, i, k))
    return "\n".join(lines) + "\n"
