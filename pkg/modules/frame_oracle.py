"""
Brute-force oracle for finite frames.

Everything here works on explicit tables: a FiniteFrame is a list of element
labels with numpy order, meet and join tables. Free frames on a handful of
generators are built as the up-sets of the subset lattice (each element is a
bitmask over subsets), congruences are closed by union-find, and quotients are
taken class by class. The tables are the independent reference that the
symbolic cover and positivity deciders are checked against.
"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from modules import config
from modules.cantor_spaces import words
from modules.error_handler import (GeneratorMismatchError, OracleSizeError,
                                   UnsupportedOperationError)
from modules.generators import GeneratorId, PrefixGenerator
from modules.machines import FormalMachine, RelationKind
from modules.space_interface import SpaceKind
from modules.space_registry import SpaceRef, get_space


def _name(g) -> str:
    return g.to_text() if isinstance(g, GeneratorId) else str(g)


def _popcount(n: int) -> int:
    return bin(n).count("1")


class FiniteFrame:
    """
    Finite distributive lattice given by tables.

    Args:
        labels: One display label per element
        leq: Boolean matrix, leq[a, b] iff a <= b
        meet, join: Integer tables; computed from leq when omitted
        generators: Generator (or name) -> element index
        validate: Check the lattice and distributive laws on construction

    Raises:
        ValueError: If validate is set and a law fails
    """

    def __init__(self, labels: Sequence[str], leq: np.ndarray,
                 meet: Optional[np.ndarray] = None, join: Optional[np.ndarray] = None,
                 generators: Optional[Dict[Hashable, int]] = None, validate: bool = True):
        self.labels: List[str] = list(labels)
        self.leq = np.asarray(leq, dtype=bool)
        n = len(self.labels)
        if self.leq.shape != (n, n):
            raise ValueError(f"order matrix has shape {self.leq.shape}, expected {(n, n)}")
        self.meet = np.asarray(meet, dtype=np.int64) if meet is not None else self._bound_table(lower=True)
        self.join = np.asarray(join, dtype=np.int64) if join is not None else self._bound_table(lower=False)
        below = self.leq.sum(axis=0)
        self.bottom = int(np.argmin(below))
        self.top = int(np.argmax(below))
        self.generators: Dict[Hashable, int] = dict(generators or {})
        # set on quotients: element of the parent frame -> class index
        self.projection: Optional[np.ndarray] = None
        if validate:
            problems = self.law_violations()
            if problems:
                raise ValueError(f"not a finite frame: {problems[0]}")

    def __len__(self):
        return len(self.labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def _bound_table(self, lower: bool) -> np.ndarray:
        n = self.size
        order = self.leq if lower else self.leq.T
        table = np.full((n, n), -1, dtype=np.int64)
        for a in range(n):
            for b in range(a, n):
                bounds = np.flatnonzero(order[:, a] & order[:, b])
                # the greatest lower bound is the bound above every other bound
                best = [c for c in bounds if order[bounds, c].all()]
                if len(best) != 1:
                    kind = "meet" if lower else "join"
                    raise ValueError(f"{self.labels[a]} and {self.labels[b]} have no {kind}")
                table[a, b] = table[b, a] = best[0]
        return table

    def law_violations(self) -> List[str]:
        """Every failed lattice or distributive law, as text (empty when all hold)"""
        n = self.size
        leq, meet, join = self.leq, self.meet, self.join
        idx = np.arange(n)
        problems = []
        if n == 0:
            return ["frame has no elements"]
        if not leq[idx, idx].all():
            problems.append("order is not reflexive")
        if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
            problems.append("order is not antisymmetric")
        if ((leq.astype(np.int64) @ leq.astype(np.int64) > 0) & ~leq).any():
            problems.append("order is not transitive")
        if not (leq[meet, idx[:, None]].all() and leq[meet, idx[None, :]].all()):
            problems.append("meet is not a lower bound")
        if not (leq[idx[:, None], join].all() and leq[idx[None, :], join].all()):
            problems.append("join is not an upper bound")
        lower = leq[:, :, None] & leq[:, None, :]
        if (lower & ~leq[:, meet]).any():
            problems.append("meet is not the greatest lower bound")
        upper = leq.T[:, :, None] & leq.T[:, None, :]
        if (upper & ~leq[join].transpose(2, 0, 1)).any():
            problems.append("join is not the least upper bound")
        if not (leq[self.bottom].all() and leq[:, self.top].all()):
            problems.append("bottom or top is not extremal")
        lhs = meet[idx[:, None, None], join[None, :, :]]
        rhs = join[meet[:, :, None], meet[:, None, :]]
        if (lhs != rhs).any():
            problems.append("meet does not distribute over join")
        return problems

    def up_masks(self) -> List[int]:
        """For each element, the bitmask of elements above it"""
        return [int(sum(1 << int(b) for b in np.flatnonzero(self.leq[a]))) for a in range(self.size)]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def __repr__(self):
        return f"<FiniteFrame {self.size} elements>"


@dataclass
class Congruence:
    """Partition of a frame's elements, as a class id per element"""
    frame: FiniteFrame
    class_of: np.ndarray

    @classmethod
    def identity(cls, frame: FiniteFrame) -> "Congruence":
        return cls(frame, np.arange(frame.size))

    @classmethod
    def total(cls, frame: FiniteFrame) -> "Congruence":
        return cls(frame, np.zeros(frame.size, dtype=np.int64))

    @property
    def num_classes(self) -> int:
        return len(set(self.class_of.tolist()))

    def classes(self) -> List[FrozenSet[int]]:
        groups: Dict[int, set] = {}
        for a, c in enumerate(self.class_of.tolist()):
            groups.setdefault(c, set()).add(a)
        return sorted((frozenset(s) for s in groups.values()), key=min)

    def same(self, a: int, b: int) -> bool:
        return bool(self.class_of[a] == self.class_of[b])

    def is_congruence(self) -> bool:
        """Classes are compatible with meet and join"""
        cls_ = self.class_of
        for table in (self.frame.meet, self.frame.join):
            image = cls_[table]
            seen: Dict[Tuple[int, int], int] = {}
            for a in range(self.frame.size):
                for b in range(self.frame.size):
                    key = (cls_[a], cls_[b])
                    if seen.setdefault(key, image[a, b]) != image[a, b]:
                        return False
        return True

    def refines(self, other: "Congruence") -> bool:
        """Every class of self lies inside a class of other"""
        mapping: Dict[int, int] = {}
        for mine, theirs in zip(self.class_of.tolist(), other.class_of.tolist()):
            if mapping.setdefault(mine, theirs) != theirs:
                return False
        return True


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def congruence_closure(fr: FiniteFrame, rels: Iterable[Tuple[int, int]]) -> Congruence:
    """
    Least congruence identifying every pair in rels.

    Merges the pairs, then keeps merging a∧x with r∧x and a∨x with r∨x for
    each element a and its class root r until nothing changes.
    """
    n = fr.size
    uf = _UnionFind(n)
    for a, b in rels:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"relation ({a}, {b}) names an element outside 0..{n - 1}")
        uf.union(a, b)
    meet, join = fr.meet.tolist(), fr.join.tolist()
    changed = True
    passes = 0
    while changed:
        changed = False
        passes += 1
        for a in range(n):
            r = uf.find(a)
            if r == a:
                continue
            for x in range(n):
                changed |= uf.union(meet[a][x], meet[r][x])
                changed |= uf.union(join[a][x], join[r][x])
    roots = [uf.find(a) for a in range(n)]
    ids = {r: i for i, r in enumerate(dict.fromkeys(roots))}
    logger.debug(f"congruence closure on {n} elements: {len(ids)} classes after {passes} passes")
    return Congruence(fr, np.array([ids[r] for r in roots], dtype=np.int64))


def quotient_frame(fr: FiniteFrame, c: Congruence) -> FiniteFrame:
    """
    Frame of congruence classes; `projection` on the result maps each element
    of fr to its class.
    """
    classes = c.classes()
    projection = np.zeros(fr.size, dtype=np.int64)
    reps = []
    labels = []
    for i, members in enumerate(classes):
        for a in members:
            projection[a] = i
        reps.append(min(members))
        labels.append(min((fr.labels[a] for a in members), key=lambda s: (len(s), s)))
    reps_arr = np.array(reps, dtype=np.int64)
    meet = projection[fr.meet[np.ix_(reps_arr, reps_arr)]]
    join = projection[fr.join[np.ix_(reps_arr, reps_arr)]]
    k = len(classes)
    leq = meet == np.arange(k)[:, None]
    generators = {g: int(projection[a]) for g, a in fr.generators.items()}
    quotient = FiniteFrame(labels, leq, meet, join, generators=generators)
    quotient.projection = projection
    return quotient


def is_scott_open(fr, U: Iterable[int]) -> bool:
    """
    Scott-openness in a finite poset. Every directed subset of a finite poset
    has a greatest element, so this is exactly being an up-set.
    """
    leq = fr.leq if isinstance(fr, FiniteFrame) else np.asarray(fr, dtype=bool)
    members = np.zeros(leq.shape[0], dtype=bool)
    members[list(U)] = True
    return not (leq[members] & ~members[None, :]).any()


def check_scott_quotient(fr: FiniteFrame, c: Congruence,
                         max_elements: int = config.MAX_SCOTT_ELEMENTS) -> bool:
    """
    Check on every subset U of the quotient that U is Scott-open iff its
    preimage under the class map is Scott-open in fr.

    Raises:
        OracleSizeError: If the quotient has more than max_elements elements
    """
    q = quotient_frame(fr, c)
    if q.size > max_elements:
        raise OracleSizeError(f"quotient has {q.size} elements, Scott check bound is {max_elements}")
    q_up = q.up_masks()
    fr_up = fr.up_masks()
    preimage = [0] * q.size
    for a, cls_ in enumerate(q.projection.tolist()):
        preimage[cls_] |= 1 << a

    def is_up(mask: int, up: List[int]) -> bool:
        a = 0
        while mask >> a:
            if (mask >> a) & 1 and up[a] & ~mask:
                return False
            a += 1
        return True

    for U in range(1 << q.size):
        pre = 0
        for i in range(q.size):
            if (U >> i) & 1:
                pre |= preimage[i]
        if is_up(U, q_up) != is_up(pre, fr_up):
            return False
    return True


# --- constructions ---------------------------------------------------------

def _frame_from_sets(masks: Iterable[int], label_of, generators: Dict[Hashable, int] = None,
                     validate: bool = True) -> FiniteFrame:
    """Frame of a family of bitmasks closed under & and |, ordered by inclusion"""
    ordered = sorted(set(masks), key=lambda m: (_popcount(m), m))
    where = {m: i for i, m in enumerate(ordered)}
    n = len(ordered)
    meet = np.empty((n, n), dtype=np.int64)
    join = np.empty((n, n), dtype=np.int64)
    leq = np.empty((n, n), dtype=bool)
    for i, a in enumerate(ordered):
        for j, b in enumerate(ordered):
            meet[i, j] = where[a & b]
            join[i, j] = where[a | b]
            leq[i, j] = a & ~b == 0
    gens = {g: where[m] for g, m in (generators or {}).items()}
    return FiniteFrame([label_of(m) for m in ordered], leq, meet, join, generators=gens, validate=validate)


def _union_closure(seeds: Iterable[int]) -> set:
    family = {0}
    for s in seeds:
        family |= {f | s for f in family}
    return family


def free_frame(G0: Sequence, max_generators: int = config.MAX_FREE_GENERATORS) -> FiniteFrame:
    """
    Free frame on the generators G0: down-sets of (finite subsets of G0, ⊇),
    with g read as the principal down-set of {g}.

    Raises:
        OracleSizeError: If G0 has more than max_generators generators
    """
    G0 = list(G0)
    k = len(G0)
    if k > max_generators:
        raise OracleSizeError(f"free frame on {k} generators exceeds the bound of {max_generators}")
    if len(set(G0)) != k:
        raise ValueError("free frame generators must be distinct")
    subsets = range(1 << k)
    names = [_name(g) for g in G0]

    def principal(S: int) -> int:
        return sum(1 << T for T in subsets if T & S == S)

    def label_of(mask: int) -> str:
        members = [S for S in subsets if (mask >> S) & 1]
        minimal = [S for S in members if not any(T != S and T & S == T for T in members)]
        if not minimal:
            return "F"
        parts = []
        for S in sorted(minimal, key=lambda S: (_popcount(S), S)):
            chosen = [names[i] for i in range(k) if (S >> i) & 1]
            parts.append(" & ".join(chosen) if chosen else "T")
        return " | ".join(parts)

    upsets = _union_closure(principal(S) for S in subsets)
    frame = _frame_from_sets(upsets, label_of, {g: principal(1 << i) for i, g in enumerate(G0)})
    logger.debug(f"free frame on {k} generators: {frame.size} elements")
    return frame


def poset_closure(n: int, pairs: Iterable[Tuple[int, int]]) -> np.ndarray:
    """Reflexive-transitive closure of the pairs (a <= b) on 0..n-1"""
    leq = np.eye(n, dtype=bool)
    for a, b in pairs:
        leq[a, b] = True
    for k in range(n):
        leq |= leq[:, k:k + 1] & leq[k:k + 1, :]
    if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
        raise ValueError("pairs contain a cycle")
    return leq


def downset_frame(labels: Sequence[str], leq: np.ndarray, max_points: int = 12) -> FiniteFrame:
    """
    Lattice of down-sets of a finite poset.

    Raises:
        OracleSizeError: If the poset has more than max_points points
    """
    leq = np.asarray(leq, dtype=bool)
    n = len(labels)
    if n > max_points:
        raise OracleSizeError(f"down-set lattice of {n} points exceeds the bound of {max_points}")
    below = [sum(1 << b for b in range(n) if leq[b, a]) for a in range(n)]
    downsets = [m for m in range(1 << n) if all(below[a] & ~m == 0 for a in range(n) if (m >> a) & 1)]

    def label_of(mask: int) -> str:
        members = [labels[a] for a in range(n) if (mask >> a) & 1]
        return "{" + ",".join(members) + "}"

    return _frame_from_sets(downsets, label_of)


def poset_frame(G0: Sequence, leq: np.ndarray,
                max_generators: int = config.MAX_FREE_GENERATORS) -> FiniteFrame:
    """Free frame on the poset (G0, leq): the free frame with g = g ∧ h for every g <= h"""
    free = free_frame(G0, max_generators)
    G0 = list(G0)
    pairs = []
    for i, g in enumerate(G0):
        for j, h in enumerate(G0):
            if i != j and leq[i, j]:
                a, b = free.generators[g], free.generators[h]
                pairs.append((a, int(free.meet[a, b])))
    return quotient_frame(free, congruence_closure(free, pairs))


def denote(fr: FiniteFrame, m: FormalMachine) -> int:
    """
    Element of fr denoted by a formal machine.

    Raises:
        GeneratorMismatchError: If m uses a generator fr does not interpret
    """
    result = fr.bottom
    for branch in m.branches:
        value = fr.top
        for g in branch.generators:
            if g not in fr.generators:
                raise GeneratorMismatchError(f"generator {g} is not interpreted in this frame")
            value = int(fr.meet[value, fr.generators[g]])
        result = int(fr.join[result, value])
    return result


def _truncated_generators(space, depth: int) -> List[GeneratorId]:
    if space.kind is SpaceKind.CANTOR_DIGITS:
        return space.generators(2 * depth)
    if space.kind is SpaceKind.CANTOR_PREFIX:
        return [PrefixGenerator(w) for n in range(depth + 1) for w in words(n)]
    if space.kind is SpaceKind.UNIT_INTERVAL:
        return space.generators(depth)
    raise UnsupportedOperationError(f"no finite truncation for space '{space.name}'")


def presented_frame(space: SpaceRef, depth: int, closure: bool = False,
                    max_generators: int = config.MAX_FREE_GENERATORS) -> FiniteFrame:
    """
    Quotient of the free frame on a truncation of the space's generators by
    the space's own relations over them.

    depth counts digit pairs for cantor-digits, the longest word for
    cantor-prefix and generators for the interval. Relations mentioning
    generators outside the truncation are dropped. With closure set only the
    relations with F on one side are used.
    """
    sp = get_space(space)
    gens = _truncated_generators(sp, depth)
    free = free_frame(gens, max_generators)
    allowed = set(gens)
    pairs = []
    for rel in sp.relations(depth):
        if not (rel.lhs.generators | rel.rhs.generators) <= allowed:
            continue
        if closure and not (rel.lhs.is_bottom or rel.rhs.is_bottom):
            continue
        a, b = denote(free, rel.lhs), denote(free, rel.rhs)
        if rel.kind is RelationKind.INEQUALITY:
            b = int(free.meet[a, b])
        pairs.append((a, b))
    frame = quotient_frame(free, congruence_closure(free, pairs))
    logger.info(f"presented frame {sp.name} depth {depth}{' (closure)' if closure else ''}: "
                f"{frame.size} elements from {len(pairs)} relations")
    return frame


def to_dot(fr: FiniteFrame, name: str = "frame") -> str:
    """Hasse diagram in DOT format, edges pointing upwards"""
    n = fr.size
    strict = fr.leq & ~np.eye(n, dtype=bool)
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for a, label in enumerate(fr.labels):
        escaped = label.replace('"', '\\"')
        lines.append(f'  n{a} [label="{escaped}"];')
    for a in range(n):
        for b in np.flatnonzero(strict[a]):
            between = strict[a] & strict[:, b]
            if not between.any():
                lines.append(f"  n{a} -> n{int(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
