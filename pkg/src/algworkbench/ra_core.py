"""Finite relation-algebra atom structures.

Convention used everywhere in the package: a triple ``(a, b, c)`` is
*consistent* iff ``c <= a ; b``. Builders that think in other orientations
normalise to this one before handing back an :class:`RaAtomStructure`.

Atoms are dense integers ``0..N-1``; readable names live in ``names``.
Structures up to :data:`DENSE_LIMIT` atoms carry a dense boolean tensor;
larger ones carry a vectorised rule ``rule(a, b, c) -> bool array``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BudgetExceeded, StructuralError
from .kernels import cycle_law_violations

DENSE_LIMIT = 256
EXPLICIT_CARRIER_BUDGET = 16
SCHEMA_VERSION = 1

# named rules a JSON document may reference instead of listing triples
RULES: dict[str, Callable[..., "RaAtomStructure"]] = {}


def register_rule(name):
    def deco(fn):
        RULES[name] = fn
        return fn

    return deco


@dataclass(frozen=True, eq=False)
class RaAtomStructure:
    names: tuple
    identities: frozenset
    converse: np.ndarray
    cons: Optional[np.ndarray] = None
    rule: Optional[Callable] = None
    source: Optional[dict] = None  # {"rule": name, "params": {...}} when built from a named rule
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.names)
        conv = np.asarray(self.converse)
        if conv.shape != (n,):
            raise StructuralError(f"converse map has length {conv.shape}, expected {n}")
        if n and (conv.min() < 0 or conv.max() >= n):
            raise StructuralError("converse map points outside the atom range")
        bad = [e for e in self.identities if not 0 <= e < n]
        if bad:
            raise StructuralError(f"identity ids out of range: {bad}")
        if self.cons is None and self.rule is None:
            raise StructuralError("need either a dense triple table or a rule")
        if self.cons is not None and self.cons.shape != (n, n, n):
            raise StructuralError(f"triple table has shape {self.cons.shape}, expected {(n, n, n)}")

    @property
    def size(self):
        return len(self.names)

    def atoms(self):
        return range(self.size)

    def is_identity(self, a):
        return a in self.identities

    def conv(self, a):
        return int(self.converse[a])

    def consistent(self, a, b, c):
        self._check_atom(a, b, c)
        if self.cons is not None:
            return bool(self.cons[a, b, c])
        return bool(self.rule(np.array([a]), np.array([b]), np.array([c]))[0])

    def consistent_many(self, a, b, c):
        a, b, c = np.broadcast_arrays(np.asarray(a), np.asarray(b), np.asarray(c))
        if self.cons is not None:
            return self.cons[a, b, c]
        return np.asarray(self.rule(a, b, c), dtype=bool)

    def dense(self, limit=DENSE_LIMIT):
        """Dense triple table, materialising the rule if needed."""
        if self.cons is not None:
            return self.cons
        n = self.size
        if n > limit:
            raise BudgetExceeded(f"{n} atoms exceed the dense-table limit {limit}", n, limit)
        a, b, c = np.indices((n, n, n))
        return self.consistent_many(a, b, c)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise StructuralError(f"unknown atom {name!r}") from None

    def _check_atom(self, *atoms):
        for a in atoms:
            if not (isinstance(a, (int, np.integer)) and 0 <= a < self.size):
                raise StructuralError(f"unknown atom id {a!r}")


def from_triples(names, identities, converse, triples, source=None, meta=None):
    n = len(names)
    cons = np.zeros((n, n, n), dtype=bool)
    t = np.asarray(list(triples), dtype=np.int64).reshape(-1, 3)
    if t.size and (t.min() < 0 or t.max() >= n):
        raise StructuralError("triple references an unknown atom")
    cons[t[:, 0], t[:, 1], t[:, 2]] = True
    return RaAtomStructure(tuple(names), frozenset(identities), np.asarray(converse, dtype=np.int64),
                           cons=cons, source=source, meta=meta or {})


def from_rule(names, identities, converse, rule, source=None, meta=None):
    """Build from a vectorised rule; materialised densely when small enough."""
    names = tuple(names)
    conv = np.asarray(converse, dtype=np.int64)
    s = RaAtomStructure(names, frozenset(identities), conv, rule=rule, source=source, meta=meta or {})
    if len(names) <= DENSE_LIMIT:
        return RaAtomStructure(names, s.identities, conv, cons=s.dense(), rule=rule,
                               source=source, meta=s.meta)
    return s


def one_atom():
    return from_triples(["1'"], [0], [0], [(0, 0, 0)])


def two_atom():
    """Atoms 1' and a, with a self-converse and a;a = 1' + a."""
    return from_triples(["1'", "a"], [0], [0, 1], [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)])


# --------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    law: str
    witness: tuple

    def as_dict(self):
        return {"law": self.law, "witness": list(self.witness)}


@dataclass
class ValidationReport:
    violations: list
    checked_triples: int = 0
    total_violations: int = 0

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def laws(self):
        return sorted({v.law for v in self.violations})


def validate_atom_structure(S: RaAtomStructure, limit=64) -> ValidationReport:
    """Check the converse, identity and Peircean cycle laws over every triple.

    Pure function; repeated calls give equal reports.
    """
    n = S.size
    if n == 0:
        raise StructuralError("atom structure is empty")
    conv = np.asarray(S.converse, dtype=np.int64)
    out = []
    total = 0
    for a in range(n):
        if conv[conv[a]] != a:
            out.append(Violation("converse-involution", (a,)))
            total += 1
    if not S.identities:
        out.append(Violation("identity-exists", ()))
        total += 1

    cons = S.dense(limit=max(DENSE_LIMIT, 1024)) if n <= 1024 else None
    if cons is not None:
        w, k = cycle_law_violations(cons, conv, limit)
        total += k
        out.extend(Violation("cycle-law", tuple(int(v) for v in row)) for row in w)
        ids = np.array(sorted(S.identities), dtype=np.int64)
        # consistent(e, a, b) only when a == b
        sub = cons[ids]
        e_i, a_i, b_i = np.nonzero(sub & ~np.eye(n, dtype=bool)[None])
        total += len(e_i)
        out.extend(Violation("identity-law", (int(ids[e]), int(a), int(b)))
                   for e, a, b in list(zip(e_i, a_i, b_i))[:limit])
        # and every atom is fixed by some identity
        diag = sub[:, np.arange(n), np.arange(n)].any(axis=0)
        missing = np.nonzero(~diag)[0]
        total += len(missing)
        out.extend(Violation("identity-law", (None, int(a), int(a))) for a in missing[:limit])
    else:
        total += _validate_by_rule(S, conv, out, limit)
    return ValidationReport(out[:max(limit, 1) * 4], checked_triples=n ** 3, total_violations=total)


def _validate_by_rule(S, conv, out, limit):
    n = S.size
    ids = sorted(S.identities)
    total = 0
    b, c = np.indices((n, n))
    b = b.ravel()
    c = c.ravel()
    for a in range(n):
        aa = np.full_like(b, a)
        v = S.consistent_many(aa, b, c)
        p1 = S.consistent_many(np.full_like(b, conv[a]), c, b)
        p2 = S.consistent_many(c, conv[b], aa)
        bad = np.nonzero((v != p1) | (v != p2))[0]
        total += len(bad)
        for i in bad[: max(0, limit - len(out))]:
            out.append(Violation("cycle-law", (a, int(b[i]), int(c[i]))))
        if a in ids:
            bad = np.nonzero(v & (b != c))[0]
            total += len(bad)
            for i in bad[: max(0, limit - len(out))]:
                out.append(Violation("identity-law", (a, int(b[i]), int(c[i]))))
    for a in range(n):
        if not any(S.consistent(e, a, a) for e in ids):
            out.append(Violation("identity-law", (None, a, a)))
            total += 1
    return total


def compose_atoms(S: RaAtomStructure, a, b) -> frozenset:
    S._check_atom(a, b)
    if S.cons is not None:
        return frozenset(int(c) for c in np.nonzero(S.cons[a, b])[0])
    cs = np.arange(S.size)
    hit = S.consistent_many(np.full_like(cs, a), np.full_like(cs, b), cs)
    return frozenset(int(c) for c in np.nonzero(hit)[0])


# --------------------------------------------------------------------------
# complex algebra on bitmask elements


class FiniteRa:
    """Complex algebra of an atom structure.

    Elements are Python ints used as atom bitmasks. The carrier is only
    enumerable when the atom count is within ``budget``; beyond that the
    algebra still works on individual elements (lazy mode) unless
    ``lazy=False``, in which case construction is refused.
    """

    def __init__(self, S: RaAtomStructure, budget=EXPLICIT_CARRIER_BUDGET, lazy=True):
        if S.size > budget and not lazy:
            raise BudgetExceeded(f"complex algebra on {S.size} atoms has 2^{S.size} elements; "
                                 f"explicit budget is {budget} atoms", S.size, budget)
        self.S = S
        self.budget = budget
        n = S.size
        self.top = (1 << n) - 1
        self.bottom = 0
        self.identity = sum(1 << e for e in S.identities)
        self._atom_comp = {}

    def atom(self, a):
        return 1 << a

    def element(self, atoms):
        x = 0
        for a in atoms:
            x |= 1 << a
        return x

    def atoms_of(self, x):
        out = []
        a = 0
        while x:
            if x & 1:
                out.append(a)
            x >>= 1
            a += 1
        return out

    def join(self, x, y):
        return x | y

    def meet(self, x, y):
        return x & y

    def complement(self, x):
        return self.top & ~x

    def _ab(self, a, b):
        key = (a, b)
        r = self._atom_comp.get(key)
        if r is None:
            r = self.element(compose_atoms(self.S, a, b))
            self._atom_comp[key] = r
        return r

    def compose(self, x, y):
        out = 0
        ys = self.atoms_of(y)
        for a in self.atoms_of(x):
            for b in ys:
                out |= self._ab(a, b)
        return out

    def converse(self, x):
        return self.element(self.S.conv(a) for a in self.atoms_of(x))

    def elements(self):
        if self.S.size > self.budget:
            raise BudgetExceeded(f"carrier of 2^{self.S.size} elements exceeds budget", self.S.size, self.budget)
        return range(self.top + 1)


def complex_algebra(S, budget=EXPLICIT_CARRIER_BUDGET, lazy=True):
    return FiniteRa(S, budget=budget, lazy=lazy)


# --------------------------------------------------------------------------
# JSON


def to_json_dict(S: RaAtomStructure, explicit=False):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "ra_atom_structure",
        "atoms": list(S.names),
        "identities": sorted(int(e) for e in S.identities),
        "converse": [int(c) for c in S.converse],
    }
    if S.source is not None and not explicit:
        doc["consistent"] = S.source
    else:
        cons = S.dense(limit=1024)
        doc["consistent"] = [[int(a), int(b), int(c)] for a, b, c in np.argwhere(cons)]
    return doc


def from_json_dict(doc):
    try:
        names, ids, conv, cons = doc["atoms"], doc["identities"], doc["converse"], doc["consistent"]
    except KeyError as e:
        raise StructuralError(f"atom-structure document lacks field {e}") from None
    if len(conv) != len(names):
        raise StructuralError("converse map is not total")
    if isinstance(cons, dict):
        from . import constructions  # noqa: F401  (registers the named rules)

        name = cons.get("rule")
        if name not in RULES:
            raise StructuralError(f"unknown rule {name!r}")
        S = RULES[name](**cons.get("params", {}))
        if list(S.names) != list(names):
            raise StructuralError("rule document atom list disagrees with the rule's output")
        return S
    return from_triples(names, ids, conv, cons)


def dumps(S, explicit=False):
    return json.dumps(to_json_dict(S, explicit=explicit), sort_keys=True)


def loads(text):
    return from_json_dict(json.loads(text))
