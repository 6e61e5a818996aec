"""Finite groups as dense multiplication tables.

Every element is an integer id in ``range(order)``. The whole Cayley table is
precomputed, so ``mul`` is a single array lookup; enumeration code downstream
works with whole rows of the table (``G.table[g]`` is the permutation
``a -> g*a`` of the element ids).

Canonical element orders (fixed, so results are reproducible):

* ``cyclic:n``  -- id ``i`` is the residue ``i``; identity 0.
* ``sym:m``     -- permutations of ``{0..m-1}`` in lexicographic one-line
  notation (the order of ``itertools.permutations``); identity 0.  The product
  ``a*b`` is composition ``a∘b`` (apply ``b`` first).
* ``alt:m``     -- the even permutations, in the same lexicographic order.
* ``sl2:p``     -- matrices ``[[a, b], [c, d]]`` with ``ad - bc = 1`` over
  ``Z/p``, ordered lexicographically by ``(a, b, c, d)``.
* ``prod:(G,H)`` -- pair ``(g, h)`` has id ``g*|H| + h``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, ResourceCapError

MAX_ORDER = 5040
EXHAUSTIVE_ASSOC_LIMIT = 128


@dataclass(frozen=True, eq=False)
class Group:
    """A finite group given by its full multiplication table."""

    label: str
    table: np.ndarray  # table[a, b] = a*b
    inverse: np.ndarray
    identity: int
    names: tuple = field(default=(), repr=False)

    def __post_init__(self):
        self.table.setflags(write=False)
        self.inverse.setflags(write=False)

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def elements(self) -> range:
        return range(self.order)

    def name(self, a: int) -> str:
        if self.names:
            return str(self.names[a])
        return str(a)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def __repr__(self) -> str:
        return f"Group({self.label!r}, order={self.order})"


def _finish(label: str, table: np.ndarray, names=()) -> Group:
    n = table.shape[0]
    table = np.ascontiguousarray(table, dtype=np.int32)
    ident = np.flatnonzero((table == np.arange(n)).all(axis=1))
    if len(ident) != 1:
        raise InvalidInputError(f"{label}: table has no unique identity")
    e = int(ident[0])
    rows, cols = np.nonzero(table == e)
    inverse = np.empty(n, dtype=np.int32)
    inverse[rows] = cols
    return Group(label, table, inverse, e, tuple(names))


def _check_order(n: int, label: str) -> None:
    if n > MAX_ORDER:
        raise ResourceCapError(f"{label}: order {n} exceeds cap {MAX_ORDER}")


def make_cyclic(n: int) -> Group:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidInputError(f"cyclic group needs n >= 1, got {n!r}")
    n = int(n)
    _check_order(n, f"cyclic:{n}")
    idx = np.arange(n)
    return _finish(f"cyclic:{n}", (idx[:, None] + idx[None, :]) % n)


def _permutation_table(perms: np.ndarray, m: int) -> np.ndarray:
    """Composition table for lexicographically sorted one-line permutations."""
    weights = m ** np.arange(m - 1, -1, -1, dtype=np.int64)
    keys = perms.astype(np.int64) @ weights  # increasing, since perms are lex-sorted
    n = len(perms)
    table = np.empty((n, n), dtype=np.int32)
    chunk = max(1, 2_000_000 // max(1, n * m))
    for start in range(0, n, chunk):
        block = perms[start:start + chunk]
        composed = block[:, perms]  # [a, b, i] = a[b[i]] = (a∘b)(i)
        table[start:start + chunk] = np.searchsorted(keys, composed.astype(np.int64) @ weights)
    return table


def _perm_parity(p: Sequence[int]) -> int:
    inversions = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inversions % 2


def make_symmetric(m: int) -> Group:
    if not 1 <= m <= 7:
        raise InvalidInputError(f"sym:m needs 1 <= m <= 7, got {m}")
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int8).reshape(-1, m)
    names = [tuple(int(v) for v in p) for p in perms]
    return _finish(f"sym:{m}", _permutation_table(perms, m), names)


def make_alternating(m: int) -> Group:
    if not 1 <= m <= 7:
        raise InvalidInputError(f"alt:m needs 1 <= m <= 7, got {m}")
    perms = [p for p in itertools.permutations(range(m)) if _perm_parity(p) == 0]
    arr = np.array(perms, dtype=np.int8).reshape(-1, m)
    return _finish(f"alt:{m}", _permutation_table(arr, m), perms)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def make_sl2(p: int) -> Group:
    """SL(2, p) for a prime p <= 17."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise InvalidInputError(f"sl2:p needs a prime p, got {p!r}")
    p = int(p)
    if p > 17:
        raise ResourceCapError(f"sl2:{p}: order {p**3 - p} exceeds cap {MAX_ORDER}")
    quads = np.array(list(itertools.product(range(p), repeat=4)), dtype=np.int64)
    a, b, c, d = quads.T
    mats = quads[(a * d - b * c) % p == 1]
    n = len(mats)
    weights = np.array([p**3, p**2, p, 1], dtype=np.int64)
    keys = mats @ weights
    table = np.empty((n, n), dtype=np.int32)
    a, b, c, d = mats.T
    for i, (x, y, z, w) in enumerate(mats):
        prod = np.stack([x * a + y * c, x * b + y * d, z * a + w * c, z * b + w * d], axis=1) % p
        table[i] = np.searchsorted(keys, prod @ weights)
    names = [((int(x), int(y)), (int(z), int(w))) for x, y, z, w in mats]
    return _finish(f"sl2:{p}", table, names)


def make_product(G: Group, H: Group) -> Group:
    n, m = G.order, H.order
    label = f"prod:({G.label},{H.label})"
    _check_order(n * m, label)
    tg = G.table.astype(np.int64)
    th = H.table.astype(np.int64)
    # id(g, h) = g*m + h; table[(g1,h1),(g2,h2)] = (g1 g2)*m + h1 h2
    table = (tg[:, None, :, None] * m + th[None, :, None, :]).reshape(n * m, n * m)
    names = ()
    if G.names or H.names:
        names = tuple((G.name(g), H.name(h)) for g in range(n) for h in range(m))
    return _finish(label, table, names)


def mul_chain(G: Group, elems: Sequence[int]) -> int:
    """Left-to-right product of ``elems``; the empty product is the identity."""
    acc = G.identity
    for x in elems:
        acc = int(G.table[acc, x])
    return acc


def left_translate(G: Group, g: int, a: np.ndarray) -> np.ndarray:
    """Vectorised ``a -> g*a`` for an array of element ids."""
    return G.table[g][a]


# --------------------------------------------------------------------------
# descriptors


def _split_top(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


@lru_cache(maxsize=32)
def parse_group(desc: str) -> Group:
    """Build a group from a descriptor such as ``sl2:7`` or ``prod:(cyclic:2,alt:4)``."""
    desc = desc.strip().replace(" ", "")
    kind, sep, arg = desc.partition(":")
    if not sep:
        raise InvalidInputError(f"bad group descriptor {desc!r}")
    if kind == "prod":
        if not (arg.startswith("(") and arg.endswith(")")):
            raise InvalidInputError(f"bad product descriptor {desc!r}")
        parts = _split_top(arg[1:-1])
        if len(parts) != 2:
            raise InvalidInputError(f"product takes two factors: {desc!r}")
        return make_product(parse_group(parts[0]), parse_group(parts[1]))
    try:
        n = int(arg)
    except ValueError:
        raise InvalidInputError(f"bad group parameter in {desc!r}") from None
    makers = {
        "cyclic": make_cyclic,
        "sym": make_symmetric,
        "alt": make_alternating,
        "sl2": make_sl2,
    }
    if kind not in makers:
        raise InvalidInputError(f"unknown group family {kind!r}")
    return makers[kind](n)


# --------------------------------------------------------------------------
# axiom checks


@dataclass
class AxiomReport:
    label: str
    order: int
    associative: bool
    exhaustive: bool
    identity: bool
    inverses: bool
    latin_square: bool

    @property
    def ok(self) -> bool:
        return self.associative and self.identity and self.inverses and self.latin_square


def check_axioms(G: Group, samples: int = 10_000, seed: int = 0) -> AxiomReport:
    """Check the group axioms on the table.

    Associativity is checked on every triple when ``order <= 128`` and on
    ``samples`` random triples otherwise.
    """
    T = G.table
    n = G.order
    e = G.identity
    ar = np.arange(n)
    exhaustive = n <= EXHAUSTIVE_ASSOC_LIMIT
    if exhaustive:
        assoc = bool(np.array_equal(T[T], T[:, T]))  # (ab)c vs a(bc), indexed [a,b,c]
    else:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, n, size=(3, samples))
        assoc = bool(np.array_equal(T[T[a, b], c], T[a, T[b, c]]))
    ident = bool(np.array_equal(T[e], ar) and np.array_equal(T[:, e], ar))
    inv = G.inverse
    inverses = bool((T[ar, inv] == e).all() and (T[inv, ar] == e).all())
    latin = bool((np.sort(T, axis=1) == ar).all() and (np.sort(T, axis=0) == ar[:, None]).all())
    return AxiomReport(G.label, n, assoc, exhaustive, ident, inverses, latin)
