"""Corner configurations, multicorrelation sequences and the simplex hypergraph.

Functions on ``G^k`` are numpy arrays of shape ``(n,) * k`` (row-major, the
first coordinate ``a_1`` is axis 0).  Coordinates of the actions are 1-based
to match the usual ``T_1, ..., T_k`` numbering; array axes are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, ResourceCapError
from .groups import Group

# max |G| per k for O(|G|^{k+1}) enumeration
ENUMERATION_CAPS = {1: 5040, 2: 2200, 3: 60}
GENERIC_CAP = 10**7  # for k >= 4: |G|^{k+1} limit


def check_cap(n: int, k: int) -> None:
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    cap = ENUMERATION_CAPS.get(k)
    if cap is not None:
        if n > cap:
            raise ResourceCapError(f"|G| = {n} exceeds the k={k} enumeration cap {cap}")
    elif n ** (k + 1) > GENERIC_CAP:
        raise ResourceCapError(f"|G|^(k+1) = {n}^{k + 1} exceeds {GENERIC_CAP}")


@dataclass(frozen=True, eq=False)
class SubsetK:
    """Subset of ``G^k`` stored as a boolean array of shape ``(n,) * k``."""

    indicator: np.ndarray

    def __post_init__(self):
        ind = np.asarray(self.indicator)
        if ind.ndim < 1 or len(set(ind.shape)) != 1:
            raise InvalidInputError(f"subset indicator must have shape (n,)*k, got {ind.shape}")
        if ind.dtype != np.bool_:
            ind = ind.astype(bool)
        ind.setflags(write=False)
        object.__setattr__(self, "indicator", ind)

    @property
    def k(self) -> int:
        return self.indicator.ndim

    @property
    def n(self) -> int:
        return self.indicator.shape[0]

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.indicator))

    @property
    def density(self) -> Fraction:
        return Fraction(self.size, self.n**self.k)

    def as_function(self) -> FunctionGk:
        return FunctionGk(self.indicator.astype(float), 1.0)


@dataclass(frozen=True, eq=False)
class FunctionGk:
    """Real function on ``G^k`` with a declared pointwise bound."""

    values: np.ndarray
    bound: float = 1.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim < 1 or len(set(vals.shape)) != 1:
            raise InvalidInputError(f"function values must have shape (n,)*k, got {vals.shape}")
        if vals.size and np.abs(vals).max() > self.bound + 1e-12:
            raise InvalidInputError(f"values exceed declared bound {self.bound}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return self.values.ndim

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass
class CorrelationSeries:
    """The values ``c_g`` for every g, with mean and total variation."""

    values: np.ndarray
    mean: float
    tv: float
    k: int
    label: str = ""
    counts: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_values(cls, values: np.ndarray, k: int, label: str = "") -> CorrelationSeries:
        values = np.asarray(values, dtype=float)
        n = len(values)
        mean = math.fsum(values.tolist()) / n
        tv = math.fsum(np.abs(values - mean).tolist()) / n
        return cls(values, mean, tv, k, label)

    @classmethod
    def from_counts(cls, counts: np.ndarray, k: int, label: str = "") -> CorrelationSeries:
        """Exact statistics from per-g integer counts ``c_g * n^k``."""
        counts = np.asarray(counts, dtype=np.int64)
        n = len(counts)
        total = int(counts.sum())
        nk = n**k
        mean = total / (n * nk)
        # c_g - mean = (n*count_g - total) / n^(k+1)
        dev = sum(abs(n * int(c) - total) for c in counts)
        tv = dev / n ** (k + 2)
        return cls(counts / nk, mean, tv, k, label, counts)

    @property
    def total_count(self) -> int | None:
        return None if self.counts is None else int(self.counts.sum())


# --------------------------------------------------------------------------
# actions on single points


def _check_point(G: Group, p: Sequence[int]) -> tuple[int, ...]:
    p = tuple(int(v) for v in p)
    if not p or any(not 0 <= v < G.order for v in p):
        raise InvalidInputError(f"invalid point {p} for {G.label}")
    return p


def apply_T(G: Group, i: int, g: int, p: Sequence[int]) -> tuple[int, ...]:
    """Left-multiply coordinate i (1-based) of p by g."""
    p = _check_point(G, p)
    if not 1 <= i <= len(p):
        raise InvalidInputError(f"coordinate {i} out of range [1, {len(p)}]")
    q = list(p)
    q[i - 1] = G.mul(g, q[i - 1])
    return tuple(q)


def apply_T_range(G: Group, j: int, i: int, g: int, p: Sequence[int]) -> tuple[int, ...]:
    """Left-multiply coordinates j..i (1-based, inclusive) by g; j > i is the empty range."""
    p = _check_point(G, p)
    k = len(p)
    if j > i:
        if not (1 <= j <= k + 1 and 0 <= i <= k):
            raise InvalidInputError(f"range [{j}, {i}] out of bounds for k={k}")
        return p
    if not (1 <= j and i <= k):
        raise InvalidInputError(f"range [{j}, {i}] out of bounds for k={k}")
    return tuple(G.mul(g, v) if j - 1 <= idx < i else v for idx, v in enumerate(p))


def corner_config(G: Group, g: int, a: Sequence[int]) -> list[tuple[int, ...]]:
    """The k+1 points ``T_{[1,i]}^g a`` for i = 0..k (duplicates kept)."""
    a = _check_point(G, a)
    return [apply_T_range(G, 1, i, g, a) for i in range(len(a) + 1)]


# --------------------------------------------------------------------------
# change of variables


def cov_forward(G: Group, g: int, a: Sequence[int]) -> tuple[int, ...]:
    """``(g, a) -> (g a_1, a_1^-1 a_2, ..., a_{k-1}^-1 a_k, a_k^-1)``."""
    a = _check_point(G, a)
    x = [G.mul(g, a[0])]
    for prev, nxt in zip(a, a[1:]):
        x.append(G.mul(G.inv(prev), nxt))
    x.append(G.inv(a[-1]))
    return tuple(x)


def cov_inverse(G: Group, x: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    x = _check_point(G, x)
    if len(x) < 2:
        raise InvalidInputError("need k+1 >= 2 coordinates")
    k = len(x) - 1
    a = [0] * k
    a[k - 1] = G.inv(x[k])
    for j in range(k - 2, -1, -1):
        a[j] = G.mul(a[j + 1], G.inv(x[j + 1]))  # x_{j+1} = a_j^-1 a_{j+1}
    g = G.mul(x[0], G.inv(a[0]))
    return g, tuple(a)


def corner_point_from_cov(G: Group, x: Sequence[int], i: int) -> tuple[int, ...]:
    """Corner point i written in the new variables; never reads ``x[i]``."""
    k = len(x) - 1
    return tuple(int(c) for c in _cov_point(G, {j: x[j] for j in range(k + 1) if j != i}, i, k))


def _cov_point(G: Group, xs: dict, i: int, k: int) -> list:
    """Coordinates ``(x_0, x_0 x_1, ..., x_0..x_{i-1}, (x_{i+1}..x_k)^-1, ..., x_k^-1)``.

    ``xs`` maps variable index -> element id or (broadcastable) id array and
    must not contain ``i``.
    """
    T, inv = G.table, G.inverse
    out = []
    acc = None
    for j in range(i):
        acc = xs[j] if acc is None else T[acc, xs[j]]
        out.append(acc)
    suffix = []
    acc = None
    for j in range(k, i, -1):
        acc = xs[j] if acc is None else T[xs[j], acc]
        suffix.append(inv[acc])
    out.extend(reversed(suffix))
    return out


def lift_indices(G: Group, k: int, i: int) -> tuple[np.ndarray, ...]:
    """Index arrays realising ``x_(i) -> T_{[1,i]}^g a`` over the grid of the k kept variables.

    The returned tuple indexes an array on ``G^k`` and yields an array whose
    axes are the variables ``[0, k] \\ {i}`` in increasing order.
    """
    if not 0 <= i <= k:
        raise InvalidInputError(f"lift index {i} out of range [0, {k}]")
    n = G.order
    kept = [j for j in range(k + 1) if j != i]
    xs = {}
    for axis, j in enumerate(kept):
        shape = [1] * k
        shape[axis] = n
        xs[j] = np.arange(n).reshape(shape)
    coords = _cov_point(G, xs, i, k)
    full = (n,) * k
    return tuple(np.broadcast_to(c, full) for c in coords)


# --------------------------------------------------------------------------
# multicorrelation


def translate_axes(arr: np.ndarray, r: np.ndarray, count: int) -> np.ndarray:
    """``arr`` composed with ``T_{[1,count]}^g``, where ``r = G.table[g]``."""
    for axis in range(count):
        arr = np.take(arr, r, axis=axis)
    return arr


def multicorrelation(G: Group, fs: Sequence[FunctionGk], label: str = "") -> CorrelationSeries:
    """``c_g`` = average over a in G^k of ``prod_i f_i(T_{[1,i]}^g a)``.

    Summation order is fixed: products are summed along the last axis, and
    the row sums are combined with ``math.fsum`` (exactly rounded), so the
    result does not depend on how the g loop is scheduled.
    """
    k = _check_functions(G, fs)
    check_cap(G.order, k)
    vals = [f.values for f in fs]
    n = G.order
    out = np.empty(n)
    letters = "abcdefghij"[:k]
    # row sums over the last axis, one array per point of the corner
    spec = ",".join([letters] * (k + 1)) + "->" + letters[:-1]
    for g in range(n):
        r = G.table[g]
        moved = [vals[0]] + [translate_axes(vals[i], r, i) for i in range(1, k + 1)]
        rows = np.einsum(spec, *moved)
        out[g] = math.fsum(np.ravel(rows).tolist()) / n**k
    return CorrelationSeries.from_values(out, k, label or G.label)


def _check_functions(G: Group, fs: Sequence[FunctionGk]) -> int:
    if len(fs) < 2:
        raise InvalidInputError("need k+1 >= 2 functions")
    k = len(fs) - 1
    for f in fs:
        if f.k != k or f.n != G.order:
            raise InvalidInputError(
                f"function of shape {f.values.shape} does not match k={k}, |G|={G.order}")
    return k


def corner_stats(G: Group, A: SubsetK, label: str = "") -> CorrelationSeries:
    """Exact per-g corner counts ``|{a : C(g, a) ⊂ A}|`` via packed bitsets."""
    k = A.k
    n = G.order
    if A.n != n:
        raise InvalidInputError(f"subset over |G|={A.n} used with {G.label}")
    check_cap(n, k)
    ind = A.indicator
    packed = np.packbits(ind, axis=-1)
    counts = np.empty(n, dtype=np.int64)
    for g in range(n):
        r = G.table[g]
        acc = packed.copy()
        moved = packed
        for axis in range(k - 1):  # points 1..k-1 never move the last axis
            moved = np.take(moved, r, axis=axis)
            acc &= moved
        last = np.packbits(np.take(ind, r, axis=k - 1), axis=-1)
        for axis in range(k - 1):
            last = np.take(last, r, axis=axis)
        acc &= last
        counts[g] = int(np.bitwise_count(acc).sum(dtype=np.int64))
    return CorrelationSeries.from_counts(counts, k, label or G.label)


def good_fraction(series: CorrelationSeries, theta: float) -> float:
    """Fraction of g with ``c_g > theta``."""
    if theta < 0:
        raise InvalidInputError("theta must be >= 0")
    return float(np.count_nonzero(series.values > theta)) / len(series.values)


# --------------------------------------------------------------------------
# hypergraph


def hypergraph_edges(G: Group, A: SubsetK) -> list[np.ndarray]:
    """Edge sets ``F_i``, i = 0..k, each a boolean array over the variables ``[0,k] \\ {i}``.

    ``x_(i)`` is an edge iff ``T_{[1,i]}^g a`` lies in A, where (g, a) is
    recovered from x by the change of variables.
    """
    k = A.k
    if A.n != G.order:
        raise InvalidInputError(f"subset over |G|={A.n} used with {G.label}")
    check_cap(G.order, k)
    return [A.indicator[lift_indices(G, k, i)] for i in range(k + 1)]


def count_simplices(edges: Sequence[np.ndarray]) -> int:
    """Number of x in G^{k+1} all of whose coordinate-deleted subtuples are edges."""
    k = len(edges) - 1
    if k < 1 or any(e.ndim != k for e in edges):
        raise InvalidInputError("need k+1 edge arrays of dimension k")
    n = edges[0].shape[0]
    total = 0
    for v in range(n):  # fix x_0, work on the grid of x_1..x_k
        acc = edges[0].copy()
        for i in range(1, k + 1):
            acc &= np.expand_dims(edges[i][v], axis=i - 1)
        total += int(np.count_nonzero(acc))
    return total
