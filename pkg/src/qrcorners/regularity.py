"""Weak regularity decomposition by energy increment.

A function F of k variables (|F| <= 1) is split as F = F_s + F_u where F_s is
the conditional expectation of F on the join of k partitions B_0..B_{k-1},
B_j being constant along coordinate j, and F_u has small box norm.

Each round looks for a witness: fixing the second copies y of all
coordinates in the box-norm expansion of F_u, the factors F_u(x^eps), eps != 0,
group into functions u_j that ignore x_j.  The u_j are quantised into four
level sets which refine B_j; the round is kept only if F_u correlates with the
product of the quantised witnesses by at least ``eps^(2^k) / 2``, which forces
the energy ``||F_s||_2^2`` up by at least the square of that correlation.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boxnorm import box_norm, lift
from .corners import CorrelationSeries, FunctionGk, multicorrelation, translate_axes
from .errors import ConvergenceError, InvalidInputError
from .groups import Group

log = logging.getLogger(__name__)

WITNESS_SAMPLES = 32
LEVEL_EDGES = np.array([-0.5, 0.0, 0.5])
LEVELS = np.array([-0.75, -0.25, 0.25, 0.75])


@dataclass
class CoordinatePartition:
    """Atom labels on the k-variable grid, constant along coordinate ``j``."""

    j: int
    labels: np.ndarray

    @property
    def atom_count(self) -> int:
        return int(self.labels.max()) + 1

    def ignores_coordinate(self) -> bool:
        first = np.take(self.labels, [0], axis=self.j)
        return bool((self.labels == first).all())


@dataclass
class Decomposition:
    F: np.ndarray
    F_s: np.ndarray
    F_u: np.ndarray
    partitions: list[CoordinatePartition]
    iterations: int
    achieved_eps: float
    energies: list[float] = field(default_factory=list)
    correlations: list[float] = field(default_factory=list)

    @property
    def atom_counts(self) -> list[int]:
        return [p.atom_count for p in self.partitions]

    def join_ids(self) -> np.ndarray:
        return _join(self.partitions)


@dataclass
class RankExpansion:
    """``F_s = sum_l coefficient_l * prod_j factors_l[j]``; factor j ignores coordinate j."""

    terms: list[tuple[float, list[np.ndarray]]]

    @property
    def L(self) -> int:
        return len(self.terms)

    def evaluate(self) -> np.ndarray:
        out = None
        for coef, factors in self.terms:
            term = coef * np.prod(np.stack(factors).astype(float), axis=0)
            out = term if out is None else out + term
        return out


def _join(partitions: Sequence[CoordinatePartition]) -> np.ndarray:
    stacked = np.stack([p.labels.ravel() for p in partitions], axis=1)
    _, ids = np.unique(stacked, axis=0, return_inverse=True)
    return ids.reshape(partitions[0].labels.shape)


def conditional_expectation(F: np.ndarray, ids: np.ndarray) -> np.ndarray:
    flat = ids.ravel()
    sums = np.bincount(flat, weights=F.ravel())
    counts = np.bincount(flat)
    return (sums / counts)[flat].reshape(F.shape)


def _witnesses(Fu: np.ndarray, y: Sequence[int]) -> list[np.ndarray]:
    """Functions u_j (ignoring x_j) with E_y E_x Fu * prod_j u_j = ||Fu||^(2^k)."""
    k, n = Fu.ndim, Fu.shape[0]
    full = (n,) * k
    us = [np.ones(full) for _ in range(k)]
    for eps in itertools.product((0, 1), repeat=k):
        if not any(eps):
            continue
        idx = tuple(y[j] if e else slice(None) for j, e in enumerate(eps))
        shape = [1 if e else n for e in eps]
        factor = np.broadcast_to(Fu[idx].reshape(shape), full)
        us[eps.index(1)] = us[eps.index(1)] * factor
    return us


def _quantise(u: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    scale = np.abs(u).max()
    if scale == 0:
        return None
    bins = np.digitize(u / scale, LEVEL_EDGES)
    return bins, LEVELS[bins]


def weak_regularity(F, eps: float, max_iter: int | None = None, seed: int = 0,
                    samples: int = WITNESS_SAMPLES) -> Decomposition:
    """Split F into a structured part and a part with box norm at most ``eps``.

    Raises ConvergenceError (carrying the best decomposition seen) when the
    round budget, default ``ceil(16 / eps^2)``, runs out.
    """
    F = np.asarray(F.values if hasattr(F, "values") else F, dtype=float)
    if not 0 < eps < 1:
        raise InvalidInputError(f"eps must lie in (0, 1), got {eps}")
    if F.ndim < 1 or len(set(F.shape)) != 1:
        raise InvalidInputError(f"need shape (n,)*k, got {F.shape}")
    if np.abs(F).max() > 1 + 1e-12:
        raise InvalidInputError("weak regularity needs |F| <= 1")
    if max_iter is None:
        max_iter = math.ceil(16 / eps**2)
    k, n = F.ndim, F.shape[0]
    rng = np.random.default_rng(seed)
    threshold = eps ** (2**k) / 2

    partitions = [CoordinatePartition(j, np.zeros(F.shape, dtype=np.int64)) for j in range(k)]
    Fs = conditional_expectation(F, _join(partitions))
    energies = [float(np.mean(Fs * Fs))]
    correlations = []
    best = None
    iterations = 0
    while True:
        Fu = F - Fs
        achieved = box_norm(Fu).norm
        current = Decomposition(F, Fs, Fu, partitions, iterations, achieved,
                                list(energies), list(correlations))
        if best is None or achieved < best.achieved_eps:
            best = current
        if achieved <= eps:
            return current
        if iterations >= max_iter:
            raise ConvergenceError(
                f"no decomposition with box norm <= {eps} after {max_iter} rounds "
                f"(best {best.achieved_eps:.4f})", best)
        iterations += 1

        cand = None
        for _ in range(samples):
            y = rng.integers(0, n, size=k)
            quantised = [_quantise(u) for u in _witnesses(Fu, y)]
            if any(q is None for q in quantised):
                continue
            w = np.prod([q[1] for q in quantised], axis=0)
            corr = float(np.mean(Fu * w))
            if cand is None or abs(corr) > abs(cand[0]):
                cand = (corr, [q[0] for q in quantised])
        if cand is None or abs(cand[0]) < threshold:
            log.debug("round %d rejected (best correlation %s)", iterations,
                      None if cand is None else f"{cand[0]:.3e}")
            continue

        corr, bins = cand
        new_parts = []
        for p, b in zip(partitions, bins):
            _, lab = np.unique(p.labels * 4 + b, return_inverse=True)
            new_parts.append(CoordinatePartition(p.j, lab.reshape(F.shape)))
        partitions = new_parts
        Fs = conditional_expectation(F, _join(partitions))
        energies.append(float(np.mean(Fs * Fs)))
        correlations.append(abs(corr))
        log.debug("round %d: corr %.3e, energy %.6f, atoms %s", iterations, corr,
                  energies[-1], [p.atom_count for p in partitions])


def rank_expansion(d: Decomposition) -> RankExpansion:
    """Write F_s as a sum over join atoms of products of per-coordinate atom indicators."""
    ids = d.join_ids().ravel()
    labels = [p.labels.ravel() for p in d.partitions]
    shape = d.F.shape
    terms = []
    for atom in np.unique(ids):
        pos = int(np.flatnonzero(ids == atom)[0])
        coef = float(d.F_s.ravel()[pos])
        factors = [(p.labels == lab[pos]) for p, lab in zip(d.partitions, labels)]
        terms.append((coef, [f.reshape(shape) for f in factors]))
    return RankExpansion(terms)


def inverse_lift_k(G: Group, F) -> FunctionGk:
    """The function f on G^k with ``N_k f = F``: ``f(y) = F(y_1, y_1^-1 y_2, ..., y_{k-1}^-1 y_k)``."""
    F = np.asarray(F.values if hasattr(F, "values") else F, dtype=float)
    k, n = F.ndim, G.order
    if F.shape != (n,) * k:
        raise InvalidInputError(f"need shape {(n,) * k}, got {F.shape}")
    T, inv = G.table, G.inverse
    ys = [np.arange(n).reshape([n if a == j else 1 for a in range(k)]) for j in range(k)]
    coords = [ys[0]] + [T[inv[ys[j]], ys[j + 1]] for j in range(k - 1)]
    vals = F[tuple(np.broadcast_to(c, (n,) * k) for c in coords)]
    bound = max(1.0, float(np.abs(vals).max()) if vals.size else 1.0)
    return FunctionGk(vals, bound)


@dataclass
class InvarianceReport:
    j: int
    invariant: bool
    checked: int
    violating_h: int | None = None


def check_T_range_invariance(G: Group, f: FunctionGk, j: int, exhaustive_limit: int = 12,
                             samples: int = 16, seed: int = 0) -> InvarianceReport:
    """Is ``f ∘ T_{[j+1,k]}^h = f`` for every h?  (0 <= j <= k-1.)"""
    k, n = f.k, G.order
    if not 0 <= j <= k - 1:
        raise InvalidInputError(f"j must lie in [0, {k - 1}], got {j}")
    if n <= exhaustive_limit:
        hs = range(n)
    else:
        hs = np.random.default_rng(seed).integers(0, n, size=samples)
    checked = 0
    for h in hs:
        moved = f.values
        r = G.table[int(h)]
        for axis in range(j, k):
            moved = np.take(moved, r, axis=axis)
        checked += 1
        if not np.array_equal(moved, f.values):
            return InvarianceReport(j, False, checked, int(h))
    return InvarianceReport(j, True, checked)


@dataclass
class ReductionReport:
    terms: list[CorrelationSeries]
    remainder: CorrelationSeries
    full: CorrelationSeries
    max_error: float
    invariance: list[InvarianceReport]

    @property
    def reconstructed(self) -> np.ndarray:
        return np.sum([t.values for t in self.terms], axis=0) + self.remainder.values


def structured_reduction(G: Group, fs: Sequence[FunctionGk], d: Decomposition,
                         seed: int = 0) -> ReductionReport:
    """Split ``c_g`` along ``N_k f_k = sum_l prod_j F_{j,l} + F_u``.

    Each structured term is evaluated as an average over the last coordinate
    of (k-1)-length multicorrelations of ``f_i * (N_k)^-1 F_{i,l}``, which is
    valid because those inverse-lifted factors are T_{(i,k]}-invariant; the
    invariance is checked for every factor and reported.
    """
    k = len(fs) - 1
    if k < 2:
        raise InvalidInputError("structured reduction needs k >= 2")
    if any(f.k != k or f.n != G.order for f in fs):
        raise InvalidInputError("functions do not match the group / dimension")
    lifted = lift(G, k, k, fs[k]).values
    if lifted.shape != d.F.shape or not np.allclose(lifted, d.F, atol=1e-12):
        raise InvalidInputError("decomposition is not of N_k f_k")
    n = G.order
    expansion = rank_expansion(d)
    terms = []
    invariance = []
    for coef, factors in expansion.terms:
        hs = [inverse_lift_k(G, fac.astype(float)) for fac in factors]
        for i, h in enumerate(hs):
            invariance.append(check_T_range_invariance(G, h, i, seed=seed))
        phis = [fs[i].values * hs[i].values for i in range(k)]
        phis[0] = coef * phis[0]
        per_slice = []
        for a_last in range(n):
            sliced = [FunctionGk(p[..., a_last], max(1.0, abs(coef))) for p in phis]
            per_slice.append(multicorrelation(G, sliced).values)
        vals = np.array([math.fsum(col) / n for col in np.array(per_slice).T.tolist()])
        terms.append(CorrelationSeries.from_values(vals, k, G.label))
    remainder = multicorrelation(G, list(fs[:k]) + [inverse_lift_k(G, d.F_u)])
    full = multicorrelation(G, fs)
    recon = np.sum([t.values for t in terms], axis=0) + remainder.values
    err = float(np.abs(recon - full.values).max())
    return ReductionReport(terms, remainder, full, err, invariance)
