"""Conjugacy classes, irreducible character degrees and the degree D.

Degrees come from the class algebra: the central characters
``omega_chi(C_r) = |C_r| chi(g_r) / chi(1)`` are the common eigenvectors of
the class-multiplication matrices, and ``chi(1)`` is recovered from the
orthogonality relation ``sum_r |C_r| |chi(g_r)|^2 = |G|``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError
from .groups import Group, is_prime

log = logging.getLogger(__name__)

MAX_RETRIES = 8


@dataclass
class ConjugacyClasses:
    classes: list[np.ndarray]  # sorted element ids, ordered by smallest member
    class_of: np.ndarray

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def __len__(self) -> int:
        return len(self.classes)


@dataclass
class QuasirandomnessReport:
    degrees: list[int]
    D: int
    method: str = "character-degrees"
    catalog_D: int | None = None
    attempts: int = 1
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "degrees": self.degrees,
            "D": self.D,
            "method": self.method,
            "catalog_D": self.catalog_D,
        }


def conjugacy_classes(G: Group) -> ConjugacyClasses:
    T, inv = G.table, G.inverse
    n = G.order
    class_of = np.full(n, -1, dtype=np.int64)
    classes = []
    for x in range(n):
        if class_of[x] >= 0:
            continue
        orbit = np.unique(T[T[:, x], inv])  # g x g^-1 over all g
        class_of[orbit] = len(classes)
        classes.append(orbit)
    return ConjugacyClasses(classes, class_of)


def class_structure_constants(G: Group, cc: ConjugacyClasses) -> np.ndarray:
    """``a[r, s, t]`` = #{(x, y) in C_r x C_s : x y = z_t} for a fixed z_t in C_t.

    Memory is cubic in the class count; used for small groups and tests only.
    """
    r = len(cc)
    cls = cc.class_of
    a = np.zeros((r, r, r), dtype=np.int64)
    for t, members in enumerate(cc.classes):
        y = G.table[G.inverse, members[0]]  # y = x^-1 z_t, paired with every x
        a[:, :, t] = np.bincount(cls * r + cls[y], minlength=r * r).reshape(r, r)
    return a


def class_sum_matrix(G: Group, cc: ConjugacyClasses, coeffs: np.ndarray) -> np.ndarray:
    """``sum_r coeffs[r] A_r`` with ``A_r[s, t] = a[r, s, t]``, in O(r^2) memory."""
    r = len(cc)
    cls = cc.class_of
    weights = np.asarray(coeffs, dtype=float)[cls]
    M = np.empty((r, r))
    for t, members in enumerate(cc.classes):
        y = G.table[G.inverse, members[0]]
        M[:, t] = np.bincount(cls[y], weights=weights, minlength=r)
    return M


def _degrees_from_class_algebra(G, cc, rng):
    r = len(cc)
    sizes = np.array(cc.sizes, dtype=float)
    e_cls = int(cc.class_of[G.identity])
    coeffs = rng.standard_normal(r)
    check = rng.standard_normal(r)
    eigvals, vecs = np.linalg.eig(class_sum_matrix(G, cc, coeffs))
    gaps = np.abs(eigvals[:, None] - eigvals[None, :])
    np.fill_diagonal(gaps, np.inf)
    scale = max(1.0, float(np.abs(eigvals).max()))
    if r > 1 and gaps.min() < 1e-6 * scale:
        raise DegeneracyError("repeated eigenvalue in class-sum combination")
    M2 = class_sum_matrix(G, cc, check)
    degrees = []
    for col in range(r):
        w = vecs[:, col]
        if abs(w[e_cls]) < 1e-10:
            raise DegeneracyError("eigenvector vanishes at the identity class")
        omega = w / w[e_cls]
        # a central character is an eigenvector of every class-sum combination
        resid = np.abs(M2 @ omega - (check @ omega) * omega).max()
        if resid > 1e-6 * max(1.0, float(np.abs(omega).max()) ** 2) * np.abs(check).sum():
            raise DegeneracyError(f"central character residual {resid:.2e}")
        d2 = G.order / float(np.sum(np.abs(omega) ** 2 / sizes))
        d = int(round(math.sqrt(d2)))
        if d < 1 or abs(math.sqrt(d2) - d) > 1e-4:
            raise DegeneracyError(f"non-integral degree estimate {math.sqrt(d2):.6f}")
        degrees.append(d)
    return sorted(degrees)


def catalog_degree(G: Group) -> int | None:
    """Known D for abelian groups, SL(2, p) with p >= 3, and products of those.

    Only used as a cross-check on the computed value.
    """
    if G.is_abelian():
        return 1
    label = G.label
    if label.startswith("prod:("):
        from .groups import _split_top, parse_group

        parts = [parse_group(part) for part in _split_top(label[6:-1])]
        factors = [catalog_degree(H) for H in parts if H.order > 1]  # trivial factors add no irreps
        return None if None in factors else min(factors)
    if label.startswith("sl2:"):
        p = int(label.split(":")[1])
        if is_prime(p) and p >= 3:
            return (p - 1) // 2
    return None


def character_degrees(G: Group, seed: int = 0, retries: int = MAX_RETRIES) -> QuasirandomnessReport:
    cc = conjugacy_classes(G)
    if len(cc) == G.order:
        # |G| classes and sum of d^2 = |G| force every degree to be 1
        degrees = [1] * G.order
        D = 1 if G.order > 1 else G.order
        return QuasirandomnessReport(degrees, D, catalog_D=catalog_degree(G), attempts=0)
    rng = np.random.default_rng(seed)
    last = None
    for attempt in range(1, retries + 1):
        try:
            degrees = _degrees_from_class_algebra(G, cc, rng)
        except DegeneracyError as exc:
            log.debug("attempt %d failed: %s", attempt, exc)
            last = exc
            continue
        if sum(d * d for d in degrees) != G.order or len(degrees) != len(cc):
            last = DegeneracyError(f"sum of squared degrees {sum(d*d for d in degrees)} != {G.order}")
            continue
        nontrivial = degrees[1:]  # the trivial character is one of the degree-1 entries
        D = min(nontrivial) if nontrivial else G.order
        return QuasirandomnessReport(degrees, D, catalog_D=catalog_degree(G), attempts=attempt)
    raise DegeneracyError(f"{G.label}: character degrees failed after {retries} attempts: {last}")


def quasirandomness_degree(G: Group, seed: int = 0) -> int:
    """Smallest dimension of a nontrivial irreducible representation of G."""
    report = character_degrees(G, seed=seed)
    if report.catalog_D is not None and report.catalog_D != report.D:
        raise DegeneracyError(
            f"{G.label}: computed D={report.D} disagrees with catalog {report.catalog_D}")
    return report.D


# --------------------------------------------------------------------------
# mean-ergodic inequality on the left-regular representation


@dataclass
class MeanErgodicReport:
    label: str
    D: int
    trials: int
    max_ratio: float
    ratios: list[float]

    @property
    def ok(self) -> bool:
        return self.max_ratio <= 1 + 1e-9


def mean_ergodic_ratio(G: Group, D: int, u: np.ndarray, v: np.ndarray) -> float:
    """``mean_g |<u, g v> - <Pu, Pv>|^2`` divided by ``|u|^2 |v|^2 / D``.

    ``(g v)(x) = v(g^-1 x)``, so ``<u, g v> = sum_y u(g y) v(y)``; P projects
    onto the constant vectors.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    pairing = u[G.table] @ v  # entry g: sum_y u(g y) v(y)
    invariant = len(u) * u.mean() * v.mean()
    lhs = np.mean((pairing - invariant) ** 2)
    rhs = float(u @ u) * float(v @ v) / D
    if rhs == 0.0:
        return 0.0
    return float(lhs / rhs)


def verify_mean_ergodic(G: Group, D: int, trials: int = 100, seed: int = 0) -> MeanErgodicReport:
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(trials):
        u = rng.standard_normal(G.order)
        v = rng.standard_normal(G.order)
        ratios.append(mean_ergodic_ratio(G, D, u, v))
    return MeanErgodicReport(G.label, D, trials, max(ratios) if ratios else 0.0, ratios)
