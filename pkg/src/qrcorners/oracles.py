"""Slow, literal reference computations.

Nothing here shares code paths with the fast implementations: loops run over
explicit tuples and use ``Group.mul`` one element at a time.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .groups import Group


def corner_points(G: Group, g: int, a: tuple) -> list[tuple]:
    pts = [tuple(a)]
    cur = list(a)
    for i in range(len(a)):
        cur[i] = G.mul(g, cur[i])
        pts.append(tuple(cur))
    return pts


def naive_corner_counts(G: Group, indicator: np.ndarray) -> list[int]:
    """Per-g number of a in G^k with every corner point in the subset."""
    k = indicator.ndim
    members = {tuple(int(v) for v in p) for p in zip(*np.nonzero(indicator))}
    counts = []
    for g in G.elements():
        c = 0
        for a in itertools.product(G.elements(), repeat=k):
            if all(p in members for p in corner_points(G, g, a)):
                c += 1
        counts.append(c)
    return counts


def naive_multicorrelation(G: Group, values: list[np.ndarray]) -> list[float]:
    k = len(values) - 1
    n = G.order
    out = []
    for g in G.elements():
        terms = []
        for a in itertools.product(range(n), repeat=k):
            prod = 1.0
            for f, p in zip(values, corner_points(G, g, a)):
                prod *= float(f[p])
            terms.append(prod)
        out.append(math.fsum(terms) / n**k)
    return out


def brute_conjugacy_classes(G: Group) -> list[frozenset]:
    seen, classes = set(), []
    for x in G.elements():
        if x in seen:
            continue
        orbit = frozenset(G.mul(G.mul(g, x), G.inv(g)) for g in G.elements())
        seen |= orbit
        classes.append(orbit)
    return classes


def regular_rep_degrees(G: Group, seed: int = 0, tol: float = 1e-6) -> list[int]:
    """Degrees from eigenvalue multiplicities of a random Hermitian central element.

    A central element ``Z = sum_r c_r C_r`` acts on the group algebra by left
    multiplication with eigenvalue ``omega_chi(Z)`` of multiplicity
    ``chi(1)^2``.  Choosing ``c`` constant on classes with
    ``c(x^-1) = conj(c(x))`` makes the operator Hermitian.
    """
    n = G.order
    classes = brute_conjugacy_classes(G)
    class_of = {}
    for i, c in enumerate(classes):
        for x in c:
            class_of[x] = i
    rng = np.random.default_rng(seed)
    coeff = {}
    for i, c in enumerate(classes):
        if i in coeff:
            continue
        j = class_of[G.inv(next(iter(c)))]
        if j == i:
            coeff[i] = complex(rng.standard_normal())
        else:
            z = complex(rng.standard_normal(), rng.standard_normal())
            coeff[i], coeff[j] = z, z.conjugate()
    M = np.empty((n, n), dtype=complex)
    for y in range(n):
        for x in range(n):
            M[y, x] = coeff[class_of[G.mul(y, G.inv(x))]]  # z x = y  =>  z = y x^-1
    eig = np.sort(np.linalg.eigvalsh(M))
    degrees = []
    start = 0
    for i in range(1, n + 1):
        if i == n or eig[i] - eig[i - 1] > tol * max(1.0, abs(eig[i])):
            mult = i - start
            d = math.isqrt(mult)
            if d * d != mult:
                raise ArithmeticError(f"eigenvalue multiplicity {mult} is not a square")
            degrees.append(d)
            start = i
    return sorted(degrees)
