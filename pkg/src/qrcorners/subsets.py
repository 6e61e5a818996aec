"""Seeded subset and test-function generators.

Randomness always comes from ``derive_rng(seed, label)``: a PCG64 generator
(numpy's default bit generator, whose stream is fixed across platforms) keyed
by the SHA-256 of ``"{seed}:{label}"``.  Distinct tasks in one run therefore
get independent, reproducible streams regardless of execution order.

Subset spec strings (CLI ``--subset``):

* ``random`` / ``random:0.25``  exactly ``round(delta * n^k)`` points, sampled
  without replacement (``--delta`` supplies delta when omitted)
* ``full``, ``empty``
* ``interval`` / ``interval:L``  the box ``[0, L)^k`` of element ids; without
  L, ``L = round(n * delta^(1/k))`` so the density matches delta
* ``product:0,1,2;3,4``  Cartesian product of per-coordinate id sets (one set
  is reused for every coordinate)
* ``planted:m`` / ``planted:m:delta``  m distinct corners C(g, a), g != e,
  planted into a random background of density delta (default empty)
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .corners import FunctionGk, SubsetK, check_cap
from .errors import InvalidInputError
from .groups import Group


def derive_rng(seed: int, label: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{int(seed)}:{label}".encode()).digest()
    entropy = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class SubsetSpec:
    kind: str
    delta: float | None = None
    length: int | None = None
    sets: tuple | None = None
    m: int | None = None
    seed: int = 0

    def describe(self) -> str:
        if self.kind == "random":
            return f"random:{self.delta}"
        if self.kind == "interval":
            return f"interval:{self.length}" if self.length is not None else f"interval@{self.delta}"
        if self.kind == "product":
            return "product:" + ";".join(",".join(map(str, s)) for s in self.sets)
        if self.kind == "planted":
            return f"planted:{self.m}:{self.delta or 0}"
        return self.kind


def parse_subset_spec(text: str, delta: float | None = None, seed: int = 0) -> SubsetSpec:
    kind, _, arg = text.strip().partition(":")
    try:
        if kind in ("full", "empty"):
            return SubsetSpec(kind, seed=seed)
        if kind == "random":
            d = float(arg) if arg else delta
            if d is None:
                raise InvalidInputError("random subset needs a density")
            return SubsetSpec("random", delta=d, seed=seed)
        if kind == "interval":
            if arg:
                return SubsetSpec("interval", length=int(arg), seed=seed)
            if delta is None:
                raise InvalidInputError("interval subset needs a length or --delta")
            return SubsetSpec("interval", delta=delta, seed=seed)
        if kind == "product":
            sets = tuple(tuple(int(v) for v in part.split(",") if v) for part in arg.split(";"))
            return SubsetSpec("product", sets=sets, seed=seed)
        if kind == "planted":
            parts = arg.split(":")
            m = int(parts[0])
            bg = float(parts[1]) if len(parts) > 1 else (delta or 0.0)
            return SubsetSpec("planted", m=m, delta=bg, seed=seed)
    except ValueError as exc:
        raise InvalidInputError(f"bad subset spec {text!r}: {exc}") from None
    raise InvalidInputError(f"unknown subset kind {kind!r}")


def _random_points(n: int, k: int, delta: float, rng: np.random.Generator) -> np.ndarray:
    if not 0 <= delta <= 1:
        raise InvalidInputError(f"density must lie in [0, 1], got {delta}")
    total = n**k
    size = int(round(delta * total))
    ind = np.zeros(total, dtype=bool)
    ind[rng.choice(total, size=size, replace=False)] = True
    return ind.reshape((n,) * k)


def generate_subset(G: Group, k: int, spec: SubsetSpec) -> SubsetK:
    n = G.order
    check_cap(n, k)
    label = f"subset:{G.label}:{k}:{spec.describe()}"
    if spec.kind == "full":
        return SubsetK(np.ones((n,) * k, dtype=bool))
    if spec.kind == "empty":
        return SubsetK(np.zeros((n,) * k, dtype=bool))
    if spec.kind == "random":
        return SubsetK(_random_points(n, k, spec.delta, derive_rng(spec.seed, label)))
    if spec.kind == "interval":
        length = spec.length
        if length is None:
            length = int(round(n * spec.delta ** (1.0 / k)))
        if not 0 <= length <= n:
            raise InvalidInputError(f"interval length {length} outside [0, {n}]")
        side = np.arange(n) < length
        return SubsetK(_outer(side, k))
    if spec.kind == "product":
        sets = spec.sets if len(spec.sets) == k else spec.sets * k if len(spec.sets) == 1 else None
        if sets is None:
            raise InvalidInputError(f"product spec needs 1 or {k} coordinate sets")
        arrays = []
        for s in sets:
            if any(not 0 <= v < n for v in s):
                raise InvalidInputError(f"product set {s} has ids outside [0, {n})")
            side = np.zeros(n, dtype=bool)
            side[list(s)] = True
            arrays.append(side)
        return SubsetK(_outer_many(arrays))
    if spec.kind == "planted":
        rng = derive_rng(spec.seed, label)
        ind = _random_points(n, k, spec.delta or 0.0, rng)
        if spec.m < 0 or (spec.m > 0 and n < 2):
            raise InvalidInputError("planted corners need m >= 0 and a nontrivial group")
        pairs = (n - 1) * n**k
        if spec.m > pairs:
            raise InvalidInputError(f"cannot plant {spec.m} distinct corners, only {pairs} exist")
        for code in rng.choice(pairs, size=spec.m, replace=False):
            g, rest = divmod(int(code), n**k)
            g = g if g < G.identity else g + 1  # skip the identity
            point = np.array(np.unravel_index(rest, (n,) * k))
            ind[tuple(point)] = True
            for i in range(k):
                point[i] = G.table[g, point[i]]
                ind[tuple(point)] = True
        return SubsetK(ind)
    raise InvalidInputError(f"unknown subset kind {spec.kind!r}")


def _outer(side: np.ndarray, k: int) -> np.ndarray:
    return _outer_many([side] * k)


def _outer_many(sides) -> np.ndarray:
    out = np.ones((), dtype=bool)
    for s in sides:
        out = np.logical_and.outer(out, s)
    return out


def random_sign_function(n: int, k: int, seed: int, label: str = "pm1") -> FunctionGk:
    rng = derive_rng(seed, f"{label}:{n}:{k}")
    return FunctionGk(rng.choice(np.array([-1.0, 1.0]), size=(n,) * k), 1.0)
