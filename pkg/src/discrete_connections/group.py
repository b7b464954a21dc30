"""Abelian Lie groups: circle, tori and real vector groups.

Elements of a torus are stored as angles canonicalized to ``(-pi, pi]``; the
Lie algebra of every supported group is ``R^k`` (the factor ``i`` of the
circle's algebra ``iR`` is dropped).  Because the groups are abelian, ``exp``
is a homomorphism and no BCH machinery is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import BranchCutError, DescriptorMismatchError

TAU = 2.0 * math.pi

KINDS = ("circle", "torus", "vector")


def mod2pi(x: float) -> float:
    """Return the unique real in ``(-pi, pi]`` congruent to ``x`` modulo 2 pi."""
    r = math.remainder(x, TAU)
    if r <= -math.pi:
        r = math.pi
    return r


@dataclass(frozen=True)
class GroupDescriptor:
    """Which abelian group we are in.

    ``circle`` is normalized to ``torus`` with ``k == 1`` so the two compare
    equal.
    """

    kind: str
    k: int = 1
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == "circle":
            object.__setattr__(self, "kind", "torus")
            object.__setattr__(self, "k", 1)
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"group dimension must be a positive integer, got {self.k!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    @classmethod
    def circle(cls, tolerance: float = 1e-9) -> GroupDescriptor:
        return cls("torus", 1, tolerance)

    @classmethod
    def torus(cls, k: int, tolerance: float = 1e-9) -> GroupDescriptor:
        return cls("torus", k, tolerance)

    @classmethod
    def vector(cls, k: int, tolerance: float = 1e-9) -> GroupDescriptor:
        return cls("vector", k, tolerance)

    @property
    def compact(self) -> bool:
        return self.kind == "torus"

    @property
    def dim(self) -> int:
        return self.k

    def identity(self) -> GroupElement:
        return GroupElement(self, (0.0,) * self.k)

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, (0.0,) * self.k)

    def element(self, coords) -> GroupElement:
        return GroupElement(self, _coords(coords, self.k))

    def algebra(self, coords) -> AlgebraElement:
        return AlgebraElement(self, _coords(coords, self.k))

    def canonicalize(self, coords: Iterable[float]) -> tuple[float, ...]:
        if self.compact:
            return tuple(mod2pi(float(c)) for c in coords)
        return tuple(float(c) for c in coords)

    def neighborhoods(self) -> ExpNeighborhoods:
        return ExpNeighborhoods.for_group(self)

    def to_json(self) -> dict:
        if self.kind == "torus" and self.k == 1:
            out = {"kind": "circle"}
        else:
            out = {"kind": self.kind, "k": self.k}
        if self.tolerance != 1e-9:
            out["tolerance"] = self.tolerance
        return out

    @classmethod
    def from_json(cls, data: dict) -> GroupDescriptor:
        if not isinstance(data, dict) or "kind" not in data:
            raise ValueError("group descriptor must be an object with a 'kind' field")
        kind = data["kind"]
        tol = float(data.get("tolerance", 1e-9))
        if kind == "circle":
            return cls.circle(tol)
        if "k" not in data:
            raise ValueError(f"group kind {kind!r} requires 'k'")
        return cls(kind, int(data["k"]), tol)


def _coords(coords, k: int) -> tuple[float, ...]:
    if isinstance(coords, (int, float)):
        coords = (coords,)
    coords = tuple(float(c) for c in coords)
    if len(coords) != k:
        raise ValueError(f"expected {k} coordinates, got {len(coords)}")
    return coords


def _check_same(a, b):
    if a.descriptor != b.descriptor:
        raise DescriptorMismatchError(f"{a.descriptor} vs {b.descriptor}")


@dataclass(frozen=True)
class GroupElement:
    descriptor: GroupDescriptor
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = self.descriptor.canonicalize(self.coords)
        if len(coords) != self.descriptor.k:
            raise ValueError(f"expected {self.descriptor.k} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    def __mul__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        _check_same(self, other)
        return GroupElement(self.descriptor, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __pow__(self, n: int) -> GroupElement:
        if not isinstance(n, int):
            return NotImplemented
        return GroupElement(self.descriptor, tuple(n * a for a in self.coords))

    def inverse(self) -> GroupElement:
        return GroupElement(self.descriptor, tuple(-a for a in self.coords))

    def distance(self, other: GroupElement) -> float:
        """Sup-norm distance; shortest angular distance on torus components."""
        _check_same(self, other)
        if self.descriptor.compact:
            return max(abs(mod2pi(a - b)) for a, b in zip(self.coords, other.coords))
        return max(abs(a - b) for a, b in zip(self.coords, other.coords))

    def isclose(self, other: GroupElement, tol: float | None = None) -> bool:
        tol = self.descriptor.tolerance if tol is None else tol
        return self.distance(other) <= tol

    def is_identity(self, tol: float | None = None) -> bool:
        return self.isclose(self.descriptor.identity(), tol)

    def to_json(self) -> list[float]:
        return list(self.coords)


@dataclass(frozen=True)
class AlgebraElement:
    descriptor: GroupDescriptor
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) != self.descriptor.k:
            raise ValueError(f"expected {self.descriptor.k} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        _check_same(self, other)
        return AlgebraElement(self.descriptor, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(self.descriptor, tuple(-a for a in self.coords))

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return self + (-other)

    def __rmul__(self, scalar) -> AlgebraElement:
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return AlgebraElement(self.descriptor, tuple(scalar * a for a in self.coords))

    def norm(self) -> float:
        return max(abs(a) for a in self.coords)

    def distance(self, other: AlgebraElement) -> float:
        _check_same(self, other)
        return max(abs(a - b) for a, b in zip(self.coords, other.coords))

    def isclose(self, other: AlgebraElement, tol: float | None = None) -> bool:
        tol = self.descriptor.tolerance if tol is None else tol
        return self.distance(other) <= tol

    def to_json(self) -> list[float]:
        return list(self.coords)


@dataclass(frozen=True)
class ExpNeighborhoods:
    """The balls ``U0 ⊃ U0'`` around 0 in the algebra and their images.

    Radii are per component in the sup norm.  ``U0'`` has a third of the
    radius of ``U0`` so the sum of any three elements of ``U0'`` is in ``U0``.
    """

    descriptor: GroupDescriptor
    u0_radius: float
    u0_prime_radius: float

    def __post_init__(self):
        if not (self.u0_radius > 0 and self.u0_prime_radius > 0):
            raise ValueError("radii must be positive")
        if self.u0_prime_radius > self.u0_radius / 3:
            raise ValueError("u0_prime_radius must not exceed u0_radius / 3")

    @classmethod
    def for_group(cls, descriptor: GroupDescriptor) -> ExpNeighborhoods:
        r = math.pi if descriptor.compact else math.inf
        return cls(descriptor, r, r / 3)

    def in_U0(self, a: AlgebraElement) -> bool:
        return all(abs(c) < self.u0_radius for c in a.coords)

    def in_U0_prime(self, a: AlgebraElement) -> bool:
        return all(abs(c) < self.u0_prime_radius for c in a.coords)

    def in_Ve(self, g: GroupElement) -> bool:
        if not self.descriptor.compact:
            return True
        tol = self.descriptor.tolerance
        return all(math.pi - abs(c) > tol for c in g.coords)

    def in_Ve_prime(self, g: GroupElement) -> bool:
        # angles are canonical, so this is the image of U0' under exp
        return all(abs(c) < self.u0_prime_radius for c in g.coords)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    return g * h


def inverse(g: GroupElement) -> GroupElement:
    return g.inverse()


def exp(a: AlgebraElement) -> GroupElement:
    return GroupElement(a.descriptor, a.coords)


def log(g: GroupElement) -> AlgebraElement:
    """Principal logarithm, defined on ``V_e`` (no angle equal to pi)."""
    if not ExpNeighborhoods.for_group(g.descriptor).in_Ve(g):
        raise BranchCutError(f"{g.coords} has a component on the branch cut at pi")
    return AlgebraElement(g.descriptor, g.coords)


def in_Ve_prime(g: GroupElement) -> bool:
    return ExpNeighborhoods.for_group(g.descriptor).in_Ve_prime(g)


def in_U0_prime(a: AlgebraElement) -> bool:
    return ExpNeighborhoods.for_group(a.descriptor).in_U0_prime(a)
