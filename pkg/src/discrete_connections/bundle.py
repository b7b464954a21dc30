"""One trivialized patch ``Q = V x G`` of a principal bundle.

The canonical section is ``s(m) = (m, e)``, so the induced trivialization
``phi_s(m, g) = g . s(m)`` is the identity on ``V x G``.  D-type regions are
stored through their base shadow ``U''``; membership of a pair of bundle
points only looks at the base points, which makes G x G invariance and the
inclusion of the discrete vertical set automatic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .complex import Region
from .errors import DescriptorMismatchError, DomainError, FiberMismatchError
from .group import GroupDescriptor, GroupElement

BasePoint = tuple


def as_point(m) -> BasePoint:
    """Coerce a number or a sequence of numbers to a base point tuple."""
    if isinstance(m, (int, float)):
        return (float(m),)
    return tuple(float(x) for x in m)


def _bound_from_json(x) -> float:
    if x is None:
        raise ValueError("use 'inf' / '-inf' for unbounded sides")
    return float(x)


def _bound_to_json(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class BasePatch:
    """An open box ``V`` in ``R^d``.

    ``sample_box`` bounds random sampling when the box itself is unbounded;
    it defaults to the box clipped to a window of width 10 around 0 or around
    its finite ends.
    """

    dim: int
    box: tuple
    sample_box: tuple | None = None

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if len(box) != self.dim:
            raise ValueError(f"box has {len(box)} intervals for dimension {self.dim}")
        for lo, hi in box:
            if not lo < hi:
                raise ValueError(f"empty interval ({lo}, {hi})")
        object.__setattr__(self, "box", box)
        if self.sample_box is None:
            object.__setattr__(self, "sample_box", tuple(_window(lo, hi) for lo, hi in box))
        else:
            sb = tuple((float(lo), float(hi)) for lo, hi in self.sample_box)
            if len(sb) != self.dim or any(math.isinf(a) or math.isinf(b) for a, b in sb):
                raise ValueError("sample_box must be finite and match the dimension")
            object.__setattr__(self, "sample_box", sb)

    @property
    def connected(self) -> bool:
        return True

    def contains(self, m) -> bool:
        m = as_point(m)
        return len(m) == self.dim and all(lo < x < hi for x, (lo, hi) in zip(m, self.box))

    def sample(self, rng: random.Random) -> BasePoint:
        while True:
            m = tuple(rng.uniform(lo, hi) for lo, hi in self.sample_box)
            if self.contains(m):
                return m

    def sample_near(self, rng: random.Random, center, radius: float) -> BasePoint:
        """A uniform point of the sup-ball around ``center`` that lies in the patch."""
        center = as_point(center)
        for _ in range(10_000):
            m = tuple(c + rng.uniform(-radius, radius) for c in center)
            if self.contains(m):
                return m
        raise DomainError(f"could not sample inside the patch near {center}")

    def to_json(self) -> dict:
        out = {"dim": self.dim, "box": [[_bound_to_json(lo), _bound_to_json(hi)] for lo, hi in self.box]}
        out["sample_box"] = [list(b) for b in self.sample_box]
        return out

    @classmethod
    def from_json(cls, data: dict) -> BasePatch:
        box = tuple((_bound_from_json(lo), _bound_from_json(hi)) for lo, hi in data["box"])
        sb = data.get("sample_box")
        return cls(int(data["dim"]), box, None if sb is None else tuple(tuple(b) for b in sb))


def _window(lo: float, hi: float) -> tuple[float, float]:
    if math.isinf(lo) and math.isinf(hi):
        return (-10.0, 10.0)
    if math.isinf(hi):
        return (lo, lo + 10.0)
    if math.isinf(lo):
        return (hi - 10.0, hi)
    return (lo, hi)


@dataclass(frozen=True)
class BundlePoint:
    base: BasePoint
    fiber: GroupElement

    def __post_init__(self):
        object.__setattr__(self, "base", as_point(self.base))

    @property
    def descriptor(self) -> GroupDescriptor:
        return self.fiber.descriptor

    def to_json(self) -> dict:
        return {"base": list(self.base), "fiber": list(self.fiber.coords)}

    @classmethod
    def from_json(cls, data: dict, descriptor: GroupDescriptor) -> BundlePoint:
        return cls(as_point(data["base"]), descriptor.element(data["fiber"]))


def projection(q: BundlePoint) -> BasePoint:
    return q.base


def section(m, descriptor: GroupDescriptor) -> BundlePoint:
    """The canonical section ``s(m) = (m, e)``."""
    return BundlePoint(as_point(m), descriptor.identity())


def phi_s(m, g: GroupElement) -> BundlePoint:
    """``phi_s(m, g) = g . s(m)``."""
    return act(g, section(m, g.descriptor))


def phi_s_inverse(q: BundlePoint) -> tuple[BasePoint, GroupElement]:
    return q.base, q.fiber


def act(g: GroupElement, q: BundlePoint) -> BundlePoint:
    if g.descriptor != q.fiber.descriptor:
        raise DescriptorMismatchError(f"{g.descriptor} acting on a {q.fiber.descriptor}-bundle")
    return BundlePoint(q.base, g * q.fiber)


def same_base(m0, m1, tol: float) -> bool:
    m0, m1 = as_point(m0), as_point(m1)
    return len(m0) == len(m1) and all(abs(a - b) <= tol for a, b in zip(m0, m1))


def kappa(q0: BundlePoint, q1: BundlePoint) -> GroupElement:
    """The unique ``g`` with ``g . q0 = q1``, for points on the same fiber."""
    tol = q0.fiber.descriptor.tolerance
    if not same_base(q0.base, q1.base, tol):
        raise FiberMismatchError(f"{q0.base} and {q1.base} lie on different fibers")
    return q1.fiber * q0.fiber.inverse()


@dataclass(frozen=True)
class DTypeRegion:
    """A D-type subset ``U`` of ``Q x Q``, stored through ``U'' ⊂ V x V``."""

    base_region: Region = field(default_factory=Region.full)

    @classmethod
    def full(cls) -> DTypeRegion:
        return cls(Region.full())

    @property
    def name(self) -> str:
        return self.base_region.name

    def contains_base_pair(self, m0, m1) -> bool:
        return self.base_region(as_point(m0), as_point(m1))

    def contains_pair(self, q0: BundlePoint, q1: BundlePoint) -> bool:
        return self.contains_base_pair(q0.base, q1.base)

    def contains_lift_pair(self, q: BundlePoint, m) -> bool:
        """Membership in ``U' = (id x pi)(U)``."""
        return self.contains_base_pair(q.base, m)

    @property
    def pair_region(self) -> Region:
        """``U`` itself, as a region on bundle points."""
        return Region(self.contains_pair, "bundle", self.base_region.name)

    def check_diagonal(self, points: Sequence) -> bool:
        return all(self.contains_base_pair(m, m) for m in points)


def region_triple_contains(R: DTypeRegion | Region, m0, m1, m2, all_pairs: bool = False) -> bool:
    """Membership of a triple in ``R^(3)``.

    By default only pairs ``(m_j, m_k)`` with ``j < k`` are checked; with
    ``all_pairs`` every ordered pair is.
    """
    region = R.base_region if isinstance(R, DTypeRegion) else R
    return region.contains_tuple((as_point(m0), as_point(m1), as_point(m2)), all_pairs)
