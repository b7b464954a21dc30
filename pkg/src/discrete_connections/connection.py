"""Discrete connection forms on a trivialized patch and everything derived from them.

A connection is given by its local expression ``A_s`` with respect to the
canonical section ``s(m) = (m, e)`` together with a D-type domain.  The global
form is recovered from ``A(phi_s(m0, g0), phi_s(m1, g1)) = g1 A_s(m0, m1) g0^-1``;
curvature, horizontal lift, logarithms and the six associated cochains are
all derived from ``A_s``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import group as grp
from .bundle import (BasePatch, BasePoint, BundlePoint, DTypeRegion, act, as_point,
                     kappa, section)
from .complex import Cochain, Region, Simplex, coboundary
from .errors import BranchCutError, ConnectionValidationError, DomainError
from .expr import Expression, variables
from .group import AlgebraElement, GroupDescriptor, GroupElement

LocalForm = Callable[[BasePoint, BasePoint], GroupElement]
LiftMap = Callable[[BundlePoint, BasePoint], "tuple[BundlePoint, BundlePoint]"]


@dataclass(frozen=True)
class LogDomains:
    """``W''`` (pairs where ``A_s`` lands in ``V_e'``) and ``W~''`` (triples
    where ``B_s`` lands in ``V_e``)."""

    w_region: Region
    contains_triple: Callable[[BasePoint, BasePoint, BasePoint], bool]


@dataclass(frozen=True, eq=False)
class DiscreteConnection:
    patch: BasePatch
    group: GroupDescriptor
    local_form: LocalForm
    domain: DTypeRegion = field(default_factory=DTypeRegion.full)
    name: str = "connection"
    spec: dict | None = None

    # regions ---------------------------------------------------------------

    def in_v2(self, m0, m1) -> bool:
        """Membership in ``V'' = (V x V) ∩ U''``."""
        return (self.patch.contains(m0) and self.patch.contains(m1)
                and self.domain.contains_base_pair(m0, m1))

    @property
    def v2_region(self) -> Region:
        return Region(self.in_v2, "base", f"V''[{self.name}]")

    @property
    def u_region(self) -> Region:
        def contains(q0: BundlePoint, q1: BundlePoint) -> bool:
            return self.in_v2(q0.base, q1.base)
        return Region(contains, "bundle", f"U[{self.name}]")

    def in_w2(self, m0, m1) -> bool:
        """Membership in ``W'' = A_s^-1(V_e')``."""
        if not self.in_v2(m0, m1):
            return False
        return grp.in_Ve_prime(self.local_form(as_point(m0), as_point(m1)))

    @property
    def w_region(self) -> Region:
        return Region(self.in_w2, "base", f"W''[{self.name}]")

    def in_w2_tilde(self, m0, m1, m2) -> bool:
        """Membership in ``W~'' = B_s^-1(V_e)``."""
        if not self.v2_region.contains_tuple((as_point(m0), as_point(m1), as_point(m2))):
            return False
        nb = self.group.neighborhoods()
        return nb.in_Ve(self.curvature_local(m0, m1, m2))

    def log_domains(self) -> LogDomains:
        return LogDomains(self.w_region, self.in_w2_tilde)

    # forms -----------------------------------------------------------------

    def A_s(self, m0, m1) -> GroupElement:
        m0, m1 = as_point(m0), as_point(m1)
        if not self.in_v2(m0, m1):
            raise DomainError(f"({m0}, {m1}) is outside the domain of {self.name}")
        return self.local_form(m0, m1)

    def __call__(self, q0: BundlePoint, q1: BundlePoint) -> GroupElement:
        return self.eval(q0, q1)

    def eval(self, q0: BundlePoint, q1: BundlePoint) -> GroupElement:
        """``A(q0, q1) = g1 A_s(m0, m1) g0^-1``."""
        return q1.fiber * self.A_s(q0.base, q1.base) * q0.fiber.inverse()

    def horizontal_lift(self, q: BundlePoint, m) -> tuple[BundlePoint, BundlePoint]:
        """``h_A(q, m) = (q, A(q, q')^-1 . q')`` for any ``q'`` over ``m``."""
        m = as_point(m)
        if not (self.patch.contains(q.base) and self.patch.contains(m)
                and self.domain.contains_lift_pair(q, m)):
            raise DomainError(f"({q.base}, {m}) is outside U' of {self.name}")
        q_prime = section(m, self.group)
        return q, act(self.eval(q, q_prime).inverse(), q_prime)

    def lift_map(self) -> LiftMap:
        return self.horizontal_lift

    def curvature(self, q0: BundlePoint, q1: BundlePoint, q2: BundlePoint) -> GroupElement:
        if not self.u_region.contains_tuple((q0, q1, q2)):
            raise DomainError("triple is outside U^(3)")
        return self.eval(q0, q2).inverse() * self.eval(q1, q2) * self.eval(q0, q1)

    def curvature_local(self, m0, m1, m2, all_pairs: bool = False) -> GroupElement:
        m0, m1, m2 = as_point(m0), as_point(m1), as_point(m2)
        if not self.v2_region.contains_tuple((m0, m1, m2), all_pairs):
            raise DomainError(f"({m0}, {m1}, {m2}) is outside V''^(3)")
        return self.local_form(m0, m2).inverse() * self.local_form(m1, m2) * self.local_form(m0, m1)

    def log_local_form(self, m0, m1) -> AlgebraElement:
        m0, m1 = as_point(m0), as_point(m1)
        if not self.in_w2(m0, m1):
            raise DomainError(f"({m0}, {m1}) is outside W'' of {self.name}")
        return grp.log(self.local_form(m0, m1))

    def log_curvature_local(self, m0, m1, m2) -> AlgebraElement:
        b = self.curvature_local(m0, m1, m2)
        try:
            return grp.log(b)
        except BranchCutError as exc:
            raise DomainError(f"curvature at ({m0}, {m1}, {m2}) is on the branch cut") from exc

    # cochains --------------------------------------------------------------

    def connection_cochain(self) -> Cochain:
        """``[A]``, a G-valued 1-cochain on Q."""
        return Cochain(1, self.group, lambda T: self.eval(*T.vertices), self.u_region,
                       name="[A]")

    def curvature_cochain(self) -> Cochain:
        """``[B]``, a G-valued 2-cochain on Q."""
        return Cochain(2, self.group, lambda T: self.curvature(*T.vertices), self.u_region,
                       name="[B]")

    def local_cochain(self) -> Cochain:
        """``[A_s]`` on V, small for ``V''``."""
        return Cochain(1, self.group, lambda T: self.A_s(*T.vertices), self.v2_region,
                       name="[A_s]")

    def local_curvature_cochain(self) -> Cochain:
        """``[B_s]`` on V, small for ``V''``."""
        return Cochain(2, self.group, lambda T: self.curvature_local(*T.vertices),
                       self.v2_region, name="[B_s]")

    def log_cochain(self) -> Cochain:
        """``[LA_s]``, algebra-valued, small for ``W''``."""
        return Cochain(1, self.group, lambda T: self.log_local_form(*T.vertices),
                       self.w_region, algebra=True, name="[LA_s]")

    def log_curvature_cochain(self) -> Cochain:
        """``[LB_s]``, algebra-valued, small for ``W''``."""
        return Cochain(2, self.group, lambda T: self.log_curvature_local(*T.vertices),
                       self.w_region, algebra=True, name="[LB_s]")

    # sampling ----------------------------------------------------------------

    def sample_pair(self, rng: random.Random, scale: float | None = None,
                    region: Region | None = None) -> tuple[BasePoint, BasePoint]:
        region = region or self.v2_region
        for _ in range(10_000):
            m0 = self.patch.sample(rng)
            m1 = self.patch.sample(rng) if scale is None else self.patch.sample_near(rng, m0, scale)
            if region(m0, m1):
                return m0, m1
        raise DomainError(f"could not sample a pair in {region.name}")

    def sample_tuple(self, rng: random.Random, n: int, scale: float | None = None,
                     region: Region | None = None) -> tuple[BasePoint, ...]:
        """``n`` base points, all pairs ``j < k`` in ``region`` (default ``V''``).

        With ``scale`` the points are drawn from a sup-ball of radius
        ``scale / 2`` around a random centre.
        """
        region = region or self.v2_region
        for _ in range(10_000):
            if scale is None:
                pts = tuple(self.patch.sample(rng) for _ in range(n))
            else:
                c = self.patch.sample(rng)
                pts = tuple(self.patch.sample_near(rng, c, scale / 2) for _ in range(n))
            if region.contains_tuple(pts):
                return pts
        raise DomainError(f"could not sample a {n}-tuple in {region.name}")

    def sample_bundle_point(self, rng: random.Random, m=None) -> BundlePoint:
        m = self.patch.sample(rng) if m is None else as_point(m)
        return BundlePoint(m, random_element(self.group, rng))

    def to_json(self) -> dict:
        return dict(self.spec) if self.spec else {"name": self.name}


def random_element(descriptor: GroupDescriptor, rng: random.Random, scale: float = 5.0) -> GroupElement:
    if descriptor.compact:
        return descriptor.element([rng.uniform(-math.pi, math.pi) for _ in range(descriptor.k)])
    return descriptor.element([rng.uniform(-scale, scale) for _ in range(descriptor.k)])


# builders ----------------------------------------------------------------------


def signed_power(x: float, mu: float) -> float:
    """``x ** mu``; for non-integer ``mu`` the odd extension ``sign(x)|x|^mu``."""
    if float(mu).is_integer():
        return x ** int(mu)
    return math.copysign(abs(x) ** mu, x)


def omega_mu(mu: float = 2, tolerance: float = 1e-9, sample_box=((0.0, 10.0),)) -> DiscreteConnection:
    """The family ``A_s(r0, r1) = exp(i (r1 - r0)^mu)`` on ``R_{>0} x U(1)``."""
    if not mu >= 1:
        raise ValueError("mu must be >= 1")
    g = GroupDescriptor.circle(tolerance)
    patch = BasePatch(1, ((0.0, math.inf),), sample_box)

    def local_form(m0, m1):
        return GroupElement(g, (signed_power(m1[0] - m0[0], mu),))

    mu_json = int(mu) if float(mu).is_integer() else mu
    return DiscreteConnection(patch, g, local_form, DTypeRegion.full(), f"omega_{mu_json}",
                              {"builtin": "omega_mu", "mu": mu_json})


def _sample_diagonal_points(patch: BasePatch, n: int, seed: int) -> list[BasePoint]:
    rng = random.Random(seed)
    return [patch.sample(rng) for _ in range(n)]


def from_expressions(exprs: Sequence[str], group: GroupDescriptor, patch: BasePatch,
                     domain: DTypeRegion | None = None, n_check: int = 64, seed: int = 0,
                     name: str = "custom") -> DiscreteConnection:
    """``A_s`` with one expression in ``m0[j], m1[j]`` per group coordinate.

    ``A_s(m, m) = e`` is checked on ``n_check`` sampled points; a violation
    raises :class:`ConnectionValidationError`.
    """
    if len(exprs) != group.k:
        raise ConnectionValidationError(f"need {group.k} expressions for {group}, got {len(exprs)}")
    compiled = [Expression.compile(e, patch.dim) for e in exprs]

    def local_form(m0, m1):
        return group.element([f(m0, m1) for f in compiled])

    conn = DiscreteConnection(patch, group, local_form, domain or DTypeRegion.full(), name,
                              {"custom": {"A_s": list(exprs)}})
    for m in _sample_diagonal_points(patch, n_check, seed):
        value = local_form(m, m)
        if not value.is_identity():
            raise ConnectionValidationError(
                f"A_s(m, m) != e at m = {m}: got {value.coords}")
    if domain is not None and not domain.check_diagonal(_sample_diagonal_points(patch, n_check, seed)):
        raise ConnectionValidationError("domain does not contain the diagonal")
    return conn


def zero_cochain_from_function(f: Callable[[BasePoint], GroupElement], group: GroupDescriptor,
                               name: str = "alpha0") -> Cochain:
    return Cochain(0, group, lambda T: f(T.vertices[0]), name=name)


def from_zero_cochain(alpha0: Cochain, patch: BasePatch, domain: DTypeRegion | None = None,
                      name: str = "exact", spec: dict | None = None) -> DiscreteConnection:
    """The exact connection ``[A_s] = delta alpha0``, i.e.
    ``A_s(m0, m1) = alpha0(m1) alpha0(m0)^-1``."""
    if alpha0.dim != 0 or alpha0.algebra:
        raise ValueError("alpha0 must be a G-valued 0-cochain")
    d_alpha = coboundary(alpha0)

    def local_form(m0, m1):
        return d_alpha.evaluate_simplex(Simplex((m0, m1)))

    return DiscreteConnection(patch, alpha0.descriptor, local_form, domain or DTypeRegion.full(),
                              name, spec)


def from_potential_expressions(exprs: Sequence[str], group: GroupDescriptor, patch: BasePatch,
                               domain: DTypeRegion | None = None) -> DiscreteConnection:
    """Exact connection whose 0-cochain has coordinates given by expressions in ``m0[j]``."""
    if len(exprs) != group.k:
        raise ConnectionValidationError(f"need {group.k} expressions for {group}, got {len(exprs)}")
    compiled = [Expression.compile(e, patch.dim) for e in exprs]
    for f in compiled:
        if any(point == "m1" for point, _ in variables(f.ast)):
            raise ConnectionValidationError("a 0-cochain may only depend on m0")

    def alpha0(m):
        return group.element([f(m, ()) for f in compiled])

    return from_zero_cochain(zero_cochain_from_function(alpha0, group), patch, domain,
                             "exact", {"exact": {"alpha0": list(exprs)}})


def region_from_expression(text: str, dim: int) -> Region:
    """Pair region ``{(m0, m1) : expr(m0, m1) > 0}``."""
    f = Expression.compile(text, dim)

    def contains(m0, m1) -> bool:
        try:
            return f(m0, m1) > 0
        except DomainError:
            return False

    return Region(contains, "base", f"{{{text} > 0}}")


def check_lift_properties(h: LiftMap, group: GroupDescriptor, patch: BasePatch,
                          domain: DTypeRegion, rng: random.Random, n: int = 32) -> None:
    """Sample the three defining properties of a discrete horizontal lift."""
    tol = group.tolerance
    for _ in range(n):
        m0 = patch.sample(rng)
        q = BundlePoint(m0, random_element(group, rng))
        m = patch.sample_near(rng, m0, 1.0)
        if not domain.contains_base_pair(m0, m):
            continue
        first, second = h(q, m)
        if first != q or not _same_point(second.base, m, tol):
            raise ConnectionValidationError(f"lift is not a section of id x pi at ({q}, {m})")
        g = random_element(group, rng)
        gf, gs = h(act(g, q), m)
        if not (gf.fiber.isclose(act(g, first).fiber) and gs.fiber.isclose(act(g, second).fiber)):
            raise ConnectionValidationError(f"lift is not G-equivariant at ({q}, {m})")
        nf, ns = h(q, m0)
        if not (ns.fiber.isclose(q.fiber) and _same_point(ns.base, m0, tol)):
            raise ConnectionValidationError(f"lift is not normalized at {q}")


def _same_point(a, b, tol) -> bool:
    return all(abs(x - y) <= tol for x, y in zip(as_point(a), as_point(b)))


def connection_from_lift(h: LiftMap, group: GroupDescriptor, patch: BasePatch,
                         domain: DTypeRegion | None = None, *, n_check: int = 32,
                         seed: int = 0, name: str = "from_lift") -> DiscreteConnection:
    """``A_h(q0, q1) = kappa(h_2(q0, pi(q1)), q1)``, read off at the section."""
    domain = domain or DTypeRegion.full()
    if n_check:
        check_lift_properties(h, group, patch, domain, random.Random(seed), n_check)

    def local_form(m0, m1):
        s0, s1 = section(m0, group), section(m1, group)
        _, lifted = h(s0, m1)
        return kappa(lifted, s1)

    return DiscreteConnection(patch, group, local_form, domain, name)


# module-level spellings ----------------------------------------------------------


def horizontal_lift(A: DiscreteConnection, q: BundlePoint, m) -> tuple[BundlePoint, BundlePoint]:
    return A.horizontal_lift(q, m)


def curvature(A: DiscreteConnection, q0, q1, q2) -> GroupElement:
    return A.curvature(q0, q1, q2)


def curvature_local(A: DiscreteConnection, m0, m1, m2) -> GroupElement:
    return A.curvature_local(m0, m1, m2)


def log_local_form(A: DiscreteConnection, m0, m1) -> AlgebraElement:
    return A.log_local_form(m0, m1)


def log_curvature_local(A: DiscreteConnection, m0, m1, m2) -> AlgebraElement:
    return A.log_curvature_local(m0, m1, m2)


def flatness_witness(A: DiscreteConnection, n_samples: int = 1000, seed: int = 0,
                     scale: float | None = None):
    """First sampled triple with ``B_s != e``, or ``None``."""
    rng = random.Random(seed)
    for i in range(n_samples):
        s = scale if scale is not None else (None if i % 2 == 0 else 1.0)
        t = A.sample_tuple(rng, 3, s)
        if not A.curvature_local(*t).is_identity():
            return t
    return None


def is_flat_on_samples(A: DiscreteConnection, n_samples: int = 1000, seed: int = 0) -> bool:
    return flatness_witness(A, n_samples, seed) is None


def symmetry_witness(A: DiscreteConnection, n_samples: int = 1000, seed: int = 0):
    rng = random.Random(seed)
    for i in range(n_samples):
        m0, m1 = A.sample_pair(rng, None if i % 2 == 0 else 1.0)
        if not A.in_v2(m1, m0):
            continue
        if not (A.A_s(m0, m1) * A.A_s(m1, m0)).is_identity():
            return m0, m1
    return None


def is_symmetric_on_samples(A: DiscreteConnection, n_samples: int = 1000, seed: int = 0) -> bool:
    return symmetry_witness(A, n_samples, seed) is None
