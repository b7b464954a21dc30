"""Discrete parallel transport, holonomy and the holonomy phase formulas.

For a loop ``m_0, ..., m_N = m_0`` in the trivialized patch the holonomy
phase can be computed six ways:

``direct``              lift the loop horizontally and compare end points
``local_product``       product of ``A_s(m_{k-1}, m_k)^-1``
``connection_cochain``  ``(∫_m~ [A_s])^-1`` over the interpolating 1-chain
``curvature_cochain``   ``(∫_σ~ [B_s])^-1`` over the fan 2-chain
``log_connection``      ``exp(-∫_m~ [LA_s])``
``log_curvature``       ``exp(-∫_σ~ [LB_s])``

Each formula has its own precondition on the loop; when it fails the method
is reported as skipped rather than failed.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import group as grp
from .bundle import BasePatch, BundlePoint, act, as_point, kappa, same_base, section
from .complex import Chain, Region, Simplex, boundary, integrate, is_degenerate_chain
from .connection import DiscreteConnection
from .errors import DomainError, NotALoopError
from .group import GroupElement

METHODS = ("direct", "local_product", "connection_cochain", "curvature_cochain",
           "log_connection", "log_curvature")


@dataclass(frozen=True)
class DiscretePath:
    points: tuple

    def __post_init__(self):
        pts = tuple(p if isinstance(p, BundlePoint) else as_point(p) for p in self.points)
        if not pts:
            raise ValueError("a discrete path has at least one point")
        object.__setattr__(self, "points", pts)

    @property
    def length(self) -> int:
        return len(self.points) - 1

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, k):
        return self.points[k]

    def steps(self):
        return zip(self.points[:-1], self.points[1:])

    def is_loop(self, tol: float = 1e-9) -> bool:
        a, b = self.points[0], self.points[-1]
        if isinstance(a, BundlePoint):
            return same_base(a.base, b.base, tol) and a.fiber.isclose(b.fiber, tol)
        return same_base(a, b, tol)

    def closed(self, tol: float = 1e-9) -> DiscretePath:
        """The same loop with its end point snapped exactly onto its start."""
        if not self.is_loop(tol):
            raise NotALoopError(f"path ends at {self.points[-1]}, starts at {self.points[0]}")
        return DiscretePath(self.points[:-1] + (self.points[0],))

    def first_unsubordinated_step(self, region: Region | Callable) -> int | None:
        """Index ``k`` of the first step ``(x_{k-1}, x_k)`` outside ``region``."""
        for k, (a, b) in enumerate(self.steps(), start=1):
            if not region(a, b):
                return k
        return None

    def concat(self, other: DiscretePath) -> DiscretePath:
        return DiscretePath(self.points + other.points[1:])

    def to_json(self) -> list:
        return [p.to_json() if isinstance(p, BundlePoint) else list(p) for p in self.points]

    @classmethod
    def from_json(cls, data: list) -> DiscretePath:
        return cls(tuple(as_point(p) for p in data))


def _path(p) -> DiscretePath:
    return p if isinstance(p, DiscretePath) else DiscretePath(tuple(p))


def _default_start(A: DiscreteConnection, m_path: DiscretePath) -> BundlePoint:
    return section(m_path[0], A.group)


def lift_path(A: DiscreteConnection, m_path, q0: BundlePoint | None = None) -> DiscretePath:
    """Discrete horizontal lift ``q_k = h_2(q_{k-1}, m_k)``."""
    m_path = _path(m_path)
    q = _default_start(A, m_path) if q0 is None else q0
    if not same_base(q.base, m_path[0], A.group.tolerance):
        raise DomainError(f"start point {q.base} is not over {m_path[0]}")
    lifted = [q]
    for k, m in enumerate(m_path.points[1:], start=1):
        try:
            _, q = A.horizontal_lift(q, m)
        except DomainError as exc:
            raise DomainError(f"step {k} of the path leaves U'': {exc}") from exc
        lifted.append(q)
    return DiscretePath(tuple(lifted))


def parallel_transport(A: DiscreteConnection, m_path, q0: BundlePoint | None = None) -> BundlePoint:
    return lift_path(A, m_path, q0)[-1]


def _loop(A: DiscreteConnection, m_loop) -> DiscretePath:
    m_loop = _path(m_loop)
    if not m_loop.is_loop(A.group.tolerance):
        raise NotALoopError(f"path ends at {m_loop[-1]}, starts at {m_loop[0]}")
    return m_loop


def holonomy(A: DiscreteConnection, m_loop, q0: BundlePoint | None = None) -> GroupElement:
    """``kappa(q0, PT(m)(q0))``."""
    m_loop = _loop(A, m_loop)
    q = _default_start(A, m_loop) if q0 is None else q0
    return kappa(q, parallel_transport(A, m_loop, q))


def holonomy_via_local_product(A: DiscreteConnection, m_loop) -> GroupElement:
    m_loop = _loop(A, m_loop)
    result = A.group.identity()
    for a, b in m_loop.steps():
        result = result * A.A_s(a, b).inverse()
    return result


def connection_defect_product(A: DiscreteConnection, q_path) -> GroupElement:
    """``(prod_k A(q_{k-1}, q_k)^-1) A(q_0, q_N)``."""
    q_path = _path(q_path)
    result = A.group.identity()
    for a, b in q_path.steps():
        result = result * A.eval(a, b).inverse()
    return result * A.eval(q_path[0], q_path[-1])


def curvature_product(A: DiscreteConnection, q_path) -> GroupElement:
    """``prod_{k=1}^{N-1} B(q_0, q_k, q_{k+1})^-1``."""
    q_path = _path(q_path)
    q0 = q_path[0]
    result = A.group.identity()
    for k in range(1, q_path.length):
        result = result * A.curvature(q0, q_path[k], q_path[k + 1]).inverse()
    return result


def interpolating_chain(m_path, region: Region | None = None) -> Chain:
    """``sum_k (m_{k-1}, m_k)``."""
    m_path = _path(m_path)
    terms = []
    for k, (a, b) in enumerate(m_path.steps(), start=1):
        if region is not None and not region(a, b):
            raise DomainError(f"step {k} ({a}, {b}) is not small for {region.name}")
        terms.append((Simplex((a, b)), 1))
    return Chain(1, terms)


def fan_two_chain(m_loop, region: Region | None = None) -> Chain:
    """``sum_{j=1}^{N-1} (m_0, m_j, m_{j+1})``.

    Its boundary is the interpolating chain minus the degenerate simplex
    ``(m_0, m_0)``.
    """
    m_loop = _path(m_loop)
    if m_loop.length < 2:
        raise DomainError("the fan needs a loop with at least two steps")
    m0 = m_loop[0]
    terms = []
    for j in range(1, m_loop.length):
        verts = (m0, m_loop[j], m_loop[j + 1])
        if region is not None and not region.contains_tuple(verts):
            raise DomainError(f"fan simplex {verts} is not small for {region.name}")
        terms.append((Simplex(verts), 1))
    return Chain(2, terms)


def fan_boundary_defect(m_loop) -> Chain:
    """``boundary(fan) - interpolating``; supported on degenerate simplexes."""
    return boundary(fan_two_chain(m_loop)) - interpolating_chain(m_loop)


def equal_up_to_degenerate(c1: Chain, c2: Chain) -> bool:
    return is_degenerate_chain(c1 - c2)


def fan_triples_in(region: Region, m_loop: DiscretePath) -> bool:
    """``(m_0, m_k, m_{k+1}) ∈ region^(3)`` for ``k = 0..N-1``."""
    m0 = m_loop[0]
    return all(region.contains_tuple((m0, m_loop[k], m_loop[k + 1]))
               for k in range(m_loop.length))


@dataclass
class MethodResult:
    status: str  # ok | skipped | error
    value: GroupElement | None = None
    reason: str = ""

    def to_json(self) -> dict:
        out = {"value": None if self.value is None else self.value.to_json(), "status": self.status}
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class HolonomyReport:
    loop: DiscretePath
    methods: dict = field(default_factory=dict)
    agreement: bool = False
    max_deviation: float = 0.0

    def value(self, name: str) -> GroupElement | None:
        r = self.methods.get(name)
        return r.value if r is not None and r.status == "ok" else None

    @property
    def phase_direct(self):
        return self.value("direct")

    @property
    def phase_local_product(self):
        return self.value("local_product")

    @property
    def phase_connection_cochain(self):
        return self.value("connection_cochain")

    @property
    def phase_curvature_cochain(self):
        return self.value("curvature_cochain")

    @property
    def phase_log_connection(self):
        return self.value("log_connection")

    @property
    def phase_log_curvature(self):
        return self.value("log_curvature")

    def ok_methods(self) -> list[str]:
        return [n for n in METHODS if n in self.methods and self.methods[n].status == "ok"]

    def to_json(self) -> dict:
        return {
            "loop": self.loop.to_json(),
            "methods": {n: self.methods[n].to_json() for n in METHODS if n in self.methods},
            "agreement": self.agreement,
            "max_deviation": self.max_deviation,
        }


def verify_phase_theorems(A: DiscreteConnection, m_loop) -> HolonomyReport:
    m_loop = _loop(A, m_loop).closed(A.group.tolerance)
    report = HolonomyReport(m_loop)
    methods = report.methods

    # the direct method is the reference; if it cannot run the loop is out of scope
    methods["direct"] = MethodResult("ok", holonomy(A, m_loop))

    if m_loop.first_unsubordinated_step(A.in_v2) is None:
        methods["local_product"] = _run(lambda: holonomy_via_local_product(A, m_loop))
    else:
        methods["local_product"] = MethodResult("skipped", reason="loop not subordinated to V''")

    group_ok = fan_triples_in(A.v2_region, m_loop)
    fan_ok = m_loop.length >= 2
    if group_ok:
        m_tilde = interpolating_chain(m_loop)
        methods["connection_cochain"] = _run(lambda: integrate(A.local_cochain(), m_tilde).inverse())
    else:
        methods["connection_cochain"] = MethodResult("skipped", reason="(m0, mk, mk+1) not in V''^(3)")
    if group_ok and fan_ok:
        sigma = fan_two_chain(m_loop)
        methods["curvature_cochain"] = _run(
            lambda: integrate(A.local_curvature_cochain(), sigma).inverse())
    else:
        methods["curvature_cochain"] = MethodResult(
            "skipped", reason="fan is not V''-small" if fan_ok else "loop has fewer than two steps")

    log_ok = fan_triples_in(A.w_region, m_loop)
    if log_ok:
        m_tilde = interpolating_chain(m_loop)
        methods["log_connection"] = _run(lambda: grp.exp(-integrate(A.log_cochain(), m_tilde)))
    else:
        methods["log_connection"] = MethodResult("skipped", reason="(m0, mk, mk+1) not in W''^(3)")
    if log_ok and fan_ok:
        sigma = fan_two_chain(m_loop)
        methods["log_curvature"] = _run(
            lambda: grp.exp(-integrate(A.log_curvature_cochain(), sigma)))
    else:
        methods["log_curvature"] = MethodResult(
            "skipped", reason="fan is not W''-small" if fan_ok else "loop has fewer than two steps")

    values = [methods[n].value for n in report.ok_methods()]
    dev = max((a.distance(b) for a, b in itertools.combinations(values, 2)), default=0.0)
    report.max_deviation = dev
    report.agreement = (dev <= A.group.tolerance
                        and all(r.status != "error" for r in methods.values()))
    return report


def _run(fn) -> MethodResult:
    try:
        return MethodResult("ok", fn())
    except DomainError as exc:
        return MethodResult("error", reason=str(exc))


# sampling ------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopSampler:
    """Random-walk loops at a base point.

    Steps are uniform in a sup-ball of radius ``max_step``; with ``radius`` the
    walk is also confined to the sup-ball of that radius around the base
    point (rejected steps are redrawn).  The final step returns to the base
    point.
    """

    patch: BasePatch
    base_point: tuple | None = None
    max_step: float = 1.0
    radius: float | None = None
    min_steps: int = 2
    max_steps: int = 10

    def __call__(self, rng: random.Random) -> DiscretePath:
        start = self.patch.sample(rng) if self.base_point is None else as_point(self.base_point)
        n = rng.randint(self.min_steps, self.max_steps)
        pts = [start]
        cur = start
        for _ in range(n - 1):
            for _ in range(10_000):
                nxt = tuple(c + rng.uniform(-self.max_step, self.max_step) for c in cur)
                if not self.patch.contains(nxt):
                    continue
                if self.patch.sample_box and not all(lo < x < hi for x, (lo, hi) in
                                                     zip(nxt, self.patch.sample_box)):
                    continue
                if self.radius is not None and max(abs(a - b) for a, b in zip(nxt, start)) >= self.radius:
                    continue
                break
            else:
                raise DomainError("loop sampler could not find an admissible step")
            pts.append(nxt)
            cur = nxt
        pts.append(start)
        return DiscretePath(tuple(pts))

    def to_json(self) -> dict:
        return {"base_point": None if self.base_point is None else list(as_point(self.base_point)),
                "max_step": self.max_step, "radius": self.radius,
                "min_steps": self.min_steps, "max_steps": self.max_steps}


def log_safe_step(A: DiscreteConnection, base_point, upper: float = 10.0, n_probe: int = 64,
                  seed: int = 0, iterations: int = 50, safety: float = 0.9) -> float:
    """Largest ``b`` (found by bisection) such that points in the sup-ball of
    radius ``b / 2`` around ``base_point`` are pairwise in ``W''`` on a probe set.

    Loops confined to that ball satisfy the triple condition of the algebra
    version of the phase formulas.
    """
    base = as_point(base_point)
    rng = random.Random(seed)
    d = len(base)
    unit = [tuple(rng.uniform(-0.5, 0.5) for _ in range(d)) for _ in range(n_probe)]
    unit += [tuple(s * 0.5 for s in signs) for signs in itertools.product((-1.0, 1.0), repeat=d)]
    unit.append((0.0,) * d)

    def ok(b: float) -> bool:
        pts = [tuple(c + b * u for c, u in zip(base, off)) for off in unit]
        if not all(A.patch.contains(p) for p in pts):
            return False
        return all(A.in_w2(p, q) for p in pts for q in pts)

    lo, hi = 0.0, upper
    if ok(hi):
        return hi * safety
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise DomainError(f"no log-safe neighbourhood found around {base}")
    return lo * safety


def log_safe_sampler(A: DiscreteConnection, base_point, min_steps: int = 2, max_steps: int = 10,
                     seed: int = 0) -> LoopSampler:
    b = log_safe_step(A, base_point, seed=seed)
    return LoopSampler(A.patch, as_point(base_point), max_step=b, radius=b / 2,
                       min_steps=min_steps, max_steps=max_steps)


def unique_elements(values: Iterable[GroupElement], tol: float | None = None) -> list[GroupElement]:
    out: list[GroupElement] = []
    for v in values:
        if not any(v.isclose(u, tol) for u in out):
            out.append(v)
    return out


def holonomy_monoid_sample(A: DiscreteConnection, base_point, loop_sampler: Callable,
                           n: int, seed: int = 0) -> list[GroupElement]:
    """Holonomy phases of ``n`` sampled loops at ``base_point`` plus the
    trivial loop, deduplicated within the group tolerance."""
    rng = random.Random(seed)
    base = as_point(base_point)
    phases = [holonomy(A, DiscretePath((base,)))]
    for _ in range(n):
        loop = loop_sampler(rng)
        if not same_base(loop[0], base, A.group.tolerance):
            raise DomainError("sampler produced a loop at the wrong base point")
        phases.append(holonomy(A, loop))
    return unique_elements(phases)


def separated_count(phases: Sequence[GroupElement], min_separation: float) -> int:
    """Size of a greedily chosen subset whose elements are pairwise more than
    ``min_separation`` apart."""
    chosen: list[GroupElement] = []
    for p in phases:
        if all(p.distance(c) > min_separation for c in chosen):
            chosen.append(p)
    return len(chosen)


def circle_closed_form_phase(loop: Sequence[float], mu: float) -> float:
    """``-sum_j (r_j - r_{j-1})^mu`` reduced to ``(-pi, pi]``."""
    from .connection import signed_power
    r = [as_point(x)[0] for x in loop]
    return grp.mod2pi(-math.fsum(signed_power(b - a, mu) for a, b in zip(r, r[1:])))
