"""Named randomized property suites run by ``dconn verify``.

Each suite samples ``cases`` inputs from a seeded generator and returns
``{"name", "cases", "failures", "max_deviation"}``.  A case fails when the
checked identity is off by more than the group tolerance; cases whose
preconditions cannot be met on the sample are not counted.
"""

from __future__ import annotations

import math
import random
from typing import Callable

from . import group as grp
from .bundle import BundlePoint, act, kappa
from .complex import Chain, Cochain, Simplex, boundary, coboundary, integrate, pushforward
from .connection import (DiscreteConnection, connection_from_lift, random_element)
from .errors import DomainError
from .transport import (DiscretePath, LoopSampler, connection_defect_product, curvature_product,
                        holonomy, log_safe_step, parallel_transport, verify_phase_theorems)

SCALES = (None, 1.0, 0.1)


class SuiteResult(dict):
    @property
    def ok(self) -> bool:
        return self["failures"] == 0


class _Tally:
    def __init__(self, name: str, tol: float):
        self.name = name
        self.tol = tol
        self.cases = 0
        self.failures = 0
        self.max_deviation = 0.0

    def record(self, deviation: float):
        self.cases += 1
        self.max_deviation = max(self.max_deviation, deviation)
        if not deviation <= self.tol:
            self.failures += 1

    def fail(self):
        self.cases += 1
        self.failures += 1

    def result(self) -> SuiteResult:
        return SuiteResult(name=self.name, cases=self.cases, failures=self.failures,
                           max_deviation=self.max_deviation)


def _sample(A: DiscreteConnection, rng: random.Random, n: int, region, i: int):
    """An ``n``-tuple in ``region``, cycling through sampling scales."""
    for k in range(len(SCALES)):
        try:
            return A.sample_tuple(rng, n, SCALES[(i + k) % len(SCALES)], region)
        except DomainError:
            continue
    return None


def _bundle_points(A: DiscreteConnection, rng: random.Random, base) -> list[BundlePoint]:
    return [BundlePoint(m, random_element(A.group, rng)) for m in base]


def wiggly_cochain(A: DiscreteConnection, rng: random.Random) -> Cochain:
    """A 0-cochain with wiggly, seed-dependent coordinates."""
    d, k = A.patch.dim, A.group.k
    freqs = [[rng.uniform(0.5, 3.0) for _ in range(d)] for _ in range(k)]
    shifts = [rng.uniform(-1.0, 1.0) for _ in range(k)]

    def value(T: Simplex):
        m = T.vertices[0]
        return A.group.element([s + sum(math.sin(f * x) for f, x in zip(fr, m)) + 0.1 * sum(m)
                                for fr, s in zip(freqs, shifts)])

    return Cochain(0, A.group, value, name="alpha0")


def suite_stokes(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """``∫_{∂T} α = ∫_T δα`` for ``α = [A_s]`` and, on ``W''``-small simplexes, ``[LA_s]``."""
    t = _Tally("stokes", A.group.tolerance)
    a_s, la_s = A.local_cochain(), A.log_cochain()
    for i in range(cases):
        alpha = la_s if i % 2 else a_s
        verts = _sample(A, rng, 3, alpha.region, i)
        if verts is None:
            continue
        T = Chain.of(*verts)
        t.record(integrate(alpha, boundary(T)).distance(integrate(coboundary(alpha), T)))
    return t.result()


def suite_ddzero(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """``∂∂ = 0`` on random integer 2-chains (exact)."""
    t = _Tally("ddzero", 0.0)
    for i in range(cases):
        n_terms = rng.randint(1, 4)
        pool = [A.patch.sample(rng) for _ in range(4)]
        c = Chain(2, [(Simplex(tuple(rng.choice(pool) for _ in range(3))), rng.randint(-3, 3))
                      for _ in range(n_terms)])
        if c.is_zero():
            c = Chain.of(*pool[:3])
        t.record(0.0 if boundary(boundary(c)).is_zero() else 1.0)
    return t.result()


def suite_ddelta(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """``δδα₀ = e`` on 2-simplexes for a seed-dependent 0-cochain."""
    t = _Tally("ddelta", A.group.tolerance)
    alpha0 = wiggly_cochain(A, rng)
    dd = coboundary(coboundary(alpha0))
    e = A.group.identity()
    for i in range(cases):
        verts = _sample(A, rng, 3, dd.region, i)
        t.record(integrate(dd, Simplex(verts)).distance(e))
    return t.result()


def suite_dA_eq_B(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """``δ[A_s] = [B_s]`` on V, ``δ[A] = [B]`` on Q."""
    t = _Tally("dA_eq_B", A.group.tolerance)
    d_local, b_local = coboundary(A.local_cochain()), A.local_curvature_cochain()
    d_global, b_global = coboundary(A.connection_cochain()), A.curvature_cochain()
    for i in range(cases):
        verts = _sample(A, rng, 3, A.v2_region, i)
        if verts is None:
            continue
        if i % 2:
            T = Simplex(tuple(_bundle_points(A, rng, verts)))
            t.record(d_global(T).distance(b_global(T)))
        else:
            T = Simplex(verts)
            t.record(d_local(T).distance(b_local(T)))
    return t.result()


def suite_dLA_eq_LB(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """``δ[LA_s] = [LB_s]`` on ``W''``-small 2-simplexes."""
    t = _Tally("dLA_eq_LB", A.group.tolerance)
    d_la, lb = coboundary(A.log_cochain()), A.log_curvature_cochain()
    for i in range(cases):
        verts = _sample(A, rng, 3, A.w_region, i)
        if verts is None:
            continue
        T = Simplex(verts)
        t.record(d_la(T).distance(lb(T)))
    return t.result()


def suite_exp_pushforward(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """``exp_* [LA_s] = [A_s]`` and ``exp_* [LB_s] = [B_s]`` on ``W''``-small simplexes."""
    t = _Tally("exp_pushforward", A.group.tolerance)
    pairs = ((pushforward(grp.exp, A.log_cochain(), algebra=False), A.local_cochain()),
             (pushforward(grp.exp, A.log_curvature_cochain(), algebra=False),
              A.local_curvature_cochain()))
    for i in range(cases):
        pushed, target = pairs[i % 2]
        verts = _sample(A, rng, pushed.dim + 1, A.w_region, i)
        if verts is None:
            continue
        T = Simplex(verts)
        t.record(pushed(T).distance(target(T)))
    return t.result()


def suite_product_formula(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """``(∏ A(q_{k-1}, q_k)^-1) A(q_0, q_N) = ∏ B(q_0, q_k, q_{k+1})^-1`` on bundle paths."""
    t = _Tally("product_formula", A.group.tolerance)
    for i in range(cases):
        base = _sample(A, rng, rng.randint(3, 9), A.v2_region, i)
        if base is None:
            continue
        q = DiscretePath(tuple(_bundle_points(A, rng, base)))
        t.record(connection_defect_product(A, q).distance(curvature_product(A, q)))
    return t.result()


def suite_lift_roundtrip(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """``A -> h_A -> A_h`` returns ``A`` and ``h -> A_h -> h_{A_h}`` returns ``h``."""
    t = _Tally("lift_roundtrip", A.group.tolerance)
    B = connection_from_lift(A.horizontal_lift, A.group, A.patch, A.domain, n_check=0)
    for i in range(cases):
        pair = _sample(A, rng, 2, A.v2_region, i)
        if pair is None:
            continue
        q0, q1 = _bundle_points(A, rng, pair)
        if i % 2:
            t.record(B.eval(q0, q1).distance(A.eval(q0, q1)))
        else:
            _, lifted = A.horizontal_lift(q0, q1.base)
            _, relifted = B.horizontal_lift(q0, q1.base)
            t.record(lifted.fiber.distance(relifted.fiber))
    return t.result()


def suite_exact_implies_flat(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """Curvature of an exact connection is ``e`` on sampled triples."""
    if not (A.spec and "exact" in A.spec):
        raise ValueError("suite exact_implies_flat needs an exact connection (connection.exact)")
    t = _Tally("exact_implies_flat", A.group.tolerance)
    e = A.group.identity()
    for i in range(cases):
        verts = _sample(A, rng, 3, A.v2_region, i)
        if verts is None:
            continue
        t.record(A.curvature_local(*verts).distance(e))
    return t.result()


def suite_equivariance(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """Equivariance of ``A``, ``kappa`` and parallel transport under fiber changes."""
    t = _Tally("equivariance", A.group.tolerance)
    for i in range(cases):
        base = _sample(A, rng, 3, A.v2_region, i)
        if base is None:
            continue
        q0, q1, _ = _bundle_points(A, rng, base)
        g0, g1 = random_element(A.group, rng), random_element(A.group, rng)
        kind = i % 3
        if kind == 0:
            lhs = A.eval(act(g0, q0), act(g1, q1))
            rhs = g1 * A.eval(q0, q1) * g0.inverse()
        elif kind == 1:
            q1_same = BundlePoint(q0.base, q1.fiber)
            lhs = kappa(act(g0, q0), act(g1, q1_same))
            rhs = g1 * kappa(q0, q1_same) * g0.inverse()
        else:
            lhs = parallel_transport(A, base, act(g0, q0)).fiber
            rhs = act(g0, parallel_transport(A, base, q0)).fiber
        t.record(lhs.distance(rhs))
    return t.result()


def suite_phase_agreement(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """All applicable holonomy formulas agree on random loops; half of the
    loops are confined to a log-safe ball so the algebra formulas apply."""
    t = _Tally("phase_agreement", A.group.tolerance)
    global_sampler = LoopSampler(A.patch, None, max_step=max(hi - lo for lo, hi in A.patch.sample_box))
    local = []
    for _ in range(4):
        centre = A.patch.sample(rng)
        try:
            b = log_safe_step(A, centre, n_probe=16, seed=rng.randrange(2**31))
        except DomainError:
            continue
        local.append(LoopSampler(A.patch, centre, max_step=b, radius=b / 2))
    for i in range(cases):
        sampler = global_sampler if i % 2 == 0 or not local else local[i % len(local)]
        try:
            loop = sampler(rng)
            report = verify_phase_theorems(A, loop)
        except DomainError:
            continue
        if any(r.status == "error" for r in report.methods.values()):
            t.fail()
        else:
            t.record(report.max_deviation)
    return t.result()


def suite_holonomy_concat(A: DiscreteConnection, cases: int, rng: random.Random) -> SuiteResult:
    """Holonomy of a concatenated loop is the product of the holonomies."""
    t = _Tally("holonomy_concat", A.group.tolerance)
    for _ in range(cases):
        base = A.patch.sample(rng)
        sampler = LoopSampler(A.patch, base, max_step=1.0)
        try:
            l1, l2 = sampler(rng), sampler(rng)
            lhs = holonomy(A, l1.concat(l2))
            rhs = holonomy(A, l1) * holonomy(A, l2)
        except DomainError:
            continue
        t.record(lhs.distance(rhs))
    return t.result()


SUITES: dict[str, Callable[[DiscreteConnection, int, random.Random], SuiteResult]] = {
    "stokes": suite_stokes,
    "ddzero": suite_ddzero,
    "ddelta": suite_ddelta,
    "dA_eq_B": suite_dA_eq_B,
    "dLA_eq_LB": suite_dLA_eq_LB,
    "exp_pushforward": suite_exp_pushforward,
    "product_formula": suite_product_formula,
    "lift_roundtrip": suite_lift_roundtrip,
    "exact_implies_flat": suite_exact_implies_flat,
    "equivariance": suite_equivariance,
    "phase_agreement": suite_phase_agreement,
    "holonomy_concat": suite_holonomy_concat,
}


def run_suite(name: str, A: DiscreteConnection, cases: int = 1000, seed: int = 0) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    return SUITES[name](A, cases, random.Random(f"{name}:{seed}"))
