"""Acceptance criteria 1-10.

Run with ``pytest tests/test_acceptance.py``; the terminal summary lists one
PASS/FAIL line per criterion.
"""

import json
import math
import random
import sys
import time

import pytest

from discrete_connections import omega_mu
from discrete_connections.bundle import BasePatch, BundlePoint
from discrete_connections.cli import main
from discrete_connections.complex import Chain, Cochain, Simplex, boundary, coboundary, integrate, pushforward
from discrete_connections.connection import (connection_from_lift, from_potential_expressions,
                                             is_flat_on_samples, flatness_witness, random_element)
from discrete_connections.expr import parse, to_text
from discrete_connections.group import GroupDescriptor, exp
from discrete_connections.transport import (DiscretePath, LoopSampler, connection_defect_product,
                                            curvature_product, fan_two_chain, holonomy,
                                            holonomy_monoid_sample, interpolating_chain,
                                            log_safe_sampler, separated_count)

from oracles import angular_distance, omega_closed_form_angle, omega_curvature_angle

TOL = 1e-9
MUS = (1, 2, 3)
N_LOOPS = 1000


def random_loops(seed, n=N_LOOPS):
    """Loops in (0, 10) with N in 1..10 steps."""
    rng = random.Random(seed)
    loops = []
    for _ in range(n):
        N = rng.randint(1, 10)
        pts = [rng.uniform(0.0, 10.0) for _ in range(N)]
        loops.append(pts + [pts[0]])
    return loops


@pytest.fixture(scope="module")
def loops():
    return random_loops(2024)


@pytest.mark.criterion(1, "phase formula for omega_mu: direct holonomy = closed form")
def test_criterion_1_phase_formula(loops, record_property):
    worst = 0.0
    elapsed = 0.0
    for mu in MUS:
        A = omega_mu(mu)
        t0 = time.perf_counter()
        values = [holonomy(A, loop).coords[0] for loop in loops]
        elapsed += time.perf_counter() - t0
        for loop, v in zip(loops, values):
            worst = max(worst, angular_distance(v, omega_closed_form_angle(loop, mu)))
    record_property("loops", len(loops) * len(MUS))
    record_property("max_dev", f"{worst:.2e}")
    record_property("runtime_s", f"{elapsed:.2f}")
    assert worst < TOL
    assert elapsed < 5.0


@pytest.mark.criterion(2, "group phase theorem: connection and fan curvature integrals")
def test_criterion_2_group_version(loops, record_property):
    worst = 0.0
    fans = 0
    for mu in MUS:
        A = omega_mu(mu)
        a_s, b_s = A.local_cochain(), A.local_curvature_cochain()
        for loop in loops:
            direct = holonomy(A, loop)
            via_chain = integrate(a_s, interpolating_chain(loop, A.v2_region)).inverse()
            worst = max(worst, via_chain.distance(direct))
            if len(loop) > 2:
                try:
                    sigma = fan_two_chain(loop, A.v2_region)
                except Exception:
                    continue
                fans += 1
                worst = max(worst, integrate(b_s, sigma).inverse().distance(direct))
    # the worked loop: the fan integral telescopes to the direct phase
    A = omega_mu(2)
    worked = [1.0, 1.5, 1.0]
    fan_value = integrate(A.local_curvature_cochain(), fan_two_chain(worked)).inverse()
    assert fan_value.coords[0] == pytest.approx(-0.5, abs=TOL)
    assert fan_value.isclose(holonomy(A, worked))
    record_property("fans", fans)
    record_property("max_dev", f"{worst:.2e}")
    assert fans == sum(len(l) > 2 for l in loops) * len(MUS)
    assert worst < TOL


@pytest.mark.criterion(3, "algebra phase theorem on loops with steps in W''")
def test_criterion_3_algebra_version(record_property):
    A = omega_mu(2)
    rng = random.Random(7)
    centres = [(rng.uniform(0.5, 9.5),) for _ in range(10)]
    samplers = [log_safe_sampler(A, c, min_steps=1, max_steps=10) for c in centres]
    la, lb = A.log_cochain(), A.log_curvature_cochain()
    worst, used_fan = 0.0, 0
    for i in range(N_LOOPS):
        loop = samplers[i % len(samplers)](rng)
        m0 = loop[0]
        for k in range(loop.length):
            t = (m0, loop[k], loop[k + 1])
            assert A.w_region.contains_tuple(t)
            assert abs(math.remainder((loop[k + 1][0] - loop[k][0]) ** 2, 2 * math.pi)) < math.pi / 3
        direct = holonomy(A, loop)
        worst = max(worst, exp(-integrate(la, interpolating_chain(loop))).distance(direct))
        if loop.length >= 2:
            used_fan += 1
            worst = max(worst, exp(-integrate(lb, fan_two_chain(loop))).distance(direct))
    record_property("loops", N_LOOPS)
    record_property("with_fan", used_fan)
    record_property("max_dev", f"{worst:.2e}")
    assert worst < TOL


@pytest.mark.criterion(4, "flatness dichotomy: mu=1 flat, mu=2 has a curved witness")
def test_criterion_4_flatness(record_property):
    assert is_flat_on_samples(omega_mu(1), 10_000, seed=1)
    A = omega_mu(2)
    t = flatness_witness(A, 10_000, seed=1)
    assert t is not None
    log_b = A.log_curvature_local(*t).norm()
    record_property("witness", tuple(round(m[0], 4) for m in t))
    record_property("abs_log_B", f"{log_b:.3f}")
    assert log_b > 0.1
    assert angular_distance(A.curvature_local(*t).coords[0],
                            omega_curvature_angle(*(m[0] for m in t), 2)) < TOL


def _small_triples(A, region, n, seed, scale):
    rng = random.Random(seed)
    return [A.sample_tuple(rng, 3, scale if i % 2 else None, region) for i in range(n)]


@pytest.mark.criterion(5, "cochain identities: dA_s = B_s, dLA_s = LB_s, exp_* LA_s = A_s, Stokes")
def test_criterion_5_cochain_identities(record_property):
    worst = 0.0
    for mu in MUS:
        A = omega_mu(mu)
        a_s, b_s, la, lb = (A.local_cochain(), A.local_curvature_cochain(), A.log_cochain(),
                            A.log_curvature_cochain())
        d_a, d_la = coboundary(a_s), coboundary(la)
        exp_la = pushforward(exp, la, algebra=False)
        for t in _small_triples(A, A.v2_region, N_LOOPS, mu, 2.0):
            T = Simplex(t)
            worst = max(worst, d_a(T).distance(b_s(T)))
            worst = max(worst, angular_distance(b_s(T).coords[0],
                                                omega_curvature_angle(*(m[0] for m in t), mu)))
            worst = max(worst, integrate(a_s, boundary(Chain.of(*t))).distance(d_a(T)))
        for t in _small_triples(A, A.w_region, N_LOOPS, 10 + mu, 0.5):
            T = Simplex(t)
            worst = max(worst, d_la(T).distance(lb(T)))
            worst = max(worst, integrate(la, boundary(Chain.of(*t))).distance(d_la(T)))
            edge = T.face(0)
            worst = max(worst, exp_la(edge).distance(a_s(edge)))
    record_property("simplexes_per_identity", N_LOOPS * len(MUS))
    record_property("max_dev", f"{worst:.2e}")
    assert worst < TOL


@pytest.mark.criterion(6, "structural laws: dd = 0, delta delta = e, product formula")
def test_criterion_6_structural(record_property):
    rng = random.Random(6)
    for _ in range(N_LOOPS):
        pool = [(rng.uniform(0, 10),) for _ in range(4)]
        c = Chain(2, [(Simplex(tuple(rng.choice(pool) for _ in range(3))), rng.randint(-5, 5))
                      for _ in range(rng.randint(1, 5))])
        assert boundary(boundary(c)).is_zero()

    G = GroupDescriptor.circle()
    alpha0 = Cochain(0, G, lambda T: G.element([math.sin(3 * T.vertices[0][0]) + T.vertices[0][0] ** 2]))
    dd = coboundary(coboundary(alpha0))
    worst_dd = max(dd(Simplex(tuple((rng.uniform(0, 10),) for _ in range(3)))).distance(G.identity())
                   for _ in range(N_LOOPS))

    A = omega_mu(3)
    worst_prod = 0.0
    for _ in range(N_LOOPS):
        n = rng.randint(3, 9)
        path = [BundlePoint((rng.uniform(0, 10),), random_element(G, rng)) for _ in range(n)]
        worst_prod = max(worst_prod, connection_defect_product(A, path).distance(curvature_product(A, path)))
    record_property("max_dev_dd", f"{worst_dd:.2e}")
    record_property("max_dev_product", f"{worst_prod:.2e}")
    assert worst_dd < TOL and worst_prod < TOL


@pytest.mark.criterion(7, "round trip between A and its horizontal lift")
def test_criterion_7_lift_round_trip(record_property):
    A = omega_mu(2)
    B = connection_from_lift(A.horizontal_lift, A.group, A.patch)
    rng = random.Random(7)
    worst = 0.0
    for _ in range(N_LOOPS):
        m0, m1 = A.sample_pair(rng)
        q0, q1 = BundlePoint(m0, random_element(A.group, rng)), BundlePoint(m1, random_element(A.group, rng))
        worst = max(worst, B.eval(q0, q1).distance(A.eval(q0, q1)))
        worst = max(worst, B.horizontal_lift(q0, m1)[1].fiber.distance(A.horizontal_lift(q0, m1)[1].fiber))
    record_property("pairs", N_LOOPS)
    record_property("max_dev", f"{worst:.2e}")
    assert worst < TOL


def random_potential(rng, dim):
    """Text of a random smooth, bounded-growth function of m0."""
    shapes = ["sin({})", "cos({})", "({})^2", "({})^3 / 50", "log(1 + ({})^2)", "abs({})",
              "exp(-({})^2)", "pow({}, 2) / 10"]
    terms = []
    for _ in range(rng.randint(2, 4)):
        j = rng.randrange(dim)
        inner = f"{rng.uniform(-2, 2):.3f} * m0[{j}] + {rng.uniform(-1, 1):.3f}"
        terms.append(f"{rng.uniform(-3, 3):.3f} * " + rng.choice(shapes).format(inner))
    return " + ".join(terms)


@pytest.mark.criterion(8, "exact connections from random 0-cochains are flat")
def test_criterion_8_exact_implies_flat(record_property):
    rng = random.Random(8)
    setups = [(GroupDescriptor.circle(), 1), (GroupDescriptor.torus(2), 2), (GroupDescriptor.vector(1), 2)]
    worst = 0.0
    texts = []
    for i in range(20):
        G, d = setups[i % len(setups)]
        exprs = [to_text(parse(random_potential(rng, d))) for _ in range(G.k)]
        assert all(parse(to_text(parse(e))) == parse(e) for e in exprs)
        texts.extend(exprs)
        A = from_potential_expressions(exprs, G, BasePatch(d, ((0.0, 10.0),) * d))
        for t in _small_triples(A, A.v2_region, N_LOOPS, i, 1.0):
            worst = max(worst, A.curvature_local(*t).distance(G.identity()))
    record_property("connections", 20)
    record_property("max_dev", f"{worst:.2e}")
    assert worst < TOL


@pytest.mark.criterion(9, "holonomy monoid: mu=1 gives only e, mu=2 spreads over the circle")
def test_criterion_9_monoid(record_property):
    base = (5.0,)
    flat = omega_mu(1)
    phases = holonomy_monoid_sample(flat, base, LoopSampler(flat.patch, base, max_step=3.0), N_LOOPS, seed=9)
    assert len(phases) == 1 and phases[0].is_identity()
    curved = omega_mu(2)
    phases = holonomy_monoid_sample(curved, base, LoopSampler(curved.patch, base, max_step=3.0),
                                    N_LOOPS, seed=9)
    count = separated_count(phases, 0.01)
    record_property("separated_phases", count)
    assert count >= 100


@pytest.mark.criterion(10, "CLI determinism: same config and seed give identical reports")
def test_criterion_10_cli_determinism(tmp_path, capsys):
    cfg = tmp_path / "scenario.json"
    cfg.write_text(json.dumps({
        "group": {"kind": "circle"},
        "connection": {"builtin": "omega_mu", "mu": 2},
        "seed": 123,
        "loops": [[1.0, 1.5, 1.0], {"count": 100, "max_step": 1.5}, {"count": 50, "max_step": "auto"}],
        "checks": ["stokes", "dA_eq_B", "phase_agreement", "product_formula"],
        "cases": 200,
    }))

    def report(command):
        main([command, "--config", str(cfg)])
        data = json.loads(capsys.readouterr().out)
        data.pop("generated_at")
        return json.dumps(data, sort_keys=True)

    for command in ("holonomy", "verify"):
        assert report(command) == report(command)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
