from __future__ import annotations

import numpy as np
import pytest

from geomint.integrators import METHODS, SolveConfig, fixed_integrate
from geomint.lie import exp_so3
from geomint.systems import get_system, symplectic_integrate
from geomint.systems.heavytop import (
    BRULS_TOP,
    HeavyTopParams,
    body_energy,
    bruls_momentum,
    ext_energy,
    ext_initial_p,
    heavytop_body_f,
    heavytop_ext_f,
    heavytop_liepoisson_f,
    heavytop_spatial_f,
    pack_ext,
    pack_spatial,
    unpack_ext,
    unpack_spatial,
)

rng = np.random.default_rng(5)


def _random_state():
    Q = exp_so3(rng.normal(size=3))
    pi = rng.normal(size=3)
    return Q, pi


# -- parameters ----------------------------------------------------------------


def test_benchmark_parameters():
    assert BRULS_TOP.inertia == (0.234375, 0.46875, 0.234375)
    assert BRULS_TOP.mass == 15.0 and BRULS_TOP.length == 2.0
    assert BRULS_TOP.gravity == 1.0
    assert BRULS_TOP.mgl == 30.0
    np.testing.assert_array_equal(BRULS_TOP.g0, [0.0, 0.0, -9.81])
    np.testing.assert_allclose(
        bruls_momentum(), [0.0, 0.46875 * 150.0, 0.234375 * -4.61538], atol=1e-15
    )


def test_params_validation():
    with pytest.raises(ValueError):
        HeavyTopParams(inertia=(1.0, -1.0, 1.0), mass=1.0, length=1.0)
    with pytest.raises(ValueError):
        HeavyTopParams(inertia=(1.0, 1.0, 1.0), mass=1.0, length=1.0, axis=(1.0, 1.0, 0.0))


# -- field oracles --------------------------------------------------------------


def test_body_field_oracle():
    params = BRULS_TOP
    Q, _ = _random_state()
    Pi = np.array([1.0, -2.0, 0.5])
    m = np.concatenate([Q.ravel(), Pi])
    out = heavytop_body_f(params, m)
    omega = Pi / np.asarray(params.inertia)
    gamma = Q.T @ params.g0
    np.testing.assert_allclose(out[:3], omega, atol=1e-15)
    np.testing.assert_allclose(
        out[3:], np.cross(Pi, omega) + 30.0 * np.cross(gamma, [0.0, 1.0, 0.0]),
        atol=1e-13,
    )


def test_spatial_field_consistent_with_body_form():
    # push the body-form derivative through pi = Q Pi and compare
    params = BRULS_TOP
    Q, _ = _random_state()
    Pi = rng.normal(size=3)
    body = np.concatenate([Q.ravel(), Pi])
    fb = heavytop_body_f(params, body)
    omega_b, Pi_dot = fb[:3], fb[3:]
    Q_dot = Q @ np.array(
        [[0, -omega_b[2], omega_b[1]], [omega_b[2], 0, -omega_b[0]], [-omega_b[1], omega_b[0], 0]]
    )
    pi_dot_expected = Q_dot @ Pi + Q @ Pi_dot

    spatial = np.concatenate([Q.ravel(), Q @ Pi])
    fs = heavytop_spatial_f(params, spatial)
    system = get_system("heavytop-spatial")
    dm = system.action.generator(fs, spatial)
    np.testing.assert_allclose(dm[:9].reshape(3, 3), Q_dot, atol=1e-11)
    np.testing.assert_allclose(dm[9:12], pi_dot_expected, atol=1e-11)


def test_liepoisson_field_reproduces_reduced_equations():
    params = BRULS_TOP
    mu = rng.normal(size=6)
    Pi, Gamma = mu[:3], mu[3:]
    system = get_system("heavytop-lp")
    dmu = system.action.generator(heavytop_liepoisson_f(params, mu), mu)
    omega = Pi / np.asarray(params.inertia)
    np.testing.assert_allclose(
        dmu[:3], np.cross(Pi, omega) + 30.0 * np.cross(Gamma, [0, 1.0, 0]), atol=1e-12
    )
    np.testing.assert_allclose(dmu[3:], np.cross(Gamma, omega), atol=1e-12)


def test_ext_field_keeps_p_frozen():
    params = BRULS_TOP
    Q, pi = _random_state()
    m = np.concatenate([Q.ravel(), pi, ext_initial_p(params), rng.normal(size=3)])
    out = heavytop_ext_f(params, m)
    np.testing.assert_array_equal(out[6:9], np.zeros(3))


def test_ext_energy_is_body_energy_plus_constant():
    # with p = -Mgl X: |p - Gamma|^2/2 - |Gamma|^2/2 = |p|^2/2 + Mgl X.Gamma
    params = BRULS_TOP
    Q, pi = _random_state()
    ext = np.concatenate([Q.ravel(), pi, ext_initial_p(params), np.zeros(3)])
    body = np.concatenate([Q.ravel(), Q.T @ pi])
    const = 0.5 * 30.0**2
    assert ext_energy(params, ext) == pytest.approx(body_energy(params, body) + const)


# -- energy is a first integral of each field -----------------------------------


@pytest.mark.parametrize(
    "system_id", ["heavytop-body", "heavytop-spatial", "heavytop-lp", "heavytop-ext"]
)
def test_energy_directional_derivative_vanishes(system_id):
    system = get_system(system_id)
    y = system.initial
    dy = system.action.generator(system.field(y), y)
    eps = 1e-7
    d = (system.energy(y + eps * dy) - system.energy(y - eps * dy)) / (2 * eps)
    assert abs(d) < 1e-5 * max(1.0, abs(system.energy(y)))


# -- formulation equivalence ------------------------------------------------------


def test_all_formulations_agree_on_short_runs():
    # each run carries its own truncation error, so the comparison
    # tolerance reflects the fifth-order local error at h |omega| ~ 0.08
    h, n = 5e-4, 400
    stepper = METHODS["rkmk54"].stepper
    runs = {}
    for sid in ("heavytop-body", "heavytop-spatial", "heavytop-lp", "heavytop-ext"):
        system = get_system(sid)
        _, ys = fixed_integrate(system.action, system.field, stepper, system.initial, 0.0, n * h, n)
        runs[sid] = ys[-1]

    Qb = runs["heavytop-body"][:9].reshape(3, 3)
    Pib = runs["heavytop-body"][9:12]
    Qs = runs["heavytop-spatial"][:9].reshape(3, 3)
    pis = runs["heavytop-spatial"][9:12]
    np.testing.assert_allclose(Qs, Qb, atol=1e-9)
    np.testing.assert_allclose(pis, Qb @ Pib, atol=1e-7)

    # Lie--Poisson carries (Pi, Gamma = Q^T Gamma0)
    np.testing.assert_allclose(runs["heavytop-lp"][:3], Pib, atol=1e-7)
    np.testing.assert_allclose(runs["heavytop-lp"][3:6], Qb.T @ BRULS_TOP.g0, atol=1e-8)

    np.testing.assert_allclose(runs["heavytop-ext"][:9].reshape(3, 3), Qb, atol=1e-9)
    np.testing.assert_allclose(runs["heavytop-ext"][9:12], pis, atol=1e-7)


# -- Casimirs under the coadjoint action ------------------------------------------


def test_coadjoint_action_preserves_casimirs_exactly():
    system = get_system("heavytop-lp")
    mu = system.initial
    for _ in range(50):
        g = system.action.exp(0.5 * rng.normal(size=6))
        mu = system.action.act(g, mu)
    assert abs(np.linalg.norm(mu[3:6]) - 9.81) < 1e-12
    assert abs(mu[:3] @ mu[3:6] - system.initial[:3] @ system.initial[3:6]) < 1e-9


# -- pack / unpack -----------------------------------------------------------------


def test_spatial_pack_roundtrip():
    Q, pi = _random_state()
    m = pack_spatial(Q, pi)
    Q2, pi2 = unpack_spatial(m)
    np.testing.assert_array_equal(Q2, Q)
    np.testing.assert_array_equal(pi2, pi)


def test_ext_pack_roundtrip():
    Q, _ = _random_state()
    q = rng.normal(size=3)
    mu = rng.normal(size=6)
    g2, mu2 = unpack_ext(pack_ext((Q, q), mu))
    np.testing.assert_array_equal(g2[0], Q)
    np.testing.assert_array_equal(g2[1], q)
    np.testing.assert_array_equal(mu2, mu)


# -- symplectic family on the cotangent forms --------------------------------------


def test_symplectic_spatial_short_run_conserves_momentum_component():
    system = get_system("heavytop-spatial")
    ts, ys = symplectic_integrate(system, 0.5, 0.002, 100)
    pi0 = system.initial[9:12]
    g0 = BRULS_TOP.g0
    drift = [abs(g0 @ y[9:12] - g0 @ pi0) for y in ys]
    assert max(drift) < 1e-9
    e = [system.energy(y) for y in ys]
    assert abs(e[-1] - e[0]) < 1e-2 * max(1.0, abs(e[0]))


def test_symplectic_ext_newton_matches_fixed_point():
    system = get_system("heavytop-ext")
    _, ys_fp = symplectic_integrate(system, 0.5, 0.001, 20)
    _, ys_nw = symplectic_integrate(
        system, 0.5, 0.001, 20, solve=SolveConfig(method="newton")
    )
    np.testing.assert_allclose(ys_fp[-1], ys_nw[-1], atol=1e-9)
