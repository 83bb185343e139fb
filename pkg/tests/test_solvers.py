import numpy as np
import pytest

from conftest import random_scale
from tsembed.embeddings import action_gradient, residual_integral, residual_variational_backward
from tsembed.lagrangian import Lagrangian, get_lagrangian, get_potential
from tsembed.solvers import (
    EnergySeries,
    NewtonOptions,
    SolverError,
    Trajectory,
    convergence_order,
    energy_series,
    reference_solution,
    reference_state,
    solve_differential_scheme,
    solve_variational,
)
from tsembed.timescale import DomainError, GridFunction, make_arbitrary, make_qscale, make_random, make_uniform

HARM_P = get_potential("harmonic")
HARM = get_lagrangian("harmonic")
FREE = get_lagrangian("free")
H_LIST = [0.1, 0.05, 0.025, 0.0125]


# -- differential scheme ------------------------------------------------------

def test_differential_free_particle_is_exact_line():
    ts = make_uniform(0, 1, 10)
    tr = solve_differential_scheme(ts, get_potential("free"), 0.0, ts.step)
    np.testing.assert_allclose(tr.x.values, ts.points, atol=1e-15)
    assert tr.scheme == "differential" and tr.problem == "free"


def test_differential_hand_step():
    ts = make_uniform(0, 0.2, 2)
    tr = solve_differential_scheme(ts, HARM_P, 1.0, 1 - 0.1**2 / 2)
    assert tr.x.values[2] == pytest.approx(0.98, abs=1e-15)


def test_differential_first_order_band():
    ts = make_uniform(0, 1, 1000)
    tr = solve_differential_scheme(ts, HARM_P, 1.0, np.cos(ts.step))
    err = np.max(np.abs(tr.x.values - np.cos(ts.points)))
    h = ts.step
    assert 0.1 * h < err < 2 * h


def test_differential_rejects_nonuniform():
    with pytest.raises(DomainError):
        solve_differential_scheme(make_arbitrary([0, 0.1, 0.3, 1]), HARM_P, 1.0, 1.0)
    with pytest.raises(DomainError):
        Trajectory(make_qscale(2, 0, 4), GridFunction(np.zeros(5)), "differential", "harmonic", (0.0, 0.0))


# -- variational scheme -------------------------------------------------------

@pytest.mark.parametrize("ts", [make_uniform(0, 1, 8), make_qscale(1.5, 0, 8), make_random(20, 0.01, 0.3, 4)])
def test_variational_free_particle(ts):
    tr = solve_variational(ts, FREE, 0.0, float(ts.points[1] - ts.points[0]))
    np.testing.assert_allclose(tr.x.values, ts.points - ts.points[0], rtol=1e-13, atol=1e-14)


def test_variational_reduces_to_symmetric_recurrence_on_uniform():
    ts = make_uniform(0, 2, 40)
    h = ts.step
    x1 = 0.99
    tr = solve_variational(ts, HARM, 1.0, x1)
    x = [1.0, x1]
    for k in range(1, ts.N):
        x.append(2 * x[k] - x[k - 1] - h * h * x[k])
    np.testing.assert_allclose(tr.x.values, x, rtol=1e-12, atol=1e-13)


def test_variational_nonuniform_coherent():
    rng = np.random.default_rng(2)
    ts = random_scale(rng, 50, 0.01, 0.05)
    tr = solve_variational(ts, HARM, 1.0, 1.0)
    assert residual_integral(ts, HARM, tr.x).inf_norm <= 1e-9
    assert np.max(np.abs(action_gradient(ts, HARM, tr.x).values)) <= 1e-9


def _stiff_kinetic():
    # L = v^4/12 + v^2/2 - x^2/2: d3 is cubic in v, so Newton really iterates
    return Lagrangian(
        lambda t, x, v: v**4 / 12 + v**2 / 2 - x**2 / 2,
        lambda t, x, v: -x + 0 * v,
        lambda t, x, v: v**3 / 3 + v,
        name="stiff",
    )


def test_variational_newton_with_fd_jacobian():
    lag = _stiff_kinetic()
    ts = make_random(40, 0.02, 0.08, 9)
    tr = solve_variational(ts, lag, 1.0, 1.05)
    assert residual_integral(ts, lag, tr.x).inf_norm <= 1e-9
    assert np.max(np.abs(action_gradient(ts, lag, tr.x).values)) <= 1e-9


def test_newton_non_convergence_reports_step():
    with pytest.raises(SolverError) as exc:
        solve_variational(make_uniform(0, 1, 10), _stiff_kinetic(), 1.0, 1.5, NewtonOptions(max_iter=1))
    assert exc.value.step == 1
    assert exc.value.residual is not None and abs(exc.value.residual) > 0


def test_vanishing_newton_derivative():
    # L = -x^2/2 has no v-dependence at all
    lag = Lagrangian(lambda t, x, v: -x**2 / 2 + 0 * v, lambda t, x, v: -x + 0 * v, lambda t, x, v: 0 * v,
                     lambda t, x, v: 0 * v, lambda t, x, v: 0 * v)
    with pytest.raises(SolverError, match="derivative"):
        solve_variational(make_uniform(0, 1, 4), lag, 1.0, 1.0)


def test_schemes_are_distinct():
    ts = make_uniform(0, 1, 10)
    x1 = np.cos(0.1)
    xd = solve_differential_scheme(ts, HARM_P, 1.0, x1).x.values
    xv = solve_variational(ts, HARM, 1.0, x1).x.values
    assert np.max(np.abs(xd - xv)) > 1e-6


def test_time_reversal_symmetry():
    ts = make_uniform(0, 3, 60)
    x1 = np.cos(ts.step)
    var = solve_variational(ts, HARM, 1.0, x1).reversed()
    assert residual_variational_backward(var.ts, HARM, var.x).inf_norm <= 1e-9
    dif = solve_differential_scheme(ts, HARM_P, 1.0, x1)
    assert dif.x.values[-1] != 0
    rev = dif.reversed()
    h = ts.step
    x = rev.x.values
    # the forward recurrence evaluated along the reversed samples
    r = (x[2:] - 2 * x[1:-1] + x[:-2]) / h**2 + x[:-2]
    assert np.max(np.abs(r)) > 1e-3


# -- reference ------------------------------------------------------------------

def test_reference_harmonic():
    t = np.linspace(0, 10, 201)
    ref = reference_solution(HARM, 1.0, 0.0, t, rtol=1e-10)
    assert np.max(np.abs(ref.values - np.cos(t))) <= 1e-10 * 10
    half_pi = reference_solution(HARM_P, 1.0, 0.0, [0.0, np.pi / 2], rtol=1e-10)
    assert abs(half_pi.values[-1]) <= 1e-10


def test_reference_free_particle():
    t = np.linspace(0, 3, 31)
    ref = reference_solution(get_potential("free"), 0.0, 2.0, t)
    np.testing.assert_allclose(ref.values, 2 * t, atol=1e-12)


def test_reference_quartic_energy_conserved():
    p = get_potential("quartic")
    t = np.linspace(0, 20, 4001)
    x, v = reference_state(p, 1.0, 0.0, t, rtol=1e-10)
    e = 0.5 * v**2 + p.u(x)
    assert np.max(np.abs(e - 0.25)) <= 1e-10 * 20
    np.testing.assert_array_equal(reference_solution(p, 1.0, 0.0, t, rtol=1e-10).values, x)


def test_reference_requires_mechanical():
    with pytest.raises(DomainError):
        reference_solution(_stiff_kinetic(), 1.0, 0.0, [0, 1])


# -- convergence ---------------------------------------------------------------

def test_convergence_orders():
    d = convergence_order("differential", HARM_P, (0, 1), 1.0, 0.0, H_LIST)
    v = convergence_order("variational", HARM_P, (0, 1), 1.0, 0.0, H_LIST)
    assert 0.85 <= d.slope <= 1.15
    assert 1.85 <= v.slope <= 2.15
    assert all(e1 > e2 for e1, e2 in zip(v.errors, v.errors[1:]))
    assert d.to_dict()["slope"] == d.slope


@pytest.mark.parametrize("scheme", ["differential", "variational"])
def test_convergence_free_particle_is_degenerate(scheme):
    rep = convergence_order(scheme, get_potential("free"), (0, 1), 0.0, 2.0, H_LIST)
    assert rep.degenerate
    assert max(rep.errors) < 1e-12
    assert rep.to_dict()["slope"] is None


@pytest.mark.parametrize("h_list", [[0.1, 0.05], [0.1, 0.1, 0.05], [0.1, 0.05, 0.04], [0.3, 0.1, 0.03]])
def test_convergence_rejects_bad_step_lists(h_list):
    with pytest.raises(DomainError):
        convergence_order("variational", HARM_P, (0, 1), 1.0, 0.0, h_list)


def test_convergence_rejects_unknown_scheme():
    with pytest.raises(DomainError):
        convergence_order("leapfrog", HARM_P, (0, 1), 1.0, 0.0, H_LIST)


# -- energy -------------------------------------------------------------------

def test_energy_free_line():
    ts = make_uniform(0, 1, 10)
    tr = solve_variational(ts, FREE, 0.0, 0.3 * ts.step)
    es = energy_series(tr, FREE)
    np.testing.assert_allclose(es.e, 0.5 * 0.3**2, rtol=1e-12)
    assert es.drift <= 1e-15


def test_energy_is_legendre_form():
    rng = np.random.default_rng(4)
    ts = random_scale(rng, 10)
    x = GridFunction(rng.uniform(-1, 1, 10))
    tr = Trajectory(ts, x, "variational", "pendulum", (0.0, 0.0))
    es = energy_series(tr, get_lagrangian("pendulum"))
    v = np.diff(x.values) / ts.graininess[:-1]
    np.testing.assert_allclose(es.e, 0.5 * v**2 + 1 - np.cos(x.values[:-1]), rtol=1e-14)


@pytest.fixture(scope="module")
def long_harmonic():
    ts = make_uniform(0, 100, 10000)
    x1 = float(reference_solution(HARM_P, 1.0, 0.0, ts.points[:2]).values[1])
    var = energy_series(solve_variational(ts, HARM, 1.0, x1), HARM)
    dif = energy_series(solve_differential_scheme(ts, HARM_P, 1.0, x1), HARM)
    return var, dif


def test_variational_energy_bounded(long_harmonic):
    var, dif = long_harmonic
    assert var.drift <= 5e-3
    assert var.sign_changes() > 0
    # no secular growth: the first tenth already reaches the full drift envelope
    assert var.drift <= 1.05 * var.window_drift(10.0)
    assert dif.drift >= 10 * var.drift


def test_energy_series_validation():
    with pytest.raises(DomainError):
        EnergySeries(np.zeros(3), np.zeros(4))
    es = EnergySeries(np.arange(5.0), np.array([1.0, 1.1, 0.9, 1.2, 1.0]))
    assert es.drift == pytest.approx(0.2)
    assert es.sign_changes() == 2


def test_pendulum_variational_energy_has_no_secular_growth():
    p, lag = get_potential("pendulum"), get_lagrangian("pendulum")
    ts = make_uniform(0, 50, 1000)
    x1 = float(reference_solution(p, 1.0, 0.0, ts.points[:2]).values[1])
    es = energy_series(solve_variational(ts, lag, 1.0, x1), lag)
    assert es.sign_changes() > 0
    assert es.drift <= 1.05 * es.window_drift(10.0)
