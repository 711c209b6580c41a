"""Integrator, equilibrium refinement, and cap-radius diagnostics."""

import json
import math

import numpy as np
import pytest

from lohesphere.dynamics import (
    LoheSystem,
    disagreement,
    random_configuration,
    random_frequencies,
    zero_frequencies,
)
from lohesphere.network import complete_graph, cycle_graph, path_graph, CouplingGraph
from lohesphere.simulate import (
    EquilibriumResult,
    IntegrationDiverged,
    Trajectory,
    find_equilibrium,
    integrate,
    integrate_kuramoto,
    is_practically_synced,
    sync_radius,
)
from lohesphere.stability import twisted_state
from lohesphere import hull


def _homo(graph, n=2):
    return LoheSystem(graph, zero_frequencies(graph.n_nodes, n))


def test_synced_state_is_constant():
    g = complete_graph(4, gain=1.0)
    sys = _homo(g)
    x0 = np.tile([0.0, 0.0, 1.0], (4, 1))
    traj = integrate(sys, x0, dt=1e-2, t_end=1.0, sample_every=10)
    assert np.allclose(traj.states, x0[None], atol=1e-14)
    assert np.all(traj.disagreement == 0.0)


def test_energy_descent_on_homogeneous_path():
    g = path_graph(5, gain=1.0)
    sys = _homo(g)
    rng = np.random.default_rng(7)
    x0 = random_configuration(rng, 5, 2)
    traj = integrate(sys, x0, dt=2e-3, t_end=20.0, sample_every=200)
    v = traj.disagreement
    assert np.all(np.diff(v) <= 1e-10)
    assert v[-1] < v[0]


def test_single_agent_rotation_matches_closed_form():
    # one agent, no edges: xdot = Omega x, exactly a rotation in the
    # e1-e2 plane, x(t) = (cos t, -sin t, 0)
    g = CouplingGraph(1, (), ())
    omega = np.array([[[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]])
    sys = LoheSystem(g, omega)
    x0 = np.array([[1.0, 0.0, 0.0]])
    traj = integrate(sys, x0, dt=1e-3, t_end=math.pi / 2, sample_every=100)
    for t, state in zip(traj.times, traj.states):
        expect = np.array([math.cos(t), -math.sin(t), 0.0])
        assert np.linalg.norm(state[0] - expect) < 1e-6
    assert np.linalg.norm(traj.final_state[0] - [0.0, -1.0, 0.0]) < 1e-6


def test_norm_drift_small_and_first_row_zero():
    g = cycle_graph(4, gain=1.0)
    sys = _homo(g)
    rng = np.random.default_rng(3)
    x0 = random_configuration(rng, 4, 2)
    traj = integrate(sys, x0, dt=1e-3, t_end=0.5, sample_every=50)
    assert traj.norm_drift[0] == 0.0
    assert np.max(traj.norm_drift) <= 1e-9
    norms = np.linalg.norm(traj.states, axis=2)
    assert np.max(np.abs(norms - 1.0)) < 1e-12


def test_order_of_convergence_at_least_two():
    # halving dt must cut the endpoint error against a dt/8 reference by
    # 8x or more; RK4 actually gives ~16x
    g = path_graph(6, gain=1.0)
    sys = _homo(g)
    rng = np.random.default_rng(11)
    x0 = random_configuration(rng, 6, 2)

    def endpoint(dt):
        return integrate(sys, x0, dt=dt, t_end=1.0, sample_every=10 ** 9).final_state

    ref = endpoint(0.0025)
    e1 = np.max(np.abs(endpoint(0.02) - ref))
    e2 = np.max(np.abs(endpoint(0.01) - ref))
    assert e1 / e2 >= 8.0


def test_non_finite_initial_state_raises():
    g = path_graph(2, gain=1.0)
    sys = _homo(g)
    x0 = np.array([[np.nan, 0.0, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(IntegrationDiverged) as exc:
        integrate(sys, x0, dt=1e-2, t_end=1.0)
    assert exc.value.time == 0.0


def test_blowup_raises_with_positive_time():
    g = path_graph(2, gain=1.0)
    omega = np.zeros((2, 3, 3))
    omega[0] = 1e160 * np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    sys = LoheSystem(g, omega)
    x0 = np.eye(3)[:2]
    with np.errstate(over="ignore", invalid="ignore"), pytest.raises(IntegrationDiverged) as exc:
        integrate(sys, x0, dt=1e160, t_end=1e162)
    assert exc.value.time > 0.0
    assert "diverged" in str(exc.value)


def test_sampling_grid_and_fractional_last_step():
    g = path_graph(2, gain=1.0)
    sys = _homo(g)
    x0 = np.array([[1.0, 0, 0], [0, 1.0, 0]])
    traj = integrate(sys, x0, dt=0.004, t_end=0.05, sample_every=5)
    assert traj.times[0] == 0.0
    assert traj.times[-1] == 0.05
    assert np.all(np.diff(traj.times) > 0)
    # interior samples land on multiples of 5 * dt
    assert traj.times[1] == pytest.approx(0.02)


def test_integrate_rejects_bad_parameters():
    g = path_graph(2, gain=1.0)
    sys = _homo(g)
    x0 = np.array([[1.0, 0, 0], [0, 1.0, 0]])
    with pytest.raises(ValueError, match="dt"):
        integrate(sys, x0, dt=-1.0)
    with pytest.raises(ValueError, match="t_end"):
        integrate(sys, x0, t_end=0.0)
    with pytest.raises(ValueError, match="sample_every"):
        integrate(sys, x0, sample_every=0)


def test_trajectory_validates_column_lengths():
    t = np.array([0.0, 1.0])
    ok = dict(
        times=t,
        states=np.zeros((2, 1, 3)),
        disagreement=np.zeros(2),
        sync_radius=np.zeros(2),
        min_edge_angle=np.zeros(2),
        max_edge_angle=np.zeros(2),
        norm_drift=np.zeros(2),
    )
    Trajectory(**ok)
    bad = dict(ok, disagreement=np.zeros(3))
    with pytest.raises(ValueError, match="length"):
        Trajectory(**bad)
    with pytest.raises(ValueError, match="increasing"):
        Trajectory(**dict(ok, times=np.array([0.0, 0.0])))


def test_csv_round_trip_and_determinism(tmp_path):
    g = cycle_graph(3, gain=2.0)
    sys = _homo(g)
    rng = np.random.default_rng(5)
    x0 = random_configuration(rng, 3, 2)
    traj = integrate(sys, x0, dt=1e-2, t_end=0.5, sample_every=10)

    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    traj.write_csv(p1)
    traj.write_csv(p2)
    assert p1.read_bytes() == p2.read_bytes()

    lines = p1.read_text().strip().split("\n")
    assert lines[0] == "t,V,sync_radius,min_edge_angle,max_edge_angle,norm_drift"
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    # 17 significant digits round-trips doubles exactly
    assert np.array_equal(data[:, 0], traj.times)
    assert np.array_equal(data[:, 1], traj.disagreement)
    assert np.array_equal(data[:, 2], traj.sync_radius)


def test_final_json_contents(tmp_path):
    g = complete_graph(3, gain=1.0)
    sys = _homo(g)
    x0 = np.tile([1.0, 0.0, 0.0], (3, 1))
    traj = integrate(sys, x0, dt=1e-2, t_end=0.1, sample_every=5)
    path = tmp_path / "final.json"
    traj.write_final_json(path)
    loaded = json.loads(path.read_text())
    assert loaded["t"] == pytest.approx(0.1)
    assert loaded["practically_synced"] is True
    assert np.allclose(loaded["points"], x0)
    assert loaded["disagreement"] == 0.0


def test_sync_radius_identical_points_zero():
    x = np.tile([0.0, 1.0, 0.0], (5, 1))
    assert sync_radius(x) == 0.0


def test_sync_radius_antipodal_pair_is_half_pi():
    x = np.array([[1.0, 0.0], [-1.0, 0.0]])
    assert abs(sync_radius(x) - math.pi / 2) < 1e-6


def test_sync_radius_twisted_square_is_half_pi():
    x = twisted_state(4, 1, n=2)
    r = sync_radius(x)
    assert r >= math.pi / 2 - 1e-9
    assert r <= math.pi / 2 + 1e-6


def test_sync_radius_matches_hull_duality_on_cohesive_cluster():
    # for a cluster inside an open hemisphere the max-min value equals
    # the norm of the minimum-norm hull point
    rng = np.random.default_rng(21)
    for _ in range(10):
        center = rng.standard_normal(4)
        center /= np.linalg.norm(center)
        x = np.array([center + 0.3 * rng.standard_normal(4) for _ in range(6)])
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        p, _ = hull.min_norm_point(x)
        assert abs(sync_radius(x) - math.acos(np.linalg.norm(p))) < 1e-6


def test_sync_radius_nonincreasing_in_iters():
    rng = np.random.default_rng(13)
    for _ in range(5):
        x = random_configuration(rng, 6, 3)
        assert sync_radius(x, iters=400) <= sync_radius(x, iters=100) + 1e-9


def test_sync_radius_range_and_single_agent():
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = random_configuration(rng, 5, 2)
        r = sync_radius(x, iters=80)
        assert 0.0 <= r <= math.pi
    assert sync_radius(np.array([[0.0, 0.0, 1.0]])) == 0.0


def test_sync_radius_rejects_bad_shape():
    with pytest.raises(ValueError, match="shape"):
        sync_radius(np.ones(3))


def test_is_practically_synced():
    tight = np.array([[1.0, 0.0, 0.0], [math.cos(0.1), math.sin(0.1), 0.0]])
    assert is_practically_synced(tight)
    spread = np.array([[1.0, 0.0], [-1.0, 0.0]])
    assert not is_practically_synced(spread)
    with pytest.raises(ValueError, match="half angle"):
        is_practically_synced(tight, half_angle=math.pi)
    with pytest.raises(ValueError, match="half angle"):
        is_practically_synced(tight, half_angle=0.0)


def test_find_equilibrium_accepts_twisted_state_immediately():
    g = cycle_graph(6, gain=1.0)
    sys = _homo(g)
    x0 = twisted_state(6, 1, n=2)
    res = find_equilibrium(sys, x0, tol=1e-10)
    assert res.converged
    assert res.residual <= 1e-12
    assert res.iterations == 0
    assert np.allclose(res.config, x0, atol=1e-15)


def test_find_equilibrium_homogeneous_random_reaches_sync():
    g = path_graph(4, gain=1.0)
    sys = _homo(g)
    for seed in (0, 1, 2):
        rng = np.random.default_rng(seed)
        x0 = random_configuration(rng, 4, 2)
        res = find_equilibrium(sys, x0, tol=1e-10, max_time=80.0)
        assert res.converged
        assert res.residual <= 1e-10
        assert disagreement(g, res.config) < 1e-8


def test_find_equilibrium_fast_rotation_reports_failure():
    # on the circle an equilibrium needs |w_i| <= sum_j k_ij, so none
    # exists at this frequency budget and the search must report failure
    g = path_graph(3, gain=1.0)
    rng = np.random.default_rng(0)
    sys = LoheSystem(g, random_frequencies(rng, 3, 1, total_norm=100.0))
    x0 = random_configuration(rng, 3, 1)
    res = find_equilibrium(sys, x0, tol=1e-10, max_time=5.0)
    assert isinstance(res, EquilibriumResult)
    assert not res.converged
    assert res.residual > 1e-10


def test_find_equilibrium_never_loses_ground():
    g = cycle_graph(5, gain=1.0)
    rng = np.random.default_rng(4)
    sys = LoheSystem(g, random_frequencies(rng, 5, 2, total_norm=0.05))
    x0 = twisted_state(5, 1, n=2)
    res = find_equilibrium(sys, x0, tol=1e-10, max_time=0.0)
    from lohesphere.dynamics import hetero_rhs

    start = float(np.max(np.linalg.norm(hetero_rhs(sys, x0), axis=1)))
    assert res.residual <= start + 1e-15


def test_kuramoto_identical_frequencies_hold_equal_angles():
    g = complete_graph(3, gain=1.0)
    omega = np.zeros(3)
    theta0 = np.array([0.7, 0.7, 0.7])
    times, angles = integrate_kuramoto(omega, g, theta0, dt=1e-2, t_end=1.0, sample_every=10)
    assert np.allclose(angles, 0.7, atol=1e-12)
    assert times[-1] == pytest.approx(1.0)


def test_kuramoto_pair_closes_gap():
    g = path_graph(2, gain=1.0)
    omega = np.zeros(2)
    theta0 = np.array([0.0, 1.0])
    _, angles = integrate_kuramoto(omega, g, theta0, dt=1e-3, t_end=10.0, sample_every=1000)
    gaps = np.abs(angles[:, 1] - angles[:, 0])
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 1e-3
