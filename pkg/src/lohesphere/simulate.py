"""Time integration, equilibrium refinement, and synchrony diagnostics.

The integrator runs classical RK4 on the ambient extension of the field
and renormalizes every agent after every step. The extension conserves
row norms exactly in continuous time, so the per-step renormalization
removes only integrator truncation error; the measured pre-renormalization
drift is recorded per sample as a health check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import hull
from .dynamics import (
    LoheSystem,
    disagreement,
    extended_rhs,
    hetero_rhs,
    kuramoto_rhs,
)
from .geometry import pairwise_angle, random_unit
from .network import CouplingGraph
from .spectral import configuration_tangent_basis, fd_jacobian


class IntegrationDiverged(RuntimeError):
    """State left the representable regime (NaN/Inf or collapsed norms)."""

    def __init__(self, time: float, detail: str = "non-finite state"):
        super().__init__(f"integration diverged at t={time:.6g}: {detail}")
        self.time = time


@dataclass(frozen=True)
class Trajectory:
    """Sampled run of the model.

    times is strictly increasing and starts at 0. states holds the
    renormalized configuration at each sample. norm_drift[k] is the
    largest pre-renormalization row-norm deviation over the steps since
    the previous sample (0 for the first row).
    """

    times: np.ndarray
    states: np.ndarray
    disagreement: np.ndarray
    sync_radius: np.ndarray
    min_edge_angle: np.ndarray
    max_edge_angle: np.ndarray
    norm_drift: np.ndarray

    def __post_init__(self):
        m = len(self.times)
        for name in ("states", "disagreement", "sync_radius", "min_edge_angle",
                     "max_edge_angle", "norm_drift"):
            if len(getattr(self, name)) != m:
                raise ValueError(f"column {name} has wrong length")
        if m > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("sample times must be strictly increasing")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def write_csv(self, path) -> None:
        """One row per sample; floats at 17 significant digits."""
        cols = ("t", "V", "sync_radius", "min_edge_angle", "max_edge_angle", "norm_drift")
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for k in range(len(self.times)):
                row = (self.times[k], self.disagreement[k], self.sync_radius[k],
                       self.min_edge_angle[k], self.max_edge_angle[k], self.norm_drift[k])
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    def final_json_dict(self, half_angle: float = math.pi / 4) -> dict:
        return {
            "t": float(self.times[-1]),
            "points": [[float(v) for v in row] for row in self.states[-1]],
            "disagreement": float(self.disagreement[-1]),
            "sync_radius": float(self.sync_radius[-1]),
            "practically_synced": bool(self.sync_radius[-1] < half_angle),
        }

    def write_final_json(self, path, half_angle: float = math.pi / 4) -> None:
        with open(path, "w") as fh:
            json.dump(self.final_json_dict(half_angle), fh, sort_keys=True, indent=2)
            fh.write("\n")


def _rk4_step(system: LoheSystem, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = extended_rhs(system, x)
    k2 = extended_rhs(system, x + (dt / 2.0) * k1)
    k3 = extended_rhs(system, x + (dt / 2.0) * k2)
    k4 = extended_rhs(system, x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _edge_angles(graph: CouplingGraph, x: np.ndarray):
    if not graph.edges:
        return 0.0, 0.0
    angles = [pairwise_angle(x[i], x[j]) for i, j in graph.edges]
    return min(angles), max(angles)


def integrate(
    system: LoheSystem,
    x0: np.ndarray,
    dt: float = 1e-3,
    t_end: float = 100.0,
    sample_every: int = 100,
    radius_iters: int = 64,
) -> Trajectory:
    """Run RK4 with per-step renormalization and sampled diagnostics.

    Samples are taken at t = 0, every sample_every steps, and at t_end.
    The final step is shortened when t_end is not a multiple of dt.
    radius_iters controls the ascent budget of the per-sample cap radius;
    it is smaller than the sync_radius default because the radius is
    evaluated at every sample.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_end <= 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    if sample_every < 1:
        raise ValueError(f"sample_every must be >= 1, got {sample_every}")
    x = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise IntegrationDiverged(0.0)
    graph = system.graph

    n_steps = int(math.ceil(t_end / dt - 1e-12))
    times, states, vs, radii, mins, maxs, drifts = [], [], [], [], [], [], []

    def record(t: float, drift: float) -> None:
        times.append(t)
        states.append(x.copy())
        vs.append(disagreement(graph, x))
        radii.append(sync_radius(x, iters=radius_iters))
        lo, hi = _edge_angles(graph, x)
        mins.append(lo)
        maxs.append(hi)
        drifts.append(drift)

    record(0.0, 0.0)
    drift_acc = 0.0
    t = 0.0
    for step in range(1, n_steps + 1):
        h = dt if step < n_steps else (t_end - dt * (n_steps - 1))
        xt = _rk4_step(system, x, h)
        t = t_end if step == n_steps else step * dt
        if not np.all(np.isfinite(xt)):
            raise IntegrationDiverged(t)
        norms = np.linalg.norm(xt, axis=1)
        if np.min(norms) <= 1e-8:
            raise IntegrationDiverged(t, "agent norm collapsed")
        drift_acc = max(drift_acc, float(np.max(np.abs(norms - 1.0))))
        x = xt / norms[:, None]
        if step % sample_every == 0 or step == n_steps:
            record(t, drift_acc)
            drift_acc = 0.0

    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        disagreement=np.array(vs),
        sync_radius=np.array(radii),
        min_edge_angle=np.array(mins),
        max_edge_angle=np.array(maxs),
        norm_drift=np.array(drifts),
    )


def integrate_kuramoto(
    omega: np.ndarray,
    graph: CouplingGraph,
    theta0: np.ndarray,
    dt: float = 1e-3,
    t_end: float = 10.0,
    sample_every: int = 1,
):
    """RK4 for the circle phase model; returns (times, angles) arrays."""
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be > 0")
    th = np.array(theta0, dtype=float)
    n_steps = int(math.ceil(t_end / dt - 1e-12))
    times = [0.0]
    out = [th.copy()]
    for step in range(1, n_steps + 1):
        h = dt if step < n_steps else (t_end - dt * (n_steps - 1))
        k1 = kuramoto_rhs(omega, graph, th)
        k2 = kuramoto_rhs(omega, graph, th + (h / 2) * k1)
        k3 = kuramoto_rhs(omega, graph, th + (h / 2) * k2)
        k4 = kuramoto_rhs(omega, graph, th + h * k3)
        th = th + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if step % sample_every == 0 or step == n_steps:
            times.append(t_end if step == n_steps else step * dt)
            out.append(th.copy())
    return np.array(times), np.array(out)


def _equalize_candidates(x: np.ndarray, y: np.ndarray, rounds: int = 60):
    """Deterministic polish of a cap-center candidate.

    Repeatedly takes the current worst-aligned agents (a band that
    shrinks geometrically), and proposes two closed-form centers: the
    direction equalizing the inner products over the band, and the
    band's null direction when it is degenerate. Proposals are accepted
    only when they improve the true objective min_i <x_i, y>.
    """
    best = float(np.min(x @ y))
    width = 0.5
    for _ in range(rounds):
        scores = x @ y
        m = float(np.min(scores))
        active = np.where(scores <= m + width)[0]
        A = x[active]
        proposals = []
        G = A @ A.T
        try:
            w = np.linalg.solve(G + 1e-13 * np.eye(len(active)), np.ones(len(active)))
            cand = A.T @ w
            nrm = np.linalg.norm(cand)
            if nrm > 1e-12:
                proposals.append(cand / nrm)
        except np.linalg.LinAlgError:
            pass
        # Degenerate bands (e.g. antipodal pairs) have no equalizer in
        # their span; a null direction of the band is optimal then.
        _, svals, vt = np.linalg.svd(A, full_matrices=True)
        if len(active) < x.shape[1] or svals[-1] < 1e-8:
            proposals.append(vt[-1])
            proposals.append(-vt[-1])
        for cand in proposals:
            val = float(np.min(x @ cand))
            if val > best:
                best = val
                y = cand
        width *= 0.5
    return best, y


def sync_radius(x: np.ndarray, iters: int = 500) -> float:
    """Angular radius of the smallest spherical cap containing all agents.

    Computed as arccos of max over unit y of min_i <x_i, y>. The search
    runs projected subgradient ascent with step 1/sqrt(k) from the
    normalized mean and eight seeded random restarts, keeps the best
    iterate, seeds one candidate from the hull minimum-norm direction
    (exact for cohesive configurations by LP duality), and finishes with
    a deterministic equalization polish. Deterministic in x; the result
    is an upper bound on the true radius and nonincreasing in iters.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected (N, d) configuration, got shape {x.shape}")
    N, d = x.shape
    if N == 1:
        return 0.0

    starts = []
    mean = x.mean(axis=0)
    nrm = np.linalg.norm(mean)
    starts.append(mean / nrm if nrm > 1e-12 else x[0].copy())
    rng = np.random.default_rng(0)
    for _ in range(8):
        starts.append(random_unit(rng, d - 1))

    candidates = []
    for y0 in starts:
        y = y0
        best_val = float(np.min(x @ y))
        best_y = y
        for k in range(1, iters + 1):
            step = 1.0 / math.sqrt(k)
            g = x[int(np.argmin(x @ y))]
            z = y + step * g
            zn = np.linalg.norm(z)
            if zn <= 1e-12:
                # antipodal push, shorten the step
                z = y + 0.5 * step * g
                zn = np.linalg.norm(z)
                if zn <= 1e-12:
                    continue
            y = z / zn
            val = float(np.min(x @ y))
            if val > best_val:
                best_val = val
                best_y = y
        candidates.append((best_val, best_y))

    p, _ = hull.min_norm_point(x)
    pn = np.linalg.norm(p)
    if pn > 1e-12:
        y = p / pn
        candidates.append((float(np.min(x @ y)), y))

    candidates.sort(key=lambda c: c[0], reverse=True)
    best_val, best_y = candidates[0]
    for val, y in candidates[:3]:
        pv, _ = _equalize_candidates(x, y)
        if pv > best_val:
            best_val = pv
    return float(np.arccos(np.clip(best_val, -1.0, 1.0)))


def is_practically_synced(x: np.ndarray, half_angle: float = math.pi / 4) -> bool:
    """Whether all agents fit in an open cap of the given half angle."""
    if not (0 < half_angle < math.pi / 2):
        raise ValueError(f"half angle must be in (0, pi/2), got {half_angle}")
    return bool(sync_radius(x) < half_angle)


@dataclass(frozen=True)
class EquilibriumResult:
    """Outcome of equilibrium refinement.

    converged implies residual <= the tolerance that was requested;
    iterations counts accepted Newton steps (0 when the start already
    met the tolerance).
    """

    config: np.ndarray
    residual: float
    iterations: int
    converged: bool


def _residual(system: LoheSystem, x: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(hetero_rhs(system, x), axis=1)))


def find_equilibrium(
    system: LoheSystem,
    x0: np.ndarray,
    tol: float = 1e-10,
    max_time: float = 200.0,
    dt: float = 1e-2,
    newton_iters: int = 40,
) -> EquilibriumResult:
    """Refine x0 to an equilibrium of the full field.

    Integrates the flow until the residual max_i |rhs_i| falls below
    10 * tol or the time budget runs out (max_time = 0 skips straight to
    the polish), then applies damped Newton steps in tangent coordinates
    using the finite-difference Jacobian. The lowest-residual state seen
    anywhere is kept, so a failed polish cannot lose ground.
    """
    x = np.array(x0, dtype=float)
    x = x / np.linalg.norm(x, axis=1, keepdims=True)
    res = _residual(system, x)
    if res <= tol:
        return EquilibriumResult(config=x, residual=res, iterations=0, converged=True)

    best_x, best_res = x.copy(), res
    t = 0.0
    while t < max_time and res > 10.0 * tol:
        span = min(5.0, max_time - t)
        steps = max(1, int(round(span / dt)))
        for _ in range(steps):
            xt = _rk4_step(system, x, dt)
            if not np.all(np.isfinite(xt)):
                raise IntegrationDiverged(t, "diverged during equilibrium search")
            x = xt / np.linalg.norm(xt, axis=1, keepdims=True)
        t += steps * dt
        res = _residual(system, x)
        if res < best_res:
            best_x, best_res = x.copy(), res

    x, res = best_x.copy(), best_res
    N, d = x.shape
    accepted = 0
    for _ in range(newton_iters):
        if res <= tol:
            break
        F = hetero_rhs(system, x).reshape(N * d)
        J = fd_jacobian(system, x)
        T = configuration_tangent_basis(x)
        Jt = J @ T
        # Tikhonov damping handles the rotational degeneracy of equilibria
        lhs = Jt.T @ Jt + 1e-8 * np.eye(T.shape[1])
        rhs = -Jt.T @ F
        try:
            xi = np.linalg.solve(lhs, rhs)
        except np.linalg.LinAlgError:
            break
        moved = False
        for damp in (1.0, 0.5, 0.25, 0.125, 1 / 16, 1 / 32, 1 / 64):
            cand = x + damp * (T @ xi).reshape(N, d)
            cand = cand / np.linalg.norm(cand, axis=1, keepdims=True)
            cres = _residual(system, cand)
            if cres < res:
                x, res = cand, cres
                accepted += 1
                moved = True
                break
        if not moved:
            break
        if res < best_res:
            best_x, best_res = x.copy(), res

    return EquilibriumResult(
        config=best_x, residual=best_res, iterations=accepted, converged=best_res <= tol
    )
