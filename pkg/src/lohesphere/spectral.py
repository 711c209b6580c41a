"""Exact linearization of the model and its spectral analysis.

At a configuration x the linearization of the full field splits as
A = diag(Omega_1, ..., Omega_N) + B, where B is the symmetric coupling
block matrix

    B_ii = -(sum_j k_ij <x_j, x_i>) (I - x_i x_i^T)
    B_ij = k_ij (I - x_i x_i^T)(I - x_j x_j^T)   for edges {i, j}
    B_ij = 0                                      otherwise.

B is the linearization of the homogeneous field at its own equilibria;
its largest eigenvalue beta controls instability there, and by a
perturbation bound for skew perturbations of symmetric matrices the
spectral abscissa of A stays within the total frequency norm of beta.

Normal directions (each agent's own radial line) lie in the kernel of B
by construction, so at a dispersed configuration the top eigenvalue of
the full B equals the top tangent-restricted eigenvalue whenever the
latter is positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import LoheSystem, extended_rhs, frequency_total_norm, _check_config
from .geometry import spectral_norm, tangent_basis
from .network import CouplingGraph

SYM_TOL = 1e-10


def assemble_B(graph: CouplingGraph, x: np.ndarray) -> np.ndarray:
    """Symmetric coupling block matrix at configuration x, shape (N d, N d).

    Each block is computed independently from its formula; symmetry of
    the result is a consequence, not an enforcement, which keeps the
    block formulas honest.
    """
    x = _check_config(graph, x)
    N, d = x.shape
    projectors = np.eye(d)[None, :, :] - np.einsum("ni,nj->nij", x, x)
    W = graph.weight_matrix
    B = np.zeros((N * d, N * d))
    align = np.einsum("ij,jd,id->i", W, x, x)  # sum_j k_ij <x_j, x_i>
    for i in range(N):
        sl = slice(i * d, (i + 1) * d)
        B[sl, sl] = -align[i] * projectors[i]
    for (i, j), k in zip(graph.edges, graph.gains):
        si, sj = slice(i * d, (i + 1) * d), slice(j * d, (j + 1) * d)
        B[si, sj] = k * (projectors[i] @ projectors[j])
        B[sj, si] = k * (projectors[j] @ projectors[i])
    return B


def assemble_A(system: LoheSystem, x: np.ndarray) -> np.ndarray:
    """Full linearization B + diag(Omega_1, ..., Omega_N)."""
    x = _check_config(system.graph, x)
    N, d = x.shape
    if d != system.sphere_dim + 1:
        raise ValueError(
            f"dimension mismatch: points in R^{d}, frequencies in R^{system.sphere_dim + 1}"
        )
    D = np.zeros((N * d, N * d))
    for i in range(N):
        sl = slice(i * d, (i + 1) * d)
        D[sl, sl] = system.omegas[i]
    return assemble_B(system.graph, x) + D


def eigenvalues(M: np.ndarray) -> np.ndarray:
    """All eigenvalues of a square matrix, sorted by descending real part.

    Dense nonsymmetric solve (balancing, Hessenberg reduction, shifted QR).
    Ties in the real part are broken by descending imaginary part so the
    order is deterministic.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    vals = np.linalg.eigvals(M)
    order = np.lexsort((-vals.imag, -vals.real))
    return vals[order]


def spectral_abscissa(M: np.ndarray) -> float:
    """Largest real part over the spectrum of M."""
    return float(eigenvalues(M)[0].real)


def symmetric_top_eigenvalue(B: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric matrix (symmetric solver)."""
    B = np.asarray(B, dtype=float)
    scale = max(1.0, float(np.max(np.abs(B))))
    if np.max(np.abs(B - B.T)) > SYM_TOL * scale:
        raise ValueError("matrix is not symmetric")
    return float(np.linalg.eigvalsh(B)[-1])


def fd_jacobian(system: LoheSystem, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of the ambient extension field at x.

    Column e is (F(x + h e) - F(x - h e)) / (2 h) flattened row-major.
    Agrees with assemble_A on tangent directions at equilibria of the
    homogeneous field; at heterogeneous equilibria the match is exact
    only after projecting columns back to the tangent space, because the
    extension differentiates the normalization as well.
    """
    x = _check_config(system.graph, x)
    N, d = x.shape
    m = N * d
    flat = x.reshape(m)
    J = np.empty((m, m))
    for e in range(m):
        bump = np.zeros(m)
        bump[e] = h
        fp = extended_rhs(system, (flat + bump).reshape(N, d))
        fm = extended_rhs(system, (flat - bump).reshape(N, d))
        J[:, e] = (fp - fm).reshape(m) / (2.0 * h)
    return J


class KahanBound(NamedTuple):
    gap: float
    bound: float
    holds: bool


def kahan_bound(B: np.ndarray, Y: np.ndarray, slack: float = 1e-8) -> KahanBound:
    """Check |lambda_max(B) - abscissa(B + Y)| <= |Y|_2 for symmetric B, skew Y.

    Returns the measured gap, the bound |Y|_2, and whether the inequality
    holds within slack. Raises if B is not symmetric or Y is not
    skew-symmetric within SYM_TOL.
    """
    B = np.asarray(B, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if B.shape != Y.shape or B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"B and Y must be square with equal shape, got {B.shape} and {Y.shape}")
    scale_b = max(1.0, float(np.max(np.abs(B))))
    if np.max(np.abs(B - B.T)) > SYM_TOL * scale_b:
        raise ValueError("B is not symmetric")
    scale_y = max(1.0, float(np.max(np.abs(Y))))
    if np.max(np.abs(Y + Y.T)) > SYM_TOL * scale_y:
        raise ValueError("Y is not skew-symmetric")
    lam = float(np.linalg.eigvalsh(B)[-1])
    absc = spectral_abscissa(B + Y)
    gap = abs(lam - absc)
    bound = spectral_norm(Y)
    return KahanBound(gap=gap, bound=bound, holds=gap <= bound + slack)


@dataclass(frozen=True)
class LinearizationReport:
    """Spectral summary of the linearization at one configuration."""

    beta: float  # top eigenvalue of symmetric part B
    alpha_re: float  # spectral abscissa of full A
    kahan_gap: float  # |beta - alpha_re|
    omega_norm: float  # root-sum-square of frequency spectral norms
    spectrum_A: np.ndarray  # complex eigenvalues of A, descending real part
    B: np.ndarray  # assembled coupling matrix, kept for cross-checks
    A: np.ndarray  # assembled full linearization

    def to_json_dict(self) -> dict:
        return {
            "beta": self.beta,
            "alpha_re": self.alpha_re,
            "kahan_gap": self.kahan_gap,
            "omega_norm": self.omega_norm,
            "spectrum_A": [[float(v.real), float(v.imag)] for v in self.spectrum_A],
        }


def linearize(system: LoheSystem, x: np.ndarray) -> LinearizationReport:
    """Assemble B and A at x and summarize their spectra."""
    B = assemble_B(system.graph, x)
    A = assemble_A(system, x)
    beta = float(np.linalg.eigvalsh(B)[-1])
    spec = eigenvalues(A)
    alpha = float(spec[0].real)
    return LinearizationReport(
        beta=beta,
        alpha_re=alpha,
        kahan_gap=abs(beta - alpha),
        omega_norm=frequency_total_norm(system.omegas),
        spectrum_A=spec,
        B=B,
        A=A,
    )


def configuration_tangent_basis(x: np.ndarray) -> np.ndarray:
    """Block-diagonal orthonormal basis of the configuration tangent space.

    Shape (N d, N (d - 1)); column blocks are per-agent tangent bases.
    """
    x = np.asarray(x, dtype=float)
    N, d = x.shape
    T = np.zeros((N * d, N * (d - 1)))
    for i in range(N):
        T[i * d : (i + 1) * d, i * (d - 1) : (i + 1) * (d - 1)] = tangent_basis(x[i])
    return T


def tangent_restricted(M: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Compress an (N d, N d) operator to tangent coordinates, T^T M T."""
    T = configuration_tangent_basis(x)
    return T.T @ M @ T
