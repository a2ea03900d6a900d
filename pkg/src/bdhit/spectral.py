"""Spectral measures for absorbed birth-and-death chains.

Finite chains get an exact discrete spectrum from the symmetrized Jacobi
matrix; the constant-rate symmetric walk gets its closed-form continuous
spectral density together with a trigonometric quadrature rule that is
exact on the eigenfunction products it is used for.  A Stieltjes-ratio
identity for the same walk serves as an independent cross-check of the
whole spectral setup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .cmatrix import eval_psi_theta
from .oracles import interior_rate_matrix

__all__ = [
    "DiscreteSpectrum",
    "RWSpectrum",
    "eval_psi_recurrence",
    "finite_spectrum",
    "symmetric_rw_spectrum",
    "rw_psi_values",
    "orthogonality_defect",
    "stieltjes_check",
]


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Atoms (theta_k, w_k) of a finite chain, theta ascending and positive."""

    theta: np.ndarray
    weights: np.ndarray

    @property
    def n_atoms(self):
        return len(self.theta)


@dataclass(frozen=True)
class RWSpectrum:
    """Quadrature discretization of the symmetric-walk spectral density.

    The density is sqrt(theta (4 kappa - theta)) / (2 pi) on (0, 4 kappa).
    Under theta = 2 kappa (1 - cos u) it becomes (2 kappa^2 / pi) sin^2 u
    on (0, pi), where the midpoint rule in u integrates the eigenfunction
    products sin(iu) sin(ju) exactly for i, j <= n_nodes - 1.
    """

    kappa: float
    nodes_u: np.ndarray
    theta: np.ndarray
    weights: np.ndarray

    @property
    def n_atoms(self):
        return len(self.theta)


def eval_psi_recurrence(spec, theta):
    """Values psi_theta(1..N) from the defining three-term recurrence.

    Same polynomial family as the C-matrix rows (psi_theta(i) =
    sum_j C(i,j) theta^(j-1)), evaluated in its numerically stable form:
    psi(0) = 0, psi(1) = 1/mu_1,
    lambda_i psi(i+1) = (lambda_i + mu_i - theta) psi(i) - mu_i psi(i-1).
    """
    lam = spec.lam_array()
    mu = spec.mu_array()
    n = spec.n_states
    theta = float(theta)
    out = np.empty(n)
    out[0] = 1.0 / mu[0]
    prev = 0.0
    for i in range(1, n):
        nxt = ((lam[i - 1] + mu[i - 1] + theta) * out[i - 1] - mu[i - 1] * prev) / lam[i - 1]
        prev = out[i - 1]
        out[i] = nxt
    return out


def _jacobi_diagonals(spec, pi):
    """Symmetrized tridiagonal of the interior generator; asserted entrywise.

    Conjugating Q by diag(sqrt(pi)) must give a symmetric matrix with
    off-diagonal sqrt(lambda_i mu_{i+1}); any mismatch means pi does not
    balance the rates.
    """
    lam = spec.lam_array()
    mu = spec.mu_array()
    d = -(lam + mu)
    e = np.sqrt(lam[:-1] * mu[1:])
    root = np.sqrt(pi.array())
    sym = (root[:, None] * interior_rate_matrix(spec)) / root[None, :]
    ref = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    defect = np.max(np.abs(sym - ref))
    scale = np.max(np.abs(ref))
    if defect > 1e-10 * scale:
        raise ValueError(
            f"pi: does not symmetrize the generator (entrywise defect {defect:g})"
        )
    return d, e


def finite_spectrum(spec, pi, c=None):
    """Discrete spectral measure of a finite chain.

    theta_k are the negated eigenvalues of the interior generator, located
    through its Jacobi symmetrization; the weights are

        w_k = 1 / sum_i pi_i psi_{-theta_k}(i)^2

    with psi normalized by psi(1) = 1/mu_1 = C(1,1), which removes any
    eigenvector-scaling ambiguity.  When a C-matrix is supplied, the
    recurrence values are cross-checked against Horner evaluation of its
    rows on a low state (the two must agree: same polynomials).
    """
    d, e = _jacobi_diagonals(spec, pi)
    if spec.n_states == 1:
        eigvals = d.copy()
    else:
        eigvals = eigh_tridiagonal(d, e, eigvals_only=True)
    theta = np.sort(-eigvals)
    if theta[0] <= 0:
        raise ValueError(
            f"internal error: nonpositive spectral atom {theta[0]!r} for an absorbed chain"
        )
    pia = pi.array()
    psi = np.vstack([eval_psi_recurrence(spec, -th) for th in theta])
    weights = 1.0 / np.einsum("ki,i,ki->k", psi, pia, psi)
    if c is not None and c.max_index >= 1:
        i_chk = min(c.max_index, spec.n_states, 10)
        for k in (0, len(theta) - 1):
            horner = float(eval_psi_theta(c, i_chk, -theta[k]))
            rec = psi[k, i_chk - 1]
            if abs(horner - rec) > 1e-7 * max(1.0, abs(rec)):
                raise ValueError(
                    "internal error: C-matrix row and recurrence disagree "
                    f"at state {i_chk} (|{horner:g} - {rec:g}|)"
                )
    return DiscreteSpectrum(theta, weights)


def symmetric_rw_spectrum(kappa, n_nodes):
    """Midpoint quadrature for the symmetric-walk spectral density.

    Nodes u_m = (m - 1/2) pi / n and weights (2 kappa^2 / n) sin^2 u_m;
    total mass kappa^2.  Exact for integrands sin(iu) sin(ju) with
    i, j <= n_nodes - 1, hence for every orthogonality integral the
    evaluators need.
    """
    kappa = float(kappa)
    if kappa <= 0:
        raise ValueError(f"kappa: must be positive, got {kappa}")
    if n_nodes < 2:
        raise ValueError(f"n_nodes: must be at least 2, got {n_nodes}")
    m = np.arange(1, n_nodes + 1)
    u = (m - 0.5) * math.pi / n_nodes
    theta = 2.0 * kappa * (1.0 - np.cos(u))
    weights = (2.0 * kappa**2 / n_nodes) * np.sin(u) ** 2
    return RWSpectrum(kappa, u, theta, weights)


def rw_psi_values(measure, i):
    """Eigenfunction values at the quadrature nodes: sin(i u)/(kappa sin u)."""
    if i < 1:
        raise ValueError(f"state {i}: must be >= 1")
    return np.sin(i * measure.nodes_u) / (measure.kappa * np.sin(measure.nodes_u))


def orthogonality_defect(measure, c, pi, i, j):
    """| integral of psi(i) psi(j) d rho  -  delta_ij / pi_j |.

    For a discrete measure the eigenfunctions are the polynomials whose
    coefficients sit in the C-matrix rows, evaluated through the
    recurrence (Horner summation of the rows cancels catastrophically for
    states around 10; the row-vs-recurrence agreement is enforced
    separately in finite_spectrum and verify_columns).  For the walk's
    quadrature the closed form is used and pi_j = 1.
    """
    if isinstance(measure, RWSpectrum):
        vi = rw_psi_values(measure, i)
        vj = vi if j == i else rw_psi_values(measure, j)
        target = 1.0 if i == j else 0.0
    else:
        spec = c.spec
        if not (1 <= i <= spec.n_states and 1 <= j <= spec.n_states):
            raise ValueError(f"states ({i},{j}): outside 1..{spec.n_states}")
        table = np.vstack([eval_psi_recurrence(spec, -th) for th in measure.theta])
        vi = table[:, i - 1]
        vj = table[:, j - 1]
        target = 1.0 / float(pi[j]) if i == j else 0.0
    acc = math.fsum(measure.weights * vi * vj)
    return abs(acc - target)


def stieltjes_check(spec, pi, s, theta, i_max):
    """Ratio of Neumann to Dirichlet forward differences vs its closed form.

    For the constant-rate pattern (lambda_i = mu_i = kappa) the two
    solutions of Q u = theta u with u(0) = 0, u(1) = 1/kappa (Dirichlet
    psi) and u(0) = u(1) = 1 (Neumann phi) have forward-difference ratio

        phi+(i) / psi+(i)  ->  2 kappa theta / (theta + sqrt(theta^2 + 4 kappa theta))

    as i grows.  Both solutions blow up geometrically, so the recurrence
    renormalizes as it goes; the ratio is scale-invariant.  Returns
    (numeric_ratio_at_i_max, closed_form).
    """
    if theta <= 0:
        raise ValueError(f"theta: must be positive, got {theta}")
    if i_max < 1:
        raise ValueError(f"i_max: must be >= 1, got {i_max}")
    kappa = float(spec.mu[0])
    lam = spec.lam_array()
    mu = spec.mu_array()
    interior = lam[:-1]
    if interior.size and (
        np.max(np.abs(interior - kappa)) > 1e-12 * kappa
        or np.max(np.abs(mu - kappa)) > 1e-12 * kappa
    ):
        raise ValueError(
            "spec: the Stieltjes ratio check needs the constant-rate symmetric "
            "pattern lambda_i = mu_i = kappa"
        )
    theta = float(theta)
    # pairs (value at i, value at i+1), advanced jointly and renormalized
    psi_a, psi_b = 0.0, 1.0 / kappa
    phi_a, phi_b = 1.0, 1.0
    coef = (2.0 * kappa + theta) / kappa
    for _ in range(1, i_max + 1):
        psi_c = coef * psi_b - psi_a
        phi_c = coef * phi_b - phi_a
        scale = max(abs(psi_c), abs(phi_c))
        if scale > 1e200:
            inv = 1.0 / scale
            psi_b *= inv
            psi_c *= inv
            phi_b *= inv
            phi_c *= inv
        psi_a, psi_b = psi_b, psi_c
        phi_a, phi_b = phi_b, phi_c
    numeric = (phi_b - phi_a) / (psi_b - psi_a)
    closed = 2.0 * kappa * theta / (theta + math.sqrt(theta * theta + 4.0 * kappa * theta))
    return numeric, closed
