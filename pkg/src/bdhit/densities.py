"""Hitting-time densities and transition probabilities via spectral sums.

Everything here reduces to sums over a spectral measure (discrete atoms for
a finite chain, quadrature nodes for the symmetric walk):

    transition:   P_i[X_t = j]   = pi_j sum_k w_k exp(-theta_k t) psi_k(i) psi_k(j)
    hitting:      f_i(t)         =      sum_k w_k exp(-theta_k t) psi_k(i)
    hitting cdf:  P_i[T_0 <= t]  =      sum_k w_k psi_k(i) (1 - exp(-theta_k t)) / theta_k

with psi_k(1) = 1/mu_1, so f_i(t) = mu_1 P_i[X_t = 1].  Sums are
compensated (math.fsum) because the terms alternate in sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cmatrix import CMatrix, build_c_matrix
from .model import (
    ProcessSpec,
    build_scale_function,
    build_speed_measure,
    symmetric_rw_spec,
)
from .spectral import (
    DiscreteSpectrum,
    RWSpectrum,
    eval_psi_recurrence,
    finite_spectrum,
    rw_psi_values,
    symmetric_rw_spectrum,
)

__all__ = [
    "InitialDistribution",
    "DensityEvaluator",
    "finite_evaluator",
    "rw_evaluator",
    "transition_probability",
    "hitting_density",
    "hitting_density_derivative",
    "mixture_density",
    "hitting_cdf",
    "time_grid",
]


class InitialDistribution:
    """Probability masses nu{i} on interior states i >= 1.

    Masses must be positive and sum to 1 within 1e-12.
    """

    __slots__ = ("items",)

    def __init__(self, weights):
        pairs = sorted(dict(weights).items())
        if not pairs:
            raise ValueError("nu: needs at least one state")
        for state, mass in pairs:
            if not isinstance(state, (int, np.integer)) or isinstance(state, bool):
                raise ValueError(f"nu: state {state!r} is not an integer")
            if state < 1:
                raise ValueError(f"nu: state {state} is outside the interior (>= 1)")
            if not mass > 0:
                raise ValueError(f"nu: mass at state {state} must be positive, got {mass}")
        total = math.fsum(m for _, m in pairs)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"nu: masses sum to {total!r}, not 1")
        self.items = tuple((int(s), float(m)) for s, m in pairs)

    @property
    def states(self):
        return tuple(s for s, _ in self.items)

    @property
    def max_state(self):
        return self.items[-1][0]

    def mass(self, i):
        for s, m in self.items:
            if s == i:
                return m
        return 0.0

    def as_vector(self, n_states):
        if self.max_state > n_states:
            raise ValueError(
                f"nu: support reaches state {self.max_state}, chain has {n_states} interior states"
            )
        v = np.zeros(n_states)
        for s, m in self.items:
            v[s - 1] = m
        return v

    def __eq__(self, other):
        return isinstance(other, InitialDistribution) and self.items == other.items

    def __repr__(self):
        body = ", ".join(f"{s}: {m:g}" for s, m in self.items)
        return f"InitialDistribution({{{body}}})"


@dataclass(frozen=True)
class DensityEvaluator:
    """Precomputed spectral data: measure, eigenfunction table, speed, C rows.

    psi has one row per spectral atom and one column per interior state;
    pi is the speed measure over the same states.  c carries the rows of
    the C-matrix so the differential-operator coefficients are at hand.
    """

    measure: object
    psi: np.ndarray
    pi: np.ndarray
    mu1: float
    spec: ProcessSpec = field(repr=False)
    c: CMatrix = field(repr=False)

    @property
    def n_states(self):
        return self.psi.shape[1]

    @property
    def is_continuous(self):
        return isinstance(self.measure, RWSpectrum)


def finite_evaluator(spec, c_rows=None):
    """Full spectral setup for a finite chain.

    c_rows caps how many C-matrix rows are kept (default min(N, 16); the
    rows are only needed up to the largest state one differentiates at).
    Rational C entries are kept when the rates are exact and the matrix is
    small enough for the integer sizes to stay sane.
    """
    pi_sm = build_speed_measure(spec)
    s = build_scale_function(spec, pi_sm)
    n = spec.n_states
    rows = min(n, 16) if c_rows is None else min(int(c_rows), n)
    rational = spec.is_rational and rows <= 24
    c = build_c_matrix(spec, pi_sm, s, rows, rational=rational)
    measure = finite_spectrum(spec, pi_sm, c)
    psi = np.vstack([eval_psi_recurrence(spec, -th) for th in measure.theta])
    return DensityEvaluator(
        measure=measure,
        psi=psi,
        pi=pi_sm.array(),
        mu1=float(spec.mu[0]),
        spec=spec,
        c=c,
    )


def rw_evaluator(kappa, n_nodes=128, n_states=64):
    """Quadrature-backed evaluator for the symmetric walk with rate kappa.

    Exact (to rounding) for states up to n_nodes - 1 per the quadrature
    rule; n_states bounds the eigenfunction table and the truncation used
    for the C rows, whose entries do not depend on the truncation level.
    """
    if n_states < 2:
        raise ValueError(f"n_states: must be at least 2, got {n_states}")
    if n_states >= n_nodes:
        raise ValueError(
            f"n_states: must stay below n_nodes for the quadrature to be exact "
            f"({n_states} >= {n_nodes})"
        )
    measure = symmetric_rw_spectrum(kappa, n_nodes)
    psi = np.vstack([rw_psi_values(measure, i) for i in range(1, n_states + 1)]).T
    cspec = symmetric_rw_spec(kappa, n_states)
    pi_sm = build_speed_measure(cspec)
    s = build_scale_function(cspec, pi_sm)
    rows = min(n_states, 16)
    c = build_c_matrix(cspec, pi_sm, s, rows, rational=cspec.is_rational)
    return DensityEvaluator(
        measure=measure,
        psi=psi,
        pi=np.ones(n_states),
        mu1=float(kappa),
        spec=cspec,
        c=c,
    )


def _check_state(ev, i, name="state"):
    if not 1 <= i <= ev.n_states:
        raise ValueError(f"{name} {i}: outside 1..{ev.n_states}")


def _check_time(ev, t):
    t = float(t)
    if t < 0:
        raise ValueError(f"t: must be nonnegative, got {t}")
    if t == 0 and ev.is_continuous:
        raise ValueError("t: the continuous-spectrum evaluator needs t > 0")
    return t


def transition_probability(ev, t, i, j):
    """P_i[X_t = j] before absorption, by the spectral sum."""
    _check_state(ev, i, "start state")
    _check_state(ev, j, "target state")
    t = _check_time(ev, t)
    m = ev.measure
    terms = m.weights * np.exp(-m.theta * t) * ev.psi[:, i - 1] * ev.psi[:, j - 1]
    return float(ev.pi[j - 1]) * math.fsum(terms)


def hitting_density(ev, t, i):
    """Density of the absorption time T_0 started at state i."""
    _check_state(ev, i)
    t = _check_time(ev, t)
    m = ev.measure
    return math.fsum(m.weights * np.exp(-m.theta * t) * ev.psi[:, i - 1])


def hitting_density_derivative(ev, t, i, order):
    """d^order/dt^order of the absorption density, termwise (-theta)^order."""
    _check_state(ev, i)
    t = _check_time(ev, t)
    if order < 0:
        raise ValueError(f"order: must be nonnegative, got {order}")
    m = ev.measure
    terms = (
        m.weights * (-m.theta) ** order * np.exp(-m.theta * t) * ev.psi[:, i - 1]
    )
    return math.fsum(terms)


def mixture_density(ev, nu, t):
    """Absorption density under initial distribution nu: sum_i nu{i} f_i(t)."""
    if nu.max_state > ev.n_states:
        raise ValueError(
            f"nu: support reaches state {nu.max_state}, evaluator covers 1..{ev.n_states}"
        )
    t = _check_time(ev, t)
    m = ev.measure
    weights = m.weights * np.exp(-m.theta * t)
    return math.fsum(
        mass * math.fsum(weights * ev.psi[:, s - 1]) for s, mass in nu.items
    )


def hitting_cdf(ev, nu, t):
    """P_nu[T_0 <= t] for a finite chain; tends to 1 as t grows."""
    if ev.is_continuous:
        raise ValueError(
            "hitting_cdf: needs the discrete spectrum of a finite chain "
            "(the quadrature version loses the 1/theta tail)"
        )
    if nu.max_state > ev.n_states:
        raise ValueError(
            f"nu: support reaches state {nu.max_state}, evaluator covers 1..{ev.n_states}"
        )
    t = float(t)
    if t < 0:
        raise ValueError(f"t: must be nonnegative, got {t}")
    m = ev.measure
    shape = m.weights * (1.0 - np.exp(-m.theta * t)) / m.theta
    return math.fsum(
        mass * math.fsum(shape * ev.psi[:, s - 1]) for s, mass in nu.items
    )


def time_grid(t_min, t_max, count, log=False):
    """Evaluation grid on [t_min, t_max], linear by default, log on request."""
    t_min = float(t_min)
    t_max = float(t_max)
    count = int(count)
    if count < 1:
        raise ValueError(f"count: must be >= 1, got {count}")
    if t_max < t_min:
        raise ValueError(f"grid: t_max {t_max} below t_min {t_min}")
    if count == 1:
        return np.array([t_min])
    if log:
        if t_min <= 0:
            raise ValueError(f"grid: log spacing needs t_min > 0, got {t_min}")
        return np.geomspace(t_min, t_max, count)
    return np.linspace(t_min, t_max, count)
