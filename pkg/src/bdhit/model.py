"""Finite birth-and-death chains absorbed at zero.

The state space is {0, 1, ..., N} with 0 absorbing.  A chain is described
by birth rates lambda_1..lambda_N and death rates mu_1..mu_N; the top
birth rate lambda_N is zero, so no mass escapes the truncation from
above.  This module builds the two canonical coordinates attached to such
a chain, the speed measure pi and the scale function s, and applies the
generator Q together with its factorization through the difference
operators D_pi and D_s.

Arithmetic is dual-mode: rates supplied as ints, rational strings, or
fractions.Fraction stay exact through every construction here, while any
float rate switches the chain to 64-bit float mode.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "ProcessSpec",
    "SpeedMeasure",
    "ScaleFunction",
    "build_speed_measure",
    "build_scale_function",
    "apply_Q",
    "apply_DpiDs",
    "spec_from_dict",
    "load_spec",
    "symmetric_rw_spec",
    "asymmetric_rw_spec",
]

_EXACT_TYPES = (int, np.integer, Fraction)


def _is_exact_number(x):
    return isinstance(x, _EXACT_TYPES) and not isinstance(x, bool)


def _as_rate(value, field):
    """Coerce a JSON-style value to int, Fraction, or float."""
    if isinstance(value, bool):
        raise ValueError(f"{field}: expected a number, got a bool")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"{field}: rate must be finite, got {value!r}")
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{field}: cannot parse rational string {value!r}") from exc
    raise ValueError(f"{field}: unsupported rate type {type(value).__name__}")


@dataclass(frozen=True)
class ProcessSpec:
    """Birth and death rates of a finite chain absorbed at state 0.

    Interior states are 1..N.  ``lam[i-1]`` is the birth rate out of state
    i and ``mu[i-1]`` the death rate into state i-1.  The top birth rate
    ``lam[N-1]`` must be zero (finite-chain boundary); all other rates are
    strictly positive and finite.
    """

    lam: tuple
    mu: tuple

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(self.lam))
        object.__setattr__(self, "mu", tuple(self.mu))
        n = len(self.lam)
        if n < 1:
            raise ValueError("lambda: need at least one interior state")
        if len(self.mu) != n:
            raise ValueError(f"mu: expected length {n}, got {len(self.mu)}")
        for name, seq in (("lambda", self.lam), ("mu", self.mu)):
            for i, r in enumerate(seq):
                if isinstance(r, bool) or not isinstance(r, (*_EXACT_TYPES, float)):
                    raise ValueError(f"{name}[{i}]: unsupported rate type {type(r).__name__}")
                if isinstance(r, float) and not math.isfinite(r):
                    raise ValueError(f"{name}[{i}]: rate must be finite, got {r!r}")
        for i, r in enumerate(self.mu):
            if r <= 0:
                raise ValueError(f"mu[{i}]: death rate must be positive, got {r}")
        for i, r in enumerate(self.lam[: n - 1]):
            if r <= 0:
                raise ValueError(f"lambda[{i}]: interior birth rate must be positive, got {r}")
        if self.lam[n - 1] != 0:
            raise ValueError(
                f"lambda[{n - 1}]: top birth rate must be 0 on a finite chain, got {self.lam[n - 1]}"
            )

    @property
    def n_states(self):
        """Number of interior states N."""
        return len(self.lam)

    @property
    def is_rational(self):
        """True when every rate is an int or Fraction (exact mode available)."""
        return all(_is_exact_number(r) for r in self.lam) and all(
            _is_exact_number(r) for r in self.mu
        )

    def lam_array(self):
        return np.asarray([float(r) for r in self.lam])

    def mu_array(self):
        return np.asarray([float(r) for r in self.mu])

    def to_dict(self):
        """JSON-ready document; exact rates become "p/q" strings."""

        def enc(r):
            if isinstance(r, Fraction):
                return f"{r.numerator}/{r.denominator}"
            if isinstance(r, np.integer):
                return int(r)
            return r

        return {
            "N": self.n_states,
            "lambda": [enc(r) for r in self.lam],
            "mu": [enc(r) for r in self.mu],
        }


@dataclass(frozen=True)
class SpeedMeasure:
    """Weights pi_1..pi_N making Q symmetric; pi_1 = 1."""

    pi: tuple

    def array(self):
        return np.asarray([float(p) for p in self.pi])

    def __getitem__(self, i):
        # 1-based state index, matching the usual subscript.
        return self.pi[i - 1]


@dataclass(frozen=True)
class ScaleFunction:
    """Values s(0)..s(N) of the harmonic coordinate: Qs = 0, s(0) = 0."""

    s: tuple

    def array(self):
        return np.asarray([float(v) for v in self.s])

    def __getitem__(self, i):
        return self.s[i]


def build_speed_measure(spec):
    """Cumulative-product weights pi_i = (lambda_1..lambda_{i-1})/(mu_2..mu_i).

    Satisfies pi_1 = 1 and the balancing condition
    pi_{i+1} mu_{i+1} = pi_i lambda_i.

    Raises
    ------
    OverflowError
        If the cumulative product leaves float range; the message names the
        first bad index and suggests rational rates instead.
    """
    exact = spec.is_rational
    p = Fraction(1) if exact else 1.0
    out = [p]
    for i in range(1, spec.n_states):
        p = p * spec.lam[i - 1] / spec.mu[i]
        if not exact and not math.isfinite(p):
            raise OverflowError(
                f"speed measure overflows at pi[{i + 1}]; "
                "supply rational rates (exact mode) or rescale the chain"
            )
        out.append(p)
    return SpeedMeasure(tuple(out))


def build_scale_function(spec, pi):
    """Scale values s(0) = 0, s(1) = 1/mu_1, s(i+1) - s(i) = 1/(pi_i lambda_i)."""
    exact = spec.is_rational and all(_is_exact_number(p) for p in pi.pi)
    one = Fraction(1) if exact else 1.0
    s = [one * 0, one / spec.mu[0]]
    for i in range(1, spec.n_states):
        if spec.lam[i - 1] == 0:
            break  # top of a finite chain: the next gap is infinite
        s.append(s[i] + one / (pi.pi[i - 1] * spec.lam[i - 1]))
    return ScaleFunction(tuple(s))


def apply_Q(spec, f):
    """Apply the generator on interior states.

    Parameters
    ----------
    f : sequence of N+1 values indexed by state 0..N.

    Returns
    -------
    list (or ndarray if the input was one) of (Qf)(i) for i = 1..N, where
    (Qf)(i) = mu_i f(i-1) - (lambda_i + mu_i) f(i) + lambda_i f(i+1)
    and the f(N+1) term is absent because lambda_N = 0.
    """
    n = spec.n_states
    if len(f) != n + 1:
        raise ValueError(f"f: expected {n + 1} entries (states 0..{n}), got {len(f)}")
    out = []
    for i in range(1, n + 1):
        lam_i = spec.lam[i - 1]
        mu_i = spec.mu[i - 1]
        v = mu_i * f[i - 1] - (lam_i + mu_i) * f[i]
        if i < n:
            v = v + lam_i * f[i + 1]
        out.append(v)
    if isinstance(f, np.ndarray):
        return np.asarray(out, dtype=float)
    return out


def apply_DpiDs(spec, pi, s, f):
    """Apply the factorized generator D_pi D_s; equals apply_Q on 1..N.

    D_s f(i) = (f(i+1) - f(i)) / (s(i+1) - s(i)) for 1 <= i <= N-1,
    D_s f(0) = mu_1 (f(1) - f(0)), and D_s f(N) = 0 because the scale gap
    above the truncation is infinite.  Then
    (D_pi g)(i) = (g(i) - g(i-1)) / pi_i.
    """
    n = spec.n_states
    if len(f) != n + 1:
        raise ValueError(f"f: expected {n + 1} entries (states 0..{n}), got {len(f)}")
    ds = [spec.mu[0] * (f[1] - f[0])]
    for i in range(1, n):
        ds.append((f[i + 1] - f[i]) / (s[i + 1] - s[i]))
    ds.append(0 * ds[0])  # zero of the working arithmetic type
    out = [(ds[i] - ds[i - 1]) / pi.pi[i - 1] for i in range(1, n + 1)]
    if isinstance(f, np.ndarray):
        return np.asarray(out, dtype=float)
    return out


def symmetric_rw_spec(kappa, n_states):
    """Truncated symmetric random walk: lambda_i = mu_i = kappa, top rate 0."""
    if kappa <= 0:
        raise ValueError(f"kappa: must be positive, got {kappa}")
    if n_states < 1:
        raise ValueError(f"N: must be a positive integer, got {n_states}")
    zero = 0 if _is_exact_number(kappa) else 0.0
    lam = (kappa,) * (n_states - 1) + (zero,)
    mu = (kappa,) * n_states
    return ProcessSpec(lam, mu)


def asymmetric_rw_spec(lam, mu, n_states):
    """Truncated constant-rate walk: birth rate lam, death rate mu."""
    if lam <= 0:
        raise ValueError(f"lambda: must be positive, got {lam}")
    if mu <= 0:
        raise ValueError(f"mu: must be positive, got {mu}")
    if n_states < 1:
        raise ValueError(f"N: must be a positive integer, got {n_states}")
    zero = 0 if _is_exact_number(lam) else 0.0
    lam_seq = (lam,) * (n_states - 1) + (zero,)
    mu_seq = (mu,) * n_states
    return ProcessSpec(lam_seq, mu_seq)


def _as_n(value, field="N"):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"{field}: must be a positive integer, got {value!r}")
    n = int(value)
    if n < 1:
        raise ValueError(f"{field}: must be a positive integer, got {n}")
    return n


def spec_from_dict(doc):
    """Build a ProcessSpec from one of the three accepted JSON shapes.

    Either explicit rate arrays::

        {"N": 3, "lambda": [2, 2, 0], "mu": [1, 1, 1]}

    or a named family::

        {"model": "symmetric_rw", "kappa": 1, "N": 50}
        {"model": "asymmetric_rw", "lambda": 2, "mu": 1, "N": 50}

    Rates may be JSON numbers or rational strings like "3/2".  Validation
    errors name the offending field.
    """
    if not isinstance(doc, dict):
        raise ValueError("spec: expected a JSON object")
    model = doc.get("model")
    if model == "symmetric_rw":
        missing = [k for k in ("kappa", "N") if k not in doc]
        if missing:
            raise ValueError(f"{missing[0]}: required for model symmetric_rw")
        return symmetric_rw_spec(_as_rate(doc["kappa"], "kappa"), _as_n(doc["N"]))
    if model == "asymmetric_rw":
        missing = [k for k in ("lambda", "mu", "N") if k not in doc]
        if missing:
            raise ValueError(f"{missing[0]}: required for model asymmetric_rw")
        return asymmetric_rw_spec(
            _as_rate(doc["lambda"], "lambda"), _as_rate(doc["mu"], "mu"), _as_n(doc["N"])
        )
    if model is not None:
        raise ValueError(f"model: unknown model {model!r}")
    missing = [k for k in ("N", "lambda", "mu") if k not in doc]
    if missing:
        raise ValueError(f"{missing[0]}: required field missing from spec")
    n = _as_n(doc["N"])
    lam = doc["lambda"]
    mu = doc["mu"]
    if not isinstance(lam, (list, tuple)) or len(lam) != n:
        raise ValueError(f"lambda: expected an array of length N={n}")
    if not isinstance(mu, (list, tuple)) or len(mu) != n:
        raise ValueError(f"mu: expected an array of length N={n}")
    lam = tuple(_as_rate(r, f"lambda[{i}]") for i, r in enumerate(lam))
    mu = tuple(_as_rate(r, f"mu[{i}]") for i, r in enumerate(mu))
    return ProcessSpec(lam, mu)


def load_spec(path):
    """Read a ProcessSpec from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    return spec_from_dict(doc)
