"""Command-line front end: run the pipelines, emit CSV/JSON artifacts.

Every subcommand resolves a chain (from a JSON spec file or a named
model), writes its outputs into the chosen directory, and drops a run
manifest next to them recording the resolved configuration, an input
digest, the output list, and versions.  Outputs are byte-identical for
identical configurations, RNG seeds included.

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure
(a failed check or a result flagged unreliable).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .cmatrix import build_c_matrix, verify_columns
from .densities import (
    InitialDistribution,
    finite_evaluator,
    hitting_cdf,
    hitting_density,
    hitting_density_derivative,
    mixture_density,
    rw_evaluator,
    time_grid,
    transition_probability,
)
from .htransform import (
    asymmetric_rw,
    rw_gamma_eigenfunctions,
    transform_cmatrix,
    transform_density,
    transform_rates,
    transformed_evaluator,
)
from .model import (
    apply_DpiDs,
    apply_Q,
    build_scale_function,
    build_speed_measure,
    load_spec,
    symmetric_rw_spec,
    asymmetric_rw_spec,
)
from .reproduce import derivative_bound_sequence, recover_initial
from .simulate import SimConfig, empirical_hitting, ks_statistic, sample_path
from .spectral import (
    finite_spectrum,
    orthogonality_defect,
    stieltjes_check,
    symmetric_rw_spectrum,
)

_FLOAT_FMT = "%.17g"
_KS_CRIT_1PCT = 1.6276  # sqrt(-ln(0.005)/2), asymptotic 1% point


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_rate(text):
    """Rate flag: int stays exact, "p/q" becomes a Fraction, else float."""
    try:
        return int(text)
    except ValueError:
        pass
    if "/" in text:
        return Fraction(text)
    return float(text)


def _parse_nu(text):
    """Compact "state:mass,..." list; rejected unless the masses sum to 1
    within 1e-9 (then normalized exactly)."""
    items = {}
    for part in text.split(","):
        state_s, sep, mass_s = part.partition(":")
        if not sep:
            raise ValueError(f"nu: expected state:mass, got {part!r}")
        try:
            state = int(state_s)
            mass = float(mass_s)
        except ValueError as exc:
            raise ValueError(f"nu: cannot parse {part!r}") from exc
        if state in items:
            raise ValueError(f"nu: state {state} listed twice")
        items[state] = mass
    total = math.fsum(items.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(
            f"nu: masses sum to {total!r} (off by more than 1e-9); refusing to renormalize"
        )
    return InitialDistribution({s: m / total for s, m in items.items()})


def _add_model_flags(p):
    p.add_argument("--spec", metavar="FILE", help="JSON process spec")
    p.add_argument(
        "--model", choices=("symmetric_rw", "asymmetric_rw"), help="named rate family"
    )
    p.add_argument("--kappa", type=_parse_rate, help="rate of the symmetric walk")
    p.add_argument(
        "--lambda", dest="lam_rate", type=_parse_rate, help="birth rate (asymmetric walk)"
    )
    p.add_argument("--mu", dest="mu_rate", type=_parse_rate, help="death rate (asymmetric walk)")
    p.add_argument("--N", dest="n_states", type=int, help="number of interior states")
    p.add_argument("--out-dir", help="output directory (default $BDHIT_OUTDIR or .)")


def _resolve_spec(args, parser):
    if args.spec is not None:
        if not os.path.exists(args.spec):
            print(f"error: spec file not found: {args.spec}", file=sys.stderr)
            raise SystemExit(1)
        return load_spec(args.spec)
    if args.model == "symmetric_rw":
        if args.kappa is None or args.n_states is None:
            parser.error("model symmetric_rw needs --kappa and --N")
        return symmetric_rw_spec(args.kappa, args.n_states)
    if args.model == "asymmetric_rw":
        if args.lam_rate is None or args.mu_rate is None or args.n_states is None:
            parser.error("model asymmetric_rw needs --lambda, --mu and --N")
        return asymmetric_rw_spec(args.lam_rate, args.mu_rate, args.n_states)
    parser.error("need --spec FILE or --model NAME")


def _out_dir(args):
    d = args.out_dir or os.environ.get("BDHIT_OUTDIR") or "."
    os.makedirs(d, exist_ok=True)
    return d


def _fmt(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return _FLOAT_FMT % float(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_dir, command, config, outputs, started):
    config = _jsonable(config)
    digest = hashlib.sha256(
        json.dumps(config, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()
    doc = {
        "command": command,
        "config": config,
        "input_digest": digest,
        "outputs": sorted(os.path.basename(p) for p in outputs),
        "versions": {
            "bdhit": __version__,
            "numpy": np.__version__,
            "scipy": __import__("scipy").__version__,
            "python": sys.version.split()[0],
        },
        "wall_clock_s": round(time.monotonic() - started, 6),
    }
    path = os.path.join(out_dir, f"{command}_manifest.json")
    _write_json(path, doc)
    return path


def emit_plot_data(series, path, header=("x", "y")):
    """Two-column CSV of an (x, y) series with strictly increasing x."""
    rows = list(series)
    if not rows:
        raise ValueError("series: empty")
    xs = [float(r[0]) for r in rows]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("series: x values must be strictly increasing")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{header[0]},{header[1]}\n")
        for x, y in rows:
            fh.write(f"{_fmt(x)},{_fmt(y)}\n")
    return path


def _spec_config(spec):
    return spec.to_dict()


# ---------------------------------------------------------------- subcommands


def _cmd_cmatrix(args, parser):
    started = time.monotonic()
    spec = _resolve_spec(args, parser)
    out = _out_dir(args)
    rows = args.rows if args.rows is not None else min(spec.n_states, 16)
    pi = build_speed_measure(spec)
    s = build_scale_function(spec, pi)
    c = build_c_matrix(spec, pi, s, rows)
    csv_path = os.path.join(out, "cmatrix.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("row,col,value\n")
        for i in range(c.max_index + 1):
            for j in range(i + 1):
                fh.write(f"{i},{j},{_fmt(c.rows[i][j])}\n")
    cfg = {"spec": _spec_config(spec), "rows": c.max_index, "rational": c.rational}
    _write_manifest(out, "cmatrix", cfg, [csv_path], started)
    return 0


def _cmd_spectrum(args, parser):
    started = time.monotonic()
    out = _out_dir(args)
    if args.continuous:
        if args.model != "symmetric_rw" or args.kappa is None:
            parser.error("--continuous needs --model symmetric_rw --kappa K")
        measure = symmetric_rw_spectrum(args.kappa, args.nodes)
        cfg = {
            "model": "symmetric_rw",
            "kappa": args.kappa,
            "continuous": True,
            "nodes": args.nodes,
        }
    else:
        spec = _resolve_spec(args, parser)
        pi = build_speed_measure(spec)
        s = build_scale_function(spec, pi)
        c = build_c_matrix(spec, pi, s, min(spec.n_states, 10), rational=False)
        measure = finite_spectrum(spec, pi, c)
        cfg = {"spec": _spec_config(spec), "continuous": False}
    csv_path = os.path.join(out, "spectrum.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("theta,weight\n")
        for th, w in zip(measure.theta, measure.weights):
            fh.write(f"{_fmt(th)},{_fmt(w)}\n")
    _write_manifest(out, "spectrum", cfg, [csv_path], started)
    return 0


def _grid_from_args(args, continuous):
    t_min = args.t_min
    if continuous and t_min < 1e-8:
        t_min = 1e-8  # termwise evaluation is unsafe at t = 0 for the walk
    return time_grid(t_min, args.t_max, args.t_count, log=args.log_grid)


def _cmd_density(args, parser):
    started = time.monotonic()
    out = _out_dir(args)
    if args.continuous:
        if args.model != "symmetric_rw" or args.kappa is None:
            parser.error("--continuous needs --model symmetric_rw --kappa K")
        n_states = args.n_states or 64
        ev = rw_evaluator(args.kappa, n_nodes=args.nodes, n_states=n_states)
        cfg_spec = {"model": "symmetric_rw", "kappa": args.kappa, "continuous": True}
    else:
        spec = _resolve_spec(args, parser)
        ev = finite_evaluator(spec)
        cfg_spec = _spec_config(spec)
    grid = _grid_from_args(args, args.continuous)
    nu = _parse_nu(args.nu) if args.nu else None
    if nu is not None:
        values = [mixture_density(ev, nu, t) for t in grid]
    else:
        values = [hitting_density(ev, t, args.state) for t in grid]
    csv_path = os.path.join(out, "density.csv")
    emit_plot_data(zip(grid, values), csv_path, header=("t", "f"))
    cfg = {
        "spec": cfg_spec,
        "state": None if nu is not None else args.state,
        "nu": dict(nu.items) if nu is not None else None,
        "grid": {
            "t_min": float(grid[0]),
            "t_max": args.t_max,
            "t_count": args.t_count,
            "log": args.log_grid,
        },
    }
    _write_manifest(out, "density", cfg, [csv_path], started)
    return 0


def _cmd_transition(args, parser):
    started = time.monotonic()
    spec = _resolve_spec(args, parser)
    out = _out_dir(args)
    ev = finite_evaluator(spec)
    grid = _grid_from_args(args, continuous=False)
    values = [transition_probability(ev, t, args.from_state, args.to_state) for t in grid]
    csv_path = os.path.join(out, "transition.csv")
    emit_plot_data(zip(grid, values), csv_path, header=("t", "p"))
    cfg = {
        "spec": _spec_config(spec),
        "from": args.from_state,
        "to": args.to_state,
        "grid": {
            "t_min": args.t_min,
            "t_max": args.t_max,
            "t_count": args.t_count,
            "log": args.log_grid,
        },
    }
    _write_manifest(out, "transition", cfg, [csv_path], started)
    return 0


def _read_samples_csv(path):
    if not os.path.exists(path):
        raise ValueError(f"samples file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    skip = 1 if any(ch.isalpha() for ch in first) else 0
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"samples: expected two columns (t, f), got {data.shape[1]}")
    return data


def _cmd_reproduce(args, parser):
    started = time.monotonic()
    spec = _resolve_spec(args, parser)
    out = _out_dir(args)
    nu = _parse_nu(args.nu) if args.nu else None
    ev = finite_evaluator(spec, c_rows=max(args.j_max, 16))
    if args.samples is not None:
        samples = _read_samples_csv(args.samples)
        mode = "numeric"
    elif args.mode == "numeric":
        if nu is None:
            parser.error("numeric mode needs --samples FILE or --nu to synthesize from")
        samples = lambda t: mixture_density(ev, nu, t)  # noqa: E731
        mode = "numeric"
    else:
        mode = args.mode
        samples = None
    report = recover_initial(
        ev,
        nu=nu,
        samples=samples,
        j_max=args.j_max,
        mode=mode,
        t0=args.t0,
        window_factor=args.window_factor,
        force=args.force,
    )
    json_path = os.path.join(out, "reproduce.json")
    _write_json(json_path, report.to_dict())
    csv_path = os.path.join(out, "reproduce.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("j,recovered,reference,abs_error\n")
        for idx, j in enumerate(report.states):
            ref = "" if report.reference is None else _fmt(report.reference[idx])
            err = "" if report.abs_error is None else _fmt(report.abs_error[idx])
            fh.write(f"{j},{_fmt(report.recovered[idx])},{ref},{err}\n")
    cfg = {
        "spec": _spec_config(spec),
        "mode": mode,
        "j_max": args.j_max,
        "t0": args.t0,
        "window_factor": args.window_factor,
        "nu": dict(nu.items) if nu is not None else None,
        "samples": args.samples,
    }
    _write_manifest(out, "reproduce", cfg, [json_path, csv_path], started)
    if not report.reliable:
        print("reproduce: result flagged unreliable (ill-conditioned fit)", file=sys.stderr)
        return 2
    return 0


def _cmd_htransform(args, parser):
    started = time.monotonic()
    out = _out_dir(args)
    if args.target_lambda is not None or args.target_mu is not None:
        if args.target_lambda is None or args.target_mu is None or args.n_states is None:
            parser.error("target form needs --target-lambda, --target-mu and --N")
        spec2, ht = asymmetric_rw(args.target_lambda, args.target_mu, args.n_states)
        base = ht.base
        cfg = {
            "target_lambda": args.target_lambda,
            "target_mu": args.target_mu,
            "N": args.n_states,
            "gamma": ht.gamma,
        }
    else:
        if args.gamma is None:
            parser.error("need --gamma G (with a symmetric_rw base) or --target-lambda/--target-mu")
        if args.model != "symmetric_rw" or args.kappa is None or args.n_states is None:
            parser.error("--gamma needs --model symmetric_rw --kappa K --N n")
        plus, minus = rw_gamma_eigenfunctions(args.kappa, args.gamma, args.n_states)
        ht = minus if args.branch == "minus" else plus
        base = ht.base
        spec2 = transform_rates(base, ht)
        cfg = {
            "model": "symmetric_rw",
            "kappa": args.kappa,
            "N": args.n_states,
            "gamma": args.gamma,
            "branch": args.branch,
        }
    pi = build_speed_measure(base)
    s = build_scale_function(base, pi)
    rows = args.rows if args.rows is not None else min(base.n_states, 12)
    c = build_c_matrix(base, pi, s, rows)
    c2 = transform_cmatrix(c, ht)
    spec_path = os.path.join(out, "htransform_spec.json")
    doc = spec2.to_dict()
    doc["gamma"] = _jsonable(ht.gamma)
    doc["k_values"] = _jsonable(list(ht.k_values))
    _write_json(spec_path, doc)
    csv_path = os.path.join(out, "htransform_cmatrix.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("row,col,value\n")
        for i in range(c2.max_index + 1):
            for j in range(i + 1):
                fh.write(f"{i},{j},{_fmt(c2.rows[i][j])}\n")
    _write_manifest(out, "htransform", cfg, [spec_path, csv_path], started)
    return 0


def _cmd_simulate(args, parser):
    started = time.monotonic()
    spec = _resolve_spec(args, parser)
    out = _out_dir(args)
    nu = _parse_nu(args.nu)
    config = SimConfig(
        n_paths=args.paths, t_horizon=args.horizon, seed=args.seed, initial=nu
    )
    sample = empirical_hitting(spec, config)
    samples_path = os.path.join(out, "simulate_samples.csv")
    with open(samples_path, "w", encoding="utf-8") as fh:
        fh.write("t_hit\n")
        for t in sample.times:
            fh.write(f"{_fmt(t)}\n")
    critical = _KS_CRIT_1PCT / math.sqrt(config.n_paths)
    if sample.n_censored:
        ks = None
        passed = False
    else:
        ev = finite_evaluator(spec)
        ks = ks_statistic(sample, lambda t: hitting_cdf(ev, nu, t))
        passed = ks < critical
    summary = {
        "n_paths": config.n_paths,
        "n_absorbed": int(len(sample.times)),
        "n_censored": sample.n_censored,
        "mean_hitting_time": float(np.mean(sample.times)) if len(sample.times) else None,
        "ks_statistic": ks,
        "ks_critical_1pct": critical,
        "passed": passed,
    }
    summary_path = os.path.join(out, "simulate_summary.json")
    _write_json(summary_path, summary)
    cfg = {
        "spec": _spec_config(spec),
        "paths": args.paths,
        "horizon": args.horizon,
        "seed": args.seed,
        "nu": dict(nu.items),
    }
    _write_manifest(out, "simulate", cfg, [samples_path, summary_path], started)
    if sample.n_censored:
        print(
            f"simulate: {sample.n_censored} paths censored at the horizon; "
            "no KS comparison possible",
            file=sys.stderr,
        )
        return 2
    return 0 if passed else 2


# ------------------------------------------------------------------- verify


def _is_constant_symmetric(spec):
    kappa = spec.mu[0]
    return all(r == kappa for r in spec.mu) and all(
        r == kappa for r in spec.lam[:-1]
    )


def _verify_battery(spec):
    """Yield (name, passed, detail) for the cross-module property checks."""
    n = spec.n_states
    pi = build_speed_measure(spec)
    s = build_scale_function(spec, pi)
    lam = spec.lam_array()
    mu = spec.mu_array()
    pia = pi.array()

    defect = max(
        abs(float(pi[i + 1]) * mu[i] - float(pi[i]) * lam[i - 1])
        for i in range(1, n)
    ) if n > 1 else 0.0
    scale = float(np.max(pia * mu))
    yield "speed-measure-balance", defect <= 1e-12 * scale, f"defect {defect:g}"

    rng = np.random.default_rng(7)
    f = rng.standard_normal(n + 1)
    q1 = np.asarray(apply_Q(spec, f))
    q2 = np.asarray(apply_DpiDs(spec, pi, s, f))
    d = float(np.max(np.abs(q1 - q2)))
    sc = float(np.max(np.abs(q1))) + 1.0
    yield "generator-factorization", d <= 1e-10 * sc, f"max diff {d:g}"

    qs = np.asarray(apply_Q(spec, s.array()))
    d = float(np.max(np.abs(qs[: n - 1]))) if n > 1 else 0.0
    sc = float(np.max(mu * np.abs(s.array()).max() + 1.0))
    yield "scale-harmonic", d <= 1e-10 * sc, f"max |Qs| {d:g} on 1..{n - 1}"

    rows = min(n, 10)
    c = build_c_matrix(spec, pi, s, rows)
    d = verify_columns(spec, c)
    sc = float(max(abs(float(v)) for row in c.rows for v in row)) + 1.0
    yield "cmatrix-column-recursion", d <= 1e-10 * sc, f"defect {d:g}"

    measure = finite_spectrum(spec, pi, c)
    ok = bool(np.all(np.diff(measure.theta) > 0) and measure.theta[0] > 0)
    yield "spectrum-atoms-positive-ascending", ok, f"theta[0] {measure.theta[0]:g}"

    m = min(rows, 6)
    d = max(
        orthogonality_defect(measure, c, pi, i, j)
        for i in range(1, m + 1)
        for j in range(i, m + 1)
    )
    yield "eigenfunction-orthogonality", d <= 1e-9, f"max defect {d:g}"

    ev = finite_evaluator(spec, c_rows=rows)
    d = max(
        abs(
            math.fsum(
                measure.weights * ev.psi[:, i - 1] / measure.theta
            )
            - 1.0
        )
        for i in range(1, n + 1)
    )
    yield "density-total-mass", d <= 1e-9, f"max defect {d:g}"

    theta_min = float(measure.theta[0])
    nu = InitialDistribution({1: 1.0})
    t_big = 40.0 / theta_min
    cdf_vals = [hitting_cdf(ev, nu, t) for t in np.linspace(0.0, t_big, 20)]
    mono = all(b >= a - 1e-12 for a, b in zip(cdf_vals, cdf_vals[1:]))
    ok = cdf_vals[0] == 0.0 and abs(cdf_vals[-1] - 1.0) <= 1e-6 and mono
    yield "hitting-cdf-limits", ok, f"F(0) {cdf_vals[0]:g}, F(T) {cdf_vals[-1]:.9f}"

    pts = [(1, 0.3), (min(2, n), 1.0), (min(3, n), 2.5)]
    d = max(
        abs(hitting_density(ev, t, i) - ev.mu1 * transition_probability(ev, t, i, 1))
        for i, t in pts
    )
    yield "density-transition-link", d <= 1e-12, f"max diff {d:g}"

    k_sup = min(3, n)
    nu2 = InitialDistribution({i: 1.0 / k_sup for i in range(1, k_sup + 1)})
    report = recover_initial(ev, nu=nu2, j_max=min(4, n), mode="spectral")
    d = report.max_abs_error
    yield "spectral-reproduction", d <= 1e-9, f"max error {d:g}"

    k_max = min(4, rows - 1)
    alpha = derivative_bound_sequence(c, k_max)
    worst = 0.0
    for k in range(k_max + 1):
        for i in range(1, min(n, 8) + 1):
            for t in (0.05, 0.3, 1.0, 3.0):
                v = abs(hitting_density_derivative(ev, t, i, k))
                worst = max(worst, v - float(alpha[k]) * (1 + 1e-12))
    yield "derivative-bounds", worst <= 1e-12, f"max excess {worst:g}"

    if _is_constant_symmetric(spec):
        kappa = float(spec.mu[0])
        d = max(
            abs(
                stieltjes_check(spec, pi, s, th, max(n, 200))[0]
                - stieltjes_check(spec, pi, s, th, max(n, 200))[1]
            )
            for th in (0.5, 1.0, 4.0)
        )
        yield "stieltjes-ratio", d <= 1e-6, f"max diff {d:g}"

        gamma = kappa / 2
        plus, _ = rw_gamma_eigenfunctions(spec.mu[0], gamma, n)
        spec2 = transform_rates(plus.base, plus)
        c2 = transform_cmatrix(c, plus)
        pi2 = build_speed_measure(spec2)
        s2 = build_scale_function(spec2, pi2)
        c2_direct = build_c_matrix(spec2, pi2, s2, c.max_index, rational=False)
        d = 0.0
        for i in range(c.max_index + 1):
            for j in range(i + 1):
                a = float(c2.rows[i][j])
                b = float(c2_direct.rows[i][j])
                d = max(d, abs(a - b) / max(1.0, abs(b)))
        yield "htransform-cmatrix-commutation", d <= 1e-10, f"max rel diff {d:g}"

        ev2 = transformed_evaluator(ev, plus)
        x, t = min(2, n), 0.7
        lhs = hitting_density(ev2, t, x)
        rhs = transform_density(hitting_density(ev, t, x), plus, x, t)
        d = abs(lhs - rhs) / max(abs(rhs), 1e-300)
        yield "htransform-density-conjugacy", d <= 1e-9, f"rel diff {d:g}"

    theta_min = float(measure.theta[0])
    horizon = 80.0 / theta_min
    config = SimConfig(n_paths=2000, t_horizon=horizon, seed=20260816, initial=nu)
    sample = empirical_hitting(spec, config)
    if sample.n_censored:
        yield "monte-carlo-ks", False, f"{sample.n_censored} paths censored"
    else:
        ks = ks_statistic(sample, lambda t: hitting_cdf(ev, nu, t))
        crit = _KS_CRIT_1PCT / math.sqrt(config.n_paths)
        yield "monte-carlo-ks", ks < crit, f"D {ks:.5f} vs critical {crit:.5f}"

    traj_a, hit_a = sample_path(spec, 1, 99, horizon)
    traj_b, hit_b = sample_path(spec, 1, 99, horizon)
    yield "simulation-determinism", (traj_a, hit_a) == (traj_b, hit_b), "replayed path"


def _cmd_verify(args, parser):
    started = time.monotonic()
    spec = _resolve_spec(args, parser)
    out = _out_dir(args)
    results = []
    for name, passed, detail in _verify_battery(spec):
        results.append({"name": name, "passed": bool(passed), "detail": detail})
        line = f"{'PASS' if passed else 'FAIL'} {name}"
        if not passed:
            line += f" ({detail})"
        print(line)
    json_path = os.path.join(out, "verify.json")
    _write_json(json_path, {"spec": _spec_config(spec), "results": results})
    _write_manifest(out, "verify", {"spec": _spec_config(spec)}, [json_path], started)
    return 0 if all(r["passed"] for r in results) else 2


# --------------------------------------------------------------------- main


def _build_parser():
    parser = _Parser(
        prog="bdhit",
        description="Initial-distribution recovery for absorbed birth-and-death chains",
    )
    parser.add_argument("--version", action="version", version=f"bdhit {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("cmatrix", help="emit C-matrix rows as CSV")
    _add_model_flags(p)
    p.add_argument("--rows", type=int, help="last row to build (default min(N, 16))")
    p.set_defaults(func=_cmd_cmatrix)

    p = sub.add_parser("spectrum", help="emit spectral atoms or quadrature nodes")
    _add_model_flags(p)
    p.add_argument("--continuous", action="store_true", help="walk quadrature instead of atoms")
    p.add_argument("--nodes", type=int, default=128, help="quadrature node count")
    p.set_defaults(func=_cmd_spectrum)

    for name, help_text in (
        ("density", "absorption density over a time grid"),
        ("transition", "transition probability over a time grid"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_model_flags(p)
        p.add_argument("--t-min", type=float, default=0.01)
        p.add_argument("--t-max", type=float, default=5.0)
        p.add_argument("--t-count", type=int, default=200)
        p.add_argument("--log-grid", action="store_true")
        if name == "density":
            p.add_argument("--state", type=int, default=1, help="start state")
            p.add_argument("--nu", help="initial distribution state:mass,...")
            p.add_argument("--continuous", action="store_true")
            p.add_argument("--nodes", type=int, default=128)
            p.set_defaults(func=_cmd_density)
        else:
            p.add_argument("--from", dest="from_state", type=int, required=True)
            p.add_argument("--to", dest="to_state", type=int, required=True)
            p.set_defaults(func=_cmd_transition)

    p = sub.add_parser("reproduce", help="recover the initial distribution")
    _add_model_flags(p)
    p.add_argument("--nu", help="initial distribution state:mass,...")
    p.add_argument("--samples", help="CSV of (t, f) samples for blind numeric mode")
    p.add_argument("--mode", choices=("spectral", "numeric"), default="spectral")
    p.add_argument("--j-max", type=int, default=4)
    p.add_argument("--t0", type=float, default=0.005)
    p.add_argument("--window-factor", type=float, default=0.4)
    p.add_argument("--force", action="store_true", help="allow j_max beyond 6")
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("htransform", help="transform rates and C-matrix by an eigenfunction")
    _add_model_flags(p)
    p.add_argument("--gamma", type=_parse_rate, help="eigenvalue shift")
    p.add_argument("--branch", choices=("plus", "minus"), default="plus")
    p.add_argument("--target-lambda", type=_parse_rate, help="target birth rate")
    p.add_argument("--target-mu", type=_parse_rate, help="target death rate")
    p.add_argument("--rows", type=int, help="C-matrix rows (default min(N, 12))")
    p.set_defaults(func=_cmd_htransform)

    p = sub.add_parser("simulate", help="Monte Carlo absorption times plus KS summary")
    _add_model_flags(p)
    p.add_argument("--nu", default="1:1")
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--horizon", type=float, default=200.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="run the cross-module property checks")
    _add_model_flags(p)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args, parser)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
