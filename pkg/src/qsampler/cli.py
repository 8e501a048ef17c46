"""Experiment runner.

Subcommands: propagator | frame-potential | diagnostics | poincare |
list-samplers.  Every run is driven by a JSON config (``--config``) whose
values individual flags override, writes CSV/JSON artifacts plus rendered
PNG figures into ``--out``, and records the seed and library version in a
metadata JSON.  Exit codes: 0 success, 2 config/usage error, 3 numerical
contract violation.
"""

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__, harper
from .classical import occupancy_fraction, poincare_section
from .diagnostics import (
    cue_surmise_cdf,
    grid_occupancy,
    husimi_grids,
    ipr_set,
    ks_distance,
    scaled_moment_report,
    spacing_sample,
    trans_moments,
    transition_matrix,
)
from .harper import DriftRates, DriftSchedule, HarperParams, angle_basis, h0_eigenbasis
from .linalg import ContractViolationError, eigenphases, unitarity_defect
from .samplers import (
    REFERENCE_NAMES,
    epsilon_report,
    frame_potentials,
    get_sampler,
    haar_unitary,
    sample_pair_traces,
    sampler_registry,
    spec_from_json,
    spec_to_json,
)
from .weyl import op_decompose

PROPAGATOR_DEFECT_TOL = 1e-8

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    """Invalid or incomplete experiment configuration."""


# ---------------------------------------------------------------------------
# config plumbing


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _require(cfg, key, kind):
    if key not in cfg:
        raise ConfigError(f"config is missing required key {key!r}")
    value = cfg[key]
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"config key {key!r} must be {kind.__name__}")
    if kind in (int, float) and isinstance(value, (int, float)):
        return kind(value)
    if not isinstance(value, kind):
        raise ConfigError(f"config key {key!r} must be {kind.__name__}")
    return value


def _optional(cfg, key, kind, default):
    if key not in cfg or cfg[key] is None:
        return default
    return _require(cfg, key, kind)


def _merge_flag(cfg, key, value):
    if value is not None:
        cfg[key] = value


def _params_from_dict(N, obj):
    unknown = set(obj) - set(harper.PARAM_NAMES)
    if unknown:
        raise ConfigError(f"unknown Hamiltonian parameters: {sorted(unknown)}")
    return HarperParams(N=N, **{k: float(v) for k, v in obj.items()})


def _resolve_system(cfg):
    """Resolve (label, params-or-schedule-or-'haar') from config keys
    source / params / schedule, at dimension N."""
    N = _require(cfg, "N", int)
    given = [k for k in ("source", "params", "schedule") if k in cfg]
    if len(given) != 1:
        raise ConfigError("config needs exactly one of 'source', 'params', 'schedule'")
    if "source" in cfg:
        name = _require(cfg, "source", str)
        if name == "U_Ta":
            return name, harper.ergodic_reference_params(N)
        if name == "U_Tb":
            return name, harper.hybrid_reference_params(N)
        if name == "U_Drift":
            return name, harper.drifting_reference_schedule(N)
        if name == "U_Haar":
            return name, "haar"
        raise ConfigError(f"unknown source {name!r}; known: {', '.join(REFERENCE_NAMES)}")
    if "params" in cfg:
        return "inline", _params_from_dict(N, _require(cfg, "params", dict))
    sched = _require(cfg, "schedule", dict)
    if "initial" not in sched:
        raise ConfigError("schedule needs an 'initial' parameter object")
    initial = _params_from_dict(N, sched["initial"])
    rates = DriftRates(**{k: float(v) for k, v in sched.get("rates", {}).items()})
    return "inline-drift", DriftSchedule(initial=initial, rates=rates,
                                         n_periods=int(sched.get("n_periods", 1)))


def _build_unitary(system, n_tau, seed, N):
    if system == "haar":
        return haar_unitary(N, np.random.default_rng(seed))
    if isinstance(system, DriftSchedule):
        return harper.drift_propagator(system, n_tau)
    return harper.floquet_propagator(system, n_tau)


def _system_metadata(label, system, N):
    if system == "haar":
        return {"source": label, "kind": "haar", "N": N}
    if isinstance(system, DriftSchedule):
        return {"source": label, "kind": "drift", "N": N,
                "initial": {k: getattr(system.initial, k) for k in harper.PARAM_NAMES},
                "rates": asdict(system.rates), "n_periods": system.n_periods}
    return {"source": label, "kind": "floquet", "N": N,
            "params": {k: getattr(system, k) for k in harper.PARAM_NAMES}}


# ---------------------------------------------------------------------------
# artifact writers


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _write_table(base, header, columns, fmt):
    """Columnar table as CSV (default) or a JSON object of columns."""
    if fmt == "json":
        return _write_json(base + ".json",
                           {name: np.asarray(col).tolist()
                            for name, col in zip(header, columns)})
    path = base + ".csv"
    data = np.column_stack(columns)
    np.savetxt(path, data, fmt="%.17g", delimiter=",",
               header=",".join(header), comments="")
    return path


def _write_matrix(base, arr, fmt):
    if fmt == "json":
        return _write_json(base + ".json", np.asarray(arr).tolist())
    path = base + ".csv"
    np.savetxt(path, np.asarray(arr), fmt="%.17g", delimiter=",")
    return path


def _write_unitary(base, U, fmt):
    """Complex matrix either as little-endian interleaved float64 pairs with
    a JSON sidecar header, or as a JSON [re, im] pair array."""
    N = U.shape[0]
    if fmt == "json":
        pairs = [[[float(z.real), float(z.imag)] for z in row] for row in U]
        return _write_json(base + ".json",
                           {"N": N, "format": "re-im-pairs", "entries": pairs})
    path = base + ".c128"
    np.ascontiguousarray(U).astype("<c16").tofile(path)
    _write_json(path + ".json",
                {"N": N, "layout": "row-major", "format": "c128-interleaved"})
    return path


def _base_metadata(cfg):
    return {"version": __version__, "seed": cfg.get("seed", 0)}


# ---------------------------------------------------------------------------
# subcommands


def _cmd_propagator(args):
    cfg = _load_config(args.config)
    _merge_flag(cfg, "N", args.dimension)
    _merge_flag(cfg, "source", args.source)
    _merge_flag(cfg, "n_tau", args.n_tau)
    _merge_flag(cfg, "seed", args.seed)
    label, system = _resolve_system(cfg)
    N = _require(cfg, "N", int)
    n_tau = _optional(cfg, "n_tau", int, None)
    seed = _optional(cfg, "seed", int, 0)
    defect_tol = _optional(cfg, "defect_tol", float, PROPAGATOR_DEFECT_TOL)

    U = _build_unitary(system, n_tau, seed, N)
    defect = unitarity_defect(U)
    if defect >= defect_tol:
        raise ContractViolationError(
            f"propagator unitarity defect {defect:.3e} exceeds {defect_tol:.1e}")
    phases = eigenphases(U)

    out = args.out
    upath = _write_unitary(os.path.join(out, "unitary"), U, args.format)
    _write_table(os.path.join(out, "eigenphases"), ["theta"], [phases], args.format)
    meta = _base_metadata(cfg)
    meta.update(_system_metadata(label, system, N))
    meta.update({"seed": seed, "n_tau": n_tau if n_tau is not None else harper.default_n_tau(N),
                 "defect": defect, "unitary_file": os.path.basename(upath)})
    _write_json(os.path.join(out, "metadata.json"), meta)
    if args.plots:
        from . import plotting
        plotting.save_figure(plotting.plot_eigenphases(phases),
                             os.path.join(out, "fig_eigenphases.png"))
    print(f"propagator: N={N} defect={defect:.3e} -> {out}")
    return EXIT_OK


def _resolve_sampler(cfg):
    sampler = cfg.get("sampler")
    if sampler is None:
        raise ConfigError("config is missing required key 'sampler'")
    if isinstance(sampler, str):
        try:
            spec = get_sampler(sampler)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    elif isinstance(sampler, dict):
        try:
            spec = spec_from_json(sampler)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad inline sampler spec: {exc}") from exc
    else:
        raise ConfigError("'sampler' must be a name or an inline spec object")
    if "N" in cfg:
        spec = spec.with_dimension(_require(cfg, "N", int))
    return spec


def _cmd_frame_potential(args):
    cfg = _load_config(args.config)
    _merge_flag(cfg, "sampler", args.sampler)
    _merge_flag(cfg, "n_pairs", args.n_pairs)
    _merge_flag(cfg, "N", args.dimension)
    _merge_flag(cfg, "n_tau", args.n_tau)
    _merge_flag(cfg, "seed", args.seed)
    spec = _resolve_sampler(cfg)
    n_pairs = _require(cfg, "n_pairs", int)
    ks = tuple(_optional(cfg, "ks", list, [1, 2, 3]))
    seed = _optional(cfg, "seed", int, 0)
    n_tau = _optional(cfg, "n_tau", int, None)

    t0 = time.perf_counter()
    z = sample_pair_traces(spec, n_pairs, seed=seed, n_tau=n_tau, workers=args.workers)
    estimates = frame_potentials(z, ks=ks)
    runtime = time.perf_counter() - t0
    eps = epsilon_report(estimates)

    out = args.out
    _write_table(os.path.join(out, "traces"), ["z"], [z], args.format)
    report = _base_metadata(cfg)
    report.update({
        "sampler": spec.name,
        "mode": spec.mode,
        "N": spec.N,
        "seed": seed,
        "n_pairs": n_pairs,
        "records": [
            {"sampler": spec.name, "k": e.k, "F": e.value, "sigma": e.std_err,
             "n_pairs": e.n_pairs, "seed": seed}
            for e in estimates
        ],
        "epsilon_report": [
            {"k": e.k, "epsilon": e.epsilon, "error_floor": e.error_floor}
            for e in eps
        ],
        "spec": spec_to_json(spec),
        "runtime_seconds": runtime,
    })
    _write_json(os.path.join(out, "frame_potential.json"), report)
    if args.plots:
        from . import plotting
        plotting.save_figure(plotting.plot_frame_potentials(estimates),
                             os.path.join(out, "fig_frame_potentials.png"))
    for e in estimates:
        print(f"{spec.name}: F({e.k}) = {e.value:.4g} +- {e.std_err:.2g}")
    return EXIT_OK


_DIAGNOSTIC_NAMES = ("spacing", "transition", "ipr", "husimi", "op-coefficients")


def _diag_bases(cfg, label, system, N):
    wanted = _optional(cfg, "bases", list, ["angle"])
    bases = []
    for name in wanted:
        if name == "angle":
            bases.append(angle_basis(N))
        elif name == "h0":
            if "basis_params" in cfg:
                bp = _params_from_dict(N, _require(cfg, "basis_params", dict))
            elif isinstance(system, HarperParams):
                bp = system
            elif isinstance(system, DriftSchedule):
                bp = system.initial
            else:
                bp = harper.ergodic_reference_params(N)
            bases.append(h0_eigenbasis(bp))
        else:
            raise ConfigError(f"unknown basis {name!r}; use 'angle' or 'h0'")
    return bases


def _basis_tag(basis):
    return "h0" if basis.label == "h0-eigen" else basis.label


def _cmd_diagnostics(args):
    cfg = _load_config(args.config)
    _merge_flag(cfg, "N", args.dimension)
    _merge_flag(cfg, "source", args.source)
    _merge_flag(cfg, "n_tau", args.n_tau)
    _merge_flag(cfg, "seed", args.seed)
    if args.which:
        cfg["diagnostics"] = [w.strip() for w in args.which.split(",")]
    if args.bases:
        cfg["bases"] = [b.strip() for b in args.bases.split(",")]
    label, system = _resolve_system(cfg)
    N = _require(cfg, "N", int)
    which = _require(cfg, "diagnostics", list)
    for w in which:
        if w not in _DIAGNOSTIC_NAMES:
            raise ConfigError(f"unknown diagnostic {w!r}; known: {', '.join(_DIAGNOSTIC_NAMES)}")
    seed = _optional(cfg, "seed", int, 0)
    n_tau = _optional(cfg, "n_tau", int, None)
    qs = [int(q) for q in _optional(cfg, "q", list, [2, 3])]
    resolution = _optional(cfg, "resolution", int, N)

    U = _build_unitary(system, n_tau, seed, N)
    out = args.out
    plots = args.plots
    if plots:
        from . import plotting

    def meta_for(extra):
        meta = _base_metadata(cfg)
        meta.update(_system_metadata(label, system, N))
        meta.update({"seed": seed})
        meta.update(extra)
        return meta

    for diag in which:
        if diag == "spacing":
            s = spacing_sample(eigenphases(U))
            _write_table(os.path.join(out, "spacing"), ["s"], [s], args.format)
            _write_json(os.path.join(out, "spacing_metadata.json"), meta_for({
                "diagnostic": "spacing", "n_spacings": int(s.size),
                "ks_distance_cue": ks_distance(s, cue_surmise_cdf)}))
            if plots:
                plotting.save_figure(plotting.plot_spacings(s),
                                     os.path.join(out, "fig_spacing.png"))
        elif diag == "transition":
            for basis in _diag_bases(cfg, label, system, N):
                tag = _basis_tag(basis)
                z = transition_matrix(U, basis)
                mom = trans_moments(z)
                _write_matrix(os.path.join(out, f"transition_{tag}"), z, args.format)
                _write_json(os.path.join(out, f"transition_{tag}_metadata.json"), meta_for({
                    "diagnostic": "transition", "basis": tag,
                    "moments": asdict(mom)}))
                if plots:
                    plotting.save_figure(plotting.plot_matrix(z, cbar_label=r"$z_{jk}$"),
                                         os.path.join(out, f"fig_transition_{tag}.png"))
                    plotting.save_figure(plotting.plot_porter_thomas(z.ravel(), N),
                                         os.path.join(out, f"fig_transition_cdf_{tag}.png"))
        elif diag == "ipr":
            for basis in _diag_bases(cfg, label, system, N):
                tag = _basis_tag(basis)
                for q in qs:
                    vals = ipr_set(U, basis, q)
                    base = os.path.join(out, f"ipr_{tag}_q{q}")
                    _write_table(base, ["ipr"], [vals], args.format)
                    _write_json(base + "_metadata.json", meta_for({
                        "diagnostic": "ipr", "basis": tag, "q": q,
                        "mean": float(vals.mean()),
                        "haar_mean": math.factorial(q) * N ** (1 - q)}))
                    if plots:
                        plotting.save_figure(
                            plotting.plot_ipr_cumulative(vals, N, q),
                            os.path.join(out, f"fig_ipr_{tag}_q{q}.png"))
        elif diag == "husimi":
            _, vecs = np.linalg.eig(U)
            vecs = vecs / np.linalg.norm(vecs, axis=0)
            grids = husimi_grids(vecs, resolution)
            rows = []
            for k, g in enumerate(grids):
                r, c = np.divmod(np.arange(g.size), resolution)
                rows.append(np.column_stack([np.full(g.size, k), r, c, g.ravel()]))
            rows = np.vstack(rows)
            _write_table(os.path.join(out, "husimi"),
                         ["state", "p_index", "phi_index", "value"],
                         [rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]], args.format)
            occ = [grid_occupancy(g) for g in grids]
            _write_json(os.path.join(out, "husimi_metadata.json"), meta_for({
                "diagnostic": "husimi", "resolution": resolution,
                "occupancy_median": float(np.median(occ)),
                "occupancy_min": float(np.min(occ))}))
            if plots:
                plotting.save_figure(plotting.plot_husimi_montage(grids),
                                     os.path.join(out, "fig_husimi.png"))
        elif diag == "op-coefficients":
            w = op_decompose(U)
            p = np.abs(w) ** 2
            mom = scaled_moment_report(N * p.ravel())
            _write_matrix(os.path.join(out, "op_coefficients"), p, args.format)
            _write_json(os.path.join(out, "op_coefficients_metadata.json"), meta_for({
                "diagnostic": "op-coefficients",
                "coefficient_norm": float(p.sum()),
                "moments": asdict(mom)}))
            if plots:
                plotting.save_figure(
                    plotting.plot_matrix(p, xlabel="k", ylabel="j", cbar_label=r"$|w_{jk}|^2$"),
                    os.path.join(out, "fig_op_coefficients.png"))
                plotting.save_figure(plotting.plot_porter_thomas(N * p.ravel(), 1,
                                                                 xlabel=r"$N |w_{jk}|^2$"),
                                     os.path.join(out, "fig_op_cdf.png"))
    print(f"diagnostics: {', '.join(which)} for {label} at N={N} -> {out}")
    return EXIT_OK


def _cmd_poincare(args):
    cfg = _load_config(args.config)
    _merge_flag(cfg, "N", args.dimension)
    _merge_flag(cfg, "source", args.source)
    _merge_flag(cfg, "n_periods", args.n_periods)
    _merge_flag(cfg, "n_orbits", args.n_orbits)
    _merge_flag(cfg, "steps_per_period", args.steps_per_period)
    _merge_flag(cfg, "seed", args.seed)
    cfg.setdefault("N", 2)  # classical runs ignore the Hilbert dimension
    label, system = _resolve_system(cfg)
    if isinstance(system, DriftSchedule) or system == "haar":
        raise ConfigError("poincare needs a time-periodic system ('source' U_Ta/U_Tb or 'params')")
    params = system
    n_periods = _require(cfg, "n_periods", int)
    steps = _optional(cfg, "steps_per_period", int, 1000)
    seed = _optional(cfg, "seed", int, 0)

    if "initials" in cfg:
        initials = np.asarray(_require(cfg, "initials", list), dtype=float)
    else:
        n_orbits = _optional(cfg, "n_orbits", int, 20)
        rng = np.random.default_rng(seed)
        initials = rng.uniform(0.0, 2.0 * np.pi, size=(n_orbits, 2))

    undriven = params.mu == 0.0 and params.mu_prime == 0.0
    section = poincare_section(initials, params, n_periods, steps,
                               track_energy=undriven)

    out = args.out
    pts = section.points
    orbit_id = np.repeat(np.arange(section.n_orbits), n_periods)
    period = np.tile(np.arange(1, n_periods + 1), section.n_orbits)
    _write_table(os.path.join(out, "poincare"),
                 ["orbit_id", "n", "phi", "p"],
                 [orbit_id, period, pts[:, :, 0].ravel(), pts[:, :, 1].ravel()],
                 args.format)
    meta = _base_metadata(cfg)
    meta.update(_system_metadata(label, params, params.N))
    meta.update({"seed": seed, "n_orbits": section.n_orbits, "n_periods": n_periods,
                 "steps_per_period": steps,
                 "occupancy_fraction": occupancy_fraction(pts[:, :, 0].ravel(),
                                                          pts[:, :, 1].ravel())})
    if params.a * params.epsilon > 0:
        from .classical import libration_ratio
        omega0, lam = libration_ratio(params)
        meta.update({"omega0": omega0, "lambda": lam})
    if undriven:
        meta["max_h0_deviation"] = section.energy_deviation
    _write_json(os.path.join(out, "poincare_metadata.json"), meta)
    if args.plots:
        from . import plotting
        plotting.save_figure(plotting.plot_poincare(section),
                             os.path.join(out, "fig_poincare.png"))
    print(f"poincare: {section.n_orbits} orbits x {n_periods} periods -> {out}")
    return EXIT_OK


def _cmd_list_samplers(args):
    registry = sampler_registry()
    width = max(len(name) for name in registry)
    for name, spec in registry.items():
        print(f"{name:<{width}}  mode={spec.mode:<7}  N={spec.N:<3}  {spec.description}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def _add_common(sub):
    sub.add_argument("--config", help="JSON experiment config")
    sub.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    sub.add_argument("--workers", type=int,
                     default=int(os.environ.get("QSAMPLER_WORKERS", "1")),
                     help="parallel workers (env QSAMPLER_WORKERS)")
    sub.add_argument("--out", default=".", help="output directory")
    sub.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="tabular artifact format")
    sub.add_argument("--no-plots", dest="plots", action="store_false",
                     help="skip PNG figure rendering")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qsampler",
        description="Generate pseudo-random unitaries from a driven chaotic "
                    "torus system and certify them against the Haar baseline.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("propagator", help="build one propagator and export it")
    _add_common(p)
    p.add_argument("--source", choices=REFERENCE_NAMES)
    p.add_argument("--dimension", "-N", type=int, dest="dimension")
    p.add_argument("--n-tau", type=int, dest="n_tau")
    p.set_defaults(func=_cmd_propagator)

    p = subs.add_parser("frame-potential", help="estimate k-frame potentials of a sampler")
    _add_common(p)
    p.add_argument("--sampler", help="built-in sampler name")
    p.add_argument("--n-pairs", type=int, dest="n_pairs")
    p.add_argument("--dimension", "-N", type=int, dest="dimension")
    p.add_argument("--n-tau", type=int, dest="n_tau")
    p.set_defaults(func=_cmd_frame_potential)

    p = subs.add_parser("diagnostics", help="run the statistical battery on a propagator")
    _add_common(p)
    p.add_argument("--source", choices=REFERENCE_NAMES)
    p.add_argument("--dimension", "-N", type=int, dest="dimension")
    p.add_argument("--n-tau", type=int, dest="n_tau")
    p.add_argument("--which", help="comma list: " + ",".join(_DIAGNOSTIC_NAMES))
    p.add_argument("--bases", help="comma list of bases: angle,h0")
    p.set_defaults(func=_cmd_diagnostics)

    p = subs.add_parser("poincare", help="classical stroboscopic section")
    _add_common(p)
    p.add_argument("--source", choices=("U_Ta", "U_Tb"))
    p.add_argument("--dimension", "-N", type=int, dest="dimension")
    p.add_argument("--n-periods", type=int, dest="n_periods")
    p.add_argument("--n-orbits", type=int, dest="n_orbits")
    p.add_argument("--steps-per-period", type=int, dest="steps_per_period")
    p.set_defaults(func=_cmd_poincare)

    p = subs.add_parser("list-samplers", help="print the built-in sampler roster")
    p.set_defaults(func=_cmd_list_samplers)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "out"):
        os.makedirs(args.out, exist_ok=True)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContractViolationError, np.linalg.LinAlgError) as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
