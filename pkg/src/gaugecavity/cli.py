"""Sweep configuration, execution, and report emission.

The only external surface: `gaugecavity sweep --config cfg.json --out DIR
[--threads N]` writes criterion.csv, summary.json and (when enabled)
oracle.csv; `gaugecavity check --config cfg.json` runs the invariant
suites only.  Exit codes: 0 success, 1 runtime failure, 2 config failure.

criterion.csv is byte-identical across repeated runs of the same config
and seed: rows are emitted in deterministic parameter order and floats
are serialised with shortest round-trip repr.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .criterion import PhasePoint, coulomb_specialized, dipole_specialized, evaluate
from .errors import ConfigError, GaugecavityError
from .gauge import GaugePreset, GaugeSpec, ModeSpec, lwl_mode, make_gauge, ring_mode
from .matter import (
    MatterModel,
    ModelKind,
    build_anharmonic_dipole,
    build_ring_lattice,
    build_two_level_ensemble,
)

SCHEMA_VERSION = 1
CSV_HEADER = ("schema_version,point_index,param_name,param_value,gauge,alpha,"
              "q_index,tau,lhs,rhs,electric_part,magnetic_part,margin,condensed,"
              "beta_re,beta_im")
ORACLE_HEADER = ("schema_version,point_index,param_name,param_value,gauge,"
                 "fock_cutoff,ground_energy,parity_gap,coherence_abs,"
                 "occupation,et_max")

SWEEPABLE = {
    "two_level_ensemble": {"dipole_scale", "gap", "volume"},
    "anharmonic_dipole": {"charge", "frequency", "quartic", "volume"},
    "ring_lattice": {"hopping", "charge"},
}
GAUGE_NAMES = {p.value for p in GaugePreset}


@dataclass(frozen=True)
class SweepConfig:
    model: dict
    gauges: tuple[dict, ...]
    modes: tuple[dict, ...]
    sweep: dict
    oracle: dict
    output: dict
    seed: int
    raw: dict = field(repr=False, default_factory=dict)


def validate_config(text: str) -> SweepConfig:
    """Parse and validate a JSON sweep config, collecting every violation."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from exc
    errors: list[str] = []

    def need(section, key, types, pred=None, msg=""):
        if key not in section[1]:
            errors.append(f"{section[0]}.{key}: missing")
            return None
        val = section[1][key]
        if not isinstance(val, types):
            errors.append(f"{section[0]}.{key}: expected {types}, got {type(val).__name__}")
            return None
        if pred is not None and not pred(val):
            errors.append(f"{section[0]}.{key}: {msg} (got {val!r})")
            return None
        return val

    model = raw.get("model")
    if not isinstance(model, dict):
        errors.append("model: missing or not an object")
        model = {}
    kind = model.get("kind")
    if kind not in SWEEPABLE:
        errors.append(f"model.kind: must be one of {sorted(SWEEPABLE)}, got {kind!r}")
    if kind == "two_level_ensemble":
        need(("model", model), "count", int, lambda v: v >= 1, "must be >= 1")
        need(("model", model), "gap", (int, float), lambda v: v > 0, "must be > 0")
        need(("model", model), "dipole_moment", list,
             lambda v: len(v) == 3 and all(isinstance(x, (int, float)) for x in v),
             "must be a 3-vector")
        need(("model", model), "volume", (int, float), lambda v: v > 0, "must be > 0")
    elif kind == "anharmonic_dipole":
        need(("model", model), "levels", int, lambda v: v >= 4, "must be >= 4")
        need(("model", model), "mass", (int, float), lambda v: v > 0, "must be > 0")
        need(("model", model), "frequency", (int, float), lambda v: v > 0, "must be > 0")
        need(("model", model), "quartic", (int, float), lambda v: v >= 0, "must be >= 0")
        need(("model", model), "charge", (int, float))
        need(("model", model), "volume", (int, float), lambda v: v > 0, "must be > 0")
    elif kind == "ring_lattice":
        need(("model", model), "sites", int, lambda v: v >= 4, "must be >= 4")
        need(("model", model), "hopping", (int, float), lambda v: v > 0, "must be > 0")
        need(("model", model), "charge", (int, float))

    gauge_raw = raw.get("gauge")
    gauges: list[dict] = []
    if isinstance(gauge_raw, dict):
        gauge_list = [gauge_raw]
    elif isinstance(gauge_raw, list):
        gauge_list = gauge_raw
    else:
        errors.append("gauge: missing or not an object/list")
        gauge_list = []
    for i, g in enumerate(gauge_list):
        preset = g.get("preset")
        if preset not in GAUGE_NAMES:
            errors.append(f"gauge[{i}].preset: must be one of {sorted(GAUGE_NAMES)}, got {preset!r}")
            continue
        alpha = g.get("alpha")
        if preset == "alpha_lwl":
            if not isinstance(alpha, (int, float)) or not 0.0 <= alpha <= 1.0:
                errors.append(f"gauge[{i}].alpha: must lie in [0, 1], got {alpha!r}")
        elif alpha is not None:
            errors.append(f"gauge[{i}].alpha: only valid for alpha_lwl")
        gauges.append(dict(g))

    modes_raw = raw.get("modes")
    modes: list[dict] = []
    if not isinstance(modes_raw, list) or not modes_raw:
        errors.append("modes: must be a non-empty list")
    else:
        for i, m in enumerate(modes_raw):
            if not isinstance(m, dict):
                errors.append(f"modes[{i}]: must be an object")
                continue
            if "ring_index" in m:
                if not isinstance(m["ring_index"], int) or m["ring_index"] == 0:
                    errors.append(f"modes[{i}].ring_index: must be a nonzero integer")
                if kind != "ring_lattice":
                    errors.append(f"modes[{i}].ring_index: requires a ring_lattice model")
            else:
                nu = m.get("nu")
                if not isinstance(nu, (int, float)) or nu <= 0:
                    errors.append(f"modes[{i}].nu: must be > 0, got {nu!r}")
            modes.append(dict(m))

    sweep = raw.get("sweep")
    if not isinstance(sweep, dict):
        errors.append("sweep: missing or not an object")
        sweep = {}
    param = sweep.get("parameter")
    allowed = (SWEEPABLE.get(kind, set()) | {"alpha"}) if kind else {"alpha"}
    if param not in allowed:
        errors.append(f"sweep.parameter: must be one of {sorted(allowed)}, got {param!r}")
    if "values" in sweep:
        vals = sweep["values"]
        if not isinstance(vals, list) or not vals:
            errors.append("sweep.values: must be a non-empty list")
    else:
        steps = sweep.get("steps")
        if not isinstance(steps, int) or steps < 1:
            errors.append(f"sweep.steps: must be an integer >= 1, got {steps!r}")
        for key in ("start", "stop"):
            if not isinstance(sweep.get(key), (int, float)):
                errors.append(f"sweep.{key}: must be a number, got {sweep.get(key)!r}")
        if sweep.get("scale", "linear") not in ("linear", "log"):
            errors.append(f"sweep.scale: must be linear or log, got {sweep.get('scale')!r}")
    if param == "alpha" and any(g.get("preset") != "alpha_lwl" for g in gauges):
        errors.append("sweep.parameter=alpha requires every gauge preset to be alpha_lwl")

    oracle = raw.get("oracle", {"enabled": False})
    if not isinstance(oracle, dict):
        errors.append("oracle: must be an object")
        oracle = {"enabled": False}
    elif oracle.get("enabled"):
        fock = oracle.get("fock_cutoff", 40)
        if not isinstance(fock, int) or fock < 2:
            errors.append(f"oracle.fock_cutoff: must be an integer >= 2, got {fock!r}")

    output = raw.get("output", {})
    if not isinstance(output, dict):
        errors.append("output: must be an object")
        output = {}

    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        errors.append(f"seed: must be an integer, got {seed!r}")
        seed = 0

    if errors:
        raise ConfigError(errors)
    return SweepConfig(model=dict(model), gauges=tuple(gauges), modes=tuple(modes),
                       sweep=dict(sweep), oracle=dict(oracle), output=dict(output),
                       seed=seed, raw=raw)


def _sweep_values(sweep: dict) -> np.ndarray:
    if "values" in sweep:
        return np.asarray(sweep["values"], dtype=float)
    if sweep.get("scale", "linear") == "log":
        return np.geomspace(sweep["start"], sweep["stop"], sweep["steps"])
    return np.linspace(sweep["start"], sweep["stop"], sweep["steps"])


def _build_model(cfg: SweepConfig, param: str, value: float) -> MatterModel:
    m = dict(cfg.model)
    kind = m["kind"]
    if kind == "two_level_ensemble":
        scale = value if param == "dipole_scale" else 1.0
        gap = value if param == "gap" else m["gap"]
        vol = value if param == "volume" else m["volume"]
        d = np.asarray(m["dipole_moment"], dtype=float) * scale
        return build_two_level_ensemble(m["count"], gap, d, vol)
    if kind == "anharmonic_dipole":
        kw = {k: m[k] for k in ("levels", "mass", "frequency", "quartic", "charge", "volume")}
        kw["axes"] = m.get("axes", 1)
        if param in ("charge", "frequency", "quartic", "volume"):
            kw[param] = value
        return build_anharmonic_dipole(**kw)
    if kind == "ring_lattice":
        kw = {"sites": m["sites"], "hopping": m["hopping"], "charge": m["charge"],
              "volume": m.get("volume")}
        if param in ("hopping", "charge"):
            kw[param] = value
        return build_ring_lattice(**kw)
    raise ConfigError([f"model.kind: unknown {kind!r}"])


def _build_gauge(gdict: dict, param: str, value: float) -> GaugeSpec:
    preset = gdict["preset"]
    alpha = value if (param == "alpha" and preset == "alpha_lwl") else gdict.get("alpha")
    return make_gauge(preset, lwl=gdict.get("lwl", True), alpha=alpha)


def _build_modes(cfg: SweepConfig, model: MatterModel) -> list[ModeSpec]:
    out = []
    for m in cfg.modes:
        if "ring_index" in m:
            out.append(ring_mode(model, m["ring_index"], nu=m.get("nu")))
        else:
            out.append(lwl_mode(m["nu"], m.get("volume", model.params.volume)))
    return out


def _phase_point(cfg: SweepConfig, index: int, param: str, value: float) -> list[str]:
    """criterion.csv rows for one sweep sample (deterministic order)."""
    rows = []
    for gdict in cfg.gauges:
        gauge = _build_gauge(gdict, param, value)
        model = _build_model(cfg, param, value)
        modes = _build_modes(cfg, model)
        for qi, mode in enumerate(modes):
            reports = evaluate(model, gauge, mode)
            for rep in reports:
                rows.append(",".join([
                    str(SCHEMA_VERSION), str(index), param, repr(float(value)),
                    gauge.preset.value, repr(float(gauge.alpha)), str(qi), rep.tau,
                    repr(float(rep.lhs)), repr(float(rep.rhs)),
                    repr(float(rep.electric_part)), repr(float(rep.magnetic_part)),
                    repr(float(rep.margin)),
                    "true" if rep.condensed else "false",
                    repr(float(rep.beta0.real)), repr(float(rep.beta0.imag)),
                ]))
    return rows


def _oracle_point(cfg: SweepConfig, index: int, param: str, value: float) -> list[str]:
    from .oracle import full_hamiltonian, ground_state, parity_gap, photon_coherence, \
        transverse_field_expectation

    fock = int(cfg.oracle.get("fock_cutoff", 40))
    rows = []
    for gdict in cfg.gauges:
        gauge = _build_gauge(gdict, param, value)
        model = _build_model(cfg, param, value)
        modes = _build_modes(cfg, model)
        system = full_hamiltonian(model, gauge, modes, fock)
        energy, state = ground_state(system)
        gap = parity_gap(system)
        coh, occ = photon_coherence(state, system, 0, 2)
        et = float(np.max(np.abs(transverse_field_expectation(state, system))))
        rows.append(",".join([
            str(SCHEMA_VERSION), str(index), param, repr(float(value)),
            gauge.preset.value, str(fock), repr(float(energy)), repr(float(gap)),
            repr(abs(coh)), repr(float(occ)), repr(et),
        ]))
    return rows


def _thresholds(rows: list[str]) -> list[dict]:
    """First margin sign change per (gauge, q_index, tau), linearly interpolated."""
    series: dict = {}
    for row in rows:
        f = row.split(",")
        key = (f[4], f[6], f[7])
        series.setdefault(key, []).append((float(f[3]), float(f[12])))
    out = []
    for (gauge_label, qi, tau), pts in sorted(series.items()):
        pts.sort()
        crossing = None
        for (x0, m0), (x1, m1) in zip(pts, pts[1:]):
            if m0 <= 0.0 < m1:
                crossing = x0 if m1 == m0 else x0 + (0.0 - m0) * (x1 - x0) / (m1 - m0)
                break
        out.append({"gauge": gauge_label, "q_index": int(qi), "tau": tau,
                    "condensed_anywhere": any(m > 0 for _, m in pts),
                    "crossing": crossing})
    return out


def run_check(cfg: SweepConfig) -> dict:
    """Run the invariant suites relevant to the configured model and gauges."""
    from .bogoliubov import diagonalize_block, numeric_block_eigen, verify_symplectic
    from .gauge import DiamagneticMatrix, diamagnetic_D
    from .matter import check_uniform_density, matter_spectrum, trk_sum

    results = {}
    rng = np.random.default_rng(cfg.seed)
    worst_lam, worst_symp = 0.0, 0.0
    for _ in range(200):
        a, b, c = rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(-1, 1)
        d = np.array([[a, c], [c, b]])
        d = d @ d.T  # symmetric PSD
        dmat = DiamagneticMatrix(d=d, delta_q=rng.uniform(0, 0.5))
        block = diagonalize_block(dmat, 1.0)
        lam_num, _ = numeric_block_eigen(dmat, 1.0)
        worst_lam = max(worst_lam, float(np.max(np.abs(block.lambdas - lam_num))))
        worst_symp = max(worst_symp, verify_symplectic(block))
    results["bogoliubov_lambda_vs_numeric"] = {"max_dev": worst_lam, "tol": 1e-10,
                                               "passed": worst_lam <= 1e-10}
    results["bogoliubov_symplectic"] = {"max_dev": worst_symp, "tol": 1e-11,
                                        "passed": worst_symp <= 1e-11}

    value0 = float(_sweep_values(cfg.sweep)[0])
    param = cfg.sweep["parameter"]
    model = _build_model(cfg, param, value0)
    if model.kind is ModelKind.RING_LATTICE:
        dev = check_uniform_density(model, 0)
        results["ring_uniform_density"] = {"max_dev": dev, "tol": 1e-12,
                                           "passed": dev <= 1e-12}
    if model.momentum_ops is not None:
        spec = matter_spectrum(model)
        s = trk_sum(spec, axis=0, reference_level=0)
        target = model.params.mass * model.params.n_charges / 2.0
        dev = abs(s - target)
        results["trk_sum_rule"] = {"max_dev": dev, "tol": 1e-6, "passed": dev <= 1e-6}
    for gdict in cfg.gauges:
        gauge = _build_gauge(gdict, param, value0)
        modes = _build_modes(cfg, model)
        for mode in modes:
            dmat = diamagnetic_D(model, gauge, mode)
            eigs = np.linalg.eigvalsh(dmat.d)
            key = f"diamagnetic_psd_{gauge.preset.value}"
            results[key] = {"max_dev": float(max(0.0, -eigs[0])), "tol": 1e-14,
                            "passed": eigs[0] >= -1e-14}
    results["all_passed"] = all(v["passed"] for v in results.values()
                                if isinstance(v, dict))
    return results


def run_sweep(cfg: SweepConfig, out_dir: str, threads: int = 1) -> int:
    import os

    t_start = time.monotonic()
    os.makedirs(out_dir, exist_ok=True)
    values = _sweep_values(cfg.sweep)
    param = cfg.sweep["parameter"]
    tasks = list(enumerate(values))
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            row_lists = list(pool.map(
                lambda iv: _phase_point(cfg, iv[0], param, float(iv[1])), tasks))
    else:
        row_lists = [_phase_point(cfg, i, param, float(v)) for i, v in tasks]
    rows = [r for chunk in row_lists for r in chunk]
    with open(os.path.join(out_dir, "criterion.csv"), "w", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    t_criterion = time.monotonic() - t_start

    oracle_rows = []
    if cfg.oracle.get("enabled"):
        points = cfg.oracle.get("points")
        if points is None:
            idx = range(len(values))
        else:
            idx = sorted({int(i) for i in np.linspace(0, len(values) - 1,
                                                      min(int(points), len(values)))})
        for i in idx:
            oracle_rows.extend(_oracle_point(cfg, i, param, float(values[i])))
        with open(os.path.join(out_dir, "oracle.csv"), "w", newline="\n") as fh:
            fh.write(ORACLE_HEADER + "\n")
            for row in oracle_rows:
                fh.write(row + "\n")
    t_total = time.monotonic() - t_start

    summary = {
        "resolved_config": cfg.raw,
        "thresholds": _thresholds(rows),
        "invariant_results": run_check(cfg),
        "timings": {"criterion_seconds": t_criterion, "total_seconds": t_total},
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(_plain(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _plain(obj):
    """Recursively coerce numpy scalars so json can serialise the summary."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gaugecavity",
                                     description="photon-condensation criterion sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--threads", type=int, default=1)
    p_check = sub.add_parser("check", help="run invariant suites only")
    p_check.add_argument("--config", required=True)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            cfg = validate_config(fh.read())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 2

    try:
        if args.command == "sweep":
            return run_sweep(cfg, args.out, threads=args.threads)
        results = run_check(cfg)
        for name, res in results.items():
            if isinstance(res, dict):
                status = "PASS" if res["passed"] else "FAIL"
                print(f"{status} {name}: max_dev={res['max_dev']:.3e} tol={res['tol']:.0e}")
        return 0 if results["all_passed"] else 1
    except GaugecavityError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
