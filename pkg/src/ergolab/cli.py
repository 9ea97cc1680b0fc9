"""Command-line front end.

Subcommands: avg, tails, fit, verify, local-ham, sample. Exit codes: 0 on
success, 1 on configuration or I/O errors, 2 when a verification suite
reports violations. Flag values may also come from a --config file (flat
key=value lines or a JSON object); explicit flags win.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .experiments import (
    _MEASURE_CODE,
    _PURPOSE_SAMPLE,
    _stream_id,
    SUITES,
    SweepConfig,
    canonical_measure,
    fit_concentration_exponents,
    run_average_sweep,
    run_tail_experiment,
    run_verification_suite,
    select_common_ell,
    _ols,
)
from .io import (
    manifest_path_for,
    new_manifest,
    read_records,
    read_text,
    serialize_fits,
    serialize_local_ham,
    serialize_records,
    serialize_samples,
    serialize_suite_report,
    content_hash,
    utc_now,
    write_manifest,
    write_text,
)
from .sampler import (
    LocalHamiltonianSpec,
    RngStream,
    build_k_local_hamiltonian,
    sample_bures_state,
    sample_ginibre,
    sample_gue,
    sample_haar_unitary,
    sample_hs_state,
    sample_ngue_hamiltonian,
    sample_pure_state,
)

THREADS_ENV = "ERGOLAB_THREADS"


class CliConfigError(Exception):
    """Bad flags, bad config values, or unusable input files."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here is exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ergolab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ergolab {__version__}")
    sub = parser.add_subparsers(dest="command")

    def common(p, seed=True):
        p.add_argument("--out", help="output path; omit to print to stdout")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--config", help="key=value or JSON file supplying flag defaults")
        p.add_argument("--threads", type=int)
        if seed:
            p.add_argument("--seed", type=int)

    p_avg = sub.add_parser("avg", help="ensemble averages over a dimension sweep")
    p_avg.add_argument("--measure")
    p_avg.add_argument("--dims")
    p_avg.add_argument("--samples", type=int)
    p_avg.add_argument("--fixed-hamiltonian", action=argparse.BooleanOptionalAction)
    common(p_avg)

    p_tails = sub.add_parser("tails", help="two-pass deviation tail counts")
    p_tails.add_argument("--measure")
    p_tails.add_argument("--dims")
    p_tails.add_argument("--samples", type=int)
    p_tails.add_argument("--ell-grid")
    p_tails.add_argument("--fixed-hamiltonian", action=argparse.BooleanOptionalAction)
    common(p_tails)

    p_fit = sub.add_parser("fit", help="concentration exponents from a tails file")
    p_fit.add_argument("--in", dest="in_path")
    p_fit.add_argument("--mode", choices=("vary-ell", "vary-d"))
    p_fit.add_argument("--quantity", choices=("ergotropy", "entropy", "both"))
    p_fit.add_argument("--fixed-d", type=int)
    p_fit.add_argument("--fixed-ell", type=float)
    common(p_fit, seed=False)

    p_verify = sub.add_parser("verify", help="theorem verification suites")
    p_verify.add_argument("--suite", choices=SUITES)
    p_verify.add_argument("--dims")
    p_verify.add_argument("--pairs", type=int)
    p_verify.add_argument("--measure", help="comma list; default all state measures")
    p_verify.add_argument("--ell-grid", help="levy_hs only")
    common(p_verify)

    p_local = sub.add_parser("local-ham", help="k-local norm scaling report")
    p_local.add_argument("--sites", help="comma list or START..STOP range")
    p_local.add_argument("--k", type=int)
    p_local.add_argument("--terms", help="integer or all-pairs")
    p_local.add_argument("--c", type=float)
    p_local.add_argument("--draws", type=int)
    common(p_local)

    p_sample = sub.add_parser("sample", help="dump raw ensemble draws")
    p_sample.add_argument(
        "--ensemble",
        choices=("hs", "hilbert_schmidt", "bures", "pure", "ginibre", "haar", "gue", "ngue"),
    )
    p_sample.add_argument("--dims")
    p_sample.add_argument("--samples", type=int)
    common(p_sample)

    return parser


# Config-file handling and value resolution.


def _load_config_file(path: str) -> dict:
    text = read_text(path)
    if text.lstrip()[:1] == "{":
        import json

        obj = json.loads(text)
        if not isinstance(obj, dict):
            raise CliConfigError(f"config file {path} must hold a JSON object")
        return {str(k).lower().replace("-", "_"): v for k, v in obj.items()}
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CliConfigError(f"config line {raw!r} is not key=value")
        out[key.strip().lower().replace("-", "_")] = value.strip()
    return out


def _resolve(ns, cfg: dict, key: str, cast=None, default=None):
    value = getattr(ns, key, None)
    if value is None and key in cfg:
        value = cfg[key]
    if value is None:
        return default
    if cast is not None:
        return cast(value)
    return value


def _require(value, flag: str):
    if value is None:
        raise CliConfigError(f"{flag} is required")
    return value


def _cast_int(v) -> int:
    try:
        return int(v)
    except (TypeError, ValueError):
        raise CliConfigError(f"expected an integer, got {v!r}") from None


def _cast_float(v) -> float:
    try:
        return float(v)
    except (TypeError, ValueError):
        raise CliConfigError(f"expected a number, got {v!r}") from None


def _cast_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    token = str(v).strip().lower()
    if token in ("1", "true", "yes", "on"):
        return True
    if token in ("0", "false", "no", "off"):
        return False
    raise CliConfigError(f"expected a boolean, got {v!r}")


def _cast_dims(v) -> tuple[int, ...]:
    if isinstance(v, (list, tuple)):
        return tuple(_cast_int(x) for x in v)
    parts = [p for p in str(v).split(",") if p.strip()]
    if not parts:
        raise CliConfigError(f"empty dimension list {v!r}")
    return tuple(_cast_int(p.strip()) for p in parts)


def _cast_ell_grid(v) -> tuple[float, ...]:
    if isinstance(v, (list, tuple)):
        return tuple(_cast_float(x) for x in v)
    text = str(v).strip()
    if text.startswith("log:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise CliConfigError("log grid must be log:start:stop:count")
        start, stop = _cast_float(parts[1]), _cast_float(parts[2])
        count = _cast_int(parts[3])
        if start <= 0 or stop <= start or count < 2:
            raise CliConfigError("log grid needs 0 < start < stop and count >= 2")
        return tuple(float(x) for x in np.geomspace(start, stop, count))
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise CliConfigError(f"empty ell grid {v!r}")
    return tuple(_cast_float(p.strip()) for p in parts)


def _cast_sites(v) -> tuple[int, ...]:
    if isinstance(v, (list, tuple)):
        return tuple(_cast_int(x) for x in v)
    text = str(v).strip()
    if ".." in text:
        lo_s, _, hi_s = text.partition("..")
        lo, hi = _cast_int(lo_s), _cast_int(hi_s)
        if hi < lo:
            raise CliConfigError(f"bad site range {text!r}")
        return tuple(range(lo, hi + 1))
    return tuple(_cast_int(p.strip()) for p in text.split(",") if p.strip())


def _cast_measure(v) -> str:
    try:
        return canonical_measure(str(v))
    except ValueError as exc:
        raise CliConfigError(str(exc)) from None


def _threads(ns, cfg: dict) -> int:
    value = _resolve(ns, cfg, "threads", cast=_cast_int)
    if value is None:
        env = os.environ.get(THREADS_ENV)
        value = _cast_int(env) if env else 1
    if value < 1:
        raise CliConfigError("--threads must be at least 1")
    return value


def _deliver(content: str, out: str | None, command: str, echo: dict,
             seed: int | None, started: str) -> None:
    if out is None:
        sys.stdout.write(content)
        return
    write_text(out, content)
    manifest = new_manifest(
        command, echo, seed, started, [(os.path.basename(out), content_hash(content))]
    )
    write_manifest(manifest, manifest_path_for(out))


# Subcommands.


def _cmd_avg(ns, cfg) -> int:
    measure = _cast_measure(_require(_resolve(ns, cfg, "measure"), "--measure"))
    dims = _cast_dims(_require(_resolve(ns, cfg, "dims"), "--dims"))
    samples = _require(_resolve(ns, cfg, "samples", cast=_cast_int), "--samples")
    seed = _require(_resolve(ns, cfg, "seed", cast=_cast_int), "--seed")
    fixed = _resolve(ns, cfg, "fixed_hamiltonian", cast=_cast_bool, default=False)
    threads = _threads(ns, cfg)
    fmt = _resolve(ns, cfg, "format", default="csv")
    sweep = SweepConfig(
        measure=measure,
        dims=dims,
        samples_per_dim=samples,
        seed=seed,
        fixed_hamiltonian=fixed,
    )
    started = utc_now()
    records = run_average_sweep(sweep, threads=threads)
    echo = {
        "measure": measure,
        "dims": list(dims),
        "samples": samples,
        "seed": seed,
        "fixed_hamiltonian": fixed,
        "threads": threads,
        "format": fmt,
        "out": ns.out,
    }
    _deliver(serialize_records(records, fmt), ns.out, "avg", echo, seed, started)
    return 0


def _cmd_tails(ns, cfg) -> int:
    measure = _cast_measure(_require(_resolve(ns, cfg, "measure"), "--measure"))
    dims = _cast_dims(_require(_resolve(ns, cfg, "dims"), "--dims"))
    samples = _require(_resolve(ns, cfg, "samples", cast=_cast_int), "--samples")
    seed = _require(_resolve(ns, cfg, "seed", cast=_cast_int), "--seed")
    grid = _cast_ell_grid(_require(_resolve(ns, cfg, "ell_grid"), "--ell-grid"))
    fixed = _resolve(ns, cfg, "fixed_hamiltonian", cast=_cast_bool, default=False)
    threads = _threads(ns, cfg)
    fmt = _resolve(ns, cfg, "format", default="csv")
    sweep = SweepConfig(
        measure=measure,
        dims=dims,
        samples_per_dim=samples,
        seed=seed,
        ell_grid=grid,
        fixed_hamiltonian=fixed,
    )
    started = utc_now()
    records = run_tail_experiment(sweep, threads=threads)
    echo = {
        "measure": measure,
        "dims": list(dims),
        "samples": samples,
        "seed": seed,
        "ell_grid": list(grid),
        "fixed_hamiltonian": fixed,
        "threads": threads,
        "format": fmt,
        "out": ns.out,
    }
    _deliver(serialize_records(records, fmt), ns.out, "tails", echo, seed, started)
    return 0


_FIT_MODE_MAP = {"vary-ell": "vary_ell_fixed_d", "vary-d": "vary_d_fixed_ell"}


def _fit_rows_for(records, measure, mode, quantity, fixed_d, fixed_ell):
    recs = [r for r in records if r.measure == measure]
    rows = []
    if mode == "vary_ell_fixed_d":
        dims = [fixed_d] if fixed_d is not None else sorted({r.d for r in recs})
        for d in dims:
            res = fit_concentration_exponents(recs, mode, quantity=quantity, d=d)
            rows.append(
                {
                    "measure": measure,
                    "mode": "vary-ell",
                    "quantity": quantity,
                    "fixed_d": d,
                    "fixed_ell": None,
                    "slope": res.x_exponent,
                    "intercept": res.intercept,
                    "r_squared": res.r_squared,
                    "n_points": res.n_points,
                }
            )
        return rows
    ell = fixed_ell if fixed_ell is not None else select_common_ell(recs, quantity=quantity)
    res = fit_concentration_exponents(recs, mode, quantity=quantity, ell=ell)
    rows.append(
        {
            "measure": measure,
            "mode": "vary-d",
            "quantity": quantity,
            "fixed_d": None,
            "fixed_ell": ell,
            "slope": res.y_exponent,
            "intercept": res.intercept,
            "r_squared": res.r_squared,
            "n_points": res.n_points,
        }
    )
    return rows


def _cmd_fit(ns, cfg) -> int:
    in_path = _require(_resolve(ns, cfg, "in_path") or cfg.get("in"), "--in")
    mode_flag = _require(_resolve(ns, cfg, "mode"), "--mode")
    if mode_flag not in _FIT_MODE_MAP:
        raise CliConfigError(f"--mode must be vary-ell or vary-d, got {mode_flag!r}")
    mode = _FIT_MODE_MAP[mode_flag]
    quantity = _resolve(ns, cfg, "quantity", default="both")
    fixed_d = _resolve(ns, cfg, "fixed_d", cast=_cast_int)
    fixed_ell = _resolve(ns, cfg, "fixed_ell", cast=_cast_float)
    fmt = _resolve(ns, cfg, "format", default="csv")
    started = utc_now()
    records = read_records(in_path)
    if not records:
        raise CliConfigError(f"{in_path} holds no records")
    quantities = ("ergotropy", "entropy") if quantity == "both" else (quantity,)
    rows = []
    for measure in dict.fromkeys(r.measure for r in records):
        for q in quantities:
            rows.extend(_fit_rows_for(records, measure, mode, q, fixed_d, fixed_ell))
    echo = {
        "in": in_path,
        "mode": mode_flag,
        "quantity": quantity,
        "fixed_d": fixed_d,
        "fixed_ell": fixed_ell,
        "format": fmt,
        "out": ns.out,
    }
    _deliver(serialize_fits(rows, fmt), ns.out, "fit", echo, None, started)
    return 0


def _cmd_verify(ns, cfg) -> int:
    suite = _require(_resolve(ns, cfg, "suite"), "--suite")
    if suite not in SUITES:
        raise CliConfigError(f"--suite must be one of {', '.join(SUITES)}")
    dims = _cast_dims(_require(_resolve(ns, cfg, "dims"), "--dims"))
    pairs = _require(_resolve(ns, cfg, "pairs", cast=_cast_int), "--pairs")
    seed = _require(_resolve(ns, cfg, "seed", cast=_cast_int), "--seed")
    threads = _threads(ns, cfg)
    fmt = _resolve(ns, cfg, "format", default="json")
    raw_measures = _resolve(ns, cfg, "measure")
    measures = None
    if raw_measures is not None:
        tokens = (
            raw_measures
            if isinstance(raw_measures, (list, tuple))
            else str(raw_measures).split(",")
        )
        measures = tuple(_cast_measure(t) for t in tokens if str(t).strip())
    grid = _resolve(ns, cfg, "ell_grid", cast=_cast_ell_grid)
    started = utc_now()
    report = run_verification_suite(
        suite, dims, pairs, seed, threads=threads, measures=measures, ell_grid=grid
    )
    echo = {
        "suite": suite,
        "dims": list(dims),
        "pairs": pairs,
        "seed": seed,
        "measure": list(measures) if measures else None,
        "ell_grid": list(grid) if grid else None,
        "threads": threads,
        "format": fmt,
        "out": ns.out,
    }
    _deliver(serialize_suite_report(report, fmt), ns.out, "verify", echo, seed, started)
    if not report.passed:
        print(
            f"suite {suite}: {report.total_violations} violation(s)", file=sys.stderr
        )
        return 2
    return 0


def _cmd_local_ham(ns, cfg) -> int:
    sites = _cast_sites(_require(_resolve(ns, cfg, "sites"), "--sites"))
    k = _require(_resolve(ns, cfg, "k", cast=_cast_int), "--k")
    terms_raw = _require(_resolve(ns, cfg, "terms"), "--terms")
    c = _resolve(ns, cfg, "c", cast=_cast_float, default=1.0)
    draws = _resolve(ns, cfg, "draws", cast=_cast_int, default=20)
    seed = _require(_resolve(ns, cfg, "seed", cast=_cast_int), "--seed")
    fmt = _resolve(ns, cfg, "format", default="csv")
    if draws < 1:
        raise CliConfigError("--draws must be at least 1")
    started = utc_now()
    rows = []
    for n_sites in sites:
        n_terms = math.comb(n_sites, k) if str(terms_raw) == "all-pairs" else _cast_int(terms_raw)
        spec = LocalHamiltonianSpec(n_sites=n_sites, k=k, n_terms=n_terms, c=c)
        norms = np.empty(draws)
        bound = 0.0
        for i in range(draws):
            sid = _stream_id(_PURPOSE_SAMPLE, 8, spec.total_dim, 0, i)
            op, bound = build_k_local_hamiltonian(
                spec, RngStream(seed, sid), return_triangle_bound=True
            )
            norms[i] = np.max(np.abs(np.linalg.eigvalsh(op.matrix)))
        rows.append(
            {
                "n_sites": n_sites,
                "d": spec.total_dim,
                "k": k,
                "n_terms": n_terms,
                "c": c,
                "n_draws": draws,
                "mean_norm": float(norms.mean()),
                "sem_norm": float(norms.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0,
                "max_norm": float(norms.max()),
                "triangle_bound": float(bound),
            }
        )
    echo = {
        "sites": list(sites),
        "k": k,
        "terms": str(terms_raw),
        "c": c,
        "draws": draws,
        "seed": seed,
        "format": fmt,
        "out": ns.out,
    }
    _deliver(serialize_local_ham(rows, fmt), ns.out, "local-ham", echo, seed, started)
    if len(rows) >= 2:
        x = np.log([r["n_sites"] for r in rows])
        y = np.log([r["mean_norm"] for r in rows])
        slope, _, r2 = _ols(x, y)
        stream = sys.stderr if ns.out is None else sys.stdout
        print(f"log-log slope of mean norm vs sites: {slope:.6g} (r_squared {r2:.6g})",
              file=stream)
    return 0


_SAMPLE_FNS = {
    "hilbert_schmidt": sample_hs_state,
    "bures": sample_bures_state,
    "pure": sample_pure_state,
    "ginibre": sample_ginibre,
    "haar": sample_haar_unitary,
    "gue": sample_gue,
    "ngue": sample_ngue_hamiltonian,
}

_SAMPLE_CODES = {**_MEASURE_CODE, "ginibre": 4, "haar": 5, "gue": 6, "ngue": 7}


def _cmd_sample(ns, cfg) -> int:
    raw = _require(_resolve(ns, cfg, "ensemble"), "--ensemble")
    ensemble = "hilbert_schmidt" if raw == "hs" else raw
    if ensemble not in _SAMPLE_FNS:
        raise CliConfigError(f"--ensemble must be one of {', '.join(_SAMPLE_FNS)}")
    dims = _cast_dims(_require(_resolve(ns, cfg, "dims"), "--dims"))
    samples = _require(_resolve(ns, cfg, "samples", cast=_cast_int), "--samples")
    seed = _require(_resolve(ns, cfg, "seed", cast=_cast_int), "--seed")
    fmt = _resolve(ns, cfg, "format", default="csv")
    if samples < 1:
        raise CliConfigError("--samples must be at least 1")
    started = utc_now()
    fn = _SAMPLE_FNS[ensemble]
    code = _SAMPLE_CODES[ensemble]
    draws = []
    for d in dims:
        for i in range(samples):
            sid = _stream_id(_PURPOSE_SAMPLE, code, d, 0, i)
            value = fn(d, RngStream(seed, sid))
            matrix = getattr(value, "matrix", value)
            draws.append({"ensemble": ensemble, "d": d, "index": i, "matrix": matrix})
    echo = {
        "ensemble": ensemble,
        "dims": list(dims),
        "samples": samples,
        "seed": seed,
        "format": fmt,
        "out": ns.out,
    }
    _deliver(serialize_samples(draws, fmt), ns.out, "sample", echo, seed, started)
    return 0


_DISPATCH = {
    "avg": _cmd_avg,
    "tails": _cmd_tails,
    "fit": _cmd_fit,
    "verify": _cmd_verify,
    "local-ham": _cmd_local_ham,
    "sample": _cmd_sample,
}


def argv_from_manifest(manifest) -> list[str]:
    """Rebuild the argv that reproduces a manifest's run (data subcommands)."""
    echo = manifest.config_echo
    argv = [manifest.command]

    def put(flag, value):
        if value is None:
            return
        if isinstance(value, bool):
            if value:
                argv.append(flag)
            return
        if isinstance(value, (list, tuple)):
            argv.extend([flag, ",".join(repr(x) if isinstance(x, float) else str(x) for x in value)])
            return
        argv.extend([flag, str(value)])

    order = (
        ("--measure", "measure"),
        ("--ensemble", "ensemble"),
        ("--suite", "suite"),
        ("--dims", "dims"),
        ("--sites", "sites"),
        ("--k", "k"),
        ("--terms", "terms"),
        ("--c", "c"),
        ("--draws", "draws"),
        ("--samples", "samples"),
        ("--pairs", "pairs"),
        ("--in", "in"),
        ("--mode", "mode"),
        ("--quantity", "quantity"),
        ("--fixed-d", "fixed_d"),
        ("--fixed-ell", "fixed_ell"),
        ("--ell-grid", "ell_grid"),
        ("--seed", "seed"),
        ("--fixed-hamiltonian", "fixed_hamiltonian"),
        ("--threads", "threads"),
        ("--format", "format"),
        ("--out", "out"),
    )
    for flag, key in order:
        put(flag, echo.get(key))
    return argv


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if getattr(ns, "command", None) is None:
            parser.print_usage(sys.stderr)
            print("error: a subcommand is required", file=sys.stderr)
            return 1
        cfg = _load_config_file(ns.config) if getattr(ns, "config", None) else {}
        return _DISPATCH[ns.command](ns, cfg)
    except CliConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
