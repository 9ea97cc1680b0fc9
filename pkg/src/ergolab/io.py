"""CSV/JSON persistence for sweep records, fits, suite reports, and run
manifests.

The CSV schema is the interchange contract for downstream plotting: column
order is fixed, floats carry 12 significant digits, and writing uses bare
newlines so identical records serialize to identical bytes on every platform.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Sequence

from . import __version__
from .experiments import EnsembleRecord, SuiteReport

AVG_COLUMNS = (
    "measure",
    "d",
    "n_samples",
    "mean_erg_hat",
    "sem_erg_hat",
    "std_erg_hat",
    "mean_entropy_hat",
    "sem_entropy_hat",
    "mean_nsr",
    "sem_nsr",
    "n_nsr_undefined",
    "mean_energy_hat",
)

TAIL_COLUMNS = AVG_COLUMNS + ("ell", "count_erg", "p_erg", "count_ent", "p_ent")

FIT_COLUMNS = (
    "measure",
    "mode",
    "quantity",
    "fixed_d",
    "fixed_ell",
    "slope",
    "intercept",
    "r_squared",
    "n_points",
)

LOCAL_HAM_COLUMNS = (
    "n_sites",
    "d",
    "k",
    "n_terms",
    "c",
    "n_draws",
    "mean_norm",
    "sem_norm",
    "max_norm",
    "triangle_bound",
)

SUITE_COLUMNS = (
    "suite",
    "seed",
    "n_pairs",
    "measure",
    "d",
    "pairs",
    "check",
    "violations",
    "max_excess",
)


class SchemaError(ValueError):
    """A file does not match the documented record schema."""


def format_float(x: float) -> str:
    """12 significant digits; idempotent under parse/re-format."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _json_safe(x):
    if isinstance(x, float):
        if math.isnan(x):
            return None
        if math.isinf(x):
            raise ValueError("refusing to serialize an infinite value to JSON")
    return x


def _json_num(x):
    return math.nan if x is None else float(x)


# Ensemble records.


def _is_tail_set(records: Sequence[EnsembleRecord]) -> bool:
    flags = {rec.tail_counts is not None for rec in records}
    if len(flags) > 1:
        raise ValueError("cannot mix tail and average records in one file")
    return flags == {True}


def _avg_cells(rec: EnsembleRecord) -> list[str]:
    return [
        rec.measure,
        str(rec.d),
        str(rec.n_samples),
        format_float(rec.mean_erg_hat),
        format_float(rec.sem_erg_hat),
        format_float(rec.std_erg_hat),
        format_float(rec.mean_entropy_hat),
        format_float(rec.sem_entropy_hat),
        format_float(rec.mean_nsr),
        format_float(rec.sem_nsr),
        str(rec.n_nsr_undefined),
        format_float(rec.mean_energy_hat),
    ]


def _records_csv(records: Sequence[EnsembleRecord]) -> str:
    tails = _is_tail_set(records)
    header = TAIL_COLUMNS if tails else AVG_COLUMNS
    lines = [",".join(header)]
    for rec in records:
        base = _avg_cells(rec)
        if not tails:
            lines.append(",".join(base))
            continue
        for ell, count_erg, count_ent in rec.tail_counts:
            lines.append(
                ",".join(
                    base
                    + [
                        format_float(ell),
                        str(count_erg),
                        format_float(count_erg / rec.n_samples),
                        str(count_ent),
                        format_float(count_ent / rec.n_samples),
                    ]
                )
            )
    return "\n".join(lines) + "\n"


def _record_obj(rec: EnsembleRecord, tails: bool) -> dict:
    obj = {
        "measure": rec.measure,
        "d": rec.d,
        "n_samples": rec.n_samples,
        "mean_erg_hat": _json_safe(rec.mean_erg_hat),
        "sem_erg_hat": _json_safe(rec.sem_erg_hat),
        "std_erg_hat": _json_safe(rec.std_erg_hat),
        "mean_entropy_hat": _json_safe(rec.mean_entropy_hat),
        "sem_entropy_hat": _json_safe(rec.sem_entropy_hat),
        "mean_nsr": _json_safe(rec.mean_nsr),
        "sem_nsr": _json_safe(rec.sem_nsr),
        "n_nsr_undefined": rec.n_nsr_undefined,
        "mean_energy_hat": _json_safe(rec.mean_energy_hat),
    }
    if tails:
        obj["tails"] = [
            {
                "ell": ell,
                "count_erg": count_erg,
                "p_erg": count_erg / rec.n_samples,
                "count_ent": count_ent,
                "p_ent": count_ent / rec.n_samples,
            }
            for ell, count_erg, count_ent in rec.tail_counts
        ]
    return obj


def _records_json(records: Sequence[EnsembleRecord]) -> str:
    tails = _is_tail_set(records)
    obj = {"records": [_record_obj(rec, tails) for rec in records]}
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def serialize_records(records: Sequence[EnsembleRecord], fmt: str = "csv") -> str:
    if fmt == "csv":
        return _records_csv(records)
    if fmt == "json":
        return _records_json(records)
    raise ValueError(f"unknown format {fmt!r}; use csv or json")


def write_records(records: Sequence[EnsembleRecord], path: str, fmt: str = "csv") -> str:
    """Serialize and write; returns the content for hashing."""
    content = serialize_records(records, fmt)
    write_text(path, content)
    return content


def _parse_avg_fields(cells: list[str]) -> dict:
    return dict(
        measure=cells[0],
        d=int(cells[1]),
        n_samples=int(cells[2]),
        mean_erg_hat=float(cells[3]),
        sem_erg_hat=float(cells[4]),
        std_erg_hat=float(cells[5]),
        mean_entropy_hat=float(cells[6]),
        sem_entropy_hat=float(cells[7]),
        mean_nsr=float(cells[8]),
        sem_nsr=float(cells[9]),
        n_nsr_undefined=int(cells[10]),
        mean_energy_hat=float(cells[11]),
    )


def _records_from_csv(text: str) -> list[EnsembleRecord]:
    lines = [ln for ln in text.splitlines() if ln]
    if not lines:
        raise SchemaError("empty file; expected a header row")
    header = tuple(lines[0].split(","))
    if header == AVG_COLUMNS:
        tails = False
    elif header == TAIL_COLUMNS:
        tails = True
    else:
        raise SchemaError(
            f"unrecognized header {lines[0]!r}; expected the averages or tails schema"
        )
    if not tails:
        out = []
        for ln in lines[1:]:
            cells = ln.split(",")
            if len(cells) != len(AVG_COLUMNS):
                raise SchemaError(f"row has {len(cells)} cells, expected {len(AVG_COLUMNS)}")
            out.append(EnsembleRecord(**_parse_avg_fields(cells)))
        return out
    groups: dict[tuple[str, int], dict] = {}
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(TAIL_COLUMNS):
            raise SchemaError(f"row has {len(cells)} cells, expected {len(TAIL_COLUMNS)}")
        fields = _parse_avg_fields(cells[:12])
        key = (fields["measure"], fields["d"])
        grp = groups.setdefault(key, {"fields": fields, "tails": []})
        grp["tails"].append((float(cells[12]), int(cells[13]), int(cells[15])))
    return [
        EnsembleRecord(tail_counts=tuple(grp["tails"]), **grp["fields"])
        for grp in groups.values()
    ]


def _records_from_json(text: str) -> list[EnsembleRecord]:
    obj = json.loads(text)
    if isinstance(obj, dict):
        if "records" not in obj:
            raise SchemaError("JSON object lacks a records key")
        rows = obj["records"]
    else:
        rows = obj
    out = []
    for row in rows:
        tails = None
        if "tails" in row:
            tails = tuple(
                (float(t["ell"]), int(t["count_erg"]), int(t["count_ent"]))
                for t in row["tails"]
            )
        out.append(
            EnsembleRecord(
                measure=row["measure"],
                d=int(row["d"]),
                n_samples=int(row["n_samples"]),
                mean_erg_hat=_json_num(row["mean_erg_hat"]),
                sem_erg_hat=_json_num(row["sem_erg_hat"]),
                std_erg_hat=_json_num(row["std_erg_hat"]),
                mean_entropy_hat=_json_num(row["mean_entropy_hat"]),
                sem_entropy_hat=_json_num(row["sem_entropy_hat"]),
                mean_nsr=_json_num(row["mean_nsr"]),
                sem_nsr=_json_num(row["sem_nsr"]),
                n_nsr_undefined=int(row["n_nsr_undefined"]),
                mean_energy_hat=_json_num(row["mean_energy_hat"]),
                tail_counts=tails,
            )
        )
    return out


def read_records(path: str) -> list[EnsembleRecord]:
    """Parse an averages or tails file, CSV or JSON, back into records."""
    text = read_text(path)
    head = text.lstrip()[:1]
    if head in ("{", "["):
        return _records_from_json(text)
    return _records_from_csv(text)


# Fit rows (plain dicts keyed by FIT_COLUMNS).


def _fit_cell(key: str, value) -> str:
    if value is None:
        return ""
    if key in ("fixed_d", "n_points"):
        return str(int(value))
    if key in ("measure", "mode", "quantity"):
        return str(value)
    return format_float(value)


def serialize_fits(rows: Sequence[dict], fmt: str = "csv") -> str:
    if fmt == "csv":
        lines = [",".join(FIT_COLUMNS)]
        for row in rows:
            lines.append(",".join(_fit_cell(col, row.get(col)) for col in FIT_COLUMNS))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        safe = [{col: _json_safe(row.get(col)) for col in FIT_COLUMNS} for row in rows]
        return json.dumps({"fits": safe}, indent=2, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}; use csv or json")


# Local Hamiltonian scaling rows.


def serialize_local_ham(rows: Sequence[dict], fmt: str = "csv") -> str:
    if fmt == "csv":
        lines = [",".join(LOCAL_HAM_COLUMNS)]
        for row in rows:
            cells = []
            for col in LOCAL_HAM_COLUMNS:
                v = row[col]
                cells.append(str(v) if isinstance(v, int) else format_float(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        safe = [{col: _json_safe(row[col]) for col in LOCAL_HAM_COLUMNS} for row in rows]
        return json.dumps({"local_ham": safe}, indent=2, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}; use csv or json")


# Verification suite reports.


def suite_report_obj(report: SuiteReport) -> dict:
    return {
        "suite": report.suite,
        "seed": report.seed,
        "n_pairs": report.n_pairs,
        "d_list": list(report.d_list),
        "total_violations": report.total_violations,
        "passed": report.passed,
        "entries": [
            {
                "measure": e.measure,
                "d": e.d,
                "pairs": e.pairs,
                "checks": [
                    {
                        "name": c.name,
                        "violations": c.violations,
                        "max_excess": _json_safe(c.max_excess),
                    }
                    for c in e.checks
                ],
            }
            for e in report.entries
        ],
    }


def serialize_suite_report(report: SuiteReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(suite_report_obj(report), indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        lines = [",".join(SUITE_COLUMNS)]
        for e in report.entries:
            for c in e.checks:
                lines.append(
                    ",".join(
                        [
                            report.suite,
                            str(report.seed),
                            str(report.n_pairs),
                            e.measure,
                            str(e.d),
                            str(e.pairs),
                            c.name,
                            str(c.violations),
                            format_float(c.max_excess),
                        ]
                    )
                )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}; use csv or json")


# Raw sample dumps.


def serialize_samples(draws: Sequence[dict], fmt: str = "csv") -> str:
    """draws: dicts with ensemble, d, index, matrix (2D complex ndarray)."""
    if fmt == "csv":
        lines = ["ensemble,d,draw,row,col,re,im"]
        for item in draws:
            m = item["matrix"]
            prefix = f"{item['ensemble']},{item['d']},{item['index']}"
            for i in range(m.shape[0]):
                for j in range(m.shape[1]):
                    z = m[i, j]
                    lines.append(
                        f"{prefix},{i},{j},{format_float(z.real)},{format_float(z.imag)}"
                    )
        return "\n".join(lines) + "\n"
    if fmt == "json":
        out = []
        for item in draws:
            m = item["matrix"]
            out.append(
                {
                    "ensemble": item["ensemble"],
                    "d": item["d"],
                    "index": item["index"],
                    "matrix": [
                        [[z.real, z.imag] for z in row_vals] for row_vals in m.tolist()
                    ],
                }
            )
        return json.dumps({"samples": out}, indent=2, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}; use csv or json")


# Manifests.


@dataclass(frozen=True)
class RunManifest:
    """Provenance sidecar: resolved config plus a content hash per output."""

    tool_version: str
    command: str
    config_echo: dict
    seed: int | None
    started: str
    finished: str
    outputs: tuple[tuple[str, str], ...]


def content_hash(content: str) -> str:
    """Hash of the output bytes in git blob form."""
    data = content.encode("utf-8")
    h = hashlib.sha1(b"blob %d\0" % len(data))
    h.update(data)
    return "blob-sha1:" + h.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def manifest_path_for(out_path: str) -> str:
    return out_path + ".manifest.json"


def manifest_obj(manifest: RunManifest) -> dict:
    return {
        "tool_version": manifest.tool_version,
        "command": manifest.command,
        "config_echo": manifest.config_echo,
        "seed": manifest.seed,
        "started": manifest.started,
        "finished": manifest.finished,
        "outputs": [{"path": p, "content_hash": h} for p, h in manifest.outputs],
    }


def write_manifest(manifest: RunManifest, path: str) -> None:
    write_text(path, json.dumps(manifest_obj(manifest), indent=2, allow_nan=False) + "\n")


def read_manifest(path: str) -> RunManifest:
    obj = json.loads(read_text(path))
    return RunManifest(
        tool_version=obj["tool_version"],
        command=obj["command"],
        config_echo=obj["config_echo"],
        seed=obj["seed"],
        started=obj["started"],
        finished=obj["finished"],
        outputs=tuple((o["path"], o["content_hash"]) for o in obj["outputs"]),
    )


def new_manifest(command: str, config_echo: dict, seed: int | None, started: str,
                 outputs: Sequence[tuple[str, str]]) -> RunManifest:
    return RunManifest(
        tool_version=__version__,
        command=command,
        config_echo=config_echo,
        seed=seed,
        started=started,
        finished=utc_now(),
        outputs=tuple(outputs),
    )


def write_text(path: str, content: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
