"""
Scan CSV, trace CSV, config JSON and report JSON.

Numbers are written with 17 significant digits. Comment lines beginning
with ``#`` may carry a JSON object with metadata.
"""

from __future__ import annotations

import io
import json
import math
from pathlib import Path

import numpy as np

from .model import NliConfig
from .traces import FringeScan, SpectrumTrace, TraceModel, dbm_linear, linear_dbm

SCAN_COLUMNS = ("phi_rad", "p_sideband_dbm", "p_noise_dbm")
TRACE_COLUMNS = ("freq_hz", "power_dbm")
CONFIG_KEYS = (
    "g1", "g2", "alpha2", "pump_phase", "probe_eta", "conj_eta", "det_eta",
    "double_pass", "k_const", "f_mod_hz", "f_span_hz", "n_bins", "rbw_hz",
    "electronics_floor_dbm", "noise_jitter_db", "seed",
)


class FormatError(ValueError):
    """Malformed or mismatched input file."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj, indent: int | None = 2) -> str:
    """JSON with NaN/inf mapped to null and numpy scalars unwrapped.

    Floats use Python's shortest round-trip repr, which is exact.
    """
    return json.dumps(_jsonable(obj), indent=indent, sort_keys=True, allow_nan=False)


def _to_text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        return data.decode("utf-8")
    return data


def _read_table(data, columns: tuple[str, ...], what: str):
    text = _to_text(data)
    if not text.strip():
        raise FormatError(f"{what}: empty input")
    meta: dict = {}
    header_seen = False
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.startswith("{"):
                try:
                    meta.update(json.loads(body))
                except json.JSONDecodeError as exc:
                    raise FormatError(f"{what}: line {lineno}: bad metadata JSON ({exc.msg})")
            continue
        fields = [f.strip() for f in stripped.split(",")]
        if not header_seen:
            if tuple(fields) != columns:
                raise FormatError(
                    f"{what}: line {lineno}: expected header {','.join(columns)!r}, "
                    f"got {stripped!r}"
                )
            header_seen = True
            continue
        if len(fields) != len(columns):
            raise FormatError(
                f"{what}: line {lineno}: expected {len(columns)} fields, got {len(fields)}"
            )
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            raise FormatError(f"{what}: line {lineno}: non-numeric field in {stripped!r}")
    if not header_seen:
        raise FormatError(f"{what}: no header line (expected {','.join(columns)!r})")
    if not rows:
        raise FormatError(f"{what}: no data rows")
    return np.array(rows), meta


def scan_to_csv(scan: FringeScan) -> bytes:
    buf = io.StringIO()
    meta = {"floor_mw": scan.floor, **scan.meta}
    buf.write("# " + dumps(meta, indent=None) + "\n")
    buf.write(",".join(SCAN_COLUMNS) + "\n")
    sb = linear_dbm(scan.p_sideband)
    nz = linear_dbm(scan.p_noise)
    for p, a, b in zip(scan.phi, sb, nz):
        buf.write(f"{fmt(p)},{fmt(a)},{fmt(b)}\n")
    return buf.getvalue().encode("utf-8")


def csv_to_scan(data) -> FringeScan:
    table, meta = _read_table(data, SCAN_COLUMNS, "scan CSV")
    floor = float(meta.pop("floor_mw", 0.0) or 0.0)
    try:
        return FringeScan(
            table[:, 0], dbm_linear(table[:, 1]), dbm_linear(table[:, 2]), floor, meta
        )
    except ValueError as exc:
        raise FormatError(f"scan CSV: {exc}") from None


def trace_to_csv(trace: SpectrumTrace) -> bytes:
    buf = io.StringIO()
    buf.write("# " + dumps({"phi_rad": trace.phi, **trace.meta}, indent=None) + "\n")
    buf.write(",".join(TRACE_COLUMNS) + "\n")
    for f, p in zip(trace.freqs, linear_dbm(trace.powers)):
        buf.write(f"{fmt(f)},{fmt(p)}\n")
    return buf.getvalue().encode("utf-8")


def csv_to_trace(data) -> SpectrumTrace:
    table, meta = _read_table(data, TRACE_COLUMNS, "trace CSV")
    phi = meta.pop("phi_rad", None)
    try:
        return SpectrumTrace(
            table[:, 0], dbm_linear(table[:, 1]),
            float("nan") if phi is None else float(phi), meta,
        )
    except ValueError as exc:
        raise FormatError(f"trace CSV: {exc}") from None


def parse_config(data) -> tuple[NliConfig, TraceModel]:
    """Read the experiment config JSON. Unknown keys are rejected; missing keys take defaults."""
    text = _to_text(data)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise FormatError("config: top level must be a JSON object")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise FormatError(
            f"config: unknown keys {unknown}; allowed keys are {list(CONFIG_KEYS)}"
        )
    nli_keys = ("g1", "g2", "alpha2", "pump_phase", "probe_eta", "conj_eta", "det_eta",
                "double_pass")
    nli = {k: raw[k] for k in nli_keys if k in raw}
    tm = {}
    renames = {"k_const": "k_const", "f_mod_hz": "f_mod", "f_span_hz": "f_span",
               "n_bins": "n_bins", "rbw_hz": "rbw", "noise_jitter_db": "noise_jitter_db",
               "seed": "rng_seed"}
    for key, name in renames.items():
        if key in raw:
            tm[name] = raw[key]
    if "electronics_floor_dbm" in raw:
        floor = raw["electronics_floor_dbm"]
        tm["electronics_floor"] = 0.0 if floor is None else float(dbm_linear(floor))
    try:
        return NliConfig(**nli), TraceModel(**tm)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"config: {exc}") from None


def load_config(path) -> tuple[NliConfig, TraceModel]:
    return parse_config(Path(path).read_text())


def config_to_dict(config: NliConfig, model: TraceModel) -> dict:
    return {
        "g1": config.g1,
        "g2": config.g2,
        "alpha2": config.alpha2,
        "pump_phase": config.pump_phase,
        "probe_eta": config.probe_eta,
        "conj_eta": config.conj_eta,
        "det_eta": config.det_eta,
        "double_pass": config.double_pass,
        "k_const": model.k_const,
        "f_mod_hz": model.f_mod,
        "f_span_hz": model.f_span,
        "n_bins": model.n_bins,
        "rbw_hz": model.rbw,
        "electronics_floor_dbm": (
            float(linear_dbm(model.electronics_floor)) if model.electronics_floor > 0 else None
        ),
        "noise_jitter_db": model.noise_jitter_db,
        "seed": model.rng_seed,
    }
