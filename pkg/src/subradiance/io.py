"""Data-file output: CSV traces and JSON run manifests.

All CSVs use LF line endings, '.' decimal separators and 17 significant
digits so that reruns with identical parameters are byte-identical.  The
first line of every CSV carries the run metadata hash as a comment; the
column header row follows.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

__all__ = ["fmt", "metadata_hash", "write_csv", "trace_columns", "write_manifest", "file_sha256"]


def fmt(value: Any) -> str:
    """Render a number with 17 significant digits (round-trips float64)."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def metadata_hash(meta: Mapping[str, Any]) -> str:
    """Stable hash of the resolved run parameters."""
    blob = json.dumps(meta, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_csv(path: Path, columns: dict[str, Sequence], meta_hash: str) -> Path:
    """Write named columns of equal length; first line is `# run=<hash>`."""
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    if len({a.shape[0] for a in arrays}) > 1:
        raise ValueError("columns must have equal length")
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# run={meta_hash}\n")
        writer = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(names)
        for row in zip(*arrays):
            writer.writerow([fmt(v) for v in row])
    return path


def trace_columns(times_gamma: np.ndarray, samples: np.ndarray,
                  gamma_hz: float | None) -> dict[str, np.ndarray]:
    """Standard complex-trace column set: time_gamma, time_ns (if SI units
    are configured), re, im, power."""
    cols: dict[str, np.ndarray] = {"time_gamma": np.asarray(times_gamma, dtype=float)}
    if gamma_hz is not None:
        cols["time_ns"] = cols["time_gamma"] / (2.0 * np.pi * gamma_hz * 1e-9)
    samples = np.asarray(samples, dtype=complex)
    cols["re"] = samples.real
    cols["im"] = samples.imag
    cols["power"] = np.abs(samples) ** 2
    return cols


def file_sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path: Path, *, parameters: Mapping[str, Any], grid: Mapping[str, Any],
                   outputs: Sequence[Path], duration_s: float,
                   extra: Mapping[str, Any] | None = None) -> Path:
    from . import __version__

    manifest = {
        "engine": {"name": "subradiance", "version": __version__},
        "parameters": dict(parameters),
        "grid": dict(grid),
        "outputs": [{"file": Path(p).name, "sha256": file_sha256(p)} for p in outputs],
        "duration_s": round(float(duration_s), 6),
    }
    if extra:
        manifest.update(extra)
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path
