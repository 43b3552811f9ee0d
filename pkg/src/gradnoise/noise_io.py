"""Serialization of noise matrices and battery reports.

Noise matrices use a small self-describing binary container:

  bytes 0..8    magic ``SGNMAT01``
  bytes 8..24   row count M and dimension p, little-endian uint64
  next M*p*8    the matrix, little-endian float64, row-major
  remainder     UTF-8 JSON object with provenance metadata

Reports go to CSV (one row per checkpoint, stable column order and
float formatting, so reruns are byte-identical) or to JSON.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import DataFormatError, GradNoiseError
from .projection import NoiseMatrix, NoiseMeta, ProjectionReport

NOISE_MAGIC = b"SGNMAT01"
_HEADER_SIZE = len(NOISE_MAGIC) + 16

REPORT_COLUMNS = (
    "sw_mean_p",
    "ad_accept_frac",
    "baseline_sw_mean_p",
    "baseline_ad_accept_frac",
    "n_degenerate",
)


def write_noise(path: Union[str, Path], noise: NoiseMatrix) -> None:
    """Write a noise matrix with its metadata trailer."""
    m, p = noise.data.shape
    header = NOISE_MAGIC + np.asarray([m, p], dtype="<u8").tobytes()
    trailer = json.dumps(noise.meta.to_dict(), sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(noise.data, dtype="<f8").tobytes())
        fh.write(trailer)


def read_noise(path: Union[str, Path]) -> NoiseMatrix:
    """Read a noise matrix, raising DataFormatError on any malformation."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER_SIZE:
        raise DataFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    if raw[: len(NOISE_MAGIC)] != NOISE_MAGIC:
        raise DataFormatError(f"{path}: bad magic {raw[:len(NOISE_MAGIC)]!r}")
    m, p = (int(v) for v in np.frombuffer(raw, dtype="<u8", count=2, offset=len(NOISE_MAGIC)))
    body_end = _HEADER_SIZE + m * p * 8
    if len(raw) < body_end:
        raise DataFormatError(
            f"{path}: declared {m}x{p} matrix but file holds only {len(raw) - _HEADER_SIZE} data bytes"
        )
    data = np.frombuffer(raw, dtype="<f8", count=m * p, offset=_HEADER_SIZE).reshape(m, p)
    trailer = raw[body_end:]
    meta = NoiseMeta()
    if trailer:
        try:
            fields = json.loads(trailer.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DataFormatError(f"{path}: bad metadata trailer: {exc}") from exc
        if not isinstance(fields, dict):
            raise DataFormatError(f"{path}: metadata trailer must be a JSON object")
        known = {k: fields.get(k) for k in ("iteration", "batch_size", "seed")}
        meta = NoiseMeta(**known)
    try:
        return NoiseMatrix(data.copy(), meta)
    except GradNoiseError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def write_reports_csv(
    path: Union[str, Path],
    rows: Sequence[tuple[Union[int, float], ProjectionReport]],
    x_name: str = "iteration",
) -> None:
    """Write one CSV row per (x, report) pair.

    The x column is named by ``x_name`` (training iteration or stability
    index, depending on the producing command).  Floats are written in
    shortest round-trip form and lines end with a bare newline, so equal
    reports always produce byte-identical files.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow((x_name,) + REPORT_COLUMNS)
        for x, report in rows:
            writer.writerow(
                (
                    repr(float(x)) if isinstance(x, float) else int(x),
                    repr(report.sw_mean_p),
                    repr(report.ad_accept_frac),
                    repr(report.baseline_sw_mean_p),
                    repr(report.baseline_ad_accept_frac),
                    report.n_degenerate,
                )
            )


def write_reports_json(
    path: Union[str, Path],
    rows: Sequence[tuple[Union[int, float], ProjectionReport]],
    x_name: str = "iteration",
) -> None:
    """Write the full report objects (all fields) as a JSON array."""
    payload = []
    for x, report in rows:
        entry = report.to_dict()
        entry[x_name] = float(x) if isinstance(x, float) else int(x)
        payload.append(entry)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_numeric_lines(path: Union[str, Path]) -> np.ndarray:
    """Load a whitespace-tolerant one-number-per-line text file.

    Blank lines are skipped; anything unparseable raises DataFormatError.
    """
    values = []
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: not a number: {text!r}") from exc
    if not values:
        raise DataFormatError(f"{path}: no numeric values found")
    return np.asarray(values, dtype=np.float64)
