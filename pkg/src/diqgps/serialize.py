"""Transcript CSV and verdict JSON.

Transcript columns, in order: index, x, y, r, s, t_emit, t_detect_R,
t_detect_S, carrier.  Times are seconds with 12 significant digits; the
carrier column is 0/1 and doubles as the reveal-phase disclosure.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .codec import TimestampCodec
from .errors import DataError
from .protocol import COLUMNS, SessionTranscript

TIME_COLUMNS = ("t_emit", "t_detect_R", "t_detect_S")


def atomic_write_text(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def transcript_to_csv(transcript):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    c = transcript.columns
    ints = {k: c[k].tolist() for k in ("index", "x", "y", "r", "s")}
    times = {k: [format(t, ".12g") for t in c[k].tolist()] for k in TIME_COLUMNS}
    carrier = c["carrier"].astype(np.int8).tolist()
    for i in range(len(transcript)):
        w.writerow([ints["index"][i], ints["x"][i], ints["y"][i], ints["r"][i], ints["s"][i],
                    times["t_emit"][i], times["t_detect_R"][i], times["t_detect_S"][i], carrier[i]])
    return buf.getvalue()


def write_transcript_csv(transcript, path):
    atomic_write_text(path, transcript_to_csv(transcript))


def read_transcript_csv(path, width_bits=32, quantum=1e-9, phase_tag="rest", scenario_id=""):
    """Load a transcript; the carrier column becomes the revealed codec."""
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read transcript {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != COLUMNS:
            raise DataError(f"{path}: header must be {','.join(COLUMNS)}")
        rows = list(reader)
    try:
        data = np.array(rows, dtype=object).reshape(-1, len(COLUMNS)) if rows else \
            np.empty((0, len(COLUMNS)), dtype=object)
        cols = {k: data[:, j].astype(float if k in TIME_COLUMNS else np.int64)
                for j, k in enumerate(COLUMNS)}
    except ValueError as exc:
        raise DataError(f"{path}: malformed row: {exc}") from None
    cols["carrier"] = cols["carrier"].astype(bool)
    codec = TimestampCodec(width_bits, quantum, tuple(cols["index"][cols["carrier"]].tolist()))
    return SessionTranscript(cols, revealed_carriers=codec, phase_tag=phase_tag,
                             scenario_id=scenario_id)


def verdict_to_json(report):
    # json uses repr() for floats, which round-trips exactly.
    return json.dumps(report.to_dict(), indent=2) + "\n"


def write_verdict_json(report, path):
    atomic_write_text(path, verdict_to_json(report))
