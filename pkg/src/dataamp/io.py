"""Sample files, provenance headers and deterministic CSV emission."""
from __future__ import annotations

import csv
import hashlib
import io
from pathlib import Path

import numpy as np

from . import __version__
from .histogram import EmptyInputError, Sample

__all__ = ["ParseError", "config_hash", "format_sample", "ingest_sample", "parse_sample_text",
           "provenance_header", "rows_to_csv", "write_text"]


class ParseError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def parse_sample_text(text: str, source: str = "<string>") -> Sample:
    """One finite number per line; ``#`` lines and blank lines are skipped.

    A single non-numeric first data line is taken as a CSV header.
    """
    values = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        field = line.split(",")[0].strip()
        try:
            v = float(field)
        except ValueError:
            if not values and not header_seen and not _looks_numeric(field):
                header_seen = True
                continue
            raise ParseError(f"{source}: not a number: {line!r}", lineno) from None
        if not np.isfinite(v):
            raise ParseError(f"{source}: non-finite value {line!r}", lineno)
        values.append(v)
    if not values:
        raise EmptyInputError(f"{source}: no data values")
    return Sample(np.array(values), provenance="ingested")


def _looks_numeric(s: str) -> bool:
    return any(ch.isdigit() for ch in s)


def ingest_sample(path) -> Sample:
    path = Path(path)
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 text") from exc
    return parse_sample_text(text, str(path))


def format_sample(values) -> str:
    """Round-trippable text, one value per line, LF endings."""
    return "".join(f"{float(v)!r}\n" for v in np.asarray(values, dtype=float))


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def provenance_header(cfg_hash: str, seed) -> str:
    return f"# dataamp {__version__} config={cfg_hash} seed={seed}\n"


def rows_to_csv(header, rows, preamble: str = "") -> str:
    buf = io.StringIO()
    buf.write(preamble)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
