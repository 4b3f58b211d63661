"""
Artifact file handling: deterministic CSV/JSON emission and potential import.

Numbers are written with 17 significant digits and a '.' separator so that
the same scenario always produces byte-identical files. Files are written to
a temporary sibling first and renamed into place.
"""

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import orjson

from src.core.errors import ConfigurationError, DomainError
from src.core.logging import get_logger
from src.spectral.birman_schwinger import SampledPotential


logger = get_logger("runner")

POTENTIAL_HEADER = ("x", "re_v", "im_v")

PathLike = Union[str, Path]


def format_number(value: Any) -> str:
    """Locale-free text for one CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def _json_default(obj: Any):
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def atomic_write(path: PathLike, data: bytes) -> Path:
    """
    Write bytes to path through a temporary file and os.replace.

    Args:
        path: Destination
        data: File contents

    Returns:
        The destination path
    """
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)

    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

    logger.debug("artifact written", extra={"path": str(path), "size": len(data)})
    return path


class ArtifactWriter:
    """
    Renders tables and documents to the deterministic artifact formats.

    Features:
    - 17 significant digit CSV with '\\n' line endings
    - Sorted-key, indented JSON via orjson
    - Atomic file replacement
    """

    def render_csv(self, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """
        Render a table as CSV text.

        Args:
            header: Column names
            rows: Row values, one entry per column

        Returns:
            CSV text including the header line
        """
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise DomainError("render_csv", "row length does not match header",
                                  expected=len(header), got=len(row))
            writer.writerow([format_number(v) for v in row])
        return buffer.getvalue()

    def render_json(self, payload: Dict[str, Any]) -> bytes:
        """Render a document as sorted, indented JSON with a trailing newline."""
        return orjson.dumps(
            payload,
            default=_json_default,
            option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2
            | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_APPEND_NEWLINE,
        )

    def write_csv(self, path: PathLike, header: Sequence[str],
                  rows: Iterable[Sequence[Any]]) -> Path:
        return atomic_write(path, self.render_csv(header, rows).encode("utf-8"))

    def write_json(self, path: PathLike, payload: Dict[str, Any]) -> Path:
        return atomic_write(path, self.render_json(payload))


def companion_path(path: PathLike, suffix: str) -> Path:
    """``fig1.csv`` with suffix ``_line`` becomes ``fig1_line.csv``."""
    path = Path(path)
    return path.with_name(f"{path.stem}{suffix}{path.suffix}")


def read_potential_csv(path: PathLike) -> SampledPotential:
    """
    Read a sampled potential with columns ``x,re_v,im_v``.

    Args:
        path: CSV file

    Returns:
        SampledPotential with trapezoid weights from the node spacing
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Potential file not found: {path}", {"path": str(path)})

    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != POTENTIAL_HEADER:
            raise DomainError("read_potential_csv", "header must be x,re_v,im_v",
                              path=str(path), header=header)
        rows: List[List[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise DomainError("read_potential_csv", f"non-numeric value on line {lineno}",
                                  path=str(path))
            if len(rows[-1]) != 3:
                raise DomainError("read_potential_csv", f"expected 3 columns on line {lineno}",
                                  path=str(path))

    data = np.array(rows, dtype=float).reshape(-1, 3)
    logger.info("potential imported", extra={"path": str(path), "nodes": len(data)})
    return SampledPotential.trapezoid(data[:, 0], data[:, 1] + 1j * data[:, 2])


def write_potential_csv(path: PathLike, samples: SampledPotential,
                        writer: Optional[ArtifactWriter] = None) -> Path:
    """Export a SampledPotential as ``x,re_v,im_v``."""
    writer = writer or ArtifactWriter()
    rows = zip(samples.nodes, samples.values.real, samples.values.imag)
    return writer.write_csv(path, POTENTIAL_HEADER, rows)
