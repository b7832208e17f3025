"""Output files, run manifests and seed splitting for the command-line tools."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

OUT_ENV = "OAMHASH_OUT"


def component_seed(seed: int, label: str) -> int:
    """Stable 64-bit sub-seed for one named component of a run."""
    digest = hashlib.sha256(f"{int(seed)}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def output_dir(arg: str | None) -> Path:
    path = Path(arg or os.environ.get(OUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def write_json(path: Path, obj) -> Path:
    path.write_text(dumps(obj))
    return path


def write_csv(path: Path, rows, columns) -> Path:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({c: _fmt(row.get(c, "")) for c in columns})
    path.write_text(buf.getvalue())
    return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_raster(stem: Path, data: np.ndarray, extent, units: str, fmt: str = "bin") -> list[Path]:
    """Float grid as raw little-endian float64 or CSV, plus a JSON header."""
    data = np.asarray(data, dtype="<f8")
    header = {
        "height": int(data.shape[0]),
        "width": int(data.shape[1]),
        "extent": [float(e) for e in extent],
        "units": units,
        "dtype": "float64-le",
        "order": "row-major, first row at min y",
        "format": fmt,
    }
    if fmt == "bin":
        data_path = stem.with_suffix(".bin")
        data_path.write_bytes(data.tobytes(order="C"))
    elif fmt == "csv":
        data_path = stem.with_suffix(".csv")
        buf = io.StringIO()
        np.savetxt(buf, data, delimiter=",", fmt="%.17g")
        data_path.write_text(buf.getvalue())
    else:
        raise ValueError(f"unknown raster format {fmt!r}")
    header_path = stem.with_suffix(".json")
    write_json(header_path, header)
    return [data_path, header_path]


def read_raster(header_path: Path) -> np.ndarray:
    header = json.loads(Path(header_path).read_text())
    shape = (header["height"], header["width"])
    if header["format"] == "bin":
        return np.frombuffer(Path(header_path).with_suffix(".bin").read_bytes(), "<f8").reshape(shape)
    return np.loadtxt(Path(header_path).with_suffix(".csv"), delimiter=",").reshape(shape)


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int
    version: str
    outputs: list[str] = field(default_factory=list)
    started: float = field(default_factory=time.time)
    duration: float = 0.0

    def finish(self, outputs) -> None:
        self.outputs = sorted(str(Path(p).name) for p in outputs)
        self.duration = time.time() - self.started

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "outputs": self.outputs,
            "started_unix": self.started,
            "wall_clock_s": self.duration,
        }

    def write(self, directory: Path) -> Path:
        return write_json(directory / f"manifest_{self.command}.json", self.to_dict())
