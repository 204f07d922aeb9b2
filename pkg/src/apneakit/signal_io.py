"""Record, annotation, and binary tensor I/O.

File formats:
  <subject>.ppg.csv    header ``t_s,ppg``, one sample per row
  <subject>.meta.json  ``{"subject_id": str, "fs_hz": number, "ahi": number|null}``
  <subject>.events.csv header ``event_type,start_s,duration_s``
  *.apsn               binary tensor: magic "APSN", version byte, dtype byte
                       (1 = float32), rank byte, rank x uint64-LE dims,
                       row-major float32-LE payload
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError

TENSOR_MAGIC = b"APSN"
TENSOR_VERSION = 1
TENSOR_DTYPE_F32 = 1
_MAX_RANK = 4


class EventKind(Enum):
    APNEA = "apnea"
    HYPOPNEA = "hypopnea"


@dataclass(frozen=True)
class ApneaEvent:
    """One scored respiratory event."""

    kind: EventKind
    start_s: float
    duration_s: float

    def __post_init__(self):
        if self.start_s < 0:
            raise DataError(f"event start {self.start_s} < 0")
        if self.duration_s <= 0:
            raise DataError(f"event duration {self.duration_s} must be positive")

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s


@dataclass(frozen=True)
class PpgRecord:
    """One subject's raw PPG trace. ``fs`` (Hz) from the metadata sidecar is
    authoritative; CSV timestamps are advisory."""

    subject_id: str
    fs: float
    samples: np.ndarray = field(repr=False)
    ahi_reference: float | None = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if self.fs <= 0:
            raise DataError(f"sampling rate {self.fs} must be positive")
        if samples.ndim != 1 or samples.size < 1:
            raise DataError("samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            bad = int(np.flatnonzero(~np.isfinite(samples))[0])
            raise DataError(f"non-finite sample at index {bad}")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.fs


def _sidecar_path(ppg_path: Path) -> Path:
    name = ppg_path.name
    if name.endswith(".ppg.csv"):
        return ppg_path.with_name(name[: -len(".ppg.csv")] + ".meta.json")
    return ppg_path.with_suffix(".meta.json")


def read_record(path: str | Path) -> PpgRecord:
    """Read ``<subject>.ppg.csv`` plus its ``.meta.json`` sidecar."""
    path = Path(path)
    meta_path = _sidecar_path(path)
    if not meta_path.exists():
        raise FormatError(f"missing metadata sidecar {meta_path}")
    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"bad metadata JSON in {meta_path}: {e}") from e
    for key in ("subject_id", "fs_hz"):
        if key not in meta:
            raise FormatError(f"metadata {meta_path} missing '{key}'")

    times = []
    values = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t_s", "ppg"]:
            raise FormatError(f"{path}: expected header 't_s,ppg', got {header}")
        for row_idx, row in enumerate(reader, start=1):
            if len(row) != 2:
                raise FormatError(f"{path}: row {row_idx} has {len(row)} fields")
            try:
                t = float(row[0])
                v = float(row[1])
            except ValueError as e:
                raise DataError(f"{path}: row {row_idx} not numeric: {row}") from e
            if not np.isfinite(v):
                raise DataError(f"{path}: non-finite ppg value at row {row_idx}")
            times.append(t)
            values.append(v)

    if not values:
        raise DataError(f"{path}: empty record body")
    times_arr = np.asarray(times)
    if np.any(np.diff(times_arr) <= 0):
        bad = int(np.flatnonzero(np.diff(times_arr) <= 0)[0]) + 2
        raise DataError(f"{path}: non-monotonic timestamp at row {bad}")

    return PpgRecord(
        subject_id=str(meta["subject_id"]),
        fs=float(meta["fs_hz"]),
        samples=np.asarray(values),
        ahi_reference=None if meta.get("ahi") is None else float(meta["ahi"]),
    )


def write_record(record: PpgRecord, out_dir: str | Path) -> Path:
    """Write the CSV + sidecar pair; returns the ppg.csv path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ppg_path = out_dir / f"{record.subject_id}.ppg.csv"
    with open(ppg_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["t_s", "ppg"])
        for i, v in enumerate(record.samples):
            writer.writerow([repr(i / record.fs), repr(float(v))])
    meta = {
        "subject_id": record.subject_id,
        "fs_hz": record.fs,
        "ahi": record.ahi_reference,
    }
    (out_dir / f"{record.subject_id}.meta.json").write_text(json.dumps(meta))
    return ppg_path


def read_annotations(path: str | Path) -> tuple[list[ApneaEvent], int]:
    """Read ``<subject>.events.csv``. Returns (events sorted by start time,
    count of rows skipped for unknown event_type)."""
    path = Path(path)
    events = []
    skipped = 0
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        expected = ["event_type", "start_s", "duration_s"]
        if header is None or [h.strip() for h in header] != expected:
            raise FormatError(f"{path}: expected header {','.join(expected)}")
        for row_idx, row in enumerate(reader, start=1):
            if len(row) != 3:
                raise FormatError(f"{path}: row {row_idx} has {len(row)} fields")
            kind_str = row[0].strip().lower()
            try:
                kind = EventKind(kind_str)
            except ValueError:
                skipped += 1
                continue
            try:
                start = float(row[1])
                dur = float(row[2])
            except ValueError as e:
                raise DataError(f"{path}: row {row_idx} not numeric") from e
            events.append(ApneaEvent(kind=kind, start_s=start, duration_s=dur))
    events.sort(key=lambda e: e.start_s)
    return events, skipped


def write_annotations(events: list[ApneaEvent], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["event_type", "start_s", "duration_s"])
        for e in events:
            writer.writerow(
                [e.kind.value, repr(float(e.start_s)), repr(float(e.duration_s))]
            )


def write_tensor(path: str | Path, dims, values) -> None:
    """Write a float32 tensor in the APSN exchange format."""
    dims = tuple(int(d) for d in dims)
    if not 1 <= len(dims) <= _MAX_RANK:
        raise ValueError(f"rank {len(dims)} outside [1, {_MAX_RANK}]")
    if any(d < 0 for d in dims):
        raise ValueError(f"negative dimension in {dims}")
    flat = np.asarray(values, dtype="<f4").reshape(-1)
    count = int(np.prod(dims, dtype=np.int64))
    if flat.size != count:
        raise ValueError(f"{flat.size} values for dims {dims} (need {count})")
    with open(path, "wb") as f:
        f.write(TENSOR_MAGIC)
        f.write(struct.pack("<BBB", TENSOR_VERSION, TENSOR_DTYPE_F32, len(dims)))
        f.write(struct.pack(f"<{len(dims)}Q", *dims))
        f.write(flat.tobytes())


def read_tensor(path: str | Path) -> tuple[tuple[int, ...], np.ndarray]:
    """Read an APSN tensor; returns (dims, float32 array shaped dims)."""
    data = Path(path).read_bytes()
    if len(data) < 7:
        raise FormatError(f"{path}: truncated header")
    if data[:4] != TENSOR_MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}")
    version, dtype, rank = struct.unpack("<BBB", data[4:7])
    if version != TENSOR_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if dtype != TENSOR_DTYPE_F32:
        raise FormatError(f"{path}: unsupported dtype code {dtype}")
    if not 1 <= rank <= _MAX_RANK:
        raise FormatError(f"{path}: rank {rank} outside [1, {_MAX_RANK}]")
    offset = 7 + 8 * rank
    if len(data) < offset:
        raise FormatError(f"{path}: truncated dims")
    dims = struct.unpack(f"<{rank}Q", data[7:offset])
    count = 1
    for d in dims:
        count *= d
    payload = data[offset:]
    if len(payload) != count * 4:
        raise FormatError(
            f"{path}: payload {len(payload)} bytes, expected {count * 4}"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(dims)
    return dims, values.copy()
