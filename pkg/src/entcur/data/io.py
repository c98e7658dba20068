"""Dataset file format.

Self-describing text, one record per sample::

    entcur-dataset v1
    split=train scenes=10 devices=9 bins=64 seen=0,1,2,3,4,5 unseen=6,7,8
    <id> <scene> <device> <bin_0> ... <bin_{F-1}>

Floats are written with ``repr`` precision, so save -> load round-trips
value-exactly and identical datasets serialize byte-identically.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .types import Dataset, Sample

MAGIC = "entcur-dataset"
VERSION = "v1"


class DatasetFormatError(ValueError):
    """Malformed dataset file; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    dataset.validate()
    seen = ",".join(str(d) for d in dataset.seen_devices)
    unseen = ",".join(str(d) for d in dataset.unseen_devices)
    lines = [
        f"{MAGIC} {VERSION}",
        f"split={dataset.split} scenes={dataset.n_scenes} devices={dataset.n_devices} "
        f"bins={dataset.n_bins} seen={seen} unseen={unseen}",
    ]
    for s in dataset.samples:
        values = " ".join(repr(float(v)) for v in s.features)
        lines.append(f"{s.id} {s.scene} {s.device} {values}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_device_list(text: str, line: int) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise DatasetFormatError(f"bad device list {text!r}", line) from exc


def load_dataset(path: str | Path) -> Dataset:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise DatasetFormatError("empty file", 1)
    header = lines[0].split()
    if header != [MAGIC, VERSION]:
        raise DatasetFormatError(f"expected '{MAGIC} {VERSION}' header, got {lines[0]!r}", 1)
    if len(lines) < 2:
        raise DatasetFormatError("missing metadata line", 2)

    meta: dict[str, str] = {}
    for token in lines[1].split():
        if "=" not in token:
            raise DatasetFormatError(f"bad metadata token {token!r}", 2)
        key, value = token.split("=", 1)
        meta[key] = value
    required = ("split", "scenes", "devices", "bins", "seen", "unseen")
    for key in required:
        if key not in meta:
            raise DatasetFormatError(f"metadata missing {key!r}", 2)
    try:
        n_scenes = int(meta["scenes"])
        n_devices = int(meta["devices"])
        n_bins = int(meta["bins"])
    except ValueError as exc:
        raise DatasetFormatError(f"non-integer metadata: {exc}", 2) from exc
    seen = _parse_device_list(meta["seen"], 2)
    unseen = _parse_device_list(meta["unseen"], 2)

    samples: list[Sample] = []
    for line_no, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 3 + n_bins:
            raise DatasetFormatError(
                f"expected {3 + n_bins} fields, got {len(fields)}", line_no
            )
        try:
            sample_id, scene, device = int(fields[0]), int(fields[1]), int(fields[2])
            features = np.array([float(v) for v in fields[3:]], dtype=np.float64)
        except ValueError as exc:
            raise DatasetFormatError(f"bad record: {exc}", line_no) from exc
        samples.append(Sample(id=sample_id, features=features, scene=scene, device=device))

    dataset = Dataset(
        samples=samples,
        n_scenes=n_scenes,
        n_devices=n_devices,
        seen_devices=seen,
        unseen_devices=unseen,
        split=meta["split"],
    )
    dataset.validate()
    return dataset
