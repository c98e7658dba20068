"""Median split of entropy scores into curriculum subsets.

Samples rank by entropy descending (ties broken by ascending id); the
first ``floor(N/2)`` become the domain-invariant subset, the rest the
domain-specific subset.  Only ranks matter, so any strictly increasing
transform of the scores yields the identical partition.

File format::

    entcur-partition v1
    n=330 devices=6 threshold_rank=165
    <id> <entropy> <inv|spec>

Records appear in rank order (invariant block first).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .scoring import EntropyScore

MAGIC = "entcur-partition"
VERSION = "v1"


@dataclass
class CurriculumPartition:
    invariant_ids: list[int]
    specific_ids: list[int]
    scores: list[EntropyScore] = field(repr=False)
    threshold_rank: int
    n_devices: int

    @property
    def n(self) -> int:
        return len(self.invariant_ids) + len(self.specific_ids)

    def all_ids(self) -> set[int]:
        return set(self.invariant_ids) | set(self.specific_ids)

    def score_by_id(self) -> dict[int, float]:
        return {s.sample_id: s.value for s in self.scores}


def build_partition(scores: list[EntropyScore], n_devices: int = 0) -> CurriculumPartition:
    """Split scored samples at the entropy median (high-entropy half first)."""
    n = len(scores)
    if n < 2:
        raise ValueError(f"need at least 2 scored samples, got {n}")
    ids = [s.sample_id for s in scores]
    if len(set(ids)) != n:
        raise ValueError("duplicate sample ids in score list")
    ranked = sorted(scores, key=lambda s: (-s.value, s.sample_id))
    threshold = n // 2
    return CurriculumPartition(
        invariant_ids=[s.sample_id for s in ranked[:threshold]],
        specific_ids=[s.sample_id for s in ranked[threshold:]],
        scores=ranked,
        threshold_rank=threshold,
        n_devices=n_devices,
    )


def save_partition(partition: CurriculumPartition, path: str | Path) -> None:
    inv = set(partition.invariant_ids)
    lines = [
        f"{MAGIC} {VERSION}",
        f"n={partition.n} devices={partition.n_devices} threshold_rank={partition.threshold_rank}",
    ]
    for score in partition.scores:
        tag = "inv" if score.sample_id in inv else "spec"
        lines.append(f"{score.sample_id} {repr(score.value)} {tag}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_partition(path: str | Path) -> CurriculumPartition:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].split() != [MAGIC, VERSION]:
        raise ValueError(f"{path}: not an '{MAGIC} {VERSION}' file")
    if len(lines) < 2:
        raise ValueError(f"{path}: missing metadata line")
    meta = dict(tok.split("=", 1) for tok in lines[1].split())
    try:
        n = int(meta["n"])
        n_devices = int(meta["devices"])
        threshold = int(meta["threshold_rank"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: bad metadata line: {exc}") from exc

    invariant_ids: list[int] = []
    specific_ids: list[int] = []
    scores: list[EntropyScore] = []
    for line_no, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 3 or fields[2] not in ("inv", "spec"):
            raise ValueError(f"{path}: line {line_no}: bad record {line!r}")
        sample_id, value, tag = int(fields[0]), float(fields[1]), fields[2]
        scores.append(EntropyScore(sample_id=sample_id, value=value))
        (invariant_ids if tag == "inv" else specific_ids).append(sample_id)
    if len(scores) != n:
        raise ValueError(f"{path}: header says n={n} but found {len(scores)} records")
    if len(invariant_ids) != threshold:
        raise ValueError(
            f"{path}: header says threshold_rank={threshold} but found "
            f"{len(invariant_ids)} invariant records"
        )
    return CurriculumPartition(
        invariant_ids=invariant_ids,
        specific_ids=specific_ids,
        scores=scores,
        threshold_rank=threshold,
        n_devices=n_devices,
    )
