"""Metrics log records: line-delimited JSON, append-only, deterministic.

One record per epoch plus a single transition event for curriculum runs.
Records carry the cumulative optimizer step count (a deterministic
"elapsed" measure) and a short RNG-state digest; wall-clock time is kept
out of the log so reruns with the same config and seed are
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass
class EpochRecord:
    run_id: str
    mode: str
    stage: str | None
    epoch: int
    steps: int
    train_loss: float
    val_loss: float
    rng_hash: str

    def to_json(self) -> str:
        doc: dict = {"run": self.run_id, "mode": self.mode}
        if self.stage is not None:
            doc["stage"] = self.stage
        doc.update(
            epoch=self.epoch,
            steps=self.steps,
            train_loss=self.train_loss,
            val_loss=self.val_loss,
            rng=self.rng_hash,
        )
        return json.dumps(doc)


@dataclass
class TransitionRecord:
    run_id: str
    epoch: int
    steps: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "run": self.run_id,
                "mode": "curriculum",
                "event": "transition",
                "epoch": self.epoch,
                "steps": self.steps,
            }
        )


def write_metrics_log(records: list[EpochRecord | TransitionRecord], path: str | Path) -> None:
    Path(path).write_text("".join(r.to_json() + "\n" for r in records))


def read_metrics_log(path: str | Path) -> list[dict]:
    lines = Path(path).read_text().splitlines()
    return [json.loads(line) for line in lines if line.strip()]
