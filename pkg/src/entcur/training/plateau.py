"""Plateau detection for stage transitions and early stopping.

An epoch improves when the relative drop from the best loss seen so far
exceeds ``min_relative_improvement``; the detector triggers once
``patience`` consecutive epochs fail to improve.  The best loss tracks
the minimum observed value even when a drop is too small to count as
improvement.
"""

from __future__ import annotations


class PlateauDetector:
    def __init__(self, patience: int, min_relative_improvement: float):
        if patience < 1:
            raise ValueError("patience must be at least 1")
        if min_relative_improvement <= 0:
            raise ValueError("min_relative_improvement must be positive")
        self.patience = patience
        self.min_relative_improvement = min_relative_improvement
        self.best_loss: float | None = None
        self.epochs_since_improvement = 0

    def update(self, val_loss: float) -> bool:
        """Feed one epoch's validation loss; True means transition now."""
        if not (val_loss == val_loss) or val_loss in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite validation loss {val_loss}")
        if self.best_loss is None:
            self.best_loss = val_loss
            self.epochs_since_improvement = 0
            return False
        relative_drop = (self.best_loss - val_loss) / max(abs(self.best_loss), 1e-12)
        if relative_drop > self.min_relative_improvement:
            self.epochs_since_improvement = 0
        else:
            self.epochs_since_improvement += 1
        self.best_loss = min(self.best_loss, val_loss)
        return self.epochs_since_improvement >= self.patience
