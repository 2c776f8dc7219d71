"""String-breaking-time detection from a time series of observable frames.

The detector finds the first time tau at which the widened interior wall
count D_in + lambda * Delta_in reaches the widened boundary count
D_bd - lambda * Delta_bd. The crossing is localized by linear interpolation
between the bracketing samples; an exact tangency (gap below 1e-9 without a
sign change) also counts. Strictly the FIRST such time is reported even if
the curves later separate and re-cross.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

CROSSING = "crossing-detected"
NO_CROSSING = "none-in-window"

_TANGENCY = 1e-9


@dataclass(frozen=True)
class SbtResult:
    tau: float | None
    kind: str
    band_margin: float  # min over samples before tau of (D_bd^- - D_in^+)

    @property
    def detected(self) -> bool:
        return self.kind == CROSSING


def detect_sbt(frames, lam: float) -> SbtResult:
    """Scan time-ordered frames for the first widened-band crossing."""
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    if len(frames) == 0:
        raise DomainError("empty frame series")
    ts = np.array([f.t for f in frames])
    if len(ts) > 2:
        steps = np.diff(ts)
        if np.any(steps <= 0) or np.max(steps) - np.min(steps) > 1e-6 * np.max(steps):
            raise DomainError("frames must be uniformly sampled in time")
    gap = np.array([(f.D_bd - lam * f.Delta_bd) - (f.D_in + lam * f.Delta_in)
                    for f in frames])
    if gap[0] <= 0:
        raise DomainError(f"degenerate start: D_in^+(0) >= D_bd^-(0) (gap = {gap[0]!r})")
    for k in range(1, len(gap)):
        if gap[k] <= 0:
            tau = ts[k - 1] + (ts[k] - ts[k - 1]) * gap[k - 1] / (gap[k - 1] - gap[k])
            return SbtResult(float(tau), CROSSING, float(np.min(gap[:k])))
        if gap[k] < _TANGENCY:
            return SbtResult(float(ts[k]), CROSSING, float(np.min(gap[:k])))
    return SbtResult(None, NO_CROSSING, float(np.min(gap)))
