"""Step-by-step view of one experiment."""

import numpy as np
import pandas as pd
from scipy import stats

from ..core.domain import TrialLog


def trajectory_frame(log: TrialLog, confidence: float = 0.95) -> pd.DataFrame:
    """Running sample means, normal confidence intervals and arm-1 probability.

    Columns: ``t, arm, reward, pi1, n1, n2, mean1, mean2, ci1_low, ci1_high,
    ci2_low, ci2_high``. Intervals are clipped to [0, 1]. Means and intervals are NaN
    until an arm is pulled.
    """
    arms, rewards, pi1 = log.as_arrays()
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    frame = pd.DataFrame(
        {
            "t": np.arange(1, len(arms) + 1),
            "arm": arms.astype(np.int64),
            "reward": rewards.astype(np.int64),
            "pi1": pi1,
        }
    )
    for k in (1, 2):
        on_arm = arms == k
        pulls = np.cumsum(on_arm)
        wins = np.cumsum(np.where(on_arm, rewards, 0))
        with np.errstate(divide="ignore", invalid="ignore"):
            mean = np.where(pulls > 0, wins / pulls, np.nan)
            half_width = z * np.sqrt(mean * (1.0 - mean) / pulls)
        frame[f"n{k}"] = pulls
        frame[f"mean{k}"] = mean
        frame[f"ci{k}_low"] = np.clip(mean - half_width, 0.0, 1.0)
        frame[f"ci{k}_high"] = np.clip(mean + half_width, 0.0, 1.0)
    return frame[
        ["t", "arm", "reward", "pi1", "n1", "n2", "mean1", "mean2",
         "ci1_low", "ci1_high", "ci2_low", "ci2_high"]
    ]
