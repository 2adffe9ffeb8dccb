"""Shared fixtures: synthetic rainfall series with controlled daily-pair copulas."""

import numpy as np
import pytest

from tailtest import CopulaModel, RngStream, sample
from tailtest.ingest import SLOTS_PER_DAY, RainSeries, season_of_month


def _season_days(season: str, n_days: int, start_year: int = 2006) -> np.ndarray:
    """First n_days calendar days of the given meteorological season from
    start_year onward."""
    day = np.datetime64(f"{start_year}-01-01")
    picked = []
    while len(picked) < n_days:
        month = int(str(day.astype("datetime64[M]")).split("-")[1])
        if season_of_month(month) == season:
            picked.append(day)
        day += np.timedelta64(1, "D")
    return np.array(picked, dtype="datetime64[D]")


def make_rain_series(season_models: dict[str, tuple[int, CopulaModel]],
                     seed: int = 0) -> RainSeries:
    """Synthetic 6-minute series whose daily (6-min max, hourly max) pairs
    follow a prescribed copula per season.

    Each wet day puts depth 1+u in the first slot of hour 0 and spreads
    2+7v uniformly over hour 1, with (u, v) drawn from the season's copula.
    Then the daily 6-minute maximum is exactly 1+u and the daily hourly
    maximum exactly 2+7v, so the pair copula is the model's.
    """
    all_ts, all_depths = [], []
    for ix, (season, (n_days, model)) in enumerate(sorted(season_models.items())):
        days = _season_days(season, n_days)
        uv = sample(model, n_days, RngStream(seed, (ix,))).data
        depths = np.zeros((n_days, SLOTS_PER_DAY))
        depths[:, 0] = 1.0 + uv[:, 0]
        depths[:, 10:20] = ((2.0 + 7.0 * uv[:, 1]) / 10.0)[:, None]
        slot_offsets = (np.arange(SLOTS_PER_DAY) * 6).astype("timedelta64[m]")
        ts = (days.astype("datetime64[m]")[:, None] + slot_offsets[None, :]).ravel()
        all_ts.append(ts)
        all_depths.append(depths.ravel())
    ts = np.concatenate(all_ts)
    depths = np.concatenate(all_depths)
    order = np.argsort(ts, kind="stable")
    ts, depths = ts[order], depths[order]
    return RainSeries(ts, depths, np.zeros(ts.size, dtype=bool), station_id="synthetic")


@pytest.fixture
def two_season_series():
    return make_rain_series({
        "DJF": (700, CopulaModel("outer_power_clayton", 0.3)),
        "MAM": (700, CopulaModel("outer_power_clayton", 0.7)),
    }, seed=101)
