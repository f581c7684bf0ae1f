#!/usr/bin/env python3
"""Generate data/hurdat2_sample.txt, the shipped HURDAT2-format sample.

Real best-track archives are large and change over time, so the repository
ships a small synthetic file in the exact HURDAT2 layout: recurving
Atlantic-style tracks at six-hour cadence, with storm-to-storm variation in
start position, recurvature timing and forward speed.  Regenerate with

    python3 scripts/make_hurdat2_sample.py
"""

from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

NAMES = [
    "ANA", "BRET", "CLAUDETTE", "DANNY", "ERIKA",
    "FRED", "GRACE", "HENRI", "IDA", "JULIAN",
]


def make_track(rng, n_fixes):
    """Recurving track: west-northwest, then north, then northeast.

    Storms follow a common corridor with mild spatial jitter; most of the
    storm-to-storm variation is in the forward-speed profile (slow drift,
    stalls, acceleration after recurvature), i.e. in observation timing.
    """
    # corridor geometry in arc parameter s, lightly perturbed per storm
    lat0 = 13.5 + rng.uniform(-1.2, 1.2)
    lon0 = -46.0 + rng.uniform(-2.5, 2.5)
    turn_center = 0.48 + rng.uniform(-0.04, 0.04)
    turn_width = 0.24 + rng.uniform(-0.03, 0.03)
    dense = 600
    s = np.linspace(0.0, 1.0, dense)
    ramp = np.clip((s - turn_center + turn_width) / (2 * turn_width), 0, 1)
    ramp = ramp * ramp * (3 - 2 * ramp)
    heading = np.deg2rad(285.0 - 245.0 * ramp)
    lat_path = np.empty(dense)
    lon_path = np.empty(dense)
    lat_path[0], lon_path[0] = lat0, lon0
    step = 28.0 / dense  # total arc extent in degrees
    for k in range(1, dense):
        lat_path[k] = lat_path[k - 1] + step * np.sin(heading[k])
        lon_path[k] = lon_path[k - 1] + step * np.cos(heading[k]) / max(
            np.cos(np.deg2rad(lat_path[k - 1])), 0.3
        )
    # forward-speed profile: slow early drift, a possible stall, fast exit
    stall_center = rng.uniform(0.2, 0.7)
    stall_depth = rng.uniform(0.5, 0.92)
    u = np.linspace(0.0, 1.0, n_fixes)
    speed = 0.45 + 1.4 * u**rng.uniform(0.5, 2.6)
    speed *= 1.0 - stall_depth * np.exp(-(((u - stall_center) / 0.12) ** 2))
    arc = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]))])
    arc /= arc[-1]
    lats = np.interp(arc, s, lat_path) + rng.normal(0.0, 0.05, n_fixes)
    lons = np.interp(arc, s, lon_path) + rng.normal(0.0, 0.05, n_fixes)
    return lats.tolist(), lons.tolist()


def intensity(u):
    """Plausible wind (kt) / pressure (mb) along the normalized lifetime."""
    wind = 35 + 70 * np.sin(np.pi * min(u * 1.25, 1.0)) ** 2
    return int(round(wind / 5) * 5), int(1010 - 0.85 * (wind - 30))


def main():
    rng = np.random.default_rng(20110828)
    lines = []
    start_day = datetime(2011, 6, 5)
    for i, name in enumerate(NAMES):
        n_fixes = int(rng.integers(22, 42))
        lats, lons = make_track(rng, n_fixes)
        lines.append(f"AL{i + 1:02d}2011,{name:>19s},{n_fixes:7d},")
        t0 = start_day + timedelta(days=int(rng.integers(0, 8)))
        start_day = t0 + timedelta(days=int(rng.integers(4, 9)))
        for k in range(n_fixes):
            u = k / (n_fixes - 1)
            stamp = t0 + timedelta(hours=6 * k)
            wind, pres = intensity(u)
            status = "HU" if wind >= 64 else ("TS" if wind >= 34 else "TD")
            lat_s = f"{abs(lats[k]):.1f}{'N' if lats[k] >= 0 else 'S'}"
            lon_s = f"{abs(lons[k]):.1f}{'W' if lons[k] <= 0 else 'E'}"
            radii = ",".join(["%5d" % -999] * 12)
            lines.append(
                f"{stamp:%Y%m%d}, {stamp:%H%M},  , {status}, {lat_s:>6s}, "
                f"{lon_s:>7s}, {wind:3d}, {pres:4d},{radii},"
            )
    out = Path(__file__).resolve().parent.parent / "data" / "hurdat2_sample.txt"
    out.parent.mkdir(exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(NAMES)} storms, {len(lines)} lines)")


if __name__ == "__main__":
    main()
