#!/usr/bin/env python3
"""Regenerate the bundled synthetic U.S.-county sample.

Writes crates/core/data/life_expectancy.csv and
crates/core/data/us_counties_sample.geojson. Values are synthetic; four
counties carry fixed values used by the usage-scenario tests.
"""
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"
N_COUNTIES = 3142
MISSING = 7

# state FIPS -> number of counties (sums to N_COUNTIES)
STATE_CODES = [1, 2, 4, 5, 6, 8, 9, 10, 11, 12, 13, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25,
               26, 27, 28, 29, 30, 31, 32, 33, 34, 35, 36, 37, 38, 39, 40, 41, 42, 44, 45, 46,
               47, 48, 49, 50, 51, 53, 54, 55, 56]
FIXED = {
    "46102": ("Oglala Lakota County", 62.44),
    "20171": ("Scott County", 80.85),
    "37113": ("Macon County", 72.61),
    "13089": ("DeKalb County", 74.93),
}


def main():
    rng = random.Random(20231018)
    ids = []
    per_state = N_COUNTIES // len(STATE_CODES)
    extra = N_COUNTIES - per_state * len(STATE_CODES)
    for i, st in enumerate(STATE_CODES):
        n = per_state + (1 if i < extra else 0)
        for c in range(n):
            ids.append(f"{st:02d}{2 * c + 1:03d}")
    # make sure the fixed counties exist, replacing generated ids
    taken = set(ids)
    for fid in FIXED:
        if fid not in taken:
            st = fid[:2]
            victim = next(x for x in reversed(ids) if x.startswith(st) and x not in FIXED)
            ids[ids.index(victim)] = fid
    assert len(set(ids)) == N_COUNTIES

    rows = []
    missing = set(rng.sample([x for x in ids if x not in FIXED], MISSING))
    for fid in ids:
        if fid in FIXED:
            name, le = FIXED[fid]
        else:
            name = f"County {fid}"
            u = rng.random()
            if u < 0.03:
                le = rng.uniform(63.0, 71.0)
            elif u < 0.995:
                le = rng.gauss(77.3, 2.2)
            else:
                le = rng.uniform(84.0, 86.83)
            le = round(min(max(le, 62.9), 86.83), 2)
        pop = int(1000 * rng.paretovariate(1.1))
        rows.append((fid, name, "NA" if fid in missing else f"{le:.2f}", pop))
    with open(OUT / "life_expectancy.csv", "w", newline="") as f:
        f.write("fips,name,life_expectancy,population\n")
        for fid, name, le, pop in rows:
            f.write(f"{fid},{name},{le},{pop}\n")

    names = dict(rows_by_id(rows))
    cols = 62
    features = []
    for i, fid in enumerate(ids):
        r, c = divmod(i, cols)
        x0, y0 = -124.0 + c * 0.9, 49.0 - r * 0.48
        ring = [[round(x0, 4), round(y0, 4)], [round(x0, 4), round(y0 - 0.48, 4)],
                [round(x0 + 0.9, 4), round(y0 - 0.48, 4)], [round(x0 + 0.9, 4), round(y0, 4)],
                [round(x0, 4), round(y0, 4)]]
        features.append({
            "type": "Feature",
            "properties": {"GEOID": fid, "NAME": names[fid]},
            "geometry": {"type": "Polygon", "coordinates": [ring]},
        })
    fc = {"type": "FeatureCollection", "features": features}
    (OUT / "us_counties_sample.geojson").write_text(json.dumps(fc, separators=(",", ":")) + "\n")


def rows_by_id(rows):
    return ((r[0], r[1]) for r in rows)


if __name__ == "__main__":
    main()
