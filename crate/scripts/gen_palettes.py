#!/usr/bin/env python3
"""Regenerate crates/core/data/palettes.json.

ColorBrewer swatches come from the `palettable` package (which bundles the
ColorBrewer scheme table); interpolated ramps are sampled from matplotlib.
Accessibility flags are assigned per palette below.
"""
import json
import sys
from pathlib import Path

import matplotlib
import palettable

CB_JSON = Path(palettable.__file__).parent / "colorbrewer" / "data" / "colorbrewer_all_schemes.json"

SINGLE_HUE = {"Blues", "Greens", "Greys", "Oranges", "Purples", "Reds"}
# (web, colorblind, print)
FLAGS = {
    "BrBG": (True, True, True), "PiYG": (True, True, False), "PRGn": (True, True, False),
    "PuOr": (True, True, True), "RdBu": (True, True, False), "RdGy": (True, False, False),
    "RdYlBu": (True, True, True), "RdYlGn": (True, False, False), "Spectral": (True, False, True),
    "Accent": (True, False, False), "Dark2": (True, False, True), "Paired": (True, False, True),
    "Pastel1": (True, False, False), "Pastel2": (True, False, False), "Set1": (True, False, True),
    "Set2": (True, False, True), "Set3": (True, False, False),
}


def hexify(rgb):
    return "#%02x%02x%02x" % tuple(int(c) for c in rgb)


def main(out):
    data = json.loads(CB_JSON.read_text())
    palettes = []
    for group, scale in (("Sequential", None), ("Diverging", "diverging"), ("Qualitative", "categorical")):
        for name, sizes in data[group].items():
            st = scale or ("sequential_single_hue" if name in SINGLE_HUE else "sequential_multi_hue")
            web, cb, pr = FLAGS.get(name, (True, True, True))
            palettes.append({
                "name": name,
                "scaleType": st,
                "flags": {"webFriendly": web, "colorblindFriendly": cb, "printFriendly": pr},
                "colors": {k: [hexify(c) for c in v["Colors"]] for k, v in sorted(sizes.items(), key=lambda kv: int(kv[0]))},
            })
    tab10 = [matplotlib.colors.to_hex(c) for c in matplotlib.colormaps["tab10"].colors]
    palettes.append({
        "name": "Tableau10",
        "scaleType": "categorical",
        "flags": {"webFriendly": True, "colorblindFriendly": False, "printFriendly": True},
        "colors": {str(k): tab10[:k] for k in range(2, 11)},
    })
    for name, st, flags, n in (
        ("viridis", "sequential_multi_hue", (True, True, True), 11),
        ("cividis", "sequential_multi_hue", (True, True, True), 11),
        ("magma", "sequential_multi_hue", (True, True, True), 11),
        ("inferno", "sequential_multi_hue", (True, True, True), 11),
        ("plasma", "sequential_multi_hue", (True, True, True), 11),
        ("twilight", "cyclical", (True, False, False), 13),
        ("hsv", "cyclical", (True, False, False), 13),
    ):
        cmap = matplotlib.colormaps[name]
        stops = [matplotlib.colors.to_hex(cmap(i / (n - 1))) for i in range(n)]
        palettes.append({
            "name": name,
            "scaleType": st,
            "flags": {"webFriendly": flags[0], "colorblindFriendly": flags[1], "printFriendly": flags[2]},
            "interpolator": {"stops": stops},
        })
    Path(out).write_text(json.dumps(palettes, indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/palettes.json")
