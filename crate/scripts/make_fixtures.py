#!/usr/bin/env python3
"""Generate the synthetic classification corpus and its golden scores.

The scorer in this file is a straight-line reference: plain Python loops,
dictionary symbol counts, exact-integer luma and exact-integer area
averaging. It shares no code with the Rust crate and is the source of the
numbers frozen into `golden_scores.json`.

Usage: python3 scripts/make_fixtures.py [output-dir]
Default output dir: crates/core/tests/fixtures
"""

import json
import math
import os
import random
import sys

from PIL import Image

SIDE = 80
RADIUS = 3


# ---------------------------------------------------------------- reference


def luma(r, g, b):
    return (299 * r + 587 * g + 114 * b) // 1000


def box_resize(pixels, sw, sh, w, h):
    """Area-average downscale with round-half-up; pixels is a list of rows of (r,g,b)."""
    out = []
    total = sw * sh
    for oy in range(h):
        row = []
        y0, y1 = oy * sh, (oy + 1) * sh
        for ox in range(w):
            x0, x1 = ox * sw, (ox + 1) * sw
            acc = [0, 0, 0]
            for sy in range(sh):
                cy = min(y1, (sy + 1) * h) - max(y0, sy * h)
                if cy <= 0:
                    continue
                for sx in range(sw):
                    cx = min(x1, (sx + 1) * w) - max(x0, sx * w)
                    if cx <= 0:
                        continue
                    p = pixels[sy][sx]
                    for k in range(3):
                        acc[k] += p[k] * cx * cy
            row.append(tuple((2 * a + total) // (2 * total) for a in acc))
        out.append(row)
    return out


def entropy(signal):
    n = len(signal)
    counts = {}
    for v in signal:
        counts[v] = counts.get(v, 0) + 1
    s = 0.0
    for sym in sorted(counts):
        p = counts[sym] / n
        s += p * math.log2(1.0 / p)
    return s


def entropy_matrix(grid):
    h = len(grid)
    w = len(grid[0])
    out = []
    for r in range(h):
        row = []
        for c in range(w):
            region = []
            for y in range(max(0, r - RADIUS), min(h, r + RADIUS)):
                for x in range(max(0, c - RADIUS), min(w, c + RADIUS)):
                    region.append(grid[y][x])
            row.append(int(entropy(region)))
        out.append(row)
    return out


def reference_score(pixels):
    sh = len(pixels)
    sw = len(pixels[0])
    if (sw, sh) != (SIDE, SIDE):
        pixels = box_resize(pixels, sw, sh, SIDE, SIDE)
    gray = [[luma(*p) for p in row] for row in pixels]
    second = entropy_matrix(entropy_matrix(gray))
    return sum(sum(row) for row in second)


# ---------------------------------------------------------------- fixtures


def flat(color, side=SIDE):
    return [[color] * side for _ in range(side)]


def gray_noise(seed, side=SIDE):
    rng = random.Random(seed)
    rows = []
    for _ in range(side):
        row = []
        for _ in range(side):
            v = rng.randrange(256)
            row.append((v, v, v))
        rows.append(row)
    return rows


def color_noise(seed, side=SIDE):
    rng = random.Random(seed)
    return [
        [(rng.randrange(256), rng.randrange(256), rng.randrange(256)) for _ in range(side)]
        for _ in range(side)
    ]


def rings(width, side=SIDE, scale=1):
    c = side / 2
    rows = []
    for y in range(side):
        row = []
        for x in range(side):
            band = int(math.hypot(x - c, y - c)) // (width * scale) % 2
            base = x // scale
            row.append((min(255, band * 200 + base), min(255, band * 120 + 2 * (y // scale)), 90))
        rows.append(row)
    return rows


def stripes():
    rows = []
    for y in range(SIDE):
        row = []
        for x in range(SIDE):
            v = (x // (1 + y // 10)) % 2 * 180 + 30
            row.append((v, v // 2, 255 - v))
        rows.append(row)
    return rows


def scene():
    rows = []
    for y in range(SIDE):
        row = []
        for x in range(SIDE):
            # sky gradient
            p = (90 + y, 140 + y, 230)
            # sun with a halo ring
            d2 = (x - 60) ** 2 + (y - 16) ** 2
            if d2 < 64:
                p = (255, 240, 120)
            elif d2 < 144 and (d2 // 12) % 2 == 0:
                p = (250, 200, 90)
            # hills
            if y > 48 - abs(x - 28) // 2:
                p = (40 + (x % 7) * 6, 110 + (y % 5) * 8, 40)
            # house with a window grid
            if 18 <= x < 40 and 54 <= y < 76:
                lit = x % 6 < 3 and y % 6 < 3
                p = (230, 220, 90) if lit else (150, 70, 50)
            row.append(p)
        rows.append(row)
    return rows


def fixtures():
    return {
        "uninteresting/flat_red.png": flat((255, 0, 0)),
        "uninteresting/flat_gray.png": flat((128, 128, 128)),
        "uninteresting/flat_blue.bmp": flat((0, 0, 255)),
        "uninteresting/flat_white_large.png": flat((255, 255, 255), side=200),
        "uninteresting/noise_gray_1.png": gray_noise(147),
        "uninteresting/noise_gray_2.png": gray_noise(591),
        "uninteresting/noise_color_1.png": color_noise(147),
        "uninteresting/noise_color_2.png": color_noise(591),
        "interesting/rings_5.png": rings(5),
        "interesting/rings_7.png": rings(7),
        "interesting/rings_large.png": rings(5, side=240, scale=3),
        "interesting/stripes.png": stripes(),
        "interesting/scene.png": scene(),
    }


def write(path, pixels):
    h = len(pixels)
    w = len(pixels[0])
    img = Image.new("RGB", (w, h))
    img.putdata([p for row in pixels for p in row])
    img.save(path)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join("crates", "core", "tests", "fixtures")
    corpus = os.path.join(out, "corpus")
    for sub in ("interesting", "uninteresting"):
        os.makedirs(os.path.join(corpus, sub), exist_ok=True)
    goldens = {}
    for name, pixels in fixtures().items():
        write(os.path.join(corpus, name), pixels)
        goldens[name] = reference_score(pixels)
        print("%-40s %6d" % (name, goldens[name]))
    with open(os.path.join(out, "golden_scores.json"), "w") as f:
        json.dump({"threshold": 500, "scores": goldens}, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
