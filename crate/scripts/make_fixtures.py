"""Regenerates the synthetic low-light PNG fixtures used by the CLI tests.

Each scene is a textured reflectance lit by a dim, spatially varying
illumination with a cast shadow, plus mild sensor noise. Even-numbered
scenes are written as 8-bit PNGs, odd-numbered ones as 16-bit.

Requires numpy and pypng.
"""

import pathlib

import numpy as np
import png

H, W = 48, 64
OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/cli/tests/fixtures/lowlight"


def scene(rng, k):
    y, x = np.mgrid[0:H, 0:W] / np.array([H, W])[:, None, None]
    base = rng.uniform(0.2, 0.9, size=3)
    kind = k % 4
    if kind == 0:
        tex = ((np.floor(x * 8) + np.floor(y * 6)) % 2)[..., None]
    elif kind == 1:
        tex = (0.5 + 0.5 * np.sin(2 * np.pi * (x * rng.uniform(2, 6) + y * rng.uniform(1, 3))))[..., None]
    elif kind == 2:
        cx, cy = rng.uniform(0.2, 0.8, size=2)
        tex = (np.hypot(x - cx, y - cy) < rng.uniform(0.15, 0.35)).astype(float)[..., None]
    else:
        tex = rng.uniform(0, 1, size=(H // 8, W // 8, 1)).repeat(8, 0).repeat(8, 1)
    refl = base * (0.4 + 0.6 * tex) * rng.uniform(0.7, 1.0, size=3)
    light = rng.uniform(0.05, 0.2) * (0.5 + x * rng.uniform(0.2, 1.0) + 0.3 * y)
    sx = rng.uniform(0.3, 0.7)
    light = np.where((x > sx) & (y > 0.4), light * 0.35, light)
    img = refl * light[..., None] + rng.normal(0, 0.004, size=(H, W, 3))
    return np.clip(img, 0, 1)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240601)
    for k in range(10):
        img = scene(rng, k)
        path = OUT / f"scene{k:02d}.png"
        depth = 8 if k % 2 == 0 else 16
        rows = (img * (2**depth - 1)).round().astype(np.uint16).reshape(H, W * 3)
        with open(path, "wb") as f:
            png.Writer(W, H, greyscale=False, bitdepth=depth).write(f, rows.tolist())


if __name__ == "__main__":
    main()
