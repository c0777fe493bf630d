#!/usr/bin/env python3
"""Synthesize a deterministic grayscale PGM corpus for sweep experiments.

Each image is a band-limited random field (a sum of cosine waves) with its
own derived seed, so the corpus is reproducible from (--seed, --count).
"""

import argparse
from pathlib import Path

import numpy as np

from inkchannel import GrayImage, derive_seed, write_gray


def synth_scene(width, height, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    y, x = np.mgrid[0:height, 0:width]
    img = np.full((height, width), rng.uniform(110.0, 170.0))
    for _ in range(6):
        fx, fy = rng.uniform(0.3, 3.0, size=2)
        px, py = rng.uniform(0.0, 2.0 * np.pi, size=2)
        amp = rng.uniform(15.0, 55.0)
        img = img + amp * np.cos(2 * np.pi * fx * x / width + px) * np.cos(2 * np.pi * fy * y / height + py)
    return GrayImage(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="corpus", help="output directory (default: corpus)")
    parser.add_argument("--count", type=int, default=8)
    parser.add_argument("--size", type=int, default=256, help="image side length")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        img = synth_scene(args.size, args.size, derive_seed(args.seed, i))
        path = out / f"scene{i:02d}.pgm"
        write_gray(img, path)
        print(f"{path}  mean lightness {img.pixels.mean():.1f}")


if __name__ == "__main__":
    main()
