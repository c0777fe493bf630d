#!/usr/bin/env python3
"""Distance and divergence between a halftone and raw noise versus power.

For a halftone g of the input image, measures the Euclidean distance e(v, g)
and the relative entropy Q(g||v) against noise fields v over a power grid.
Q(g||v) bottoms out where the noise density matches the halftone's ink
fraction, which is a histogram coincidence rather than visual similarity;
Q(g||g') against the transmitted image (also reported) rises with power.
"""

import argparse

from inkchannel import (
    HistogramSpec,
    NoisePower,
    derive_seed,
    euclidean_distance,
    gen_noise,
    image_relative_entropy,
    read_gray,
    transmit_bitflip,
)
from inkchannel.halftone import halftone_floyd_steinberg


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--image", required=True, help="grayscale PGM input")
    parser.add_argument("--steps", type=int, default=19, help="grid points over (0, 1)")
    parser.add_argument("--reps", type=int, default=16)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--out", default="noise_distance.csv")
    args = parser.parse_args()

    img = read_gray(args.image)
    g = halftone_floyd_steinberg(img)
    spec = HistogramSpec(smoothing=1e-9)
    print(f"halftone ink fraction f1 = {g.ink_fraction():.4f}")

    with open(args.out, "w") as fh:
        fh.write("t,e_dist,q_noise,q_transmitted\n")
        for k in range(1, args.steps + 1):
            t = k / (args.steps + 1)
            power = NoisePower(t)
            e = q_v = q_g = 0.0
            for rep in range(args.reps):
                seed = derive_seed(args.seed, k * args.reps + rep)
                v = gen_noise(g.width, g.height, power, seed)
                gp = transmit_bitflip(g, power, seed)
                e += euclidean_distance(v, g)
                q_v += image_relative_entropy(g, v, spec)
                q_g += image_relative_entropy(g, gp, spec)
            n = args.reps
            fh.write(f"{t!r},{e / n!r},{q_v / n!r},{q_g / n!r}\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
