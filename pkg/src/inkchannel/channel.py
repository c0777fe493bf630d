"""The binary printing channel.

A binary noise field is produced by thresholding an 8-bit uniform random
matrix, then applied to the halftone through a controlled gate: where the
control bit is 1 the gate operation hits the target bit, elsewhere the target
passes through.  Three channel kinds are provided: bit-flip, erase, and
block erase (erase gated on the tile's center pixel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imagery import BinaryImage

__all__ = [
    "NoisePower",
    "BlockSpec",
    "ChannelConfig",
    "CHANNEL_KINDS",
    "GATE_OPS",
    "gen_noise",
    "noise_density",
    "apply_gate",
    "transmit_bitflip",
    "transmit_erase",
    "transmit_block_erase",
    "transmit",
    "bsc_capacity",
    "derive_seed",
]

CHANNEL_KINDS = ("bitflip", "erase", "block-erase")
GATE_OPS = ("not", "set1")

_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def derive_seed(master_seed: int, index: int) -> int:
    """Mix a master seed with a task index into an independent 64-bit seed.

    splitmix64 finalizer over master_seed advanced index+1 steps; one call per
    sweep cell keeps parallel workers off each other's random streams.
    """
    x = (_check_seed(master_seed) + (index + 1) * _SPLITMIX_GAMMA) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class NoisePower:
    """Threshold of the binary-noise generator; the expected ones-density."""

    t: float

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"noise power must lie in [0, 1], got {self.t}")


@dataclass(frozen=True)
class BlockSpec:
    """Odd-sized square block for block erase; odd so a center pixel exists."""

    size: int

    def __post_init__(self):
        if self.size < 3 or self.size % 2 == 0:
            raise ValueError(f"block size must be odd and >= 3, got {self.size}")


@dataclass(frozen=True)
class ChannelConfig:
    """One channel instance: noise kind, power, optional block, seed."""

    kind: str
    power: NoisePower
    seed: int
    block: BlockSpec | None = None

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r} (expected one of {CHANNEL_KINDS})")
        if (self.block is not None) != (self.kind == "block-erase"):
            raise ValueError("block spec must be present exactly when kind is 'block-erase'")
        _check_seed(self.seed)


def noise_density(power: NoisePower) -> float:
    """Achieved ones-density of the discretized generator: ceil(t*256)/256."""
    return min(1.0, math.ceil(power.t * 256) / 256.0)


def gen_noise(width: int, height: int, power: NoisePower, seed: int) -> BinaryImage:
    """Threshold an 8-bit uniform random matrix: v = 1 where r < t*256.

    Draws come from PCG64(seed) in row-major order; the field is fully
    determined by (width, height, power, seed).
    """
    if width < 1 or height < 1:
        raise ValueError(f"noise field dimensions must be >= 1, got {width}x{height}")
    rng = np.random.Generator(np.random.PCG64(_check_seed(seed)))
    r = rng.integers(0, 256, size=(height, width), dtype=np.uint8)
    return BinaryImage(r < power.t * 256)


def apply_gate(control: BinaryImage, target: BinaryImage, op: str) -> BinaryImage:
    """Controlled gate: where control = 1 apply ``op`` to the target bit.

    op 'not' flips the bit; op 'set1' forces it to 1 (erase).  The control
    image is never modified.
    """
    if op not in GATE_OPS:
        raise ValueError(f"unknown gate op {op!r} (expected one of {GATE_OPS})")
    if control.bits.shape != target.bits.shape:
        raise ValueError(
            f"control {control.width}x{control.height} and target "
            f"{target.width}x{target.height} dimensions differ"
        )
    if op == "not":
        out = target.bits ^ control.bits
    else:
        out = target.bits | control.bits
    return BinaryImage(out)


def transmit_bitflip(g: BinaryImage, power: NoisePower, seed: int) -> BinaryImage:
    """Flip each bit where the noise field is 1 (0->1, 1->0)."""
    v = gen_noise(g.width, g.height, power, seed)
    return apply_gate(v, g, "not")


def transmit_erase(g: BinaryImage, power: NoisePower, seed: int) -> BinaryImage:
    """Erase toward ink: g' = v OR g; existing dots are always preserved."""
    v = gen_noise(g.width, g.height, power, seed)
    return apply_gate(v, g, "set1")


def transmit_block_erase(g: BinaryImage, power: NoisePower, block: BlockSpec, seed: int) -> BinaryImage:
    """Erase within blocks whose center pixel carries ink.

    The image is tiled into non-overlapping size x size blocks with the center
    at offset ((size-1)/2, (size-1)/2).  A tile whose center bit is 1 becomes
    v OR g; tiles with center 0, and edge tiles too small to contain a center,
    pass through unchanged.
    """
    v = gen_noise(g.width, g.height, power, seed)
    size = block.size
    c = (size - 1) // 2
    out = g.bits.copy()
    for y0 in range(0, g.height, size):
        for x0 in range(0, g.width, size):
            yc, xc = y0 + c, x0 + c
            if yc >= g.height or xc >= g.width:
                continue
            if g.bits[yc, xc]:
                tile = (slice(y0, y0 + size), slice(x0, x0 + size))
                out[tile] = v.bits[tile] | g.bits[tile]
    return BinaryImage(out)


def transmit(g: BinaryImage, cfg: ChannelConfig) -> BinaryImage:
    """Send a halftone through the configured channel."""
    if cfg.kind == "bitflip":
        return transmit_bitflip(g, cfg.power, cfg.seed)
    if cfg.kind == "erase":
        return transmit_erase(g, cfg.power, cfg.seed)
    return transmit_block_erase(g, cfg.power, cfg.block, cfg.seed)


def bsc_capacity(p: float) -> float:
    """Capacity 1 - H2(p) of the binary symmetric channel, in bits per symbol."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must lie in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 1.0
    return 1.0 + p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p)
