import numpy as np
import pytest

from inkchannel import GrayImage, write_gray


def natural_gray(width=256, height=256):
    """Deterministic synthetic scene: slanted gradient plus two soft blobs.

    Mean darkness is ~0.33, so halftones land well outside [0.45, 0.55].
    """
    y, x = np.mgrid[0:height, 0:width]
    xf = x / (width - 1)
    yf = y / (height - 1)
    img = 150.0 + 70.0 * xf - 30.0 * yf
    img += 45.0 * np.exp(-((xf - 0.35) ** 2 + (yf - 0.4) ** 2) / 0.02)
    img -= 60.0 * np.exp(-((xf - 0.75) ** 2 + (yf - 0.7) ** 2) / 0.01)
    return GrayImage(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def gradient_gray(width=128, height=128, lo=30, hi=220):
    x = np.linspace(lo, hi, width)
    return GrayImage(np.rint(np.tile(x, (height, 1))).astype(np.uint8))


def constant_gray(value, width=64, height=64):
    return GrayImage(np.full((height, width), value, dtype=np.uint8))


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """Three small synthetic grayscale PGMs for sweep tests."""
    root = tmp_path_factory.mktemp("corpus")
    write_gray(natural_gray(96, 96), root / "scene.pgm")
    write_gray(gradient_gray(96, 96), root / "ramp.pgm")
    write_gray(constant_gray(176, 96, 96), root / "flat.pgm")
    return root
