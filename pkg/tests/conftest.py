from pathlib import Path

import numpy as np
import pytest

from stegowave.image_io import GrayImage, read_pgm

DATA = Path(__file__).parent / "data"

# Filled by test_acceptance, printed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def lena() -> GrayImage:
    return read_pgm(DATA / "lena256.pgm")


@pytest.fixture(scope="session")
def horse() -> GrayImage:
    return read_pgm(DATA / "horse256.pgm")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_cover() -> GrayImage:
    """Smooth 32x32 gradient with texture; quick to embed into."""
    y, x = np.mgrid[0:32, 0:32]
    img = 60 + 3 * x + 2 * y + 10 * np.sin(x / 3.0) * np.cos(y / 4.0)
    return GrayImage(np.round(img).astype(np.uint8))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
