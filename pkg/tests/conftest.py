from pathlib import Path

import numpy as np
import pytest

from msinpaint.raster import Image, load_image, save_image

DATA = Path(__file__).parent / "data"

# scikit-image sample images used as the natural-image corpus (all public
# domain or CC0), centre-cropped to 128x128
CORPUS_NAMES = ["astronaut", "camera", "chelsea", "coffee", "coins", "moon", "rocket",
                "hubble_deep_field", "retina", "brick", "grass", "gravel"]
CORPUS_SIDE = 128


def centre_crop(arr, side):
    h, w = arr.shape[:2]
    y, x = (h - side) // 2, (w - side) // 2
    return arr[y:y + side, x:x + side]


@pytest.fixture(scope="session")
def fixture_images():
    return {p.stem: load_image(p) for p in sorted(DATA.glob("*.ppm"))}


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    skdata = pytest.importorskip("skimage.data")
    d = tmp_path_factory.mktemp("corpus")
    for name in CORPUS_NAMES:
        arr = centre_crop(getattr(skdata, name)(), CORPUS_SIDE).astype(np.float64)
        suffix = "ppm" if arr.ndim == 3 else "pgm"
        save_image(Image(arr), d / f"{name}.{suffix}")
    return d


@pytest.fixture(scope="session")
def corpus(corpus_dir):
    return [(p.stem, load_image(p)) for p in sorted(corpus_dir.iterdir())]


@pytest.fixture
def rng():
    return np.random.default_rng(20191102)


def random_image(rng, h, w, c=1, integer=False):
    arr = rng.uniform(0, 255, size=(h, w, c))
    return Image(np.round(arr) if integer else arr)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
