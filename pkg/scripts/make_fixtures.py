"""Regenerate the small pixmap fixtures in tests/data from scikit-image's
bundled public-domain / CC0 sample images."""

from pathlib import Path

import numpy as np
from skimage import data

from msinpaint.raster import Image, save_image

OUT = Path(__file__).resolve().parent.parent / "tests" / "data"

# name -> (loader, top, left); 64x64 crops
CROPS = {
    "coffee": (data.coffee, 150, 250),
    "chelsea": (data.chelsea, 80, 150),
    "rocket": (data.rocket, 200, 300),
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (loader, top, left) in CROPS.items():
        arr = loader()[top:top + 64, left:left + 64]
        save_image(Image(arr.astype(np.float64)), OUT / f"{name}.ppm")
        print(OUT / f"{name}.ppm")


if __name__ == "__main__":
    main()
