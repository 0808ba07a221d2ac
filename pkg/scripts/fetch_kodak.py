"""Download the Kodak PhotoCD test images and convert them to P6 pixmaps.

    python scripts/fetch_kodak.py corpus/ [--count 15]

The images are not redistributed with this repository.
"""

import argparse
import io
import sys
import urllib.request
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from msinpaint.raster import Image, save_image

URL = "https://r0k.us/graphics/kodak/kodak/kodim{:02d}.png"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dest")
    ap.add_argument("--count", type=int, default=24, help="first N of kodim01..kodim24")
    args = ap.parse_args(argv)
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    for i in range(1, min(args.count, 24) + 1):
        target = dest / f"kodim{i:02d}.ppm"
        if target.exists():
            continue
        with urllib.request.urlopen(URL.format(i), timeout=60) as resp:
            raw = resp.read()
        with PILImage.open(io.BytesIO(raw)) as im:
            arr = np.asarray(im.convert("RGB"), dtype=np.float64)
        save_image(Image(arr), target)
        print(target, file=sys.stderr)


if __name__ == "__main__":
    main()
