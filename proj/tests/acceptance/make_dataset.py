#!/usr/bin/env python3
"""Export scikit-image's bundled natural photographs as 8-bit grayscale PGM files.

Usage: make_dataset.py OUTPUT_DIR
"""
import os
import sys

NAMES = ["camera", "astronaut", "coffee", "chelsea", "rocket", "motorcycle_left"]


def main() -> int:
    out = sys.argv[1]
    os.makedirs(out, exist_ok=True)
    try:
        import numpy as np
        from skimage import color, data, io
    except ImportError as exc:  # pragma: no cover
        print(f"scikit-image unavailable: {exc}", file=sys.stderr)
        return 1
    base = os.path.dirname(data.__file__)
    for name in NAMES:
        candidates = [f for f in os.listdir(base) if os.path.splitext(f)[0] == name]
        if not candidates:
            continue
        img = io.imread(os.path.join(base, candidates[0]))
        if img.ndim == 3:
            img = color.rgb2gray(img[..., :3]) * 255.0
        img = np.clip(np.round(img), 0, 255).astype(np.uint8)
        h, w = img.shape
        with open(os.path.join(out, f"{name}.pgm"), "wb") as f:
            f.write(f"P5\n{w} {h}\n255\n".encode())
            f.write(img.tobytes())
    return 0


if __name__ == "__main__":
    sys.exit(main())
