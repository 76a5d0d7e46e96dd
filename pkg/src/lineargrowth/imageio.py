"""Grey-scale image and mask files.

Reading and writing go through Pillow, which handles binary and plain PGM
(P5/P2) as well as PNG.  Only single-channel 8-bit images are accepted.
Every decoding problem surfaces as :class:`ImageIOError`.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DomainError, ImageIOError, ShapeError
from .grid import Mask

__all__ = ["load_image", "save_image", "load_mask", "quantize"]

_FORMATS = {".pgm": "PPM", ".png": "PNG"}


def _read_bytes(path):
    try:
        with Image.open(path) as im:
            if im.format not in ("PPM", "PNG"):
                raise ImageIOError(f"{path}: unsupported format {im.format}")
            if im.mode != "L":
                raise ImageIOError(f"{path}: expected 8-bit grey-scale, got mode {im.mode}")
            im.load()
            return np.array(im, dtype=np.uint8)
    except ImageIOError:
        raise
    except FileNotFoundError as exc:
        raise ImageIOError(f"{path}: no such file") from exc
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise ImageIOError(f"{path}: cannot decode image ({exc})") from exc


def load_image(path):
    """Grey values scaled to ``[0, 1]``, shape ``(height, width)``."""
    return _read_bytes(path).astype(float) / 255.0


def quantize(field):
    """Clamp to ``[0, 1]`` and map to bytes with round-half-up."""
    field = np.asarray(field, dtype=float)
    if not np.all(np.isfinite(field)):
        raise DomainError("cannot save a field with non-finite values")
    return np.floor(np.clip(field, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def save_image(field, path):
    """Write ``field`` as 8-bit PGM or PNG, chosen by the file extension."""
    field = np.asarray(field)
    if field.ndim != 2:
        raise ShapeError(f"expected a 2-D field, got shape {field.shape}")
    ext = os.path.splitext(str(path))[1].lower()
    if ext not in _FORMATS:
        raise ImageIOError(f"{path}: extension must be .pgm or .png")
    data = quantize(field)
    try:
        Image.fromarray(data).save(path, format=_FORMATS[ext])
    except OSError as exc:
        raise ImageIOError(f"{path}: cannot write image ({exc})") from exc


def load_mask(path, f, spacing=1.0):
    """Mask from a grey-scale file: byte 0 is missing, anything else observed.

    ``f`` is the already loaded image; its values are kept on observed pixels.
    """
    f = np.asarray(f, dtype=float)
    raw = _read_bytes(path)
    if raw.shape != f.shape:
        raise ShapeError(f"mask {raw.shape} does not match image {f.shape}")
    observed = raw > 0
    if not observed.any():
        raise DomainError(f"{path}: mask marks every pixel missing")
    return Mask(observed, f, spacing)
