"""Two-file image interchange: JSON header plus raw float32 payload.

A stored image is a header file at ``path`` and a payload file at
``path + ".raw"`` in the same directory.  The header is plain JSON:

    {"width": 64, "height": 64, "dtype": "f32le",
     "grid": {"xmin": -1.0, "xmax": 1.0, "ymin": -1.0, "ymax": 1.0},
     "units": "S/m"}

The payload holds width*height little-endian float32 samples in
row-major order, row i covering y = ymin + i*h (the same orientation
GridSpec uses).  The format is deliberately trivial so any language --
in particular the learned post-processor, which must not import this
package -- can read it with a JSON parser and a reshape.

Both files are written atomically (temp file in the target directory,
then rename), payload before header, so a reader that sees a header
always finds its payload.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .phantom import GridSpec

__all__ = ["EITImage", "write_eitimg", "read_eitimg", "payload_path", "atomic_write_bytes"]

DTYPE_TAG = "f32le"
DEFAULT_UNITS = "S/m"


@dataclass
class EITImage:
    """An image as stored on disk: square float32 samples on a grid."""

    values: np.ndarray
    grid: GridSpec = field(default_factory=GridSpec)
    units: str = DEFAULT_UNITS

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.values.shape != (self.grid.n, self.grid.n):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("image samples must be finite")


def payload_path(path) -> str:
    """The payload file that pairs with a header at ``path``."""
    return str(path) + ".raw"


def atomic_write_bytes(path: str, data: bytes) -> None:
    """Write bytes via a temp file in the target directory, then rename."""
    dirname = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix=".tmp-eitimg-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_eitimg(path, values, grid: GridSpec = None, units: str = DEFAULT_UNITS) -> None:
    """Write header + payload for a square image.

    ``values`` is any 2-d array (converted to float32); ``grid`` defaults
    to the 64x64 grid on [-1, 1]^2.
    """
    grid = grid or GridSpec()
    img = EITImage(values, grid, units)  # validates shape and finiteness
    header = {
        "width": grid.n,
        "height": grid.n,
        "dtype": DTYPE_TAG,
        "grid": {
            "xmin": grid.xmin,
            "xmax": grid.xmax,
            "ymin": grid.ymin,
            "ymax": grid.ymax,
        },
        "units": units,
    }
    payload = np.ascontiguousarray(img.values, dtype="<f4").tobytes()
    atomic_write_bytes(payload_path(path), payload)
    atomic_write_bytes(str(path), (json.dumps(header, indent=1) + "\n").encode())


def read_eitimg(path) -> EITImage:
    """Read a stored image; raises ValueError on malformed files."""
    with open(path) as fh:
        try:
            header = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed image header {path}: {exc}") from exc
    try:
        width, height = int(header["width"]), int(header["height"])
        dtype = header["dtype"]
        g = header["grid"]
        grid = GridSpec(
            n=width,
            xmin=float(g["xmin"]),
            xmax=float(g["xmax"]),
            ymin=float(g["ymin"]),
            ymax=float(g["ymax"]),
        )
        units = header.get("units", DEFAULT_UNITS)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"image header {path} is missing fields: {exc}") from exc
    if dtype != DTYPE_TAG:
        raise ValueError(f"unsupported sample dtype {dtype!r} in {path}")
    if width != height:
        raise ValueError(f"only square images are supported, got {width}x{height}")
    raw = np.fromfile(payload_path(path), dtype="<f4")
    if raw.size != width * height:
        raise ValueError(
            f"payload {payload_path(path)} holds {raw.size} samples, "
            f"expected {width * height}"
        )
    return EITImage(raw.reshape(height, width), grid, units)
