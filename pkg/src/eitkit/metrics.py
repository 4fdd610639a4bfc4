"""Image-quality scores for conductivity images.

Plain-array metrics used by the evaluation pipeline and the tests:
relative l2 error against a reference image, and mean SSIM with the
usual small Gaussian window.  File handling and report assembly live in
the pipeline module.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from skimage.metrics import structural_similarity

__all__ = ["rel_l2_error", "ssim"]

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _image_pair(x, truth) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if x.ndim != 2 or x.shape != truth.shape:
        raise ValueError(
            f"need two 2-d images of equal shape, got {x.shape} and {truth.shape}"
        )
    return x, truth


def rel_l2_error(x, truth) -> float:
    """Relative l2 distance ||x - truth|| / ||truth||."""
    x, truth = _image_pair(x, truth)
    denom = float(np.linalg.norm(truth))
    if denom == 0.0:
        raise ValueError("reference image has zero norm")
    return float(np.linalg.norm(x - truth) / denom)


def ssim(x, truth, data_range: Optional[float] = None) -> float:
    """Mean structural similarity of ``x`` against the reference ``truth``.

    11x11 Gaussian window (std 1.5), K1 = 0.01, K2 = 0.03; the dynamic
    range is the reference image's value range unless given.  A constant
    reference has zero range, which would zero the stabilizing constants
    and leave 0/0 for constant inputs, so a zero range falls back to 1.0;
    two constant images then score exactly the closed-form luminance
    term (2*c1*c2 + K1^2) / (c1^2 + c2^2 + K1^2).
    """
    x, truth = _image_pair(x, truth)
    if data_range is None:
        data_range = float(truth.max() - truth.min())
    if data_range <= 0.0:
        data_range = 1.0
    return float(
        structural_similarity(
            x,
            truth,
            win_size=SSIM_WINDOW,
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
            K1=SSIM_K1,
            K2=SSIM_K2,
            data_range=data_range,
        )
    )
