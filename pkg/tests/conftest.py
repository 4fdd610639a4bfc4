"""Shared builders for the pipeline-level tests."""

import numpy as np
import pytest

from eitkit import DatasetManifest, write_eitimg
from eitkit.pipeline import MANIFEST_NAME


@pytest.fixture
def fake_dataset(tmp_path):
    """Build a hand-made dataset directory (no simulation involved).

    Returns (directory, manifest); truths are smooth positive images,
    stored reconstructions are a degraded copy.
    """

    def build(n=3, dirname="set"):
        out = tmp_path / dirname
        out.mkdir()
        x = np.linspace(-1, 1, 64)
        X, Y = np.meshgrid(x, x)
        entries = []
        for i in range(1, n + 1):
            eid = f"kit4_{i:04d}"
            truth = 0.03 + 0.06 * np.exp(
                -((X - 0.1 * i) ** 2 + (Y + 0.05 * i) ** 2) / 0.1
            )
            blurry = 0.03 + 0.04 * np.exp(
                -((X - 0.1 * i) ** 2 + (Y + 0.05 * i) ** 2) / 0.25
            )
            write_eitimg(out / f"{eid}_truth.eitimg", truth)
            write_eitimg(out / f"{eid}_dbar.eitimg", blurry)
            entries.append(
                {
                    "id": eid,
                    "truth_path": f"{eid}_truth.eitimg",
                    "dbar_path": f"{eid}_dbar.eitimg",
                    "seed": 100 + i,
                    "sigma0": 0.03,
                    "threshold": 8.0,
                }
            )
        manifest = DatasetManifest(
            preset="kit4",
            config={"seed": 0, "count": n},
            counts={"requested": n, "written": n, "failed": 0},
            entries=entries,
        )
        manifest.save(out / MANIFEST_NAME)
        return out, manifest

    return build
