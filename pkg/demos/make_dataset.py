"""Generate a small paired dataset and score a baseline on it.

Produces eight truth/reconstruction pairs with the KIT4 preset, then
evaluates the reconstructions themselves as the "predictions" — the
identity baseline any post-processing model has to beat.

Run:  python demos/make_dataset.py
"""

import shutil
from pathlib import Path

from eitkit import DatasetManifest, evaluate_dataset, generate_dataset, payload_path


def main() -> None:
    out = Path(__file__).parent / "out" / "dataset"
    manifest = generate_dataset("kit4", count=8, seed=42, out_dir=out)
    print(f"wrote {len(manifest.entries)} pairs under {out}")

    # Copy each low-pass image in as its own prediction.  A learned
    # model would drop its outputs here under the same ids instead.
    pred = out / "baseline"
    pred.mkdir(exist_ok=True)
    for entry in manifest.entries:
        src = out / entry["dbar_path"]
        dst = pred / f"{entry['id']}_pred.eitimg"
        shutil.copy(src, dst)
        shutil.copy(payload_path(src), payload_path(dst))

    report = evaluate_dataset(out / "manifest.json", pred)
    print(report.table())


if __name__ == "__main__":
    main()
