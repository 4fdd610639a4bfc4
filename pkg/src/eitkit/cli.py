"""Command-line entry points.

Four commands: ``generate`` (dataset of truth/reconstruction image
pairs), ``reconstruct`` (one image from a boundary-matrix or raw
measurement file), ``evaluate`` (metric report for a manifest plus a
predictions directory), and ``render`` (PNG raster of a stored image).
Successful runs exit 0 and print a small JSON summary (or, for
evaluate, the score table); failures print one machine-readable JSON
object on stderr and exit nonzero.
"""

from __future__ import annotations

import json
import logging
import os
import sys

import click

from . import pipeline
from .eitimg import write_eitimg
from .presets import PRESETS

_PRESET_CHOICE = click.Choice(sorted(PRESETS), case_sensitive=False)


@click.group()
@click.option("--verbose", is_flag=True, help="Log per-entry progress to stderr.")
def cli(verbose):
    """Simulate, reconstruct, and score conductivity images."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@click.option("--preset", required=True, type=_PRESET_CHOICE)
@click.option("--count", required=True, type=click.IntRange(min=1))
@click.option("--seed", required=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option(
    "--mesh-tris",
    default=16384,
    show_default=True,
    type=click.IntRange(min=8),
    help="Triangle budget for the forward mesh (rounded to a refinement level).",
)
@click.option(
    "--radius-R",
    "cutoff_radius",
    default=None,
    type=float,
    help="Cutoff radius of the low-pass disc [default: preset value].",
)
@click.option(
    "--threshold",
    default=None,
    type=float,
    help="Amplitude threshold on the frequency data [default: preset value].",
)
def generate(preset, count, seed, out_dir, mesh_tris, cutoff_radius, threshold):
    """Generate truth/reconstruction image pairs plus a manifest."""
    manifest = pipeline.generate_dataset(
        preset,
        count,
        seed,
        out_dir,
        mesh_tris=mesh_tris,
        cutoff_radius=cutoff_radius,
        threshold=threshold,
    )
    click.echo(
        json.dumps(
            {
                "manifest": os.path.join(out_dir, pipeline.MANIFEST_NAME),
                "counts": manifest.counts,
            }
        )
    )


@cli.command()
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option("--sigma0", default=None, type=float, help="Background conductivity; fitted from the data when omitted.")
@click.option("--preset", default=None, type=_PRESET_CHOICE)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--png",
    "png_path",
    default=None,
    type=click.Path(dir_okay=False),
    help="Also render the reconstruction to this PNG.",
)
def reconstruct(input_path, sigma0, preset, out_path, png_path):
    """Reconstruct one image from a boundary-matrix or measurement file."""
    result = pipeline.reconstruct_from_file(input_path, sigma0=sigma0, preset=preset)
    write_eitimg(out_path, result.image.values, result.image.grid)
    if png_path:
        pipeline.render_png(out_path, png_path)
    click.echo(
        json.dumps(
            {
                "out": out_path,
                "sigma0": result.sigma0,
                "sigma0_estimated": result.sigma0_estimated,
                "kind": result.kind,
            }
        )
    )


@cli.command()
@click.option(
    "--manifest",
    "manifest_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option(
    "--pred",
    "pred_dir",
    required=True,
    type=click.Path(exists=True, file_okay=False),
)
@click.option(
    "--out",
    "out_path",
    default=None,
    type=click.Path(dir_okay=False),
    help="Also save the full report as JSON.",
)
def evaluate(manifest_path, pred_dir, out_path):
    """Score predictions (and the stored inputs) against the truths."""
    report = pipeline.evaluate_dataset(manifest_path, pred_dir)
    if out_path is not None:
        report.save(out_path)
    click.echo(report.table())


@cli.command()
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--cmap", default="gray", show_default=True)
@click.option(
    "--clip-disc",
    is_flag=True,
    help="Make pixels outside the inscribed disc transparent.",
)
@click.option("--vmin", default=None, type=float)
@click.option("--vmax", default=None, type=float)
def render(input_path, out_path, cmap, clip_disc, vmin, vmax):
    """Render a stored image to PNG."""
    pipeline.render_png(
        input_path, out_path, cmap=cmap, clip_disc=clip_disc, vmin=vmin, vmax=vmax
    )
    click.echo(json.dumps({"out": out_path}))


def _error_json(exc) -> str:
    return json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}})


def main(argv=None) -> int:
    """Entry point with the exit-code contract: 0 on success, nonzero
    with one JSON error object on stderr otherwise."""
    no_args_help = getattr(click.exceptions, "NoArgsIsHelpError", ())
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:  # --help and friends
        return exc.exit_code
    except click.ClickException as exc:
        if no_args_help and isinstance(exc, no_args_help):
            click.echo(exc.format_message())
            return 0
        click.echo(_error_json(exc), err=True)
        return exc.exit_code or 1
    except click.Abort:
        click.echo(_error_json(RuntimeError("aborted")), err=True)
        return 130
    except Exception as exc:  # noqa: BLE001 - the contract wants JSON, not a trace
        click.echo(_error_json(exc), err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
