"""Command-line front door: synthesize data, train, validate, evaluate,
pump calculations, and serving.

Commands delegate to the library modules and exit nonzero with a tagged
reason code on any domain error. All randomness comes from the synthesis
spec's seed (overridable with --seed), so repeated runs with the same inputs
produce bit-identical outputs.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import pipeline, pump, snapshots
from .errors import RomError
from .snapshots import CoefficientFunction, SyntheticManifoldSpec


class _RomGroup(click.Group):
    """Translate domain errors into tagged nonzero exits."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except RomError as exc:
            raise click.ClickException(f"[{exc.code}] {exc}") from exc


@click.group(cls=_RomGroup)
def cli():
    """Reduced-order-model toolkit."""


def _parse_param(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise click.BadParameter(f"cannot parse parameter {text!r}") from exc


def _parse_range(text: str | None) -> list[list[float]] | None:
    """Per-coordinate 'low,high' pairs separated by ';', e.g. '3,5'."""
    if text is None:
        return None
    pairs = []
    for chunk in text.split(";"):
        low, high = (float(p) for p in chunk.split(","))
        pairs.append([low, high])
    return pairs


def _field_specs(document: dict, samples, seed_override: int | None):
    base_seed = seed_override if seed_override is not None else int(document.get("seed", 0))
    specs = {}
    for index, (label, entry) in enumerate(document["fields"].items()):
        functions = tuple(
            CoefficientFunction(kind=c["kind"], coefficients=tuple(c["coefficients"]))
            for c in entry["coefficients"]
        )
        specs[label] = SyntheticManifoldSpec(
            n_dof=int(entry["n_dof"]),
            coefficient_functions=functions,
            parameter_samples=samples,
            noise_amplitude=float(entry.get("noise_amplitude", document.get("noise_amplitude", 0.0))),
            seed=int(entry.get("seed", base_seed + index)),
        )
    return specs


@cli.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--heldout", type=click.Path(file_okay=False), default=None,
              help="Also write the spec's heldout_samples as a separate (noiseless) set.")
@click.option("--seed", type=int, default=None, help="Override the spec's base seed.")
def synth(spec_file, out_dir, heldout, seed):
    """Generate a synthetic snapshot set from a JSON manifold spec."""
    document = json.loads(Path(spec_file).read_text(encoding="utf-8"))
    samples = np.asarray(document["parameter_samples"], dtype=float)
    specs = _field_specs(document, samples, seed)
    sset, _ = snapshots.generate_multi_field_set(specs)
    snapshots.write_snapshot_set(sset, out_dir)
    click.echo(f"wrote {len(sset.fields)} fields x {sset.n_snapshots} snapshots to {out_dir}")
    if heldout is not None:
        if "heldout_samples" not in document:
            raise click.ClickException("spec file has no heldout_samples")
        held_samples = np.asarray(document["heldout_samples"], dtype=float)
        held_specs = {
            label: SyntheticManifoldSpec(
                n_dof=s.n_dof,
                coefficient_functions=s.coefficient_functions,
                parameter_samples=held_samples,
                noise_amplitude=0.0,
                seed=s.seed,
            )
            for label, s in _field_specs(document, samples, seed).items()
        }
        held_set, _ = snapshots.generate_multi_field_set(held_specs)
        snapshots.write_snapshot_set(held_set, heldout)
        click.echo(f"wrote held-out set ({held_set.n_snapshots} snapshots) to {heldout}")


@cli.command()
@click.argument("snapshot_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("model_file", type=click.Path(dir_okay=False))
@click.option("--energy", type=float, default=0.99, show_default=True,
              help="Cumulative-energy threshold for rank selection.")
@click.option("--rank", "ranks", multiple=True, metavar="FIELD=K",
              help="Pin a field's truncation rank (repeatable).")
@click.option("--shape", type=float, default=None, help="Gaussian shape parameter.")
@click.option("--ridge", type=float, default=0.0, show_default=True,
              help="Ridge regularization for the interpolation solve.")
@click.option("--param-range", default=None, metavar="LOW,HIGH[;...]",
              help="Declared admissible parameter range stored in the model.")
def train(snapshot_dir, model_file, energy, ranks, shape, ridge, param_range):
    """Train a surrogate from a snapshot-set directory."""
    overrides = {}
    for item in ranks:
        field, _, value = item.partition("=")
        if not value:
            raise click.BadParameter(f"--rank wants FIELD=K, got {item!r}")
        overrides[field] = int(value)
    sset = snapshots.read_snapshot_set(snapshot_dir)
    model = pipeline.train(
        sset,
        energy_threshold=energy,
        rank_override=overrides or None,
        rbf_config=pipeline.RbfConfig(shape=shape, ridge=ridge),
        parameter_range=_parse_range(param_range),
    )
    pipeline.save_model(model, model_file)
    ranks_text = ", ".join(f"{label}: k={rom.rank}" for label, rom in model.fields.items())
    click.echo(f"trained {len(model.fields)} fields ({ranks_text}) -> {model_file}")


@cli.command()
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("heldout_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def validate(model_file, heldout_dir, as_json):
    """Report per-field relative errors against a held-out set."""
    model = pipeline.load_model(model_file)
    heldout = snapshots.read_snapshot_set(heldout_dir)
    report = pipeline.validate(model, heldout)
    if as_json:
        payload = {
            "ranks": dict(report.ranks),
            "entries": [
                {
                    "field": e.field,
                    "parameter": list(e.parameter),
                    "error_percent": e.error_percent,
                    "eval_seconds": e.eval_seconds,
                }
                for e in report.entries
            ],
        }
        click.echo(json.dumps(payload))
        return
    fields = list(dict.fromkeys(e.field for e in report.entries))
    by_key = {(e.field, e.parameter): e for e in report.entries}
    parameters = list(dict.fromkeys(e.parameter for e in report.entries))
    header = "parameter".ljust(18) + "".join(f.rjust(12) for f in fields)
    click.echo(header)
    for parameter in parameters:
        label = "[" + ", ".join(f"{x:g}" for x in parameter) + "]"
        row = label.ljust(18)
        for field in fields:
            entry = by_key.get((field, parameter))
            row += (f"{entry.error_percent:.4g}%" if entry else "-").rjust(12)
        click.echo(row)
    click.echo("ranks: " + ", ".join(f"{f}={report.ranks[f]}" for f in fields))
    med = float(np.median([e.eval_seconds for e in report.entries]))
    click.echo(f"median online evaluation: {med * 1e3:.3f} ms")


@cli.command()
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--field", required=True, help="Field label to reconstruct.")
@click.option("--param", required=True, metavar="X[,Y...]",
              help="Parameter point, comma-separated coordinates.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the full vector as raw little-endian float64.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable stats.")
def evaluate(model_file, field, param, out, as_json):
    """Reconstruct a field at a parameter point; print stats or dump the vector."""
    model = pipeline.load_model(model_file)
    point = _parse_param(param)
    values = pipeline.evaluate_field(model, field, point)
    stats = {
        "field": field,
        "parameter": point,
        "min": float(values.min()),
        "max": float(values.max()),
        "mean": float(values.mean()),
        "n_dof": int(values.shape[0]),
        "extrapolated": model.is_extrapolated(point),
    }
    if out is not None:
        Path(out).write_bytes(values.astype("<f8").tobytes())
        stats["out"] = out
    if as_json:
        click.echo(json.dumps(stats))
    else:
        click.echo(
            f"{field} @ {point}: min={stats['min']:.6g} max={stats['max']:.6g} "
            f"mean={stats['mean']:.6g} n={stats['n_dof']}"
            + (" (extrapolated)" if stats["extrapolated"] else "")
            + (f" -> {out}" if out else "")
        )


def _curve_from_options(ka, kb, kc, pf_min, pf_max) -> pump.PumpCurve:
    return pump.PumpCurve(k_a=ka, k_b=kb, k_c=kc, pf_min=pf_min, pf_max=pf_max)


def _curve_options(fn):
    for decorator in (
        click.option("--ka", type=float, default=pump.PumpCurve().k_a, show_default=True),
        click.option("--kb", type=float, default=pump.PumpCurve().k_b, show_default=True),
        click.option("--kc", type=float, default=pump.PumpCurve().k_c, show_default=True),
        click.option("--pf-min", type=float, default=3.0, show_default=True),
        click.option("--pf-max", type=float, default=5.0, show_default=True),
        click.option("--json", "as_json", is_flag=True),
    ):
        fn = decorator(fn)
    return fn


@cli.group()
def pump_group():
    """Pump head-flow calculations."""


# expose as `podirom pump ...`
pump_group.name = "pump"


@pump_group.command()
@click.option("--omega", type=float, required=True, help="Pump speed, rpm.")
@click.option("--pf", type=float, required=True, help="Flow rate, l/min.")
@_curve_options
def forward(omega, pf, ka, kb, kc, pf_min, pf_max, as_json):
    """Head from speed and flow."""
    curve = _curve_from_options(ka, kb, kc, pf_min, pf_max)
    head = pump.head_from_speed_flow(curve, omega, pf)
    if as_json:
        click.echo(json.dumps({"speed": omega, "flow": pf, "head": head}))
    else:
        click.echo(f"head = {head:.6g} mmHg")


@pump_group.command()
@click.option("--omega", type=float, required=True, help="Pump speed, rpm.")
@click.option("--dp", type=float, required=True, help="Pressure head, mmHg.")
@_curve_options
def inverse(omega, dp, ka, kb, kc, pf_min, pf_max, as_json):
    """Flow from speed and head (range-checked)."""
    curve = _curve_from_options(ka, kb, kc, pf_min, pf_max)
    point = pump.panel1(curve, head=dp, omega=omega)
    if as_json:
        click.echo(json.dumps({"speed": point.speed, "flow": point.flow, "head": point.head}))
    else:
        click.echo(f"flow = {point.flow:.6g} l/min")


@pump_group.command()
@click.option("--omega", type=float, required=True, help="Measured speed, rpm.")
@click.option("--pf", type=float, required=True, help="Measured flow, l/min.")
@_curve_options
def calibrate(omega, pf, ka, kb, kc, pf_min, pf_max, as_json):
    """Head implied by a measured (speed, flow) pair."""
    curve = _curve_from_options(ka, kb, kc, pf_min, pf_max)
    head = pump.panel2_calibrate(curve, omega, pf)
    if as_json:
        click.echo(json.dumps({"speed": omega, "flow": pf, "head": head}))
    else:
        click.echo(f"head = {head:.6g} mmHg")


@pump_group.command()
@click.option("--omega", type=float, required=True, help="Pump speed, rpm.")
@click.option("--n", type=int, default=25, show_default=True, help="Sample count.")
@_curve_options
def curve(omega, n, ka, kb, kc, pf_min, pf_max, as_json):
    """Sample the head-flow curve over the admissible range."""
    curve_ = _curve_from_options(ka, kb, kc, pf_min, pf_max)
    points = pump.curve_samples(curve_, omega, n)
    if as_json:
        click.echo(json.dumps({"omega": omega, "points": points}))
    else:
        for pf, head in points:
            click.echo(f"{pf:.6g},{head:.6g}")


@cli.command()
@click.argument("model_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--console", type=click.Path(exists=True, file_okay=False), default=None,
              help="Serve a built browser console (frontend dir) at /console.")
def serve(model_dir, host, port, console):
    """Run the HTTP service over a directory of .podi models."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(model_dir=model_dir, console_dir=console), host=host, port=port)


cli.add_command(pump_group, name="pump")


def main():
    cli()


if __name__ == "__main__":
    sys.exit(main())
