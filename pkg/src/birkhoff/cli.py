"""Command-line front end.

Subcommands: link, slk, section, helicity, asymptotic, verify-hopf. All
randomness flows from --seed; reruns with identical flags and seed produce
byte-identical output files. Outputs are written atomically (temp file plus
rename). Exit status: 0 success, 1 usage or input errors, 2 domain errors
(the error class name goes to stderr).

Report-style commands (asymptotic, verify-hopf) render a matplotlib figure
next to their delimited output unless --no-plot is given.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click

from . import __version__
from .asymptotics import (asymptotic_genus_experiment, estimate_helicity,
                          experiment_csv_rows, seifert_fibonacci_family)
from .curve_io import (fraction_to_json, load_curves_with_normals,
                       write_json_atomic, write_text_atomic)
from .errors import BirkhoffError, InputError
from .framing import RationalFraming, explicit_framing, self_linking
from .flows import hopf_fibers, hopf_field, seifert_field
from .geometry import WeightedLink
from .linking import linking_matrix, linking_number_detailed
from .sections import section_topology

DEFAULTS = {
    "seed": 0,
    "step": 1e-2,
    "eps_int": 1e-6,
    "eps_frame": 1e-3,
    "eps_sep": 1e-6,
    "delta_pole": 0.05,
    "threads": 1,
}


def _load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("config file must contain a JSON object")
    unknown = set(doc) - set(DEFAULTS)
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return doc


def _merge_config(config_path, **flags) -> dict:
    """Precedence: flags > config file > defaults."""
    fromfile = _load_config_file(config_path) if config_path else {}
    merged = {}
    for key, default in DEFAULTS.items():
        if flags.get(key) is not None:
            merged[key] = flags[key]
        elif key in fromfile:
            try:
                merged[key] = type(default)(fromfile[key])
            except (TypeError, ValueError) as exc:
                raise InputError(f"config key {key!r}: {exc}") from exc
        else:
            merged[key] = default
    for key in ("eps_int", "eps_frame", "eps_sep", "delta_pole", "step"):
        if merged[key] <= 0:
            raise InputError(f"{key} must be positive")
    return merged


def _common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=False),
                      default=None, help="JSON config file (flags win).")(fn)
    fn = click.option("--seed", type=int, default=None, help="Random seed.")(fn)
    fn = click.option("--step", type=float, default=None,
                      help="Integrator step size.")(fn)
    fn = click.option("--eps-int", "eps_int", type=float, default=None,
                      help="Integer-residual gate for linking sums.")(fn)
    fn = click.option("--eps-frame", "eps_frame", type=float, default=None,
                      help="Framing-equation tolerance.")(fn)
    fn = click.option("--eps-sep", "eps_sep", type=float, default=None,
                      help="Curve separation tolerance.")(fn)
    fn = click.option("--delta-pole", "delta_pole", type=float, default=None,
                      help="Pole exclusion radius (radians).")(fn)
    fn = click.option("--threads", type=int, default=None,
                      help="Worker cap for Monte-Carlo pair evaluation.")(fn)
    return fn


def _parse_field(spec: str, scale: float):
    if spec == "hopf":
        return hopf_field(scale=scale)
    if spec.startswith("seifert:"):
        body = spec.split(":", 1)[1]
        try:
            p, q = (int(x) for x in body.split(","))
        except ValueError as exc:
            raise InputError(f"bad seifert spec {spec!r}, expected seifert:p,q") from exc
        try:
            return seifert_field(p, q, scale=scale)
        except BirkhoffError as exc:
            raise InputError(str(exc)) from exc
    if spec.startswith("file:"):
        raise InputError("field files are not supported in this version")
    raise InputError(f"unknown field {spec!r} (try hopf or seifert:p,q)")


def _parse_multiplicities(text: str, m: int) -> list[int]:
    try:
        mults = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad multiplicity list {text!r}") from exc
    if len(mults) != m:
        raise InputError(f"{len(mults)} multiplicities for {m} curves")
    return mults


def _framings_for(curves, normals, framing_kind, field, k_f):
    if framing_kind == "zeta":
        if field is None:
            raise InputError("--framing zeta needs --field")
        base = field.zeta_framing()
        return [RationalFraming(base, k_f)] * len(curves)
    framings = []
    for curve, nrm in zip(curves, normals):
        if nrm is None:
            raise InputError(
                f"curve {curve.name!r} has no normals array in the file")
        framings.append(RationalFraming(explicit_framing(nrm), k_f))
    return framings


def _csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


@click.group()
@click.version_option(version=__version__, prog_name="birkhoff")
def cli():
    """Surface topology from boundary linking data of flows on the 3-sphere."""


@cli.command()
@click.option("--curves", "curves_path", required=True, type=click.Path())
@click.option("--resample", type=int, default=None,
              help="Resample every curve to this vertex count first.")
@click.option("--out", "out_path", type=click.Path(), default=None)
@_common_options
def link(curves_path, resample, out_path, config_path, **flags):
    """Pairwise linking numbers of the curves in a file."""
    from .geometry import curve_resample
    cfg = _merge_config(config_path, **flags)
    curves, _ = load_curves_with_normals(curves_path)
    if resample:
        curves = [curve_resample(c, resample) for c in curves]
    if len(curves) == 2:
        res = linking_number_detailed(curves[0], curves[1],
                                      eps_int=cfg["eps_int"],
                                      eps_sep=cfg["eps_sep"],
                                      delta_pole=cfg["delta_pole"])
        click.echo(str(res.value))
        doc = {"names": [c.name for c in curves], "lk": res.value,
               "residual": res.residual}
    else:
        lk = linking_matrix(WeightedLink(tuple(curves), tuple([1] * len(curves)),
                                         eps_sep=cfg["eps_sep"]),
                            eps_int=cfg["eps_int"], eps_sep=cfg["eps_sep"],
                            delta_pole=cfg["delta_pole"])
        doc = lk.to_json()
        click.echo(json.dumps(doc, indent=2))
    if out_path:
        write_json_atomic(out_path, doc)


@cli.command()
@click.option("--curves", "curves_path", required=True, type=click.Path())
@click.option("--framing", "framing_kind", type=click.Choice(["zeta", "normals"]),
              default="zeta", show_default=True)
@click.option("--field", "field_spec", default=None,
              help="hopf | seifert:p,q (needed for --framing zeta).")
@click.option("--scale", type=float, default=1.0, show_default=True,
              help="Divide the field by this factor.")
@click.option("--kf", "k_f", type=int, default=1, show_default=True,
              help="Longitudinal winding of the framing.")
@click.option("--epsilon", type=float, default=None,
              help="Push-off offset (default: half the reach proxy).")
@click.option("--out", "out_path", type=click.Path(), default=None)
@_common_options
def slk(curves_path, framing_kind, field_spec, scale, k_f, epsilon, out_path,
        config_path, **flags):
    """Self-linking numbers of the curves with respect to a framing."""
    _merge_config(config_path, **flags)
    curves, normals = load_curves_with_normals(curves_path)
    field = _parse_field(field_spec, scale) if field_spec else None
    framings = _framings_for(curves, normals, framing_kind, field, k_f)
    values = [self_linking(c, f, epsilon=epsilon)
              for c, f in zip(curves, framings)]
    doc = {"names": [c.name for c in curves],
           "slk": [fraction_to_json(v) for v in values]}
    click.echo(json.dumps(doc, indent=2))
    if out_path:
        write_json_atomic(out_path, doc)


@cli.command()
@click.option("--curves", "curves_path", required=True, type=click.Path())
@click.option("--mult", "mult_text", required=True,
              help="Comma-separated integer multiplicities, one per curve.")
@click.option("--framing", "framing_kind", type=click.Choice(["zeta", "normals"]),
              default="zeta", show_default=True)
@click.option("--field", "field_spec", default=None)
@click.option("--scale", type=float, default=1.0, show_default=True)
@click.option("--kf", "k_f", type=int, default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@_common_options
def section(curves_path, mult_text, framing_kind, field_spec, scale, k_f,
            out_path, config_path, **flags):
    """Topology of the transverse surface bounded by the weighted curves."""
    cfg = _merge_config(config_path, **flags)
    curves, normals = load_curves_with_normals(curves_path)
    mults = _parse_multiplicities(mult_text, len(curves))
    field = _parse_field(field_spec, scale) if field_spec else None
    framings = _framings_for(curves, normals, framing_kind, field, k_f)
    link_obj = WeightedLink(tuple(curves), tuple(mults), eps_sep=cfg["eps_sep"])
    topo = section_topology(link_obj, framings, eps_int=cfg["eps_int"],
                            delta_pole=cfg["delta_pole"])
    doc = topo.to_json()
    click.echo(json.dumps(doc, indent=2))
    if out_path:
        write_json_atomic(out_path, doc)


@cli.command()
@click.option("--field", "field_spec", default="hopf", show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True)
@click.option("--T", "duration", type=float, required=True,
              help="Arc duration per sampled point.")
@click.option("--pairs", type=int, default=100, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@_common_options
def helicity(field_spec, scale, duration, pairs, out_path, config_path, **flags):
    """Monte-Carlo helicity estimate (average asymptotic linking number)."""
    cfg = _merge_config(config_path, **flags)
    if duration <= 0:
        raise InputError("--T must be positive")
    if pairs < 1:
        raise InputError("--pairs must be at least 1")
    field = _parse_field(field_spec, scale)
    est = estimate_helicity(field, T=duration, num_pairs=pairs,
                            seed=cfg["seed"], h=cfg["step"],
                            eps_sep=cfg["eps_sep"], workers=cfg["threads"])
    doc = est.to_json()
    click.echo(json.dumps(doc, indent=2))
    if out_path:
        write_json_atomic(out_path, doc)


@cli.command("asymptotic")
@click.option("--family", type=click.Choice(["seifert-fib"]),
              default="seifert-fib", show_default=True)
@click.option("--depth", type=int, default=6, show_default=True,
              help="Number of family members, starting at (1,2).")
@click.option("--pairs", type=int, default=4, show_default=True,
              help="Monte-Carlo pairs per helicity reference.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="CSV output path; a figure lands next to it.")
@click.option("--plot/--no-plot", "do_plot", default=True, show_default=True)
@_common_options
def asymptotic(family, depth, pairs, out_path, do_plot, config_path, **flags):
    """Genus growth of torus-knot orbits against half the helicity."""
    cfg = _merge_config(config_path, **flags)
    if depth < 0:
        raise InputError("depth must be non-negative")
    if pairs < 1:
        raise InputError("--pairs must be at least 1")
    members = seifert_fibonacci_family(depth)
    rows = asymptotic_genus_experiment(members, hel_pairs=pairs,
                                       hel_seed=cfg["seed"],
                                       hel_step=cfg["step"],
                                       eps_frame=cfg["eps_frame"],
                                       workers=cfg["threads"])
    table = experiment_csv_rows(rows)
    text = _csv_text(table)
    click.echo(text, nl=False)
    if out_path:
        write_text_atomic(out_path, text)
        if do_plot and rows:
            from .report import figure_path_for, plot_asymptotic_trend
            plot_asymptotic_trend(rows, figure_path_for(out_path))


@cli.command("verify-hopf")
@click.option("--max-m", "max_m", type=int, default=6, show_default=True)
@click.option("--vertices", type=int, default=128, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="CSV output path; a figure lands next to it.")
@click.option("--plot/--no-plot", "do_plot", default=True, show_default=True)
@_common_options
def verify_hopf(max_m, vertices, out_path, do_plot, config_path, **flags):
    """Recompute the multi-fiber section table from first principles.

    For m = 1..max-m Hopf fibers with unit multiplicities the pipeline must
    reproduce chi = -m(m-2) and genus = 1 + m(m-3)/2 exactly.
    """
    cfg = _merge_config(config_path, **flags)
    if max_m < 1:
        raise InputError("--max-m must be at least 1")
    field = hopf_field()
    rows = []
    all_ok = True
    for m in range(1, max_m + 1):
        fibers = hopf_fibers(m, n_vertices=vertices)
        link_obj = WeightedLink(tuple(fibers), tuple([1] * m),
                                eps_sep=cfg["eps_sep"])
        topo = section_topology(link_obj, field.zeta_framing(),
                                eps_int=cfg["eps_int"])
        chi_expect = -m * (m - 2)
        genus_expect = 1 + m * (m - 3) // 2  # m(m-3) is always even
        ok = (topo.chi == chi_expect and topo.genus == genus_expect)
        all_ok = all_ok and ok
        rows.append({"m": m, "chi": topo.chi, "genus": topo.genus,
                     "chi_expected": chi_expect, "genus_expected": genus_expect,
                     "ok": ok})
    table = [["m", "chi", "genus", "chi_expected", "genus_expected", "ok"]]
    for r in rows:
        table.append([r["m"], r["chi"], r["genus"], r["chi_expected"],
                      r["genus_expected"], r["ok"]])
    text = _csv_text(table)
    click.echo(text, nl=False)
    if out_path:
        write_text_atomic(out_path, text)
        if do_plot:
            from .report import figure_path_for, plot_hopf_table
            plot_hopf_table(rows, figure_path_for(out_path))
    if not all_ok:
        raise BirkhoffError("multi-fiber table does not match the closed forms")


def main(argv=None) -> int:
    """Entry point with the documented exit-status mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except InputError as exc:
        click.echo(f"InputError: {exc}", err=True)
        return 1
    except BirkhoffError as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        return 2
    except click.exceptions.Exit as exc:  # --help, --version
        return int(exc.exit_code)


if __name__ == "__main__":
    sys.exit(main())
