"""Batch command-line front end.

Subcommands expose every computation with machine-readable output:

* ``classify``   discrete-series parameters, cone membership, properness
* ``branch``     branching decompositions and the one-in-three audit
* ``ode-dim``    global L^2 connection dimensions over an m-range
* ``volume``     reduced-sphere volume by quadrature
* ``ode-system`` matrix dump of one system (JSON or CSV)
* ``check``      the acceptance suite (exit 0 iff everything passes)

Output is deterministic for a fixed invocation: JSON is emitted with
sorted keys and a schema marker, CSV uses comma separators and dot
decimals.  Grid commands fan out over worker threads; the env variable
ORBITLAB_THREADS overrides the parallel width.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import click

from . import acceptance
from .discrete_series import (
    DiscreteSeriesParam,
    branch_to_B,
    branch_to_B1,
    central_character_selects,
    from_harish_chandra,
)
from .irregular_connection import AmbiguousRank, NumericFailure, global_l2_dimension
from .lie_su21 import InvalidParameter
from .moment_projection import (
    admissible_orbits_in_image,
    holomorphic_cone,
    p1_properness,
    p_properness,
)
from .coadjoint_orbits import orbit_to_repr
from .ode_builder import build_system, dump_system
from .symplectic_reduction import reduced_volume

EXIT_INVALID = 2
EXIT_NUMERIC = 3


@dataclass(frozen=True)
class RunConfig:
    """Numeric knobs shared by grid commands."""

    z0: float = 0.1
    z1: float = 10.0
    rank_tol: float = 1e-6
    integrator_tol: float = 1e-12
    quadrature_n: int = 2000
    n_max: int = 10
    fmt: str = "json"

    def __post_init__(self):
        if min(self.z0, self.z1, self.rank_tol, self.integrator_tol) <= 0:
            raise InvalidParameter("tolerances and window ends must be positive")
        if self.n_max < 1:
            raise InvalidParameter("n_max must be at least 1")


def _threads() -> int:
    env = os.environ.get("ORBITLAB_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _emit(payload, fmt: str, out, pretty_lines=None, csv_rows=None):
    if fmt == "json":
        text = json.dumps(payload, sort_keys=True, indent=2)
    elif fmt == "csv":
        if csv_rows is None:
            raise InvalidParameter("no CSV layout for this command")
        header, rows = csv_rows
        lines = [",".join(header)]
        lines += [",".join(str(v) for v in row) for row in rows]
        text = "\n".join(lines)
    elif fmt == "pretty":
        text = "\n".join(pretty_lines if pretty_lines is not None
                         else [json.dumps(payload, sort_keys=True)])
    else:
        raise InvalidParameter(f"unknown format {fmt!r}")
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _sign_str(sign: int) -> str:
    return "+" if sign > 0 else "-"


def _parse_sign(s: str) -> int:
    if s in ("+", "plus"):
        return 1
    if s in ("-", "minus"):
        return -1
    raise InvalidParameter(f"sign must be '+' or '-', got {s!r}")


def _parse_m_range(spec: str):
    if ".." in spec:
        lo, hi = spec.split("..")
        return list(range(int(lo), int(hi) + 1))
    if "," in spec:
        return [int(x) for x in spec.split(",")]
    return [int(spec)]


def _ds_from_options(f0h, f0z):
    try:
        return DiscreteSeriesParam(f0h, f0z)
    except InvalidParameter as exc:
        raise click.exceptions.Exit(EXIT_INVALID) from _echo_err(exc)


def _echo_err(exc):
    click.echo(f"error: {exc}", err=True)
    return exc


@click.group()
def main():
    """Coadjoint orbits, branching tables and L^2 connection analysis for SU(2,1)."""


@main.command()
@click.option("--n1", type=int, required=True, help="lam(H12)")
@click.option("--n2", type=int, default=None, help="lam(H13) (chamber D3)")
@click.option("--n3", type=int, default=None, help="lam(H31) (chamber D1) / lam(H23) (D2)")
@click.option("--chamber", type=click.Choice(["D1", "D2", "D3"]), required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "pretty"]),
              default="json")
@click.option("--out", type=click.Path(), default=None)
def classify(n1, n2, n3, chamber, fmt, out):
    """Classify a Harish-Chandra parameter and report properness."""
    second = n2 if chamber == "D3" else n3
    if second is None:
        _echo_err(InvalidParameter("missing second parameter for the chamber"))
        sys.exit(EXIT_INVALID)
    try:
        ds = from_harish_chandra(n1, second, chamber)
        cone = holomorphic_cone(ds.f0H, ds.f0Z)
        v1 = p1_properness(ds.f0H, ds.f0Z)
        v = p_properness(ds.f0H, ds.f0Z)
    except InvalidParameter as exc:
        _echo_err(exc)
        sys.exit(EXIT_INVALID)
    payload = {
        "schema": 1,
        "f0H": ds.f0H,
        "f0Z": ds.f0Z,
        "class": ds.series_class.value,
        "q_lambda": ds.q_lambda,
        "holomorphic_cone": cone,
        "p1": {"proper": v1.proper, "weakly_proper": v1.weakly_proper},
        "p": {"proper": v.proper, "weakly_proper": v.weakly_proper},
    }
    pretty = [
        f"(f0H, f0Z) = ({ds.f0H}, {ds.f0Z})  class {ds.series_class.value}"
        f"  q_lambda {ds.q_lambda}",
        f"holomorphic cone: {cone}",
        f"p1: proper={v1.proper} weakly_proper={v1.weakly_proper}",
        f"p : proper={v.proper} weakly_proper={v.weakly_proper}",
    ]
    csv_rows = (["f0H", "f0Z", "class", "cone", "p1_proper", "p1_weak", "p_proper",
                 "p_weak"],
                [[ds.f0H, ds.f0Z, ds.series_class.value, cone, v1.proper,
                  v1.weakly_proper, v.proper, v.weakly_proper]])
    _emit(payload, fmt, out, pretty, csv_rows)


@main.command()
@click.option("--f0h", "--f0H", "f0h", type=int, required=True)
@click.option("--f0z", "--f0Z", "f0z", type=int, required=True)
@click.option("--target", type=click.Choice(["B", "B1"]), default="B")
@click.option("--n-max", type=int, default=10)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "pretty"]),
              default="json")
@click.option("--out", type=click.Path(), default=None)
def branch(f0h, f0z, target, n_max, fmt, out):
    """Branching decomposition plus the one-in-three character audit."""
    try:
        ds = DiscreteSeriesParam(f0h, f0z)
        dec = branch_to_B(ds) if target == "B" else branch_to_B1(ds)
        cfg = RunConfig(n_max=n_max, fmt=fmt)
    except InvalidParameter as exc:
        _echo_err(exc)
        sys.exit(EXIT_INVALID)
    payload = {"schema": 1, **dec.to_json(cfg.n_max)}
    pretty = [f"restriction of ({ds.f0H}, {ds.f0Z}) [{ds.series_class.value}] "
              f"to {target}:"]
    if target == "B1" and not dec.is_admissible():
        pretty.append("not admissible: infinite multiplicities")
        payload["admissible"] = False
    elif target == "B1":
        payload["admissible"] = True
    rows = []
    for e in payload["entries"]:
        rows.append([e["m"], e["sign"], e["mult"]])
        pretty.append(f"  m={e['m']} sign={e['sign']} mult={e['mult']}")
    if target == "B":
        audit = []
        img = admissible_orbits_in_image(ds)
        for orbit in img.orbits(n_max=cfg.n_max):
            label = orbit_to_repr(orbit)
            audit.append({
                "m": label.m,
                "sign": _sign_str(label.sign),
                "r": str(orbit.r),
                "selected": central_character_selects(ds, label.m),
            })
        payload["in_image_audit"] = audit
        chosen = sum(a["selected"] for a in audit)
        pretty.append(f"character audit: {chosen} of {len(audit)} in-image "
                      "admissible orbits selected")
    _emit(payload, fmt, out, pretty, (["m", "sign", "mult"], rows))


@main.command(name="ode-dim")
@click.option("--f0h", "--f0H", "f0h", type=int, required=True)
@click.option("--f0z", "--f0Z", "f0z", type=int, required=True)
@click.option("--m", "m_spec", type=str, required=True, help="e.g. 0..6 or 2,4")
@click.option("--sign", type=str, required=True)
@click.option("--z0", type=float, default=0.1)
@click.option("--z1", type=float, default=10.0)
@click.option("--rank-tol", type=float, default=1e-6)
@click.option("--integrator-tol", type=float, default=1e-12)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "pretty"]),
              default="json")
@click.option("--out", type=click.Path(), default=None)
def ode_dim(f0h, f0z, m_spec, sign, z0, z1, rank_tol, integrator_tol, fmt, out):
    """Global L^2 dimensions of the systems for an m-range."""
    try:
        ds = DiscreteSeriesParam(f0h, f0z)
        sgn = _parse_sign(sign)
        ms = _parse_m_range(m_spec)
        cfg = RunConfig(z0=z0, z1=z1, rank_tol=rank_tol,
                        integrator_tol=integrator_tol, fmt=fmt)
        systems = [build_system(ds, m, sgn) for m in ms]
    except InvalidParameter as exc:
        _echo_err(exc)
        sys.exit(EXIT_INVALID)

    def run(sysm):
        return global_l2_dimension(sysm, z0=cfg.z0, z1=cfg.z1, tol=cfg.rank_tol,
                                   integrator_tol=cfg.integrator_tol)

    try:
        with ThreadPoolExecutor(max_workers=_threads()) as pool:
            results = list(pool.map(run, systems))
    except (AmbiguousRank, NumericFailure) as exc:
        _echo_err(exc)
        sys.exit(EXIT_NUMERIC)
    rows = []
    pretty = [f"(f0H, f0Z) = ({ds.f0H}, {ds.f0Z}), sign {sign}"]
    for m, res in zip(ms, results):
        rows.append({
            "f0H": ds.f0H, "f0Z": ds.f0Z, "m": m, "sign": sign, "dim": res.dim,
            "details": res.details(),
        })
        pretty.append(f"  m={m}: dim={res.dim} (rank {res.rank} of "
                      f"{res.basis_dim})")
    payload = {"schema": 1, "results": rows}
    csv_rows = (["m", "sign", "dim", "rank", "basis_dim"],
                [[m, sign, r.dim, r.rank, r.basis_dim]
                 for m, r in zip(ms, results)])
    _emit(payload, fmt, out, pretty, csv_rows)


@main.command()
@click.option("--f0h", "--f0H", "f0h", type=int, required=True)
@click.option("--f0z", "--f0Z", "f0z", type=int, required=True)
@click.option("--n", type=int, default=2000)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "pretty"]),
              default="json")
@click.option("--out", type=click.Path(), default=None)
def volume(f0h, f0z, n, fmt, out):
    """Liouville volume of the reduced sphere (holomorphic cone only)."""
    try:
        val = reduced_volume(f0h, f0z, n)
    except InvalidParameter as exc:
        _echo_err(exc)
        sys.exit(EXIT_INVALID)
    payload = {"schema": 1, "f0H": f0h, "f0Z": f0z, "n": n, "volume": val}
    _emit(payload, fmt, out, [f"volume = {val!r}"],
          (["f0H", "f0Z", "n", "volume"], [[f0h, f0z, n, repr(val)]]))


@main.command(name="ode-system")
@click.option("--f0h", "--f0H", "f0h", type=int, required=True)
@click.option("--f0z", "--f0Z", "f0z", type=int, required=True)
@click.option("--m", type=int, required=True)
@click.option("--sign", type=str, required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--out", type=click.Path(), default=None)
def ode_system(f0h, f0z, m, sign, fmt, out):
    """Dump the matrices of one system for external verification."""
    try:
        ds = DiscreteSeriesParam(f0h, f0z)
        text = dump_system(build_system(ds, m, _parse_sign(sign)), fmt)
    except InvalidParameter as exc:
        _echo_err(exc)
        sys.exit(EXIT_INVALID)
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


@main.command()
@click.option("--all", "run_all_flag", is_flag=True, default=False)
@click.option("--criterion", type=int, default=None)
def check(run_all_flag, criterion):
    """Run the acceptance suite; exit 0 iff every criterion passes."""
    if criterion is not None:
        results = [acceptance.run_criterion(criterion)]
    elif run_all_flag:
        results = acceptance.run_all(echo=lambda s: None)
    else:
        _echo_err(InvalidParameter("pass --all or --criterion N"))
        sys.exit(EXIT_INVALID)
    ok = True
    for r in results:
        click.echo(r.line())
        ok = ok and r.ok
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
