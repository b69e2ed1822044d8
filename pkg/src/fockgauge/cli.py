"""Batch command line: group inspection, model verification, spectra.

Configuration is one YAML document (see README for the schema); results
are written as a JSON file whose content depends only on the configuration
and seed, never on wall-clock or thread count.  Timings go to stderr.

Exit codes: 0 success, 1 task failure (failed invariant, non-convergence),
2 configuration or input error.
"""

from __future__ import annotations

import json
import os
import sys
import time
from pathlib import Path
from typing import Optional

import click
import numpy as np
import yaml

from . import __version__
from .group_core import (
    GroupCatalogEntry,
    GroupFileError,
    build_builtin,
    character_table,
    load_group_file,
    validate,
)
from .lattice_model import (
    LatticeSpec,
    Model,
    ModelParams,
    build_hamiltonian,
    hamiltonian_terms,
    physical_basis,
    plaquette_trace,
    vacuum_state,
)
from .link_space import GROUP, REP, projector_rep
from .spectra import EigensolveError, eigensolve, expectation, vortex_masses
from .verification import verify_model

THREADS_ENV = "FOCKGAUGE_THREADS"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration handling
# ---------------------------------------------------------------------------

def _load_config(path: str) -> dict:
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    return doc


def _resolve_group(doc: dict, config_dir: Path) -> GroupCatalogEntry:
    group = doc.get("group")
    if not isinstance(group, dict):
        raise ConfigError("config needs a 'group' section")
    if "file" in group:
        path = Path(group["file"])
        if not path.is_absolute():
            path = config_dir / path
        if not path.exists():
            raise ConfigError(f"group file {path} does not exist")
        return load_group_file(path)
    name = group.get("builtin")
    if not name:
        raise ConfigError("group section needs 'builtin' or 'file'")
    params = group.get("params") or {}
    try:
        return build_builtin(str(name), **params)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad group spec: {exc}") from exc


def _resolve_epsilon(raw):
    if raw is None:
        return 1.0
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, list) and len(raw) == 2 and all(
            isinstance(x, (int, float)) for x in raw):
        return complex(raw[0], raw[1])
    if isinstance(raw, list):
        return [_resolve_epsilon(x) for x in raw]
    raise ConfigError(f"cannot parse epsilon value {raw!r}")


def _resolve_model(doc: dict, config_dir: Path, basis_override: Optional[str]) -> Model:
    entry = _resolve_group(doc, config_dir)
    lat_doc = doc.get("lattice")
    if not isinstance(lat_doc, dict):
        raise ConfigError("config needs a 'lattice' section")
    try:
        lattice = LatticeSpec(
            lx=int(lat_doc["lx"]), ly=int(lat_doc["ly"]),
            boundary=lat_doc.get("boundary", "open"),
            include_matter=bool(lat_doc.get("include_matter", False)))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad lattice spec: {exc}") from exc
    p_doc = doc.get("params") or {}
    weights = p_doc.get("electric_weights")
    if weights is not None:
        weights = {str(k): float(v) for k, v in weights.items()}
    params = ModelParams(
        mass=float(p_doc.get("mass", 0.0)),
        epsilon=_resolve_epsilon(p_doc.get("epsilon")),
        coupling=float(p_doc.get("coupling", 1.0)),
        electric_weights=weights,
        magnetic_rep=(str(p_doc["magnetic_rep"])
                      if "magnetic_rep" in p_doc else None),
        staggered=bool(p_doc.get("staggered", True)),
        terms=p_doc.get("terms"),
        include_hc=bool(p_doc.get("include_hc", True)),
    )
    basis = basis_override or doc.get("basis", REP)
    if basis not in (REP, GROUP):
        raise ConfigError(f"basis must be 'rep' or 'group', got {basis!r}")
    try:
        model = Model(entry, lattice, params, basis_tag=basis)
        model.terms  # force parameter validation
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return model


def _validate_tasks(doc: dict) -> None:
    tasks = doc.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        raise ConfigError("config needs a nonempty 'tasks' list")


def _task_options(doc: dict, task_name: str):
    """Options of one entry of the config tasks list, {} if not configured."""
    tasks = doc.get("tasks")
    for item in tasks:
        if isinstance(item, str) and item == task_name:
            return {}
        if isinstance(item, dict) and task_name in item:
            value = item[task_name]
            if value is None:
                return {}
            if isinstance(value, dict):
                return value
            return {"names": value}
    return {}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    return obj


def _emit(payload: dict, output: Optional[str], echo: bool = True):
    text = json.dumps(_jsonify(payload), sort_keys=True, indent=2) + "\n"
    if output:
        Path(output).write_text(text)
        click.echo(f"wrote {output}", err=True)
    elif echo:
        click.echo(text, nl=False)


def _result_skeleton(doc: dict, seed: int, threads: int) -> dict:
    return {
        "artifact": {"name": "fockgauge", "version": __version__},
        "seed": seed,
        "threads": threads,
        "config": doc,
        "tasks": {},
    }


def _report_to_payload(report) -> dict:
    return {
        "passed": report.passed,
        "checks": [
            {"name": c.name, "passed": c.passed, "residual": c.residual,
             "tolerance": c.tolerance}
            for c in report.checks
        ],
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _common_options(fn):
    fn = click.option("--config", "-c", "config_path", required=True,
                      type=click.Path(), help="YAML run configuration")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="override the config seed")(fn)
    fn = click.option("--threads", type=int, default=None,
                      help=f"assembly threads (default ${THREADS_ENV} or 1)")(fn)
    fn = click.option("--output", "-o", type=click.Path(), default=None,
                      help="override the config output path")(fn)
    fn = click.option("--basis", type=click.Choice([REP, GROUP]), default=None,
                      help="override the config link basis")(fn)
    return fn


def _prepare(config_path, seed, threads, output, basis):
    doc = _load_config(config_path)
    _validate_tasks(doc)
    seed = int(doc.get("seed", 0)) if seed is None else seed
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1"))
    output = output or doc.get("output")
    model = _resolve_model(doc, Path(config_path).resolve().parent, basis)
    return doc, model, seed, threads, output


@click.group()
@click.version_option(__version__)
def main():
    """Lattice gauge theory models: build, verify, diagonalize."""


@main.command("group-info")
@click.argument("name", required=False)
@click.option("--param", "-p", "params", multiple=True,
              help="group parameter, e.g. -p N=5 or -p j_max=1/2")
@click.option("--file", "file_path", type=click.Path(), default=None,
              help="load the group from a definition file instead")
def group_info(name, params, file_path):
    """Print order, classes, irrep dimensions and the character table."""
    try:
        if file_path:
            entry = load_group_file(file_path)
        elif name:
            kwargs = {}
            for item in params:
                key, _, value = item.partition("=")
                kwargs[key] = value if "/" in value else (
                    int(value) if value.lstrip("-").isdigit() else value)
            entry = build_builtin(name, **kwargs)
        else:
            raise ConfigError("give a builtin name or --file")
    except (GroupFileError, ConfigError, KeyError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    report = validate(entry)
    if entry.is_lie:
        click.echo(f"group: {entry.name} (truncated Lie)")
        click.echo(f"irreps: {[ir.label for ir in entry.irreps]}")
        click.echo(f"dims: {[ir.dim for ir in entry.irreps]}")
        click.echo(f"casimirs: {[ir.casimir for ir in entry.irreps]}")
        click.echo(f"link space dimension: {entry.dim_sum()}")
    else:
        spec = entry.spec
        table = character_table(entry)
        click.echo(f"group: {entry.name}, order {spec.order}")
        click.echo(f"classes: {table.class_labels} sizes {table.class_sizes.tolist()}")
        click.echo(f"irreps: {[ir.label for ir in entry.irreps]} "
                   f"dims {[ir.dim for ir in entry.irreps]}")
        click.echo(f"sum of dim^2: {entry.dim_sum()} (= order: "
                   f"{entry.dim_sum() == spec.order})")
        click.echo("character table (rows irreps, columns classes):")
        for label, row in zip(table.irrep_labels, table.chi):
            cells = ", ".join(f"{z.real:+.4f}{z.imag:+.4f}i" for z in row)
            click.echo(f"  {label}: {cells}")
    if not report.passed:
        first = report.first_failure()
        click.echo(f"INVALID GROUP: first failing invariant {first.name} "
                   f"(residual {first.residual:.3e})", err=True)
        sys.exit(2)
    click.echo("all group invariants pass "
               f"(max residual {report.max_residual:.3e})")


@main.command()
@_common_options
def verify(config_path, seed, threads, output, basis):
    """Run the full identity suite for the configured model."""
    t0 = time.time()
    try:
        doc, model, seed, threads, output = _prepare(
            config_path, seed, threads, output, basis)
    except (ConfigError, GroupFileError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    report = verify_model(model, seed=seed)
    payload = _result_skeleton(doc, seed, threads)
    payload["tasks"]["verify"] = _report_to_payload(report)
    _emit(payload, output)
    for check in report.checks:
        click.echo(str(check), err=True)
    click.echo(f"verify: {'PASS' if report.passed else 'FAIL'} "
               f"({len(report.checks)} checks, {time.time() - t0:.2f}s)", err=True)
    sys.exit(0 if report.passed else 1)


def _spectrum_payload(model, opts, seed, threads):
    k = int(opts.get("k", 6))
    ham = build_hamiltonian(model, threads=threads)
    result = eigensolve(ham, k=k, seed=seed)
    payload = {
        "method": result.method,
        "eigenvalues": result.eigenvalues,
        "residuals": result.residuals,
        "degeneracies": result.degeneracies(),
    }
    if opts.get("sector") == "physical":
        basis_cols = physical_basis(model)
        h_red = basis_cols.conj().T @ ham.toarray() @ basis_cols
        vals = np.linalg.eigvalsh(h_red)
        payload["physical_sector"] = {
            "dimension": basis_cols.shape[1],
            "eigenvalues": vals[:min(k, len(vals))],
        }
    return payload


@main.command()
@_common_options
def spectrum(config_path, seed, threads, output, basis):
    """Lowest eigenvalues, degeneracy table, optional physical-sector spectrum."""
    t0 = time.time()
    try:
        doc, model, seed, threads, output = _prepare(
            config_path, seed, threads, output, basis)
        opts = _task_options(doc, "spectrum")
    except (ConfigError, GroupFileError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    payload = _result_skeleton(doc, seed, threads)
    try:
        payload["tasks"]["spectrum"] = _spectrum_payload(model, opts, seed, threads)
    except EigensolveError as exc:
        click.echo(f"eigensolve failed: {exc}", err=True)
        sys.exit(1)
    _emit(payload, output)
    click.echo(f"spectrum done in {time.time() - t0:.2f}s", err=True)


OBSERVABLE_NAMES = ("electric_energy", "magnetic_energy", "mass_energy",
                    "tunneling_energy", "plaquette_trace", "trivial_rep_weight")


def _observable_values(model, names, state, threads):
    values = {}
    terms = None
    for name in names:
        if name.endswith("_energy"):
            if terms is None:
                terms = hamiltonian_terms(model, threads=threads)
            term_key = name.removesuffix("_energy")
            if term_key not in terms:
                raise ConfigError(f"model has no {term_key} term")
            values[name] = expectation(terms[term_key], state, name).value
        elif name == "plaquette_trace":
            if not model.lattice.plaquettes:
                raise ConfigError("model has no plaquettes")
            acc = 0.0
            for p in range(len(model.lattice.plaquettes)):
                w = plaquette_trace(model, p)
                herm = 0.5 * (w.matrix + w.matrix.conj().T)
                acc += expectation(herm, state, name).value
            values[name] = acc / len(model.lattice.plaquettes)
        elif name == "trivial_rep_weight":
            from .lattice_model import embed_link
            proj = projector_rep(model.link_space, model.entry.trivial_label())
            if model.basis_tag == GROUP:
                proj = proj.to_basis(GROUP)
            acc = 0.0
            for link in model.lattice.links:
                acc += expectation(embed_link(model, proj, link.index),
                                   state, name).value
            values[name] = acc / max(model.lattice.n_links, 1)
        else:
            raise ConfigError(f"unknown observable {name!r}; "
                              f"known: {OBSERVABLE_NAMES}")
    return values


@main.command()
@_common_options
def observables(config_path, seed, threads, output, basis):
    """Expectation values on the ground state (or the bare vacuum)."""
    try:
        doc, model, seed, threads, output = _prepare(
            config_path, seed, threads, output, basis)
        opts = _task_options(doc, "observables")
        names = opts.get("names") or ["electric_energy", "plaquette_trace"]
        state_kind = opts.get("state", "ground")
    except (ConfigError, GroupFileError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    try:
        if state_kind == "vacuum":
            state = vacuum_state(model)
        elif state_kind == "ground":
            ham = build_hamiltonian(model, threads=threads)
            state = eigensolve(ham, k=1, seed=seed).eigenvectors[:, 0]
        else:
            click.echo(f"config error: unknown state {state_kind!r}", err=True)
            sys.exit(2)
        values = _observable_values(model, names, state, threads)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except EigensolveError as exc:
        click.echo(f"eigensolve failed: {exc}", err=True)
        sys.exit(1)
    payload = _result_skeleton(doc, seed, threads)
    payload["tasks"]["observables"] = {"state": state_kind, "values": values}
    _emit(payload, output)


@main.command("vortex-masses")
@_common_options
def vortex_masses_cmd(config_path, seed, threads, output, basis):
    """Per-conjugacy-class magnetic excitation gaps on a single plaquette."""
    try:
        doc, model, seed, threads, output = _prepare(
            config_path, seed, threads, output, basis)
    except (ConfigError, GroupFileError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    if model.entry.is_lie:
        click.echo("config error: vortex masses need a finite group", err=True)
        sys.exit(2)
    gaps = vortex_masses(model.entry, j=model.magnetic_rep,
                         coupling=model.params.coupling)
    payload = _result_skeleton(doc, seed, threads)
    payload["tasks"]["vortex_masses"] = gaps
    _emit(payload, output)


if __name__ == "__main__":
    main()
