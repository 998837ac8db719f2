"""Batch front end: config in, CSV + summary + figure out.

Invocation is always ``qfi --config <file>``; the command itself lives in the
config's ``[run]`` section, so a run is reproducible from the one file.  The
grammar is a flat INI-like key-value format (exact EBNF in the README);
parsing is strict by default — every key is either consumed or rejected by
name with its line number.

Artifacts land in ``--out`` as ``qfi_<command>_<run_id>.{csv,txt,png}`` where
``run_id`` is taken from the config or defaults to a hash of config text plus
seed.  The CSV is the data contract: identical config and seed produce
byte-identical bytes, with figures and the text summary rendered alongside as
non-contractual conveniences.  Exit codes: 0 success, 1 config error, 2
computation error (a gap closed, a kernel was ambiguous, ...).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import figures
from .cayley import CayleyPair, bounded_transform
from .core_linalg import (_opnorm, basis_projection, nambu_involution,
                          pfaffian)
from .errors import ComputationError, ConfigError, QfiError
from .indices import (GroupElement, SymmetryData, equivariant_kernel_character,
                      pair_index)
from .locality import locality_report
from .models import _ALLOWED_PARAMS, ModelSpec, build_bdg
from .sampling import conjugated_pair, random_antisymmetric, random_orthogonal

log = logging.getLogger("qfi")

_COMMANDS = ("build", "index", "sweep", "locality", "verify")

_SECTIONS_BY_COMMAND = {
    "build": ("run", "model", "tolerances"),
    "index": ("run", "model", "reference", "symmetry", "tolerances"),
    "sweep": ("run", "model", "reference", "sweep", "symmetry", "tolerances"),
    "locality": ("run", "model", "reference", "locality", "tolerances"),
    "verify": ("run", "tolerances"),
}

_TOL_DEFAULTS = {
    "kernel_tol": 1e-7,
    "gap_tol": 1e-8,
    "locality_tol": 1e-8,
    "identity_tol": 1e-10,
}

_BOUNDARIES = ("open", "periodic", "antiperiodic")


@dataclass(frozen=True)
class RunConfig:
    """A fully validated run description (defaults already filled)."""

    command: str
    run_id: str
    seed: int
    model: Optional[ModelSpec] = None
    reference: Optional[ModelSpec] = None
    sweep_param: Optional[str] = None
    sweep_grid: tuple = ()
    kappa_count: int = 0
    group: str = "none"
    tolerances: dict = field(default_factory=dict)
    locality_opts: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# parsing


def _split_sections(text: str):
    """Raw pass: ``{section: {key: (value, line)}}`` plus section lines."""
    sections: dict = {}
    section_lines: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}",
                                  line=lineno)
            name = line[1:-1].strip()
            if name in sections:
                raise ConfigError(f"duplicate section [{name}]", line=lineno)
            sections[name] = {}
            section_lines[name] = lineno
            current = name
            continue
        if "=" not in line:
            raise ConfigError(
                f"expected 'key = value' or '[section]', got {raw.strip()!r}",
                line=lineno,
            )
        if current is None:
            raise ConfigError("key-value pair before any [section]",
                              line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError("empty key", line=lineno)
        if key in sections[current]:
            raise ConfigError(f'duplicate key "{key}" in [{current}]',
                              line=lineno)
        sections[current][key] = (value, lineno)
    return sections, section_lines


def _take(section: dict, key: str, default=None):
    if key in section:
        value, lineno = section.pop(key)
        return value, lineno
    return default, None


def _reject_leftovers(section: dict, name: str, strict: bool, allowed):
    for key, (_, lineno) in sorted(section.items(), key=lambda kv: kv[1][1]):
        msg = (f'unknown key "{key}" in [{name}]; '
               f"allowed: {', '.join(sorted(allowed))}")
        if strict:
            raise ConfigError(msg, line=lineno)
        log.warning("%s (line %d, ignored)", msg, lineno)
    section.clear()


def _as_int(value: str, lineno, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f'"{key}" expects an integer, got {value!r}',
                          line=lineno) from None


def _as_float(value: str, lineno, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f'"{key}" expects a number, got {value!r}',
                          line=lineno) from None


def _as_scalar(value: str, lineno, key: str):
    try:
        return int(value)
    except ValueError:
        return _as_float(value, lineno, key)


def _parse_model(section: dict, name: str, strict: bool) -> ModelSpec:
    kind, kind_line = _take(section, "kind")
    if kind is None:
        raise ConfigError(f'[{name}] is missing required key "kind"')
    if kind not in _ALLOWED_PARAMS:
        raise ConfigError(
            f"unknown model kind {kind!r}; choose from "
            f"{', '.join(sorted(_ALLOWED_PARAMS))}", line=kind_line,
        )
    size_val, size_line = _take(section, "size", "8")
    parts = [p.strip() for p in size_val.split(",")]
    if len(parts) == 1:
        size = _as_int(parts[0], size_line, "size")
    elif len(parts) == 2:
        size = (_as_int(parts[0], size_line, "size"),
                _as_int(parts[1], size_line, "size"))
    else:
        raise ConfigError('"size" expects an integer or "Lx, Ly"',
                          line=size_line)
    boundary, bline = _take(section, "boundary", "open")
    if boundary not in _BOUNDARIES:
        raise ConfigError(
            f'"boundary" must be one of {", ".join(_BOUNDARIES)}, '
            f"got {boundary!r}", line=bline,
        )
    params = {}
    allowed = _ALLOWED_PARAMS[kind]
    for key in sorted(section, key=lambda k: section[k][1]):
        value, lineno = section[key]
        if key not in allowed:
            msg = (f'unknown key "{key}" in [{name}] for kind {kind}; '
                   f"allowed: {', '.join(sorted(allowed))}")
            if strict:
                raise ConfigError(msg, line=lineno)
            log.warning("%s (line %d, ignored)", msg, lineno)
            continue
        params[key] = _as_scalar(value, lineno, key)
    section.clear()
    return ModelSpec(kind=kind, params=params, size=size, boundary=boundary)


def _parse_grid(section: dict) -> tuple:
    grid_val, grid_line = _take(section, "grid")
    start_val, start_line = _take(section, "start")
    stop_val, stop_line = _take(section, "stop")
    step_val, step_line = _take(section, "step")
    if grid_val is not None:
        if any(v is not None for v in (start_val, stop_val, step_val)):
            raise ConfigError('give either "grid" or "start/stop/step", '
                              "not both", line=grid_line)
        values = [
            _as_float(p.strip(), grid_line, "grid")
            for p in grid_val.split(",") if p.strip()
        ]
        if not values:
            raise ConfigError('"grid" must list at least one value',
                              line=grid_line)
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError('"grid" values must be strictly increasing',
                              line=grid_line)
        return tuple(values)
    if None in (start_val, stop_val, step_val):
        raise ConfigError('[sweep] needs "grid" or all of "start", "stop", '
                          '"step"')
    start = _as_float(start_val, start_line, "start")
    stop = _as_float(stop_val, stop_line, "stop")
    step = _as_float(step_val, step_line, "step")
    if step <= 0:
        raise ConfigError('"step" must be positive', line=step_line)
    if stop < start:
        raise ConfigError('"stop" must not be below "start"', line=stop_line)
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + k * step for k in range(count))


def parse_config(text: str, strict: bool = True,
                 seed_override: Optional[int] = None) -> RunConfig:
    """Parse and validate a config; every key is consumed or rejected.

    Raises
    ------
    ConfigError
        With the offending line number and key name where applicable.
    """
    sections, section_lines = _split_sections(text)

    run_sec = sections.pop("run", None)
    if run_sec is None:
        raise ConfigError("missing required section [run]")
    command, cmd_line = _take(run_sec, "command")
    if command is None:
        raise ConfigError('[run] is missing required key "command"')
    if command not in _COMMANDS:
        raise ConfigError(
            f"unknown command {command!r}; choose from {', '.join(_COMMANDS)}",
            line=cmd_line,
        )
    seed_val, seed_line = _take(run_sec, "seed")
    seed = _as_int(seed_val, seed_line, "seed") if seed_val is not None else 0
    if seed_override is not None:
        seed = int(seed_override)
    if seed < 0:
        raise ConfigError('"seed" must be nonnegative', line=seed_line)
    run_id_val, _ = _take(run_sec, "run_id")
    run_id = run_id_val or hashlib.sha256(
        (text + "\n" + str(seed)).encode("utf-8")
    ).hexdigest()[:12]
    _reject_leftovers(run_sec, "run", strict, ("command", "seed", "run_id"))

    allowed_sections = _SECTIONS_BY_COMMAND[command]
    for name in list(sections):
        if name not in allowed_sections:
            known = any(name in v for v in _SECTIONS_BY_COMMAND.values())
            msg = (f"section [{name}] is not used by command {command!r}"
                   if known else f"unknown section [{name}]")
            if strict:
                raise ConfigError(msg, line=section_lines[name])
            log.warning("%s (ignored)", msg)
            sections.pop(name)

    model = None
    if command != "verify":
        model_sec = sections.pop("model", None)
        if model_sec is None:
            raise ConfigError(f"command {command!r} needs a [model] section")
        model = _parse_model(model_sec, "model", strict)

    reference = None
    ref_sec = sections.pop("reference", None)
    if ref_sec is not None:
        reference = _parse_model(ref_sec, "reference", strict)

    sweep_param = None
    sweep_grid = ()
    if command == "sweep":
        sweep_sec = sections.pop("sweep", None)
        if sweep_sec is None:
            raise ConfigError('command "sweep" needs a [sweep] section')
        sweep_param, param_line = _take(sweep_sec, "param")
        if sweep_param is None:
            raise ConfigError('[sweep] is missing required key "param"')
        if sweep_param not in _ALLOWED_PARAMS[model.kind]:
            raise ConfigError(
                f'sweep parameter "{sweep_param}" does not exist for model '
                f"kind {model.kind}; allowed: "
                f"{', '.join(sorted(_ALLOWED_PARAMS[model.kind]))}",
                line=param_line,
            )
        sweep_grid = _parse_grid(sweep_sec)
        _reject_leftovers(sweep_sec, "sweep", strict,
                          ("param", "grid", "start", "stop", "step"))

    kappa_count = 0
    group = "none"
    sym_sec = sections.pop("symmetry", None)
    if sym_sec is not None:
        kc_val, kc_line = _take(sym_sec, "kappa_count", "0")
        kappa_count = _as_int(kc_val, kc_line, "kappa_count")
        if kappa_count != 0:
            raise ConfigError(
                "only kappa_count = 0 is supported here; background Clifford "
                "generators enter through the library API", line=kc_line,
            )
        group, group_line = _take(sym_sec, "group", "none")
        if group not in ("none", "gamma_z2"):
            raise ConfigError(
                f'"group" must be "none" or "gamma_z2", got {group!r}',
                line=group_line,
            )
        _reject_leftovers(sym_sec, "symmetry", strict,
                          ("kappa_count", "group"))

    tolerances = dict(_TOL_DEFAULTS)
    tol_sec = sections.pop("tolerances", None)
    if tol_sec is not None:
        for key in list(tol_sec):
            if key in _TOL_DEFAULTS:
                value, lineno = tol_sec.pop(key)
                tolerances[key] = _as_float(value, lineno, key)
        _reject_leftovers(tol_sec, "tolerances", strict,
                          tuple(_TOL_DEFAULTS))

    locality_opts = {"center": 0, "window_radius": 2.0, "radii": "auto"}
    loc_sec = sections.pop("locality", None)
    if loc_sec is not None:
        center_val, center_line = _take(loc_sec, "center")
        if center_val is not None:
            locality_opts["center"] = _as_int(center_val, center_line,
                                              "center")
        wr_val, wr_line = _take(loc_sec, "window_radius")
        if wr_val is not None:
            locality_opts["window_radius"] = _as_float(wr_val, wr_line,
                                                       "window_radius")
        radii_val, radii_line = _take(loc_sec, "radii")
        if radii_val is not None and radii_val != "auto":
            radii = [
                _as_float(p.strip(), radii_line, "radii")
                for p in radii_val.split(",") if p.strip()
            ]
            if not radii or any(b <= a for a, b in zip(radii, radii[1:])):
                raise ConfigError(
                    '"radii" must be strictly increasing values or "auto"',
                    line=radii_line,
                )
            locality_opts["radii"] = tuple(radii)
        _reject_leftovers(loc_sec, "locality", strict,
                          ("center", "window_radius", "radii"))

    for name in sections:
        # only sections allowed for the command but unhandled get here; none
        # exist today, guard stays for grammar growth
        raise ConfigError(f"section [{name}] was not consumed",
                          line=section_lines[name])

    return RunConfig(
        command=command, run_id=run_id, seed=seed, model=model,
        reference=reference, sweep_param=sweep_param, sweep_grid=sweep_grid,
        kappa_count=kappa_count, group=group, tolerances=tolerances,
        locality_opts=locality_opts,
    )


# ---------------------------------------------------------------------------
# running


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def _one_particle_dim(spec: ModelSpec) -> int:
    if spec.kind == "pwave_2d":
        if np.isscalar(spec.size):
            return int(spec.size) ** 2
        return int(spec.size[0]) * int(spec.size[1])
    if spec.kind == "swave_trivial":
        return 2 * int(spec.size)
    return int(spec.size)


def _default_reference(model: ModelSpec) -> ModelSpec:
    """Atomic insulator on as many orbitals as the model has."""
    return ModelSpec(kind="atomic_trivial", params={},
                     size=_one_particle_dim(model), boundary="open")


def _build_pair(config: RunConfig):
    system = build_bdg(config.model, gap_tol=config.tolerances["gap_tol"])
    ref_spec = config.reference or _default_reference(config.model)
    ref = build_bdg(ref_spec, gap_tol=config.tolerances["gap_tol"])
    if ref.geometry.bdg_dim != system.geometry.bdg_dim:
        raise ComputationError(
            f"reference dimension {ref.geometry.bdg_dim} does not match "
            f"model dimension {system.geometry.bdg_dim}"
        )
    return system, ref, ref_spec


def _gamma_group(dim: int, c_matrix: np.ndarray) -> SymmetryData:
    return SymmetryData(group_reps=(
        GroupElement("e", np.eye(dim), antiunitary=False),
        GroupElement("gamma", c_matrix, antiunitary=True),
    ))


def _cmd_build(config: RunConfig, rows, summary, artifacts):
    system = build_bdg(config.model, gap_tol=config.tolerances["gap_tol"])
    rows.append(("", "", "bdg_dim", system.geometry.bdg_dim, ""))
    rows.append(("", "", "n_sites", system.geometry.n_sites, ""))
    rows.append(("", "", "gap", system.gap, config.tolerances["gap_tol"]))
    summary.append(
        f"built {config.model.kind} (size {config.model.size}, "
        f"{config.model.boundary}): dim {system.geometry.bdg_dim}, "
        f"gap {system.gap:.6g}"
    )
    return 0


def _cmd_index(config: RunConfig, rows, summary, artifacts):
    system, ref, ref_spec = _build_pair(config)
    ktol = config.tolerances["kernel_tol"]
    result = pair_index(system.j, ref.j, system.gamma, tol=ktol)
    rows.append(("", "", "gap", system.gap, config.tolerances["gap_tol"]))
    rows.append(("", "", "gap_reference", ref.gap,
                 config.tolerances["gap_tol"]))
    rows.append(("", "", "kernel_dim", result.kernel_dim, ktol))
    rows.append(("", "", "z2", result.z2, ktol))
    rows.append(("", "", "pfaffian_bit",
                 result.diagnostics["pfaffian_bit"], ""))
    summary.append(
        f"index of {config.model.kind} against {ref_spec.kind}: "
        f"z2 = {result.z2} (kernel dim {result.kernel_dim})"
    )
    if config.group == "gamma_z2":
        sym = _gamma_group(system.geometry.bdg_dim, system.gamma.c_matrix)
        table = equivariant_kernel_character(
            system.j, ref.j, sym, system.gamma, kernel_tol=ktol
        )
        for entry in table.entries:
            rows.append(("", "", f"character/{entry.label}", entry.value, ""))
        summary.append(
            "characters on the kernel: "
            + ", ".join(f"{e.label} -> {e.value:g}" for e in table.entries)
        )
    return 0


def _cmd_sweep(config: RunConfig, rows, summary, artifacts, threads: int):
    gap_tol = config.tolerances["gap_tol"]
    ktol = config.tolerances["kernel_tol"]
    ref_spec = config.reference or _default_reference(config.model)
    ref = build_bdg(ref_spec, gap_tol=gap_tol)
    base = config.model
    param = config.sweep_param

    def point(value):
        params = dict(base.params)
        params[param] = value
        spec = ModelSpec(kind=base.kind, params=params, size=base.size,
                         boundary=base.boundary)
        system = build_bdg(spec, gap_tol=gap_tol)
        if system.geometry.bdg_dim != ref.geometry.bdg_dim:
            raise ComputationError("reference dimension mismatch")
        result = pair_index(system.j, ref.j, system.gamma, tol=ktol)
        return (
            ("gap", system.gap, gap_tol),
            ("kernel_dim", result.kernel_dim, ktol),
            ("z2", result.z2, ktol),
        )

    def guarded(value):
        try:
            return point(value)
        except QfiError as exc:
            return exc

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        outcomes = list(pool.map(guarded, config.sweep_grid))

    failed = 0
    plot_points = []
    for value, outcome in zip(config.sweep_grid, outcomes):
        if isinstance(outcome, QfiError):
            failed += 1
            rows.append((param, value, f"error/{type(outcome).__name__}",
                         float("nan"), ""))
            plot_points.append((value, f"error/{type(outcome).__name__}",
                                float("nan")))
        else:
            for quantity, val, tolv in outcome:
                rows.append((param, value, quantity, val, tolv))
                if quantity in ("z2", "gap"):
                    plot_points.append((value, quantity, float(val)))

    png = artifacts["png"]
    figures.render_sweep(plot_points, param, png, model=base.kind)
    artifacts["rendered"] = True
    summary.append(
        f"swept {param} over {len(config.sweep_grid)} points "
        f"({failed} failed); reference {ref_spec.kind}"
    )
    if failed:
        summary.append("some sweep points raised; see error/* rows")
    return 2 if failed else 0


def _cmd_locality(config: RunConfig, rows, summary, artifacts):
    system, ref, ref_spec = _build_pair(config)
    geom = system.geometry
    ltol = config.tolerances["locality_tol"]
    opts = config.locality_opts
    center = int(opts["center"])
    if not (0 <= center < geom.n_sites):
        raise ConfigError(f'"center" must be a site index below '
                          f"{geom.n_sites}, got {center}")
    wr = float(opts["window_radius"])
    n = geom.n_sites
    centers = sorted({0, n // 4, n // 2, (3 * n) // 4})
    windows = [(f"ball({c};{wr:g})", geom.ball(c, wr)) for c in centers]

    radii = opts["radii"]
    if radii == "auto":
        unique = np.unique(geom.distance_matrix[center])
        if unique.size > 64:
            pick = np.linspace(0, unique.size - 1, 64).round().astype(int)
            unique = unique[np.unique(pick)]
        radii = tuple(float(r) for r in unique)

    report = locality_report(
        system.h, geom, windows=windows, tol=ltol,
        projection_pair=(basis_projection(system.j), basis_projection(ref.j)),
        center=center, radii=radii,
    )
    rows.append(("", "", "propagation_radius",
                 report.propagation_radius, ltol))
    for label, norm in report.commutator_profile:
        rows.append(("", "", f"commutator_norm/{label}", norm, ltol))
    for name, verdict in sorted(report.verdicts.items()):
        rows.append(("", "", f"verdict/{name}", verdict, ""))
    for radius, value in report.hs_curve:
        rows.append(("radius", radius, "hs_norm", value, ""))

    figures.render_locality(report, artifacts["png"], model=config.model.kind)
    artifacts["rendered"] = True
    summary.append(
        f"locality of {config.model.kind} (vs {ref_spec.kind}): propagation "
        f"{report.propagation_radius:g}, verdicts "
        + ", ".join(f"{k}={'yes' if v else 'no'}"
                    for k, v in sorted(report.verdicts.items()))
    )
    return 0


def _cmd_verify(config: RunConfig, rows, summary, artifacts):
    rng = np.random.default_rng(config.seed)
    itol = config.tolerances["identity_tol"]
    checks = []

    for dim in (4, 8, 16):
        g = nambu_involution(dim // 2)
        eye = np.eye(dim)
        worst_sq = 0.0
        worst_sum = 0.0
        for _ in range(15):
            j0, j1 = conjugated_pair(g, rng, strength=1.2)
            pair = CayleyPair.build(j0, j1, g)
            f = bounded_transform(pair).matrix
            u0, u1 = j0.matrix, j1.matrix
            worst_sq = max(worst_sq, _opnorm(
                f @ f - 0.25 * (-2.0 * eye + u1 @ u0 + u0 @ u1)
            ))
            worst_sum = max(worst_sum, _opnorm(
                eye + f @ f + 0.25 * (u0 - u1) @ (u0 - u1)
            ))
        checks.append((f"cayley_square_dim{dim}", worst_sq, itol))
        checks.append((f"cayley_difference_dim{dim}", worst_sum, itol))

    worst = 0.0
    for _ in range(40):
        n = int(rng.integers(1, 21)) * 2
        a = random_antisymmetric(n, rng)
        p = pfaffian(a)
        det = np.linalg.det(a)
        worst = max(worst, abs(p * p - det) / max(1.0, abs(det)))
    checks.append(("pfaffian_square", worst, 1e-9))

    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 16)) * 2
        a = random_antisymmetric(n, rng)
        q = random_orthogonal(n, rng)
        lhs = pfaffian(q.T @ a @ q)
        rhs = np.linalg.det(q) * pfaffian(a)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    checks.append(("pfaffian_transform", worst, 1e-8))

    bad = 0
    for name, residual, tolv in checks:
        rows.append(("", "", f"residual/{name}", residual, tolv))
        if residual > tolv:
            bad += 1
    figures.render_verify(checks, artifacts["png"])
    artifacts["rendered"] = True
    summary.append(
        f"verification: {len(checks) - bad}/{len(checks)} residual checks "
        f"within tolerance"
    )
    return 2 if bad else 0


def run(config: RunConfig, out_dir=".", threads: int = 1) -> int:
    """Execute a validated config; write CSV, summary, and any figure.

    Returns the process exit code (0 ok, 2 when a computation failed; the
    failure is also recorded as a machine-readable ``error/<Type>`` row).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"qfi_{config.command}_{config.run_id}"
    artifacts = {
        "csv": out / f"{stem}.csv",
        "txt": out / f"{stem}.txt",
        "png": out / f"{stem}.png",
        "rendered": False,
    }
    rows = []
    summary = []
    model_name = config.model.kind if config.model else "synthetic"

    try:
        if config.command == "build":
            code = _cmd_build(config, rows, summary, artifacts)
        elif config.command == "index":
            code = _cmd_index(config, rows, summary, artifacts)
        elif config.command == "sweep":
            code = _cmd_sweep(config, rows, summary, artifacts, threads)
        elif config.command == "locality":
            code = _cmd_locality(config, rows, summary, artifacts)
        else:
            code = _cmd_verify(config, rows, summary, artifacts)
    except ConfigError:
        raise
    except QfiError as exc:
        rows.append(("", "", f"error/{type(exc).__name__}", float("nan"), ""))
        summary.append(f"failed: {type(exc).__name__}: {exc}")
        log.error("%s: %s", type(exc).__name__, exc)
        code = 2

    with open(artifacts["csv"], "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["run_id", "command", "model", "param_name",
                         "param_value", "quantity", "value", "tolerance"])
        for param_name, param_value, quantity, value, tolv in rows:
            writer.writerow([
                config.run_id, config.command, model_name,
                _fmt(param_name), _fmt(param_value), quantity,
                _fmt(value), _fmt(tolv),
            ])

    lines = [f"run {config.run_id}: {config.command} "
             f"(model {model_name}, seed {config.seed})"]
    lines += summary
    lines.append(f"rows: {len(rows)} -> {artifacts['csv'].name}")
    if artifacts["rendered"]:
        lines.append(f"figure: {artifacts['png'].name}")
    artifacts["txt"].write_text("\n".join(lines) + "\n", encoding="utf-8")
    for line in lines:
        log.info("%s", line)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qfi",
        description="Topological indices of quasifree ground state pairs: "
                    "config-driven builds, index computations, sweeps, "
                    "locality diagnostics, and a self-check suite.",
    )
    parser.add_argument("--config", required=True,
                        help="path to the run config (INI-like; see README)")
    parser.add_argument("--out", default=".",
                        help="directory for CSV/summary/figure artifacts")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the [run] seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="sweep worker threads (fallback: QFI_THREADS)")
    parser.add_argument("--strict", action=argparse.BooleanOptionalAction,
                        default=True,
                        help="reject unknown config keys (default on)")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    threads = args.threads
    if threads is None:
        env = os.environ.get("QFI_THREADS", "").strip()
        if env:
            try:
                threads = int(env)
            except ValueError:
                log.error("QFI_THREADS=%r is not an integer", env)
                return 1
        else:
            threads = 1
    if threads < 1:
        log.error("--threads must be at least 1")
        return 1

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return 1

    try:
        config = parse_config(text, strict=args.strict,
                              seed_override=args.seed)
        return run(config, out_dir=args.out, threads=threads)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 1
    except QfiError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
