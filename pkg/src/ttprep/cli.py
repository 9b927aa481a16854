"""Batch front end: fixtures in, deterministic CSV/JSON reports out.

Four subcommands share one pipeline (project primitives, orthogonalize,
assemble orbital trains, measure bond profiles, cost them):

  project   build every orbital MPS and emit bond-profile CSVs
  estimate  full Toffoli/qubit resource report (JSON + CSV)
  sweep     repeat the pipeline along L / K / E_cut / svd_cutoff axes
  oracle    dense cross-checks of trains against explicit k-space sums

Grid cutoffs may be given as K (inverse Bohr) or as a kinetic-energy
cutoff E_cut (Hartree) with K = sqrt(2 E_cut).  Every float is serialized
with 17 significant digits, keys are sorted, and nothing timestamps the
output, so reruns are byte-identical.  The naive-baseline mode count is
the padded register size 2^(3 qubits_per_axis) that the qubit encoding
addresses (the odd per-plane-wave count is also reported); this is what
makes the baseline scale exactly with L^3 across doublings.

TTPREP_THREADS (default 1) sizes the worker pool used for sweep points.
"""

from __future__ import annotations

import functools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from pathlib import Path

import click
import jsonschema
import numpy as np

from . import gauss_pw, orbital_builder, resource_model, tt_core
from .gauss_pw import PlaneWaveGrid, PrimitiveGaussian
from .orbital_builder import MolecularOrbital
from .resource_model import BondProfile, ResourceParams

THREADS_ENV = "TTPREP_THREADS"
SWEEP_AXES = ("L_bohr", "K_inv_bohr", "E_cut_hartree", "svd_cutoff")


# ---------------------------------------------------------------------------
# serialization: 17-significant-digit floats, sorted keys, LF endings

def _f17(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} in report")
    return "%.17g" % x


def _json_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _f17(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = (f'{pad}  {json.dumps(str(k))}: {_json_text(obj[k], indent + 1)}'
                for k in sorted(obj))
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = (f"{pad}  {_json_text(v, indent + 1)}" for v in obj)
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_json(path: Path, obj) -> None:
    path.write_text(_json_text(obj) + "\n", encoding="utf-8", newline="\n")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _f17(v)
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# config / fixture loading

@functools.lru_cache(maxsize=None)
def _schema(name: str) -> dict:
    ref = importlib_resources.files("ttprep") / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def _validated(raw: dict, schema_name: str, label: str) -> dict:
    try:
        jsonschema.validate(raw, _schema(schema_name))
    except jsonschema.ValidationError as e:
        raise click.ClickException(
            f"{label} invalid at {e.json_path}: {e.message}") from e
    return raw


def _read_json(path, label: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise click.ClickException(f"{label} {path}: {e}") from e


def load_config(path) -> dict:
    cfg = _validated(_read_json(path, "config"), "config", f"config {path}")
    cfg["compression"].setdefault("eps_sum", 1e-9)
    oracle = cfg.setdefault("oracle", {})
    oracle.setdefault("enabled", False)
    oracle.setdefault("max_points_per_axis", 32)
    oracle.setdefault("tolerance", 1e-6)
    oracle.setdefault("dump_tt", False)
    res = cfg["resources"]
    res.setdefault("lambda_policy", "optimal_mu")
    cfg.setdefault("sweep", {})
    return cfg


def _as_complex(entry) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    return complex(entry[0], entry[1])


@dataclass(frozen=True)
class FixtureOrbital:
    occupation: int
    coeffs: np.ndarray = field(repr=False)
    indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class Fixture:
    name: str
    provenance: str
    primitives: tuple[PrimitiveGaussian, ...]
    orbitals: tuple[FixtureOrbital, ...]


def load_fixture(path) -> Fixture:
    raw = _validated(_read_json(path, "fixture"), "fixture", f"fixture {path}")
    prims = tuple(
        PrimitiveGaussian(center=tuple(p["center"]), gamma=p["gamma"],
                          ang=tuple(p["ang"]))
        for p in raw["primitives"])
    orbitals = []
    for i, o in enumerate(raw["orbitals"]):
        indices = tuple(o.get("primitive_indices", range(len(prims))))
        for j in indices:
            if not 0 <= j < len(prims):
                raise click.ClickException(
                    f"fixture invalid at $.orbitals[{i}].primitive_indices: "
                    f"index {j} outside 0..{len(prims) - 1}")
        coeffs = np.array([_as_complex(c) for c in o["coeffs"]], dtype=complex)
        if coeffs.size != len(indices):
            raise click.ClickException(
                f"fixture invalid at $.orbitals[{i}].coeffs: {coeffs.size} "
                f"coefficients for {len(indices)} primitives")
        orbitals.append(FixtureOrbital(occupation=int(o["occupation"]),
                                       coeffs=coeffs, indices=indices))
    return Fixture(name=raw["name"], provenance=raw.get("provenance", ""),
                   primitives=prims, orbitals=tuple(orbitals))


def grid_from_config(cfg: dict, L=None, K=None, e_cut=None) -> PlaneWaveGrid:
    g = cfg["grid"]
    L = float(g["L_bohr"]) if L is None else float(L)
    if K is not None:
        return PlaneWaveGrid(L=L, K=float(K))
    if e_cut is not None:
        return PlaneWaveGrid.from_energy_cutoff(L, float(e_cut))
    if "K_inv_bohr" in g:
        return PlaneWaveGrid(L=L, K=float(g["K_inv_bohr"]))
    return PlaneWaveGrid.from_energy_cutoff(L, float(g["E_cut_hartree"]))


# ---------------------------------------------------------------------------
# pipeline

@dataclass
class OrbitalRecord:
    index: int
    occupation: int
    coeffs: np.ndarray
    indices: tuple[int, ...]
    mps: orbital_builder.OrbitalMPS
    profile: BondProfile
    prep_toffoli: float
    prep_error: float

    @property
    def max_bond(self) -> int:
        return tt_core.max_bond_dim(self.mps.tt)


@dataclass
class PipelineResult:
    grid: PlaneWaveGrid
    fixture: Fixture
    config: dict
    svd_cutoff: float
    prim_tts: list
    overlap: orbital_builder.OverlapMatrix
    orbitals: list[OrbitalRecord]
    gram: np.ndarray
    eta: int
    params: ResourceParams
    report: resource_model.ResourceReport

    @property
    def n_system(self) -> int:
        return 3 * self.grid.qubits_per_axis

    @property
    def n_padded(self) -> int:
        return 2 ** self.n_system


def run_pipeline(cfg: dict, fx: Fixture, *, L=None, K=None, e_cut=None,
                 svd_cutoff=None) -> PipelineResult:
    grid = grid_from_config(cfg, L=L, K=K, e_cut=e_cut)
    comp = cfg["compression"]
    svd = float(comp["svd_cutoff"]) if svd_cutoff is None else float(svd_cutoff)
    eps_p = float(comp["eps_primitive"])
    eps_s = float(comp["eps_sum"])
    res_cfg = cfg["resources"]
    b = int(res_cfg["b"])

    prim_tts = [gauss_pw.primitive_3d_mps(g, grid, eps_p)
                for g in fx.primitives]
    overlap = orbital_builder.overlap_matrix(fx.primitives, grid, eps_p,
                                             tts=prim_tts)
    eta = sum(o.occupation for o in fx.orbitals)
    if "eta" in res_cfg and int(res_cfg["eta"]) != eta:
        raise click.ClickException(
            f"resources.eta = {res_cfg['eta']} does not match the fixture's "
            f"summed occupations ({eta})")

    records = []
    for i, o in enumerate(fx.orbitals):
        sub = overlap.S[np.ix_(o.indices, o.indices)]
        nrm_sq = float(np.real(np.conj(o.coeffs) @ (sub @ o.coeffs)))
        if nrm_sq <= 1e-14:
            raise click.ClickException(
                f"orbital {i}: coefficients have zero norm in the projected "
                f"overlap metric")
        c = o.coeffs / math.sqrt(nrm_sq)
        mo = MolecularOrbital(coeffs=c, primitives=tuple(
            fx.primitives[j] for j in o.indices))
        mps = orbital_builder.build_mo_mps(
            mo, grid, eps_p, eps_s,
            primitive_tts=[prim_tts[j] for j in o.indices])
        if svd > 0:
            mps = orbital_builder.truncate_mo(mps, svd)
        profile = BondProfile(m=mps.tt.bond_dims)
        records.append(OrbitalRecord(
            index=i, occupation=o.occupation, coeffs=c, indices=o.indices,
            mps=mps, profile=profile,
            prep_toffoli=resource_model.toffoli_mps_prep(profile, b),
            prep_error=resource_model.mps_prep_error(profile, b)))

    n_orb = len(records)
    gram = np.eye(n_orb, dtype=complex)
    for i in range(n_orb):
        for j in range(i + 1, n_orb):
            gram[i, j] = tt_core.inner_product(records[i].mps.tt,
                                               records[j].mps.tt)
            gram[j, i] = np.conj(gram[i, j])

    n_system = 3 * grid.qubits_per_axis
    eps1 = max(orbital_builder.infidelity_estimate(r.mps) for r in records)
    profiles = []
    for r in records:
        profiles.extend([r.profile] * r.occupation)
    params = ResourceParams(
        b=b, eta=eta, n_system=n_system, N=2 ** n_system, n_mo=n_orb,
        lambda_policy=res_cfg["lambda_policy"],
        fixed_lambda=res_cfg.get("fixed_lambda"))
    report = resource_model.estimate_resources(params, profiles, eps1=eps1)
    return PipelineResult(grid=grid, fixture=fx, config=cfg, svd_cutoff=svd,
                          prim_tts=prim_tts, overlap=overlap,
                          orbitals=records, gram=gram, eta=eta,
                          params=params, report=report)


def _gram_max_offdiag(result: PipelineResult) -> float:
    g = result.gram.copy()
    np.fill_diagonal(g, 0.0)
    return float(np.abs(g).max()) if g.size > 1 else 0.0


def _grid_summary(result: PipelineResult) -> dict:
    grid = result.grid
    return {
        "L_bohr": grid.L,
        "K_inv_bohr": grid.K,
        "dk": grid.dk,
        "points_per_axis": grid.points_per_axis,
        "qubits_per_axis": grid.qubits_per_axis,
        "n_grid_modes": grid.n_total,
        "n_padded": result.n_padded,
        "n_system_qubits": result.n_system,
    }


def _orbital_summary(r: OrbitalRecord) -> dict:
    return {
        "index": r.index,
        "occupation": r.occupation,
        "n_primitives": len(r.indices),
        "bond_dims": list(r.profile.m),
        "max_bond": r.max_bond,
        "raw_norm_sq": r.mps.raw_norm_sq,
        "infidelity": r.mps.infidelity,
        "trace_distance_estimate": orbital_builder.infidelity_estimate(r.mps),
        "mps_prep_toffoli": r.prep_toffoli,
        "mps_prep_error": r.prep_error,
    }


# ---------------------------------------------------------------------------
# dense oracle helpers (explicit k-space sums, no train algebra)

@functools.lru_cache(maxsize=None)
def _axis_norm(gamma: float, l: int, L: float) -> float:
    return gauss_pw.projection_normalization(gamma, l, L)


def _axis_window_overlaps(g: PrimitiveGaussian, grid: PlaneWaveGrid,
                          axis: int) -> np.ndarray:
    """Exact plane-wave overlaps of one axis factor, embedded at the
    signed-grid dense positions (length 2^qubits_per_axis)."""
    sgrid = grid.axis_grid()
    idx = sgrid.index_values()
    vals = gauss_pw.pw_overlap(g.gamma, g.ang[axis], g.center[axis],
                               idx * grid.dk, grid.L)
    dense = np.zeros(2 ** sgrid.n_sites, dtype=complex)
    for pos, i in enumerate(idx):
        dense[sgrid.dense_index(int(i))] = vals[pos]
    return dense


def _dense_exact_primitive(g: PrimitiveGaussian,
                           grid: PlaneWaveGrid) -> np.ndarray:
    """Whole-line-normalized exact projection on the padded 3D window."""
    axes = [_axis_window_overlaps(g, grid, ax) for ax in range(3)]
    norm = 1.0
    for ax in range(3):
        norm *= _axis_norm(g.gamma, g.ang[ax], grid.L)
    return np.kron(np.kron(axes[0], axes[1]), axes[2]) / norm


def _axis_lattice_cross(g_a: PrimitiveGaussian, g_b: PrimitiveGaussian,
                        grid: PlaneWaveGrid, axis: int) -> complex:
    """Full-lattice cross sum conj(a).b of one axis pair (no window)."""
    reach = 14.0 * math.sqrt(2.0 * max(g_a.gamma, g_b.gamma))
    i_far = int(math.ceil(reach / grid.dk)) + 1
    k = np.arange(-i_far, i_far + 1) * grid.dk
    ov_a = gauss_pw.pw_overlap(g_a.gamma, g_a.ang[axis], g_a.center[axis],
                               k, grid.L)
    ov_b = gauss_pw.pw_overlap(g_b.gamma, g_b.ang[axis], g_b.center[axis],
                               k, grid.L)
    return complex(np.vdot(ov_a, ov_b))


@functools.lru_cache(maxsize=None)
def _whole_line_overlap(g_a: PrimitiveGaussian, g_b: PrimitiveGaussian,
                        grid: PlaneWaveGrid) -> complex:
    """Inner product of two unit-normalized full-lattice projections."""
    out = complex(1.0)
    for ax in range(3):
        out *= _axis_lattice_cross(g_a, g_b, grid, ax)
        out /= _axis_norm(g_a.gamma, g_a.ang[ax], grid.L)
        out /= _axis_norm(g_b.gamma, g_b.ang[ax], grid.L)
    return out


def _dense_exact_orbital(record: OrbitalRecord, fx: Fixture,
                         grid: PlaneWaveGrid) -> np.ndarray:
    """Whole-line-normalized exact orbital on the padded window.

    The coefficients are normalized against the full-lattice Gram (all
    momenta, not just the window), so the reference carries less than unit
    weight inside the window and the missing tail registers as trace
    distance, matching the single-primitive certified checks.
    """
    raw = fx.orbitals[record.index].coeffs
    prims = [fx.primitives[j] for j in record.indices]
    gram = np.eye(len(prims), dtype=complex)
    for i in range(len(prims)):
        for j in range(i + 1, len(prims)):
            gram[i, j] = _whole_line_overlap(prims[i], prims[j], grid)
            gram[j, i] = np.conj(gram[i, j])
    nrm_sq = float(np.real(np.conj(raw) @ (gram @ raw)))
    if nrm_sq <= 0:
        raise click.ClickException("dense oracle produced a zero orbital")
    vec = np.zeros(2 ** (3 * grid.qubits_per_axis), dtype=complex)
    for c, j in zip(raw, record.indices):
        vec += c * _dense_exact_primitive(fx.primitives[j], grid)
    return vec / math.sqrt(nrm_sq)


def _trace_distance(u: np.ndarray, v: np.ndarray) -> float:
    return math.sqrt(max(0.0, 1.0 - abs(np.vdot(u, v)) ** 2))


def _within_cap(result: PipelineResult) -> bool:
    cap = int(result.config["oracle"]["max_points_per_axis"])
    return result.grid.points_per_axis <= cap


def _sweep_error(result: PipelineResult, record: OrbitalRecord) -> tuple:
    if result.config["oracle"]["enabled"] and _within_cap(result):
        exact = _dense_exact_orbital(record, result.fixture, result.grid)
        tt_dense = np.asarray(tt_core.to_dense(record.mps.tt))
        return _trace_distance(exact, tt_dense), "dense_window"
    return (orbital_builder.infidelity_estimate(record.mps), "norm_drift")


# ---------------------------------------------------------------------------
# commands

def _common_options(f):
    f = click.option("--out", required=True, type=click.Path(file_okay=False),
                     help="Output directory (created if missing).")(f)
    f = click.option("--fixture", "fixture_path", required=True,
                     type=click.Path(exists=True, dir_okay=False),
                     help="Molecule fixture JSON.")(f)
    f = click.option("--config", "config_path", required=True,
                     type=click.Path(exists=True, dir_okay=False),
                     help="Job configuration JSON.")(f)
    return f


def _load_all(config_path, fixture_path, out):
    cfg = load_config(config_path)
    fx = load_fixture(fixture_path)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return cfg, fx, out_dir


def _run_guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (gauss_pw.ProjectionError, tt_core.CapacityError,
            orbital_builder.EmptyBasisError,
            orbital_builder.DegenerateOrbitalError, ValueError) as e:
        raise click.ClickException(str(e)) from e


@click.group()
@click.version_option(package_name="ttprep")
def main():
    """Plane-wave orbital trains and fault-tolerant preparation costs.

    Cutoffs: provide grid.K_inv_bohr directly, or grid.E_cut_hartree with
    the kinetic-energy conversion K = sqrt(2 E_cut) (atomic units).
    """


@main.command("project")
@_common_options
def cmd_project(config_path, fixture_path, out):
    """Build all orbital MPSs; emit bond profiles and summary CSVs."""
    cfg, fx, out_dir = _load_all(config_path, fixture_path, out)
    result = _run_guarded(run_pipeline, cfg, fx)
    _emit_project(result, out_dir)
    click.echo(f"project: {len(result.orbitals)} orbitals on "
               f"{result.grid.points_per_axis}^3 modes -> {out_dir}")


def _emit_project(result: PipelineResult, out_dir: Path) -> None:
    name = result.fixture.name
    rows = [(r.index, r.occupation, len(r.indices), result.n_system,
             r.max_bond, r.mps.raw_norm_sq, r.mps.infidelity,
             orbital_builder.infidelity_estimate(r.mps))
            for r in result.orbitals]
    _write_csv(out_dir / f"{name}_orbitals.csv",
               ["orbital", "occupation", "n_primitives", "qubit_count",
                "max_bond", "raw_norm_sq", "infidelity",
                "trace_distance_estimate"], rows)
    for r in result.orbitals:
        bond_rows = [(j + 1, m, math.log2(m))
                     for j, m in enumerate(r.profile.m)]
        _write_csv(out_dir / f"{name}_orbital_{r.index}_bonds.csv",
                   ["bond_index", "bond_dim", "log2_bond_dim"], bond_rows)
        if result.config["oracle"]["dump_tt"]:
            (out_dir / f"{name}_orbital_{r.index}_tt.json").write_text(
                json.dumps(tt_core.to_debug_json(r.mps.tt), sort_keys=True),
                encoding="utf-8", newline="\n")
    _write_json(out_dir / f"{name}_project.json", {
        "fixture": name,
        "grid": _grid_summary(result),
        "svd_cutoff": result.svd_cutoff,
        "orbitals": [_orbital_summary(r) for r in result.orbitals],
        "gram_max_offdiag": _gram_max_offdiag(result),
    })


@main.command("estimate")
@_common_options
def cmd_estimate(config_path, fixture_path, out):
    """Resource report: per-orbital preparation costs, totals, baselines."""
    cfg, fx, out_dir = _load_all(config_path, fixture_path, out)
    result = _run_guarded(run_pipeline, cfg, fx)
    report_obj = _report_dict(result)
    _validated(json.loads(_json_text(report_obj)), "report", "report")
    _write_json(out_dir / f"{fx.name}_report.json", report_obj)
    rows = []
    for section in ("toffoli", "toffoli_floor", "qubits", "totals"):
        for key, val in sorted(report_obj[section].items()):
            rows.append((section, key, val))
    rows.append(("errors", "eps1", report_obj["eps1"]))
    rows.append(("errors", "eps2", report_obj["eps2"]))
    rows.append(("errors", "slater_bound_approx",
                 report_obj["error_bounds"]["approx"]))
    rows.append(("errors", "slater_bound_spectral",
                 report_obj["error_bounds"]["spectral"]))
    rows.append(("antisym", "antisym_estimate", report_obj["antisym"]))
    _write_csv(out_dir / f"{fx.name}_estimate.csv",
               ["section", "name", "value"], rows)
    click.echo(f"estimate: mps_total="
               f"{_f17(report_obj['totals']['mps_method'])} "
               f"naive={_f17(report_obj['totals']['naive_method'])} "
               f"-> {out_dir}")


def _report_dict(result: PipelineResult) -> dict:
    rep = result.report
    params = result.params
    eb = {
        "approx": resource_model.slater_error_bound(
            params.eta, params.n_mo, rep.eps1, rep.eps2, "approx"),
        "spectral": resource_model.slater_error_bound(
            params.eta, params.n_mo, rep.eps1, rep.eps2, "spectral"),
    }
    return {
        "fixture": result.fixture.name,
        "grid": _grid_summary(result),
        "resources": {
            "b": params.b,
            "eta": params.eta,
            "n_system": params.n_system,
            "n_mo": params.n_mo,
            "lambda_policy": params.lambda_policy,
        },
        "eps1": rep.eps1,
        "eps2": rep.eps2,
        "error_bounds": eb,
        "toffoli": dict(rep.toffoli),
        "toffoli_floor": {k: math.floor(v) for k, v in rep.toffoli.items()},
        "qubits": dict(rep.qubits),
        "totals": dict(rep.totals),
        "antisym": rep.antisym,
        "antisym_floor": math.floor(rep.antisym),
        "toffoli_naive_at_grid_modes": resource_model.toffoli_naive_slater(
            result.grid.n_total, params.eta, params.b),
        "orbitals": [_orbital_summary(r) for r in result.orbitals],
        "gram_max_offdiag": _gram_max_offdiag(result),
    }


@main.command("sweep")
@_common_options
def cmd_sweep(config_path, fixture_path, out):
    """Re-run the pipeline along each configured sweep axis."""
    cfg, fx, out_dir = _load_all(config_path, fixture_path, out)
    axes = [(axis, cfg["sweep"][axis]) for axis in SWEEP_AXES
            if cfg["sweep"].get(axis)]
    if not axes:
        raise click.ClickException(
            "sweep requires at least one nonempty axis under 'sweep' "
            f"(any of {', '.join(SWEEP_AXES)})")
    jobs = [(axis, value) for axis, values in axes for value in values]

    def run_one(job):
        axis, value = job
        kwargs = {"L_bohr": {"L": value}, "K_inv_bohr": {"K": value},
                  "E_cut_hartree": {"e_cut": value},
                  "svd_cutoff": {"svd_cutoff": value}}[axis]
        return _run_guarded(run_pipeline, cfg, fx, **kwargs)

    threads = max(1, int(os.environ.get(THREADS_ENV, "1")))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, jobs))
    else:
        results = [run_one(job) for job in jobs]

    rows = []
    for (axis, value), result in zip(jobs, results):
        for r in result.orbitals:
            err, err_kind = _sweep_error(result, r)
            rows.append((
                axis, float(value), r.index, r.occupation,
                result.grid.L, result.grid.K, result.grid.points_per_axis,
                result.grid.qubits_per_axis, result.n_padded, r.max_bond,
                r.mps.raw_norm_sq, r.mps.infidelity,
                orbital_builder.infidelity_estimate(r.mps), err, err_kind,
                r.prep_toffoli,
                result.report.totals["mps_method"],
                result.report.totals["naive_method"],
                result.report.totals["ratio_naive_over_mps"]))
    _write_csv(out_dir / f"{fx.name}_sweep.csv",
               ["axis", "value", "orbital", "occupation", "L_bohr",
                "K_inv_bohr", "points_per_axis", "qubits_per_axis",
                "n_padded", "max_bond", "raw_norm_sq", "infidelity",
                "trace_distance_estimate", "error", "error_kind",
                "mps_prep_toffoli", "toffoli_mps_total", "toffoli_naive",
                "ratio_naive_over_mps"], rows)
    click.echo(f"sweep: {len(jobs)} points x {len(fx.orbitals)} orbitals "
               f"-> {out_dir}")


@main.command("oracle")
@_common_options
def cmd_oracle(config_path, fixture_path, out):
    """Cross-check trains against dense k-space sums; exit 1 on failure."""
    cfg, fx, out_dir = _load_all(config_path, fixture_path, out)
    result = _run_guarded(run_pipeline, cfg, fx)
    checks = _run_oracle_checks(result, out_dir)
    for c in checks:
        click.echo(f"CHECK {c['name']}: {c['status']} - {c['detail']}")
    _write_json(out_dir / f"{fx.name}_oracle.json", {
        "fixture": fx.name,
        "grid": _grid_summary(result),
        "checks": checks,
    })
    n_fail = sum(1 for c in checks if c["status"] == "FAIL")
    click.echo(f"oracle: {len(checks)} checks, {n_fail} failures")
    if n_fail:
        sys.exit(1)


def _check(name: str, status: str, detail: str) -> dict:
    return {"name": name, "status": status, "detail": detail}


def _run_oracle_checks(result: PipelineResult, out_dir: Path) -> list:
    cfg = result.config
    grid = result.grid
    fx = result.fixture
    tol = float(cfg["oracle"]["tolerance"])
    eps_p = float(cfg["compression"]["eps_primitive"])
    eps_s = float(cfg["compression"]["eps_sum"])
    checks = []
    dense_ok = _within_cap(result)
    if not dense_ok:
        checks.append(_check(
            "dense_oracle", "SKIP",
            f"{grid.points_per_axis} points/axis exceed the oracle cap "
            f"{cfg['oracle']['max_points_per_axis']}; dense checks skipped"))

    for gi, (g, tt) in enumerate(zip(fx.primitives, result.prim_tts)):
        drift = abs(tt_core.norm(tt) - 1.0)
        checks.append(_check(
            f"primitive_norm[{gi}]", "PASS" if drift <= 1e-9 else "FAIL",
            f"|norm-1| = {drift:.3e} (tol 1e-9)"))
        if not dense_ok:
            continue
        lemma_k = max(gauss_pw.choose_cutoff(
            g.gamma, g.ang[ax], grid.L, eps_p / math.sqrt(3.0))
            for ax in range(3))
        if grid.K < lemma_k:
            checks.append(_check(
                f"primitive_trace_distance[{gi}]", "SKIP",
                f"grid K = {grid.K:.3g} below the certified cutoff "
                f"{lemma_k:.3g}; bound not applicable"))
            continue
        exact = _dense_exact_primitive(g, grid)
        d = _trace_distance_nonunit(exact, np.asarray(tt_core.to_dense(tt)))
        checks.append(_check(
            f"primitive_trace_distance[{gi}]",
            "PASS" if d <= eps_p else "FAIL",
            f"D = {d:.3e} (budget {eps_p:.1e})"))

    for r in result.orbitals:
        drift = abs(tt_core.norm(r.mps.tt) - 1.0)
        checks.append(_check(
            f"orbital_norm[{r.index}]", "PASS" if drift <= 1e-9 else "FAIL",
            f"|norm-1| = {drift:.3e} (tol 1e-9)"))
        if not dense_ok:
            continue
        target = np.zeros(2 ** result.n_system, dtype=complex)
        for c, j in zip(r.coeffs, r.indices):
            target += c * np.asarray(tt_core.to_dense(result.prim_tts[j]))
        target /= np.linalg.norm(target)
        diff = float(np.linalg.norm(
            target - np.asarray(tt_core.to_dense(r.mps.tt))))
        tol_eff = max(tol, 20.0 * (len(r.indices) * eps_s + result.svd_cutoff))
        checks.append(_check(
            f"tt_vs_dense_orbital[{r.index}]",
            "PASS" if diff <= tol_eff else "FAIL",
            f"|dense_sum - tt| = {diff:.3e} (tol {tol_eff:.1e})"))

    if dense_ok:
        S = result.overlap.S
        worst = 0.0
        for i in range(len(fx.primitives)):
            di = np.asarray(tt_core.to_dense(result.prim_tts[i]))
            for j in range(i, len(fx.primitives)):
                dj = np.asarray(tt_core.to_dense(result.prim_tts[j]))
                worst = max(worst, abs(complex(np.vdot(di, dj)) - S[i, j]))
        checks.append(_check(
            "gram_vs_dense", "PASS" if worst <= tol else "FAIL",
            f"max |dense - S| = {worst:.3e} (tol {tol:.1e})"))

    herm = float(np.abs(result.overlap.S - result.overlap.S.conj().T).max())
    checks.append(_check(
        "gram_hermitian", "PASS" if herm <= 1e-10 else "FAIL",
        f"max |S - S^dagger| = {herm:.3e} (tol 1e-10)"))

    for r in result.orbitals:
        dump = out_dir / f"{fx.name}_orbital_{r.index}_tt.json"
        if not dump.exists():
            continue
        name = f"dump_agreement[{r.index}]"
        if result.n_system > tt_core.DEFAULT_DENSE_CAP:
            checks.append(_check(
                name, "SKIP", "register too large for dense comparison"))
            continue
        try:
            loaded = tt_core.from_debug_json(
                json.loads(dump.read_text(encoding="utf-8")))
            diff = float(np.linalg.norm(
                np.asarray(tt_core.to_dense(loaded))
                - np.asarray(tt_core.to_dense(r.mps.tt))))
        except (ValueError, KeyError, tt_core.ShapeError) as e:
            checks.append(_check(name, "FAIL", f"unreadable dump: {e}"))
            continue
        checks.append(_check(
            name, "PASS" if diff <= 1e-12 else "FAIL",
            f"|dumped - rebuilt| = {diff:.3e} (tol 1e-12)"))
    return checks


def _trace_distance_nonunit(reference: np.ndarray, tt_dense: np.ndarray) -> float:
    # reference is unit over the whole line but truncated to the window;
    # the missing tail only lowers the overlap, exactly as the bound wants.
    return math.sqrt(max(0.0, 1.0 - abs(np.vdot(reference, tt_dense)) ** 2))


if __name__ == "__main__":
    main()
