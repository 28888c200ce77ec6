"""Instance documents: loading, validation, seeded generation and presets.

Instance JSON layout::

    {"grid": {"dim": d, "points_per_axis": M},
     "window": {"radius": N},
     "generators": [ per generator: [ per grid point: [n x [re, im]] ] ],
     "functions":  same shape,
     "operator":   [ per grid point: [n rows x [n x [re, im]]] ]
                   or a builder {"kind": "diagonal" | "conjugated", ...},
     "iterations": optional override of k (off-theorem)}

A generator or function may also be given as ``{"constant": [n x [re, im]]}``.
Grid points and window indices are in lexicographic order.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from importlib.resources import files

import numpy as np

from . import linalg
from .errors import InfeasibleSpec, SchemaError, ShiftFrameError
from .fibers import FiberField, FiberWindow, OmegaGrid, RangeFunctionField, range_function_from_generators
from .jsonio import parse_complex, parse_complex_array
from .operators import RangeOperatorField
from .sampling import DSInstance

FORMAT = "shiftframe-instance/1"


def make_rng(seed: int) -> np.random.Generator:
    """The one PRNG used for every seeded construction: numpy's PCG64."""
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar unitary from the QR factorization of a complex Gaussian matrix."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    q, r = np.linalg.qr(complex_gaussian(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


# --- scalar field descriptors -----------------------------------------------


def eval_field(desc, grid: OmegaGrid, where: str = "field") -> np.ndarray:
    """Evaluate an eigenvalue-field descriptor on every grid point.

    Accepted forms: a number or ``[re, im]`` (constant);
    ``{"kind": "constant", "value": z}``;
    ``{"kind": "linear", "value": z0, "slope": z, "axis": i}`` giving z0 + z * omega_i;
    ``{"kind": "step", "split": t, "values": [z_lo, z_hi], "axis": i}``;
    ``{"kind": "values", "values": [z per grid point]}``.
    """
    pts = grid.points
    if not isinstance(desc, dict):
        return np.full(grid.size, parse_complex(desc, where), dtype=complex)
    kind = desc.get("kind")
    axis = desc.get("axis", 0)
    if kind in ("linear", "step") and not (isinstance(axis, int) and 0 <= axis < grid.dim):
        raise SchemaError(f"axis must be an integer in [0, {grid.dim})", f"{where}.axis")
    if kind == "constant":
        return np.full(grid.size, parse_complex(desc.get("value"), f"{where}.value"), dtype=complex)
    if kind == "linear":
        z0 = parse_complex(desc.get("value", 0.0), f"{where}.value")
        slope = parse_complex(desc.get("slope"), f"{where}.slope")
        return z0 + slope * pts[:, axis]
    if kind == "step":
        vals = desc.get("values")
        if not isinstance(vals, list) or len(vals) != 2:
            raise SchemaError("step needs two values", f"{where}.values")
        lo, hi = (parse_complex(v, f"{where}.values[{i}]") for i, v in enumerate(vals))
        split = desc.get("split", 0.5)
        if not isinstance(split, (int, float)):
            raise SchemaError("split must be a number", f"{where}.split")
        return np.where(pts[:, axis] < split, lo, hi).astype(complex)
    if kind == "values":
        return parse_complex_array(desc.get("values"), (grid.size,), f"{where}.values")
    raise SchemaError(f"unknown field kind {kind!r}", f"{where}.kind")


# --- operator builders -------------------------------------------------------


def _diagonal_operator(fields: list[np.ndarray], grid: OmegaGrid, window: FiberWindow) -> np.ndarray:
    n = window.size
    out = np.zeros((grid.size, n, n), dtype=complex)
    for t, vals in enumerate(fields[:n]):
        out[:, t, t] = vals
    return out


def _conjugated_operator(fields: list[np.ndarray], J: RangeFunctionField, seed: int) -> np.ndarray:
    """R(omega) = Q U diag(lam_t(omega)) U* Q*, with Q the J basis, column t
    carrying field t mod p, and U a seeded unitary per fiber dimension."""
    n = J.window.size
    p = len(fields)
    if p == 0:
        raise SchemaError("need at least one eigenvalue field", "operator.eigenvalue_fields")
    rng = make_rng(seed)
    unitaries = {d: random_unitary(rng, d) for d in range(1, n + 1)}
    out = np.zeros((J.grid.size, n, n), dtype=complex)
    for pt, q in enumerate(J.bases):
        d = q.shape[1]
        if d == 0:
            continue
        lam = np.array([fields[t % p][pt] for t in range(d)])
        w = q @ unitaries[d]
        out[pt] = (w * lam[None, :]) @ w.conj().T
    return out


def build_operator(doc, J: RangeFunctionField) -> np.ndarray:
    grid, window = J.grid, J.window
    n = window.size
    if isinstance(doc, dict):
        kind = doc.get("kind")
        descs = doc.get("eigenvalue_fields")
        if not isinstance(descs, list):
            raise SchemaError("expected a list of field descriptors", "operator.eigenvalue_fields")
        fields = [eval_field(d, grid, f"operator.eigenvalue_fields[{i}]") for i, d in enumerate(descs)]
        if kind == "diagonal":
            return _diagonal_operator(fields, grid, window)
        if kind == "conjugated":
            seed = doc.get("unitary_seed", 0)
            if not isinstance(seed, int) or isinstance(seed, bool):
                raise SchemaError("unitary_seed must be an integer", "operator.unitary_seed")
            return _conjugated_operator(fields, J, seed)
        raise SchemaError(f"unknown operator kind {kind!r}", "operator.kind")
    if not isinstance(doc, list) or len(doc) != grid.size:
        raise SchemaError(f"expected one matrix per grid point ({grid.size})", "operator")
    return parse_complex_array(doc, (grid.size, n, n), "operator")


# --- loading -----------------------------------------------------------------


def _field_list(doc, key: str, grid: OmegaGrid, window: FiberWindow, required: bool = True) -> list[FiberField]:
    items = doc.get(key)
    if items is None and not required:
        return []
    if not isinstance(items, list):
        raise SchemaError("expected a list of fiber fields", key)
    out = []
    for i, item in enumerate(items):
        where = f"{key}[{i}]"
        if isinstance(item, dict) and "constant" in item:
            vec = parse_complex_array(item["constant"], (window.size,), f"{where}.constant")
            out.append(FiberField.constant(grid, window, vec))
            continue
        if not isinstance(item, list) or len(item) != grid.size:
            raise SchemaError(f"expected one fiber per grid point ({grid.size})", where)
        vals = parse_complex_array(item, (grid.size, window.size), where)
        out.append(FiberField(grid, window, vals))
    return out


def _positive_int(doc, key, where, minimum):
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise SchemaError(f"expected an integer >= {minimum}", f"{where}.{key}")
    return v


def parse_geometry(doc) -> tuple[OmegaGrid, FiberWindow]:
    if not isinstance(doc, dict):
        raise SchemaError("instance must be a JSON object")
    g = doc.get("grid")
    w = doc.get("window")
    if not isinstance(g, dict):
        raise SchemaError("missing or invalid", "grid")
    if not isinstance(w, dict):
        raise SchemaError("missing or invalid", "window")
    dim = _positive_int(g, "dim", "grid", 1)
    m = _positive_int(g, "points_per_axis", "grid", 1)
    radius = _positive_int(w, "radius", "window", 0)
    return OmegaGrid(dim, m), FiberWindow(radius, dim)


@dataclass
class LoadedInstance:
    doc: dict
    instance: DSInstance
    generators: list


def load_instance(doc, rank_tol: float = linalg.RANK_TOL, iterations: int | None = None) -> LoadedInstance:
    grid, window = parse_geometry(doc)
    gens = _field_list(doc, "generators", grid, window)
    funcs = _field_list(doc, "functions", grid, window)
    if not funcs:
        raise SchemaError("need at least one function", "functions")
    if "operator" not in doc:
        raise SchemaError("missing", "operator")
    J = range_function_from_generators(gens, rank_tol, grid=grid, window=window)
    mats = build_operator(doc["operator"], J)
    if iterations is None and doc.get("iterations") is not None:
        iterations = _positive_int(doc, "iterations", "instance", 0)
    try:
        Rf = RangeOperatorField(J, mats)
        inst = DSInstance.build(J, Rf, funcs, iterations)
    except ShiftFrameError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc), "instance") from None
    return LoadedInstance(doc, inst, gens)


def fields_to_json(fields) -> list:
    return [[[[z.real, z.imag] for z in row] for row in f.values] for f in fields]


def operator_to_json(mats: np.ndarray) -> list:
    return [[[[z.real, z.imag] for z in row] for row in m] for m in mats]


# --- seeded generation -------------------------------------------------------


@dataclass
class InstanceSpec:
    """Recipe for a random gapped normal instance; identical specs give
    bit-identical instances."""

    seed: int = 0
    dim: int = 1
    points_per_axis: int = 32
    radius: int = 1
    n_generators: int = 2
    degree: int = 1
    supports: list | None = None  # per generator: None or cutoff t (zero where omega_0 >= t)
    eigenvalue_fields: list = field(default_factory=lambda: [1.0, -1.0])
    gap_target: float = 0.1
    m: int = 1
    plant_zero: int | None = None  # kill the components along eigenvalue field index
    mix_unitary: bool = True

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "InstanceSpec":
        known = set(cls.__dataclass_fields__)
        bad = set(d) - known
        if bad:
            raise SchemaError(f"unknown keys {sorted(bad)}", "spec")
        return cls(**d)


def _trig_generators(rng, spec: InstanceSpec, grid: OmegaGrid, window: FiberWindow) -> np.ndarray:
    freqs = np.array(list(np.ndindex(*([2 * spec.degree + 1] * grid.dim))), dtype=float) - spec.degree
    phases = np.exp(2j * np.pi * grid.points @ freqs.T)  # (points, freqs)
    gens = np.empty((spec.n_generators, grid.size, window.size), dtype=complex)
    for g in range(spec.n_generators):
        coeffs = complex_gaussian(rng, (len(freqs), window.size))
        gens[g] = phases @ coeffs
        cutoff = spec.supports[g] if spec.supports else None
        if cutoff is not None:
            gens[g][grid.points[:, 0] >= cutoff] = 0.0
    return gens


def generate_instance(spec: InstanceSpec, rank_tol: float = linalg.RANK_TOL) -> dict:
    """Build an instance document with a normal operator whose distinct
    eigenvalues are everywhere separated by at least ``spec.gap_target``."""
    if not spec.gap_target > 0:
        raise InfeasibleSpec("gap target must be positive")
    if spec.m < 1 or spec.n_generators < 0:
        raise InfeasibleSpec("need m >= 1 and n_generators >= 0")
    if spec.supports is not None and len(spec.supports) != spec.n_generators:
        raise InfeasibleSpec("supports must list one cutoff per generator")
    grid = OmegaGrid(spec.dim, spec.points_per_axis)
    window = FiberWindow(spec.radius, spec.dim)
    rng = make_rng(spec.seed)
    gen_vals = _trig_generators(rng, spec, grid, window)
    gens = [FiberField(grid, window, v) for v in gen_vals]
    J = range_function_from_generators(gens, rank_tol, grid=grid, window=window)
    dims = J.dims
    on = dims > 0
    if not on.any():
        raise InfeasibleSpec("generators span the zero space")
    p = len(spec.eigenvalue_fields)
    if p == 0 or p > int(dims[on].min()):
        raise InfeasibleSpec(f"{p} eigenvalue fields but min dim J over the spectrum is {int(dims[on].min())}")
    fields = [eval_field(d, grid, f"eigenvalue_fields[{i}]") for i, d in enumerate(spec.eigenvalue_fields)]
    bound = max(float(np.max(np.abs(f))) for f in fields)
    if not np.isfinite(bound):
        raise InfeasibleSpec("eigenvalue fields must be bounded")
    vals = np.stack(fields)  # (p, points)
    for pt in np.flatnonzero(on):
        distinct = [complex(np.mean(vals[c, pt])) for c in linalg.cluster_values(vals[:, pt])]
        if len(distinct) > 1:
            d = np.abs(np.subtract.outer(distinct, distinct))
            np.fill_diagonal(d, np.inf)
            if d.min() < spec.gap_target:
                raise InfeasibleSpec(f"eigenvalue fields are {d.min():.3g} apart at grid point {pt}")
    if spec.plant_zero is not None and not 0 <= spec.plant_zero < p:
        raise InfeasibleSpec("plant_zero must index an eigenvalue field")

    n = window.size
    mats = np.zeros((grid.size, n, n), dtype=complex)
    funcs = np.zeros((spec.m, grid.size, n), dtype=complex)
    for pt in range(grid.size):
        d = int(dims[pt])
        if d == 0:
            continue
        w = J.bases[pt] @ (random_unitary(rng, d) if spec.mix_unitary else np.eye(d))
        lam = np.array([vals[t % p, pt] for t in range(d)])
        mats[pt] = (w * lam[None, :]) @ w.conj().T
        z = complex_gaussian(rng, (spec.m, d))
        if spec.plant_zero is not None:
            z[:, [t for t in range(d) if t % p == spec.plant_zero]] = 0.0
        funcs[:, pt, :] = z @ w.T
    return {
        "format": FORMAT,
        "spec": spec.to_dict(),
        "grid": {"dim": grid.dim, "points_per_axis": grid.points_per_axis},
        "window": {"radius": window.radius},
        "generators": fields_to_json(gens),
        "functions": [[[[z.real, z.imag] for z in row] for row in f] for f in funcs],
        "operator": operator_to_json(mats),
    }


# --- presets -------------------------------------------------------------------


def diag_example(points_per_axis: int = 8) -> dict:
    """Constant diag(1, -1) on J = span{e_0, e_1} in C^3 (window radius 1),
    iterating f = (e_0 + e_1)/sqrt(2)."""
    h = 1.0 / np.sqrt(2.0)
    return {
        "format": FORMAT,
        "grid": {"dim": 1, "points_per_axis": points_per_axis},
        "window": {"radius": 1},
        "generators": [{"constant": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]},
                       {"constant": [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]}],
        "functions": [{"constant": [[h, 0.0], [h, 0.0], [0.0, 0.0]]}],
        "operator": {"kind": "diagonal", "eigenvalue_fields": [1.0, -1.0, 0.0]},
    }


def packaged_example_path():
    """Location of the bundled ``diag_example.json`` (identical to ``diag_example()``)."""
    return files("shiftframe") / "data" / "diag_example.json"


def random_spec(seed: int, points_per_axis: int = 32, planted: bool = False) -> InstanceSpec:
    """Seeded recipe mixing constant and step eigenvalue fields so that
    the number of distinct eigenvalues varies over the grid."""
    rng = make_rng(seed ^ 0x5EED)
    radius = int(rng.integers(1, 5))  # n = 3, 5, 7, 9
    n = 2 * radius + 1
    n_gen = int(rng.integers(1, min(n, 4) + 1))
    p_max = min(n_gen, 3)
    p = p_max if rng.uniform() < 0.6 else int(rng.integers(1, p_max + 1))
    # well-separated constants on a ring, then one optional step field
    base = rng.uniform(0, 2 * np.pi)
    radii = rng.uniform(0.3, 1.5, size=p)
    consts = [complex(radii[t] * np.cos(base + 2 * np.pi * t / p), radii[t] * np.sin(base + 2 * np.pi * t / p))
              for t in range(p)]
    descs: list = [[z.real, z.imag] for z in consts]
    if p >= 2 and not planted and rng.uniform() < 0.5:
        descs[-1] = {"kind": "step", "split": float(rng.uniform(0.2, 0.8)),
                     "values": [[consts[0].real, consts[0].imag], descs[-1]]}
    m = int(rng.integers(1, 4))
    supports = None
    if (n_gen == 1 or n_gen - 1 >= p) and rng.uniform() < 0.3:
        supports = [None] * (n_gen - 1) + [float(rng.uniform(0.3, 0.9))]
    return InstanceSpec(
        seed=int(seed), points_per_axis=points_per_axis, radius=radius, n_generators=n_gen,
        degree=int(rng.integers(0, 3)), supports=supports, eigenvalue_fields=descs, gap_target=0.1, m=m,
        plant_zero=int(rng.integers(0, p)) if planted else None,
    )


PRESETS = {
    "diag-example": lambda seed, M: diag_example(M or 8),
    "random": lambda seed, M: generate_instance(random_spec(seed, M or 32)),
    "planted": lambda seed, M: generate_instance(random_spec(seed, M or 32, planted=True)),
}
