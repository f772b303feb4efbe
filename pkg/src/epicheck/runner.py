"""Suite orchestration over the named checks.

Provides the check registry, reproducible instance families, config
parsing with strict key validation, and JSON/CSV report writing.

Instance streams are keyed by (seed, "instance", family, dim, index), so
checks that share a family (for example the entropy-power and Fisher
checks both draw from ``mixture_pair``) see the same instances and their
gaps can be compared record by record.

Functions
---------
random_mixture, random_markov_triple, proportional_markov_triple,
shared_prefix_pair, random_unit_vector
    instance generators, all driven by an explicit Generator.
generate_instance
    family-name dispatch used by the runner.
config_from_dict, default_config
    build a SuiteConfig, rejecting unknown keys.
run_suite
    execute every requested check and return (report dict, exit code).
report_to_csv, write_report
    render a report to disk.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .checks import (
    VERDICT_EQUALITY,
    VERDICT_HOLDS,
    VERDICT_INCONCLUSIVE,
    VERDICT_VIOLATED,
    CheckConfig,
    InequalityReport,
    check_blachman_stam,
    check_conditional_epi,
    check_conditional_form,
    check_de_bruijn,
    check_entropic_bergstrom,
    check_entropic_bonnesen,
    check_entropic_kyfan,
    check_epi,
    check_equality_case_bonnesen,
    check_isoperimetric_dominance,
    check_isoperimetric_sharp,
    check_lambda_form,
    check_matrix_bergstrom,
    check_matrix_kyfan,
    check_projective_fisher,
    check_sphere_identity,
    check_stam_recovery,
    check_tm_limit,
)
from .exceptions import ConfigError
from .matrices import SpdMatrix, random_spd
from .mixtures import GaussianMixture, MarkovTriple
from .seeding import rng_from_tokens

VERDICT_ORDER = (VERDICT_HOLDS, VERDICT_EQUALITY, VERDICT_VIOLATED, VERDICT_INCONCLUSIVE)
SUMMARY_KEYS = {
    VERDICT_HOLDS: "holds",
    VERDICT_EQUALITY: "equality",
    VERDICT_VIOLATED: "violated",
    VERDICT_INCONCLUSIVE: "inconclusive",
}
LAMBDA_GRID_DEFAULT = (0.0, 0.25, 0.5, 0.75, 1.0)
CSV_COLUMNS = (
    "check_name", "instance_id", "dim", "lambda", "lhs", "rhs",
    "gap", "stderr", "verdict", "seed", "wall_ms",
)


# --------------------------------------------------------------------------
# instance generators


def random_mixture(
    dim: int, rng: np.random.Generator, max_components: int = 3
) -> GaussianMixture:
    """Random mixture with 1..max_components parts; a third of draws are
    single Gaussians, exercising the closed-form route."""
    k = int(rng.integers(1, max_components + 1))
    raw = rng.uniform(0.5, 1.5, size=k)
    weights = raw / raw.sum()
    components = []
    for c in range(k):
        mean = rng.normal(0.0, 1.0, size=dim)
        cov = random_spd(dim, rng, condition_cap=100.0)
        components.append((mean, cov))
    return GaussianMixture(weights, components)


def random_markov_triple(
    dim: int, rng: np.random.Generator, max_labels: int = 3
) -> MarkovTriple:
    """Latent label Z with per-label Gaussian conditionals for X and Y."""
    labels = int(rng.integers(2, max_labels + 1))
    raw = rng.uniform(0.5, 1.5, size=labels)
    x_given_z = []
    y_given_z = []
    for z in range(labels):
        x_given_z.append(
            GaussianMixture.gaussian(rng.normal(0.0, 1.0, size=dim), random_spd(dim, rng, 100.0))
        )
        y_given_z.append(
            GaussianMixture.gaussian(rng.normal(0.0, 1.0, size=dim), random_spd(dim, rng, 100.0))
        )
    return MarkovTriple(raw / raw.sum(), x_given_z, y_given_z)


def proportional_markov_triple(
    dim: int, rng: np.random.Generator, max_labels: int = 3
) -> MarkovTriple:
    """Equality family for the conditional entropy-power check: every label
    shares one covariance ratio c between the X and Y conditionals."""
    labels = int(rng.integers(2, max_labels + 1))
    raw = rng.uniform(0.5, 1.5, size=labels)
    ratio = float(rng.uniform(0.5, 2.0))
    x_given_z = []
    y_given_z = []
    for z in range(labels):
        cov = random_spd(dim, rng, 100.0)
        x_given_z.append(GaussianMixture.gaussian(rng.normal(0.0, 1.0, size=dim), cov))
        y_given_z.append(
            GaussianMixture.gaussian(rng.normal(0.0, 1.0, size=dim), ratio * cov.entries)
        )
    return MarkovTriple(raw / raw.sum(), x_given_z, y_given_z)


def shared_prefix_pair(
    dim: int, rng: np.random.Generator
) -> tuple[GaussianMixture, GaussianMixture]:
    """Centered Gaussian pair whose leading (n-1)-marginals are equal as
    laws: the second covariance reuses the prefix block, shrinks the cross
    column, and inflates the last diagonal entry, which keeps it positive
    definite."""
    base = random_spd(dim, rng, condition_cap=100.0)
    other = np.array(base.entries)
    other[-1, :-1] *= rng.uniform(0.0, 1.0)
    other[:-1, -1] = other[-1, :-1]
    other[-1, -1] += rng.uniform(0.5, 2.0)
    zero = np.zeros(dim)
    return (
        GaussianMixture.gaussian(zero, base),
        GaussianMixture.gaussian(zero, other),
    )


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.standard_normal(dim)
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            return v / norm


def _instance_rng(seed: int, family: str, dim: int, idx: int, role: str = ""):
    return rng_from_tokens(seed, "instance", family, dim, idx, role)


def generate_instance(family: str, dim: int, idx: int, seed: int):
    """Deterministic instance for (family, dim, idx) under the given seed."""
    if family == "mixture_pair":
        return (
            random_mixture(dim, _instance_rng(seed, family, dim, idx, "x")),
            random_mixture(dim, _instance_rng(seed, family, dim, idx, "y")),
        )
    if family == "mixture_single":
        return random_mixture(dim, _instance_rng(seed, family, dim, idx))
    if family == "markov_triple":
        return random_markov_triple(dim, _instance_rng(seed, family, dim, idx))
    if family == "prefix_pair":
        return shared_prefix_pair(dim, _instance_rng(seed, family, dim, idx))
    if family == "spd_pair":
        rng = _instance_rng(seed, family, dim, idx)
        return (random_spd(dim, rng), random_spd(dim, rng))
    if family == "vector":
        rng = _instance_rng(seed, family, dim, idx)
        v = rng.normal(0.0, 1.0, size=dim)
        return v if np.any(v) else v + 1.0
    if family == "equality_seed":
        return (dim, _instance_rng(seed, family, dim, idx, "pair"))
    raise ConfigError(f"unknown instance family {family!r}")


# --------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class RegistryEntry:
    family: str
    min_dim: int
    allowed: frozenset
    defaults: dict
    run: object  # (instance, params, cfg, instance_id) -> list[InequalityReport]


def _pair_runner(fn):
    def run(inst, params, cfg, iid):
        x, y = inst
        return [fn(x, y, cfg=cfg, instance_id=iid)]

    return run


def _single_runner(fn):
    def run(inst, params, cfg, iid):
        return [fn(inst, cfg=cfg, instance_id=iid)]

    return run


def _lambda_runner(fn):
    def run(inst, params, cfg, iid):
        x, y = inst
        return [
            fn(x, y, lam, cfg=cfg, instance_id=iid) for lam in params["lambdas"]
        ]

    return run


def _run_kyfan(inst, params, cfg, iid):
    x, y = inst
    size = params["subset_size"]
    if size is None:
        size = min(2, x.dim - 1)
    subset = range(x.dim - size, x.dim)
    return [
        check_entropic_kyfan(x, y, subset, lam, cfg=cfg, instance_id=iid)
        for lam in params["lambdas"]
    ]


def _run_equality_case(inst, params, cfg, iid):
    dim, rng = inst
    return [check_equality_case_bonnesen(dim, cfg=cfg, rng=rng, instance_id=iid)]


def _run_de_bruijn(inst, params, cfg, iid):
    return [check_de_bruijn(inst, t=params["t"], dt=params["dt"], cfg=cfg, instance_id=iid)]


def _run_projective(inst, params, cfg, iid):
    x, y = inst
    if params["direction"] == "random":
        u = random_unit_vector(x.dim, rng_from_tokens(cfg.seed, "instance", "direction", x.dim, iid))
    else:
        u = np.zeros(x.dim)
        u[-1] = 1.0
    return [check_projective_fisher(x, y, u, cfg=cfg, instance_id=iid)]


def _run_tm_limit(inst, params, cfg, iid):
    return [check_tm_limit(inst, m_values=params["m_values"], cfg=cfg, instance_id=iid)]


def _run_sphere(inst, params, cfg, iid):
    return [check_sphere_identity(inst, cfg=cfg, instance_id=iid)]


def _run_stam_recovery(inst, params, cfg, iid):
    x, y = inst
    return [check_stam_recovery(x, y, m_dirs=params["m_dirs"], cfg=cfg, instance_id=iid)]


def _run_matrix_bergstrom(inst, params, cfg, iid):
    a, b = inst
    i = params["index"]
    if i is None:
        i = a.dim - 1
    return [check_matrix_bergstrom(a, b, i, cfg=cfg, instance_id=iid)]


def _run_matrix_kyfan(inst, params, cfg, iid):
    a, b = inst
    k = params["k"]
    if k is None:
        k = min(2, a.dim - 1)
    return [check_matrix_kyfan(a, b, k, cfg=cfg, instance_id=iid)]


REGISTRY: dict[str, RegistryEntry] = {
    "epi": RegistryEntry("mixture_pair", 1, frozenset(), {}, _pair_runner(check_epi)),
    "conditional_epi": RegistryEntry(
        "markov_triple", 1, frozenset(), {}, _single_runner(check_conditional_epi)
    ),
    "entropic_bergstrom": RegistryEntry(
        "mixture_pair", 2, frozenset(), {}, _pair_runner(check_entropic_bergstrom)
    ),
    "conditional_form": RegistryEntry(
        "mixture_pair", 2, frozenset({"lambdas"}),
        {"lambdas": LAMBDA_GRID_DEFAULT}, _lambda_runner(check_conditional_form),
    ),
    "lambda_form": RegistryEntry(
        "mixture_pair", 2, frozenset({"lambdas"}),
        {"lambdas": LAMBDA_GRID_DEFAULT}, _lambda_runner(check_lambda_form),
    ),
    "entropic_kyfan": RegistryEntry(
        "mixture_pair", 2, frozenset({"lambdas", "subset_size"}),
        {"lambdas": (0.5,), "subset_size": None}, _run_kyfan,
    ),
    "entropic_bonnesen": RegistryEntry(
        "prefix_pair", 2, frozenset({"lambdas"}),
        {"lambdas": LAMBDA_GRID_DEFAULT}, _lambda_runner(check_entropic_bonnesen),
    ),
    "equality_case_bonnesen": RegistryEntry(
        "equality_seed", 2, frozenset(), {}, _run_equality_case
    ),
    "isoperimetric_sharp": RegistryEntry(
        "mixture_single", 2, frozenset(), {}, _single_runner(check_isoperimetric_sharp)
    ),
    "isoperimetric_dominance": RegistryEntry(
        "mixture_single", 2, frozenset(), {}, _single_runner(check_isoperimetric_dominance)
    ),
    "de_bruijn": RegistryEntry(
        "mixture_single", 1, frozenset({"t", "dt"}), {"t": 0.1, "dt": 1e-3}, _run_de_bruijn
    ),
    "blachman_stam": RegistryEntry(
        "mixture_pair", 1, frozenset(), {}, _pair_runner(check_blachman_stam)
    ),
    "projective_fisher": RegistryEntry(
        "mixture_pair", 1, frozenset({"direction"}), {"direction": "last_axis"}, _run_projective
    ),
    "tm_limit": RegistryEntry(
        "mixture_single", 2, frozenset({"m_values"}),
        {"m_values": (2, 4, 8, 16, 32, 64)}, _run_tm_limit,
    ),
    "sphere_identity": RegistryEntry("vector", 1, frozenset(), {}, _run_sphere),
    "stam_recovery": RegistryEntry(
        "mixture_pair", 1, frozenset({"m_dirs"}), {"m_dirs": 256}, _run_stam_recovery
    ),
    "matrix_bergstrom": RegistryEntry(
        "spd_pair", 2, frozenset({"index"}), {"index": None}, _run_matrix_bergstrom
    ),
    "matrix_kyfan": RegistryEntry(
        "spd_pair", 2, frozenset({"k"}), {"k": None}, _run_matrix_kyfan
    ),
}


# --------------------------------------------------------------------------
# configuration


@dataclass
class CheckRequest:
    name: str
    dims: tuple
    instances: int
    mc_samples: int | None = None
    params: dict = field(default_factory=dict)


@dataclass
class SuiteConfig:
    seed: int = 0
    dims: tuple = (2, 3)
    instances_per_check: int = 1
    mc_samples: int = 20_000
    z: float = 3.0
    abs_tol: float = 1e-9
    eq_tol: float = 1e-10
    rel_stderr_cap: float = 0.10
    output_path: str | None = None
    output_format: str = "json"
    checks: list = field(default_factory=list)


def _expect_mapping(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(value).__name__}")
    return value


def _reject_unknown(data: dict, allowed, where: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(map(repr, unknown))}")


def _as_int(value, key: str, minimum: int = 1) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{key!r} must be an integer >= {minimum}, got {value!r}")
    return value


def _as_dims(value, key: str) -> tuple:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{key!r} must be a nonempty list of dimensions")
    return tuple(_as_int(v, key) for v in value)


def config_from_dict(data: dict) -> SuiteConfig:
    """Build a suite configuration, rejecting unknown or ill-typed keys."""
    data = _expect_mapping(data, "config")
    _reject_unknown(
        data,
        ("seed", "dims", "instances_per_check", "mc_samples", "z", "tolerances",
         "output", "checks"),
        "config",
    )
    config = SuiteConfig()
    if "seed" in data:
        config.seed = _as_int(data["seed"], "seed", minimum=0)
    if "dims" in data:
        config.dims = _as_dims(data["dims"], "dims")
    if "instances_per_check" in data:
        config.instances_per_check = _as_int(data["instances_per_check"], "instances_per_check")
    if "mc_samples" in data:
        config.mc_samples = _as_int(data["mc_samples"], "mc_samples", minimum=2)
    if "z" in data:
        if not isinstance(data["z"], (int, float)) or data["z"] <= 0:
            raise ConfigError(f"'z' must be a positive number, got {data['z']!r}")
        config.z = float(data["z"])
    if "tolerances" in data:
        tol = _expect_mapping(data["tolerances"], "'tolerances'")
        _reject_unknown(tol, ("abs_tol", "eq_tol", "rel_stderr_cap"), "tolerances")
        for key in tol:
            value = tol[key]
            if not isinstance(value, (int, float)) or value < 0:
                raise ConfigError(f"tolerance {key!r} must be a nonnegative number")
            setattr(config, key, float(value))
    if "output" in data:
        out = _expect_mapping(data["output"], "'output'")
        _reject_unknown(out, ("path", "format"), "output")
        if "path" in out:
            if not isinstance(out["path"], str) or not out["path"]:
                raise ConfigError("output 'path' must be a nonempty string")
            config.output_path = out["path"]
        if "format" in out:
            if out["format"] not in ("json", "csv"):
                raise ConfigError(f"output 'format' must be 'json' or 'csv', got {out['format']!r}")
            config.output_format = out["format"]

    requested = data.get("checks", sorted(REGISTRY))
    if not isinstance(requested, list) or not requested:
        raise ConfigError("'checks' must be a nonempty list")
    for item in requested:
        if isinstance(item, str):
            item = {"name": item}
        item = _expect_mapping(item, "check entry")
        _reject_unknown(item, ("name", "dims", "instances", "mc_samples", "params"), "check")
        name = item.get("name")
        if name not in REGISTRY:
            known = ", ".join(sorted(REGISTRY))
            raise ConfigError(f"unknown check {name!r}; known checks: {known}")
        entry = REGISTRY[name]
        dims = _as_dims(item["dims"], "dims") if "dims" in item else config.dims
        dims = tuple(d for d in dims if d >= entry.min_dim) or (entry.min_dim,)
        instances = (
            _as_int(item["instances"], "instances")
            if "instances" in item
            else config.instances_per_check
        )
        mc = _as_int(item["mc_samples"], "mc_samples", minimum=2) if "mc_samples" in item else None
        params = dict(entry.defaults)
        if "params" in item:
            given = _expect_mapping(item["params"], f"params for {name!r}")
            _reject_unknown(given, entry.allowed, f"{name} params")
            params.update(given)
        config.checks.append(CheckRequest(name, dims, instances, mc, params))
    return config


def default_config(seed: int = 0) -> SuiteConfig:
    """Every registered check on dims (2, 3), one instance per dim."""
    config = SuiteConfig(seed=seed)
    for name in REGISTRY:
        entry = REGISTRY[name]
        dims = tuple(d for d in config.dims if d >= entry.min_dim) or (entry.min_dim,)
        config.checks.append(
            CheckRequest(name, dims, config.instances_per_check, None, dict(entry.defaults))
        )
    return config


# --------------------------------------------------------------------------
# execution and reporting


def run_suite(config: SuiteConfig) -> tuple[dict, int]:
    """Run every requested check; exit code 1 iff any verdict is violated."""
    records: list[InequalityReport] = []
    for req in config.checks:
        entry = REGISTRY[req.name]
        cfg = CheckConfig(
            m=req.mc_samples if req.mc_samples is not None else config.mc_samples,
            seed=config.seed,
            z=config.z,
            abs_tol=config.abs_tol,
            eq_tol=config.eq_tol,
            rel_stderr_cap=config.rel_stderr_cap,
        )
        for dim in req.dims:
            for idx in range(req.instances):
                iid = f"{entry.family}-d{dim}-{idx}"
                instance = generate_instance(entry.family, dim, idx, config.seed)
                records.extend(entry.run(instance, req.params, cfg, iid))

    summary: dict[str, dict[str, int]] = {}
    for record in records:
        bucket = summary.setdefault(
            record.check_name, {SUMMARY_KEYS[v]: 0 for v in VERDICT_ORDER}
        )
        bucket[SUMMARY_KEYS[record.verdict]] += 1
    report = {
        "version": 1,
        "seed": config.seed,
        "records": [r.to_dict() for r in records],
        "summary": summary,
    }
    exit_code = 1 if any(r.verdict == VERDICT_VIOLATED for r in records) else 0
    return report, exit_code


def report_to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in report["records"]:
        row = []
        for col in CSV_COLUMNS:
            value = record[col]
            row.append("" if value is None else value)
        writer.writerow(row)
    return buf.getvalue()


def write_report(report: dict, path: str, fmt: str = "json") -> None:
    if fmt == "json":
        text = json.dumps(report, indent=2) + "\n"
    elif fmt == "csv":
        text = report_to_csv(report)
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
