"""Experiment harness: RMSE of QMC/MC estimators on the production model."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .._validation import as_count, as_seed, is_prime
from ..gaussian import to_gaussian
from ..points import SAMPLERS, generate_points
from ..recourse.evaluate import BatchRecourse
from ..recourse.problem import TwoStageProblem
from .model import ProductionModelSpec, generate_model, interior_point, with_factorization
from .report import RmseRecord
from .saa import solve_saa

FACTORIZATIONS = ("pca", "cholesky")
TEST_KINDS = ("first", "second")

# seed streams derived from the master seed
STREAM_SCENARIO = 1
STREAM_REFERENCE = 2
STREAM_FIXED_X = 3


def seed_for(master: int, *path: int) -> int:
    """Independent 64-bit seed for the stream addressed by ``path``."""
    ss = np.random.SeedSequence(as_seed(master), spawn_key=tuple(int(p) for p in path))
    lo, hi = ss.generate_state(2, np.uint32)
    return int(lo) | (int(hi) << 32)


def _tuple(v, name):
    if isinstance(v, str):
        v = (v,)
    try:
        return tuple(v)
    except TypeError:
        raise TypeError(f"{name} must be a sequence") from None


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings of one RMSE experiment.

    ``fixed_x`` selects the first-stage decision of the second kind:
    ``"first_kind"`` solves a PCA-Sobol' SAA with 2**fixed_x_log2 scenarios,
    ``"midpoint"`` takes the centre of the box, and a list is used verbatim.
    MC points do not depend on the factorization in distribution, so MC runs
    only under the first listed factorization unless ``mc_all_factorizations``.
    """

    test_kind: str = "second"
    factorizations: tuple = FACTORIZATIONS
    samplers: tuple = SAMPLERS
    sizes: tuple = (128, 256, 512, 1024)
    lattice_sizes: tuple = (127, 257, 509, 1021)
    replications: int = 10
    repeats: int = 10
    seed: int = 20130
    reference_log2: int = 18
    first_kind_reference_log2: int = 12
    fixed_x: object = "first_kind"
    fixed_x_log2: int = 8
    mc_all_factorizations: bool = False
    record_runtime: bool = True
    model: ProductionModelSpec = field(default_factory=ProductionModelSpec)

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        if self.test_kind not in TEST_KINDS:
            raise ValueError(f"test_kind must be one of {TEST_KINDS}")
        for key, allowed in (("factorizations", FACTORIZATIONS), ("samplers", SAMPLERS)):
            vals = _tuple(getattr(self, key), key)
            if not vals or any(v not in allowed for v in vals) or len(set(vals)) != len(vals):
                raise ValueError(f"{key} must be distinct values from {allowed}, got {vals}")
            set_(key, vals)
        for key in ("sizes", "lattice_sizes"):
            vals = tuple(as_count(v, key) for v in _tuple(getattr(self, key), key))
            if not vals or any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{key} must be nonempty and strictly ascending")
            set_(key, vals)
        if "lattice" in self.samplers and not all(is_prime(n) for n in self.lattice_sizes):
            raise ValueError("lattice_sizes must be prime")
        set_("replications", as_count(self.replications, "replications", minimum=2))
        set_("repeats", as_count(self.repeats, "repeats"))
        set_("seed", as_seed(self.seed))
        for key in ("reference_log2", "first_kind_reference_log2", "fixed_x_log2"):
            v = as_count(getattr(self, key), key)
            if v > 24:
                raise ValueError(f"{key} must be at most 24")
            set_(key, v)
        if isinstance(self.fixed_x, str):
            if self.fixed_x not in ("first_kind", "midpoint"):
                raise ValueError("fixed_x must be 'first_kind', 'midpoint' or a vector")
        else:
            set_("fixed_x", tuple(float(v) for v in self.fixed_x))
        set_("mc_all_factorizations", bool(self.mc_all_factorizations))
        set_("record_runtime", bool(self.record_runtime))
        if isinstance(self.model, dict):
            set_("model", ProductionModelSpec(**self.model))
        if not isinstance(self.model, ProductionModelSpec):
            raise TypeError("model must be a ProductionModelSpec or a mapping")

    def sizes_for(self, sampler: str) -> tuple:
        return self.lattice_sizes if sampler == "lattice" else self.sizes

    def plan(self):
        """(factorization, sampler) pairs in run order."""
        out = []
        for fi, fact in enumerate(self.factorizations):
            for sampler in self.samplers:
                if sampler == "mc" and fi > 0 and not self.mc_all_factorizations:
                    continue
                out.append((fact, sampler))
        return out

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d = {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}
        d["model"] = self.model.to_dict()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if isinstance(data.get("model"), dict):
            model = dict(data["model"])
            bad = set(model) - set(asdict(ProductionModelSpec()))
            if bad:
                raise ValueError(f"unknown model keys: {sorted(bad)}")
            data["model"] = ProductionModelSpec(**model)
        return cls(**data)


def load_config(path) -> ExperimentConfig:
    """Read a YAML or JSON config whose keys are the ExperimentConfig fields."""
    import yaml  # JSON is a subset of YAML

    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValueError(f"config {path} must be a mapping")
    return ExperimentConfig.from_dict(data)


def _points(kind, n, d, seed):
    return generate_points(kind, n, d, seed).points


def production_integrand(problem: TwoStageProblem, x, factor=None):
    """u in [0,1)^d  ->  Phi(x, A inv_norm_cdf(u) + mean), evaluated in batch."""
    A = problem.factor if factor is None else np.asarray(factor, dtype=np.float64)
    x = problem.check_x(x)
    batch = BatchRecourse(problem)

    def f(u):
        return batch.values(x, to_gaussian(np.atleast_2d(u), A, problem.mean))

    f.d = problem.d
    return f


@dataclass(frozen=True)
class Reference:
    """Nested-net reference value: ``value`` uses all 2**log2 points, ``half`` the first half."""

    value: float
    half: float
    log2: int

    @property
    def drift(self) -> float:
        return abs(self.value - self.half) / abs(self.value)

    def stable_against(self, rmse: float) -> bool:
        return self.drift < rmse / 5.0


def _problems(config, problem):
    base = generate_model(config.model) if problem is None else problem
    return {k: with_factorization(base, k) for k in config.factorizations}, base


def fixed_decision(config: ExperimentConfig, problem: TwoStageProblem) -> np.ndarray:
    if config.fixed_x == "midpoint":
        return interior_point(problem)
    if config.fixed_x == "first_kind":
        pca = with_factorization(problem, "pca")
        pts = _points("sobol", 2 ** config.fixed_x_log2, pca.d,
                      seed_for(config.seed, STREAM_FIXED_X))
        return solve_saa(pca, to_gaussian(pts, pca.factor, pca.mean)).x
    return problem.check_x(np.asarray(config.fixed_x))


def second_kind_reference(config: ExperimentConfig, problem: TwoStageProblem, x) -> Reference:
    pca = with_factorization(problem, "pca")
    pts = _points("sobol", 2 ** config.reference_log2, pca.d,
                  seed_for(config.seed, STREAM_REFERENCE))
    vals = BatchRecourse(pca).values(x, to_gaussian(pts, pca.factor, pca.mean))
    return Reference(float(vals.mean()), float(vals[: vals.size // 2].mean()),
                     config.reference_log2)


def first_kind_reference(config: ExperimentConfig, problem: TwoStageProblem) -> Reference:
    pca = with_factorization(problem, "pca")
    n = 2 ** config.first_kind_reference_log2
    pts = _points("sobol", n, pca.d, seed_for(config.seed, STREAM_REFERENCE))
    xi = to_gaussian(pts, pca.factor, pca.mean)
    full = solve_saa(pca, xi).value
    half = solve_saa(pca, xi[: n // 2]).value
    return Reference(float(full), float(half), config.first_kind_reference_log2)


def _run(config, problems, statistic, reference, kind):
    records = []
    for fact, sampler in config.plan():
        prob = problems[fact]
        fi, si = FACTORIZATIONS.index(fact), SAMPLERS.index(sampler)
        for b in range(config.repeats):
            for n in config.sizes_for(sampler):
                t0 = time.perf_counter()
                est = []
                for r in range(config.replications):
                    seed = seed_for(config.seed, STREAM_SCENARIO, si, fi, n, b, r)
                    pts = _points(sampler, n, prob.d, seed)
                    est.append(statistic(prob, to_gaussian(pts, prob.factor, prob.mean)))
                dt = time.perf_counter() - t0 if config.record_runtime else 0.0
                records.append(RmseRecord.from_estimates(kind, sampler, fact, n, b, est,
                                                         reference.value, dt))
    return sorted(records)


def run_second_kind(config: ExperimentConfig, problem: TwoStageProblem | None = None,
                    x=None, reference: Reference | None = None) -> list[RmseRecord]:
    """Relative RMSE of (1/n) sum_j Phi(x, xi_j) at a fixed first stage."""
    problems, base = _problems(config, problem)
    x = fixed_decision(config, base) if x is None else base.check_x(x)
    if reference is None:
        reference = second_kind_reference(config, base, x)
    batches = {k: BatchRecourse(p) for k, p in problems.items()}

    def statistic(prob, xi):
        return float(batches[prob.meta["factorization"]].values(x, xi).mean())

    return _run(config, problems, statistic, reference, "second")


def run_first_kind(config: ExperimentConfig, problem: TwoStageProblem | None = None,
                   reference: Reference | None = None) -> list[RmseRecord]:
    """Relative RMSE of the SAA optimal value."""
    problems, base = _problems(config, problem)
    if reference is None:
        reference = first_kind_reference(config, base)
    return _run(config, problems, lambda prob, xi: solve_saa(prob, xi).value, reference,
                "first")


@dataclass
class ExperimentResult:
    records: list
    reference: Reference
    x: np.ndarray | None
    config: ExperimentConfig

    def meta(self) -> dict:
        return {"config": self.config.to_dict(),
                "reference": {"value": self.reference.value, "half": self.reference.half,
                              "log2": self.reference.log2, "drift": self.reference.drift},
                "x": None if self.x is None else self.x.tolist()}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    problem = generate_model(config.model)
    if config.test_kind == "first":
        ref = first_kind_reference(config, problem)
        return ExperimentResult(run_first_kind(config, problem, ref), ref, None, config)
    x = fixed_decision(config, problem)
    ref = second_kind_reference(config, problem, x)
    return ExperimentResult(run_second_kind(config, problem, x, ref), ref, x, config)
