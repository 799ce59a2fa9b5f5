"""Monte Carlo study: benchmark models, replicate runner, table emitter.

Seven regression models are built in. The single-index family (A1..A3) uses
one true direction; the others (B1..B4) use two. Covariates are elliptical
with a configurable radial family; B4 intentionally deviates from ellipticity
in its first coordinate. Replicates are seeded ``base_seed + replicate_index``
so serial and parallel runs agree bit for bit.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass

import numpy as np

from .elliptical import Dataset, EllipticalSpec, GeneratorKind, generator_from_name, sample_elliptical
from .errors import EsirError, MissingCell, TooManyFailures
from .linalg import spectral_norm
from .metrics import TruthSpec, r_squared
from .sdr import esir_fit, sir_fit, slice_mean_tau

MODEL_IDS = ("A1", "A2", "A3", "B1", "B2", "B3", "B4")
NOISE_SD = 0.5

TABLE1_DISTS = ("normal", "laplace", "logistic", "t3", "t2", "cauchy")
TABLE34_DISTS = ("normal", "logistic", "ec1", "t3", "t2", "cauchy")
_DIST_ORDER = ("normal", "laplace", "logistic", "ec1", "t3", "t2", "cauchy")


@dataclass(frozen=True)
class ModelSpec:
    """One benchmark model: dimensions, scatter, true directions, noise."""

    id: str
    p: int
    generator: GeneratorKind
    sigma: np.ndarray
    b_true: np.ndarray
    sigma_noise: float = NOISE_SD

    @property
    def k(self) -> int:
        return self.b_true.shape[0]


def ar_scatter(p: int, rho: float = 0.5) -> np.ndarray:
    """Autoregressive structure: entry (i, j) equals rho^|i-j|."""
    idx = np.arange(p)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def _b4_sigma(p: int) -> np.ndarray:
    """Population scatter used to score B4 fits.

    Coordinates 2..p carry the AR(0.5) scatter. The first coordinate is
    |X2 + X3| plus unit noise; under the normal reference its variance is
    1 + 3 (1 - 2/pi) and its covariances with the block vanish by symmetry.
    """
    full = np.zeros((p, p))
    full[1:, 1:] = ar_scatter(p - 1)
    full[0, 0] = 1.0 + 3.0 * (1.0 - 2.0 / np.pi)
    return full


def model_spec(model_id: str, dist: str, p: int = 10) -> ModelSpec:
    """Build the full model configuration for one benchmark id.

    ``p`` is the covariate dimension; B2 and B3 force p=5 to match their
    fixed scatter and directions.
    """
    mid = model_id.strip().upper()
    if mid not in MODEL_IDS:
        raise ValueError(f"unknown model {model_id!r}; expected one of {MODEL_IDS}")
    if mid in ("A1", "A2", "A3"):
        if p < 1:
            raise ValueError("p must be >= 1")
        sigma = np.eye(p)
        b = np.zeros((1, p))
        b[0, 0] = 1.0
        return ModelSpec(mid, p, generator_from_name(dist, p), sigma, b)
    if mid == "B1":
        if p < 2:
            raise ValueError("B1 needs p >= 2")
        sigma = np.eye(p)
        b = np.zeros((2, p))
        b[0, 0] = 1.0
        b[1, 1] = 1.0
        return ModelSpec(mid, p, generator_from_name(dist, p), sigma, b)
    if mid in ("B2", "B3"):
        p = 5
        sigma = np.diag([2.0, 2.0, 2.0, 4.0, 2.0])
        b = np.array([[1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 1.0, 1.0, 0.0, 0.0]])
        return ModelSpec(mid, p, generator_from_name(dist, p), sigma, b)
    # B4: first coordinate is |X2 + X3| + noise, the rest are elliptical
    if p < 5:
        raise ValueError("B4 needs p >= 5")
    b = np.zeros((2, p))
    b[0, :4] = 0.5
    b[1, :4] = [0.5, -0.5, 0.5, -0.5]
    return ModelSpec(mid, p, generator_from_name(dist, p - 1), _b4_sigma(p), b)


def truth_spec(model: ModelSpec) -> TruthSpec:
    return TruthSpec(model.b_true, model.sigma)


def model_response(model: ModelSpec, x: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Responses for given covariates and noise draws (sigma_noise applied)."""
    s = model.sigma_noise
    f1 = x @ model.b_true[0]
    if model.id == "A1":
        return 1.0 / (0.5 + (f1 + 1.5) ** 2) + s * eps
    if model.id == "A2":
        return 0.5 + (f1 + 1.5) ** 2 + s * eps
    if model.id == "A3":
        return (f1 + 2.0) * (s * eps)
    f2 = x @ model.b_true[1]
    if model.id == "B1":
        return f1 / (0.5 + (f2 + 1.5) ** 2) + s * eps
    if model.id == "B2":
        return 4.0 + f1 + (f2 + 2.0) * (s * eps)
    if model.id == "B3":
        return (4.0 + f1) * (f2 + 2.0) + s * eps
    return f1**2 + np.abs(f2) + s * eps  # B4


def gen_dataset(model: ModelSpec, n: int, rng: np.random.Generator) -> Dataset:
    """One simulated dataset; draw order is covariates, then (B4) the first
    coordinate's noise, then the response noise."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if model.id == "B4":
        block = sample_elliptical(
            EllipticalSpec(np.zeros(model.p - 1), ar_scatter(model.p - 1), model.generator),
            n,
            rng,
        )
        zeta = rng.standard_normal(n)
        x = np.column_stack([np.abs(block[:, 0] + block[:, 1]) + zeta, block])
    else:
        x = sample_elliptical(
            EllipticalSpec(np.zeros(model.p), model.sigma, model.generator), n, rng
        )
    eps = rng.standard_normal(n)
    return Dataset(x, model_response(model, x, eps))


@dataclass(frozen=True)
class ReplicateSummary:
    """Per-direction R-squared summary for one simulation cell."""

    model: str
    dist: str
    n: int
    p: int
    h: int
    k: int
    method: str
    rep_count: int
    excluded: int
    r2_mean: tuple[float, ...]
    r2_sd: tuple[float, ...]
    avg_r2: float
    seed: int

    def to_record(self) -> dict:
        return {
            "model": self.model,
            "dist": self.dist,
            "n": self.n,
            "p": self.p,
            "h": self.h,
            "k": self.k,
            "method": self.method,
            "rep_count": self.rep_count,
            "excluded": self.excluded,
            "r2_mean": list(self.r2_mean),
            "r2_sd": list(self.r2_sd),
            "avg_r2": self.avg_r2,
            "seed": self.seed,
        }


def worker_count(explicit: int | None = None) -> int:
    """Worker threads for replicate runs; ESIR_THREADS=0 means auto."""
    if explicit is not None:
        value = int(explicit)
    else:
        env = os.environ.get("ESIR_THREADS", "").strip()
        if not env:
            return 1
        value = int(env)
    if value < 0:
        raise ValueError("thread count must be >= 0")
    if value == 0:
        return os.cpu_count() or 1
    return value


def run_cell(
    model: str,
    dist: str,
    n: int,
    p: int,
    h: int,
    k: int | None = None,
    reps: int = 100,
    method: str = "esir",
    base_seed: int = 0,
    max_workers: int | None = None,
) -> ReplicateSummary:
    """Fit ``reps`` independent replicates and summarize per-direction R².

    Replicate ``r`` uses seed ``base_seed + r``. Replicates whose fit raises a
    library error (near-singular whitening and the like) are excluded and
    counted; more than 10% of them raises :class:`TooManyFailures`.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if method not in ("sir", "esir"):
        raise ValueError(f"method must be 'sir' or 'esir', got {method!r}")
    spec = model_spec(model, dist, p)
    if k is None:
        k = spec.k
    truth = truth_spec(spec)
    fit_fn = esir_fit if method == "esir" else sir_fit

    def one(rep: int) -> np.ndarray:
        rng = np.random.default_rng(base_seed + rep)
        data = gen_dataset(spec, n, rng)
        fit = fit_fn(data, h, k)
        return np.array([r_squared(row, truth) for row in fit.directions])

    outcomes: list = [None] * reps
    workers = worker_count(max_workers)
    if workers == 1:
        for rep in range(reps):
            try:
                outcomes[rep] = one(rep)
            except EsirError as err:
                outcomes[rep] = err
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(one, rep): rep for rep in range(reps)}
            for fut in as_completed(futures):
                rep = futures[fut]
                try:
                    outcomes[rep] = fut.result()
                except EsirError as err:
                    outcomes[rep] = err

    good = [o for o in outcomes if not isinstance(o, EsirError)]
    excluded = reps - len(good)
    if excluded > 0.1 * reps:
        raise TooManyFailures(f"{excluded} of {reps} replicates failed")
    values = np.vstack(good)
    if values.shape[0] > 1:
        sd = values.std(axis=0, ddof=1)
    else:
        sd = np.zeros(values.shape[1])
    return ReplicateSummary(
        model=spec.id,
        dist=dist,
        n=n,
        p=spec.p,
        h=h,
        k=k,
        method=method,
        rep_count=values.shape[0],
        excluded=excluded,
        r2_mean=tuple(float(v) for v in values.mean(axis=0)),
        r2_sd=tuple(float(v) for v in sd),
        avg_r2=float(values.mean(axis=1).mean()),
        seed=base_seed,
    )


def _dist_sort_key(d: str):
    return (_DIST_ORDER.index(d) if d in _DIST_ORDER else len(_DIST_ORDER), d)


def _cell_index(cells, axes) -> dict:
    index = {}
    for cell in cells:
        key = tuple(getattr(cell, a) for a in axes)
        index[key] = cell
    return index


def _require_grid(index: dict, axes_values: list[tuple]) -> None:
    import itertools

    for key in itertools.product(*axes_values):
        if key not in index:
            raise MissingCell(f"no summary for {key}")


def _fmt(mean: float, sd: float) -> str:
    return f"{mean:.2f} ({sd:.2f})"


def _render_rows(header: list[str], rows: list[list[str]]) -> str:
    table = [header] + rows
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in table]
    return "\n".join(lines)


def _render_single_direction(cells) -> str:
    models = sorted({c.model for c in cells})
    dists = sorted({c.dist for c in cells}, key=_dist_sort_key)
    methods = sorted({c.method for c in cells}, reverse=True)  # sir before esir
    index = _cell_index(cells, ("model", "dist", "method"))
    _require_grid(index, [tuple(models), tuple(dists), tuple(methods)])
    blocks = []
    for model in models:
        rows = []
        for method in methods:
            row = [model, method.upper()]
            for dist in dists:
                cell = index[(model, dist, method)]
                row.append(_fmt(cell.r2_mean[0], cell.r2_sd[0]))
            rows.append(row)
        blocks.append(_render_rows(["model", "method"] + list(dists), rows))
    return "\n\n".join(blocks)


def _render_two_direction(cells) -> str:
    models = sorted({c.model for c in cells})
    dists = sorted({c.dist for c in cells}, key=_dist_sort_key)
    methods = sorted({c.method for c in cells}, reverse=True)
    index = _cell_index(cells, ("model", "dist", "method"))
    _require_grid(index, [tuple(models), tuple(dists), tuple(methods)])
    header = ["model", "method"]
    for dist in dists:
        header += [f"{dist}:R2(b1)", f"{dist}:R2(b2)", f"{dist}:avg"]
    rows = []
    for model in models:
        for method in methods:
            row = [model, method.upper()]
            for dist in dists:
                cell = index[(model, dist, method)]
                row.append(_fmt(cell.r2_mean[0], cell.r2_sd[0]))
                row.append(_fmt(cell.r2_mean[1], cell.r2_sd[1]))
                row.append(f"{cell.avg_r2:.2f}")
            rows.append(row)
    return _render_rows(header, rows)


def _render_grid(cells) -> str:
    ns = sorted({c.n for c in cells})
    ps = sorted({c.p for c in cells})
    hs = sorted({c.h for c in cells})
    methods = sorted({c.method for c in cells}, reverse=True)
    index = _cell_index(cells, ("n", "h", "p", "method"))
    _require_grid(index, [tuple(ns), tuple(hs), tuple(ps), tuple(methods)])
    n_dirs = max(len(c.r2_mean) for c in cells)
    blocks = []
    for n in ns:
        header = ["method", "stat"] + [f"H={h},p={p}" for h in hs for p in ps]
        rows = []
        for method in methods:
            for direction in range(n_dirs):
                row = [method.upper(), f"R2(b{direction + 1})"]
                for h in hs:
                    for p in ps:
                        cell = index[(n, h, p, method)]
                        row.append(f"{cell.r2_mean[direction]:.2f}")
                rows.append(row)
        blocks.append(f"n={n}\n" + _render_rows(header, rows))
    return "\n\n".join(blocks)


def emit_table(cells, layout: str) -> tuple[str, list[dict]]:
    """Render summaries as an aligned text table plus JSON-ready records.

    ``layout`` is one of ``table1`` (single-direction models by distribution),
    ``table2`` (one model over an n/p/H grid), or ``table3_4``
    (two-direction models by distribution). The cells must cover the full
    cartesian grid of the axis values they mention, else :class:`MissingCell`.
    """
    if not cells:
        raise MissingCell("no summaries supplied")
    name = layout.strip().lower()
    if name == "table1":
        text = _render_single_direction(cells)
    elif name == "table2":
        text = _render_grid(cells)
    elif name == "table3_4":
        text = _render_two_direction(cells)
    else:
        raise ValueError(f"unknown layout {layout!r}")
    return text, [c.to_record() for c in cells]


@dataclass(frozen=True)
class ConvergencePoint:
    """Mean spectral error of the slice-mean tau matrix at one sample size."""

    n: int
    h: int
    mean_error: float
    std_error: float
    reps: int


def convergence_experiment(
    model: str,
    dist: str,
    n_grid,
    h_rule,
    oracle_n: int,
    reps: int,
    base_seed: int = 0,
    p: int = 10,
    standardized: bool = False,
) -> list[ConvergencePoint]:
    """Empirical check that the slice-mean tau matrix settles as n grows.

    A large-sample target is computed once from ``oracle_n`` observations
    with sqrt(oracle_n) slices, then for each n in ``n_grid`` the mean (over
    ``reps`` replicates) spectral-norm distance to that target is reported.
    ``h_rule`` maps n to the slice count. The oracle dataset uses
    ``base_seed``; grid replicates use ``base_seed + 1 + grid_index * reps +
    replicate_index``.
    """
    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be nonempty and strictly increasing")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if oracle_n < 10 * max(n_grid):
        raise ValueError("oracle_n must be at least 10x the largest grid size")
    spec = model_spec(model, dist, p)

    oracle_rng = np.random.default_rng(base_seed)
    oracle_data = gen_dataset(spec, oracle_n, oracle_rng)
    oracle_h = int(np.sqrt(oracle_n))
    oracle = slice_mean_tau(oracle_data.x, oracle_data.y, oracle_h, standardized)

    points = []
    for gi, n in enumerate(n_grid):
        h = int(h_rule(n))
        errors = np.empty(reps)
        for rep in range(reps):
            rng = np.random.default_rng(base_seed + 1 + gi * reps + rep)
            data = gen_dataset(spec, n, rng)
            estimate = slice_mean_tau(data.x, data.y, h, standardized)
            errors[rep] = spectral_norm(estimate - oracle)
        sd = float(errors.std(ddof=1)) if reps > 1 else 0.0
        points.append(
            ConvergencePoint(n, h, float(errors.mean()), sd / float(np.sqrt(reps)), reps)
        )
    return points
