"""Config-driven convergence experiments with statistical verdicts.

Each experiment turns one of the limit statements into a finite sweep:
shell mass over shrinking scales, inclusion probabilities over growing
sample sizes, zero-cell inclusion frequencies, windowed volume moments,
the two-component volume anomaly, and exact one-dimensional checks.

Every row's verdict is recomputable from the row itself plus the
configured thresholds: it passes when |z| <= z_max (for rows with a
standard error) or when |estimate - reference| <= abs_tol.  Trials are
keyed to random streams by trial index, so results do not depend on the
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .boundary import (
    BoundaryDensity,
    DirectionalIntensity,
    directional_intensity,
    erosion_mass,
    inclusion_exponent,
)
from .errors import PreconditionViolation
from .geometry import (
    Ball,
    Box,
    Hull,
    SetModel,
    VCompact,
    sample_window,
    window_volume,
)
from .intersections import (
    IntersectionProcess,
    ZeroCellProcess,
    _one_volume,
    closed_form_inclusion,
    inclusion_trial,
    realize_intersection,
    window_circumradius,
)
from .sampling import RngStream, default_window_radius, sample_hyperplanes, sample_points
from .stats import KS_CRITICAL_1PCT, wilson_sigma

EROSION_LIMIT = "erosionLimit"
INCLUSION_CONVERGENCE = "inclusionConvergence"
ZERO_CELL_SELF_CHECK = "zeroCellSelfCheck"
VOLUME_MOMENTS = "volumeMoments"
TWO_BALL_ANOMALY = "twoBallAnomaly"
D1_EXACT = "d1Exact"

KINDS = (
    EROSION_LIMIT,
    INCLUSION_CONVERGENCE,
    ZERO_CELL_SELF_CHECK,
    VOLUME_MOMENTS,
    TWO_BALL_ANOMALY,
    D1_EXACT,
)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    sweep: tuple[float, ...]
    trials: int = 1
    n: int | None = None
    mc_points: int = 100_000
    window: Box | None = None
    model: SetModel | None = None
    density: BoundaryDensity | None = None
    probe: VCompact | None = None
    intensity: DirectionalIntensity | None = None
    alpha: float | None = None
    z_max: float = 4.0
    abs_tol: float = 1e-9
    root_seed: int | None = None
    single_window: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        sweep = tuple(float(v) for v in self.sweep)
        if len(sweep) == 0:
            raise ValueError("sweep must be nonempty")
        diffs = np.diff(sweep)
        if len(sweep) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep must be strictly monotone")
        object.__setattr__(self, "sweep", sweep)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    sweep_value: float
    estimate: float
    stderr: float
    reference: float
    z_score: float
    passed: bool
    seed: int
    trials: int


def make_row(
    experiment: str,
    sweep_value: float,
    estimate: float,
    stderr: float,
    reference: float,
    cfg: ExperimentConfig,
    seed: int,
    trials: int | None = None,
) -> ResultRow:
    z = (estimate - reference) / stderr if stderr > 0 else math.nan
    passed = (stderr > 0 and abs(z) <= cfg.z_max) or abs(estimate - reference) <= cfg.abs_tol
    return ResultRow(
        experiment=experiment,
        sweep_value=float(sweep_value),
        estimate=float(estimate),
        stderr=float(stderr),
        reference=float(reference),
        z_score=float(z) if not math.isnan(z) else math.nan,
        passed=bool(passed),
        seed=int(seed),
        trials=int(trials if trials is not None else cfg.trials),
    )


def run_experiment(cfg: ExperimentConfig, seed: int, workers: int = 1) -> list[ResultRow]:
    runner = {
        EROSION_LIMIT: run_erosion_limit,
        INCLUSION_CONVERGENCE: run_inclusion_convergence,
        ZERO_CELL_SELF_CHECK: run_zero_cell_self_check,
        VOLUME_MOMENTS: run_volume_moments,
        TWO_BALL_ANOMALY: run_two_ball_anomaly,
        D1_EXACT: run_d1_exact,
    }[cfg.kind]
    return runner(cfg, seed, workers)


# ---------------------------------------------------------------------------
# Trial-parallel execution keyed by trial index.
# ---------------------------------------------------------------------------


def _chunk(worker, common, start, stop):
    return [worker(common, t) for t in range(start, stop)]


def run_trials(worker, common, trials: int, workers: int) -> np.ndarray:
    """Evaluate worker(common, t) for t in range(trials); order-stable.

    Results are reassembled by trial index, so the reduction is identical
    for any worker count.
    """
    if workers <= 1 or trials < 4:
        rows = _chunk(worker, common, 0, trials)
        return np.asarray(rows, dtype=float)
    n_chunks = min(trials, workers * 4)
    bounds = np.linspace(0, trials, n_chunks + 1, dtype=int)
    out: list[list | None] = [None] * n_chunks
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(_chunk, worker, common, int(a), int(b)): k
            for k, (a, b) in enumerate(zip(bounds[:-1], bounds[1:]))
            if b > a
        }
        for fut in futures:
            out[futures[fut]] = fut.result()
    rows = [row for part in out if part for row in part]
    return np.asarray(rows, dtype=float)


# ---------------------------------------------------------------------------
# erosionLimit: shell mass over scale vs the limiting exponent.
# ---------------------------------------------------------------------------


def run_erosion_limit(cfg: ExperimentConfig, seed: int, workers: int = 1) -> list[ResultRow]:
    model, density, probe = cfg.model, cfg.density, cfg.probe
    nu = cfg.intensity or directional_intensity(model, density)
    reference = inclusion_exponent(nu, probe, density.alpha)
    gamma = density.scaling_exponent
    rows = []
    for idx, eps in enumerate(sorted(cfg.sweep, reverse=True)):
        shell = erosion_mass(
            model,
            density,
            probe,
            eps**gamma,
            mc_points=cfg.mc_points,
            rng=RngStream(seed, idx),
        )
        rows.append(
            make_row(
                EROSION_LIMIT,
                eps,
                shell.value / eps,
                shell.stderr / eps,
                reference,
                cfg,
                seed,
                trials=cfg.mc_points if shell.method == "monte_carlo" else 1,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# inclusionConvergence: empirical and product-formula inclusion vs exp(-Lambda).
# ---------------------------------------------------------------------------


def _w_inclusion(common, t: int) -> tuple[float]:
    model, density, probe, n, seed, offset = common
    rng = RngStream(seed, offset + t)
    return (float(inclusion_trial(probe, model, density, n, rng).included),)


def run_inclusion_convergence(cfg: ExperimentConfig, seed: int, workers: int = 1) -> list[ResultRow]:
    model, density, probe = cfg.model, cfg.density, cfg.probe
    nu = cfg.intensity or directional_intensity(model, density)
    asymptote = math.exp(-inclusion_exponent(nu, probe, density.alpha))
    rows = []
    for idx, n_f in enumerate(sorted(cfg.sweep)):
        n = int(round(n_f))
        closed, closed_se = closed_form_inclusion(
            model, density, probe, n, mc_points=cfg.mc_points, rng=RngStream(seed, 900_000_000 + idx)
        )
        vals = run_trials(_w_inclusion, (model, density, probe, n, seed, idx * cfg.trials), cfg.trials, workers)
        successes = int(np.sum(vals[:, 0]))
        p_hat = successes / cfg.trials
        rows.append(
            make_row(
                f"{INCLUSION_CONVERGENCE}/empirical",
                n,
                p_hat,
                wilson_sigma(successes, cfg.trials),
                closed,
                cfg,
                seed,
            )
        )
        rows.append(
            make_row(
                f"{INCLUSION_CONVERGENCE}/closedForm",
                n,
                closed,
                closed_se,
                asymptote,
                cfg,
                seed,
                trials=1,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# zeroCellSelfCheck: inclusion frequencies over sampled cells.
# ---------------------------------------------------------------------------


def _w_cell_check(common, t: int):
    from .geometry import support_batch

    nu, alpha, radius, probes, seed = common
    rng = RngStream(seed, t)
    batch = sample_hyperplanes(nu, alpha, radius, rng)
    origin_ok = bool(np.all(batch.distances > 0.0))
    fits = []
    for probe in probes:
        if batch.size == 0:
            fits.append(1.0)
            continue
        h = support_batch(probe, batch.directions)
        fits.append(float(np.all(h <= batch.distances + 1e-12)))
    return (float(origin_ok), *fits)


def _scaled_probe(template: VCompact | None, rho: float) -> VCompact:
    if template is None:
        raise ValueError("a probe template is required")
    if isinstance(template, Ball):
        return Ball(template.center * rho, template.radius * rho)
    return Hull(template.vertices * rho)


def run_zero_cell_self_check(cfg: ExperimentConfig, seed: int, workers: int = 1) -> list[ResultRow]:
    nu = cfg.intensity or directional_intensity(cfg.model, cfg.density)
    alpha = cfg.alpha if cfg.alpha is not None else cfg.density.alpha
    template = cfg.probe if cfg.probe is not None else Ball(np.zeros(nu.dimension), 1.0)
    probes = [_scaled_probe(template, rho) for rho in cfg.sweep]
    radius = max(
        default_window_radius(nu, alpha),
        max(abs(support_max(p)) for p in probes),
    )
    vals = run_trials(_w_cell_check, (nu, alpha, radius, probes, seed), cfg.trials, workers)
    rows = []
    origin_frac = float(np.mean(vals[:, 0]))
    rows.append(make_row(f"{ZERO_CELL_SELF_CHECK}/origin", 0.0, origin_frac, 0.0, 1.0, cfg, seed))
    for k, rho in enumerate(cfg.sweep):
        successes = int(np.sum(vals[:, 1 + k]))
        p_hat = successes / cfg.trials
        ref = math.exp(-inclusion_exponent(nu, probes[k], alpha))
        rows.append(
            make_row(ZERO_CELL_SELF_CHECK, rho, p_hat, wilson_sigma(successes, cfg.trials), ref, cfg, seed)
        )
    return rows


def support_max(probe: VCompact) -> float:
    """Largest support value over all directions (circumradius about 0)."""
    if isinstance(probe, Ball):
        return float(np.linalg.norm(probe.center)) + probe.radius
    return float(np.max(np.linalg.norm(probe.vertices, axis=1)))


# ---------------------------------------------------------------------------
# volumeMoments: windowed volume moments of the scaled body vs the cell.
# ---------------------------------------------------------------------------


def _w_volume(common, t: int):
    process, window, mc_points, seed, offset = common
    rng = RngStream(seed, offset + t)
    return (_one_volume(process, window, rng, mc_points),)


def run_volume_moments(cfg: ExperimentConfig, seed: int, workers: int = 1) -> list[ResultRow]:
    if cfg.n is None:
        raise ValueError("volumeMoments needs a fixed sample size n")
    if cfg.window is None:
        raise ValueError("volumeMoments needs a window")
    nu = cfg.intensity or directional_intensity(cfg.model, cfg.density)
    alpha = cfg.alpha if cfg.alpha is not None else cfg.density.alpha
    xn = IntersectionProcess(cfg.model, cfg.density, cfg.n)
    z = ZeroCellProcess(nu, alpha, radius=window_circumradius(cfg.window))
    xn_vols = run_trials(_w_volume, (xn, cfg.window, cfg.mc_points, seed, 0), cfg.trials, workers)[:, 0]
    z_vols = run_trials(_w_volume, (z, cfg.window, cfg.mc_points, seed, 2**31), cfg.trials, workers)[:, 0]
    rows = []
    for m_f in cfg.sweep:
        m = int(round(m_f))
        est, est_se = _moment(xn_vols, m)
        ref, ref_se = _moment(z_vols, m)
        rows.append(
            make_row(VOLUME_MOMENTS, m, est, math.hypot(est_se, ref_se), ref, cfg, seed)
        )
    return rows


def _moment(vols: np.ndarray, m: int) -> tuple[float, float]:
    powered = vols ** m
    se = float(np.std(powered, ddof=1) / math.sqrt(len(powered))) if len(powered) > 1 else 0.0
    return float(np.mean(powered)), se


# ---------------------------------------------------------------------------
# twoBallAnomaly: total volume doubles while the law converges to one cell.
# ---------------------------------------------------------------------------


def _w_two_ball(common, t: int):
    model, density, single_model, single_density, window, shift, n, mc_points, seed, single_window = common
    scale = float(n) ** density.scaling_exponent
    rng = RngStream(seed, t)
    pts = sample_points(model, density, rng, n)
    gen = rng.generator
    vol_near = _predicate_volume(model, pts, window, scale, gen, mc_points)
    if single_window:
        num = vol_near
    else:
        far_window = Box(window.low + scale * shift, window.high + scale * shift)
        vol_far = _predicate_volume(model, pts, far_window, scale, gen, mc_points)
        num = vol_near + vol_far
    # Single-component reference arm replays the same stream (common random
    # numbers), so the ratio's noise is only the hit-or-miss sampling.
    rng2 = RngStream(seed, t)
    pts2 = sample_points(single_model, single_density, rng2, n)
    den = _predicate_volume(single_model, pts2, window, scale, rng2.generator, mc_points)
    return num, den


def _predicate_volume(model, sample_pts, window, scale, gen, mc_points):
    from .intersections import _scaled_membership

    probe_pts = sample_window(window, gen, mc_points)
    hits = _scaled_membership(model, sample_pts, probe_pts, scale)
    return window_volume(window) * float(np.count_nonzero(hits)) / mc_points


def run_two_ball_anomaly(cfg: ExperimentConfig, seed: int, workers: int = 1) -> list[ResultRow]:
    model, density = cfg.model, cfg.density
    if cfg.window is None:
        raise ValueError("twoBallAnomaly needs a window around the origin component")
    comps = model.components
    if len(comps) != 2 or not all(isinstance(c, Ball) for c in comps):
        raise PreconditionViolation("twoBallAnomaly expects a union of two balls")
    near = comps[density.support[0]]
    far = comps[1 - density.support[0]]
    shift = far.center - near.center
    single_model = SetModel([near])
    single_density = BoundaryDensity.uniform(single_model)
    rows = []
    for idx, n_f in enumerate(sorted(cfg.sweep)):
        n = int(round(n_f))
        common = (
            model,
            density,
            single_model,
            single_density,
            cfg.window,
            shift,
            n,
            cfg.mc_points,
            seed,
            cfg.single_window,
        )
        vals = run_trials(_w_two_ball, common, cfg.trials, workers)
        num, num_se = float(np.mean(vals[:, 0])), float(np.std(vals[:, 0], ddof=1) / math.sqrt(cfg.trials))
        den, den_se = float(np.mean(vals[:, 1])), float(np.std(vals[:, 1], ddof=1) / math.sqrt(cfg.trials))
        ratio = num / den
        ratio_se = abs(ratio) * math.hypot(num_se / num, den_se / den)
        reference = 1.0 if cfg.single_window else 2.0
        rows.append(make_row(TWO_BALL_ANOMALY, n, ratio, ratio_se, reference, cfg, seed))
    return rows


# ---------------------------------------------------------------------------
# d1Exact: interval realizations and the extreme-value law in one dimension.
# ---------------------------------------------------------------------------


def _w_d1(common, t: int):
    model, density, n, seed, offset = common
    rng = RngStream(seed, offset + t)
    pts = sample_points(model, density, rng, n)
    host = model.components[0]
    body = realize_intersection(host, pts)
    lo, hi = poly_interval(body.polytope)
    k_lo, k_hi = poly_interval(host)
    # Direct order-statistics oracle for the interval endpoints.
    dev = max(abs(lo - (k_lo - float(pts.min()))), abs(hi - (k_hi - float(pts.max()))))
    return dev, n * (float(pts.min()) - k_lo)


def poly_interval(poly) -> tuple[float, float]:
    a = poly.normals[:, 0]
    b = poly.offsets
    hi = float(np.min(b[a > 0] / a[a > 0]))
    lo = float(np.max(b[a < 0] / a[a < 0]))
    return lo, hi


def run_d1_exact(cfg: ExperimentConfig, seed: int, workers: int = 1) -> list[ResultRow]:
    from scipy.stats import kstest

    model, density = cfg.model, cfg.density
    if model.dim != 1:
        raise PreconditionViolation("d1Exact needs a one-dimensional model")
    rows = []
    for idx, n_f in enumerate(sorted(cfg.sweep)):
        n = int(round(n_f))
        vals = run_trials(_w_d1, (model, density, n, seed, idx * cfg.trials), cfg.trials, workers)
        max_dev = float(np.max(vals[:, 0]))
        rows.append(make_row(f"{D1_EXACT}/realization", n, max_dev, 0.0, 0.0, cfg, seed))
        scaled_minima = vals[:, 1]
        d_stat = float(kstest(scaled_minima, "expon").statistic)
        ks_cfg = replace(cfg, abs_tol=KS_CRITICAL_1PCT)
        rows.append(
            make_row(f"{D1_EXACT}/extremeValueKS", n, d_stat * math.sqrt(cfg.trials), 0.0, 0.0, ks_cfg, seed)
        )
    return rows
