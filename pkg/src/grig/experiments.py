"""Reproducible experiment runners: degree histograms, phase sweeps,
planted-pair validations, and figure-style scene export.

Seeding scheme
--------------
Every random stream is a PCG64 generator built from
``SeedSequence(entropy=base_seed, spawn_key=(kind, *indices, stream))``
where ``kind`` identifies the experiment type, ``indices`` are cell and
replicate indices, and ``stream`` separates the vertex cloud (0), group
cloud (1), membership draws (2), and any auxiliary draws (3).  Streams
depend only on these keys, never on scheduling, so results are identical
for any worker count and replayable from the config alone.

Artifacts are written with ``repr`` floats and sorted JSON keys and carry
no timestamps; reruns with the same config and seed are byte-identical.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analytics, stats
from .errors import ConfigError, ConvergenceError
from .serialize import write_json as _write_json
from .geometry import (
    GROUP,
    VERTEX,
    PointCloud,
    Torus,
    ball_volume,
    min_image_displacement,
    sample_poisson,
)
from .graph import (
    BuildOptions,
    build_bipartite,
    degree_histogram,
    edges_to_csv,
    largest_component_fraction,
    project_onto_groups,
    project_onto_vertices,
)
from .kernels import (
    ConvolutionGrid,
    KernelSpec,
    eval_kernel,
    eval_profile,
    kernel_norm,
    kernel_to_json,
    self_convolve,
    support_radius,
)

KIND_DEGREE = 1
KIND_PHASE = 2
KIND_JOINT_GROUPS = 3
KIND_CONNECTION = 4
KIND_VISUALIZE = 5
KIND_SAMPLE = 6
KIND_DOMINATION = 7

STREAM_VERTICES = 0
STREAM_GROUPS = 1
STREAM_MEMBERSHIPS = 2
STREAM_AUX = 3


def rng_for(base_seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator for a (kind, indices..., stream) key."""
    return np.random.default_rng(np.random.SeedSequence(entropy=base_seed, spawn_key=tuple(key)))


@dataclass
class ExperimentConfig:
    """Resolved experiment description (see config.load_config for JSON)."""

    kind: str
    kernel: KernelSpec
    torus: Torus
    lam: float | None = None
    mu: float | None = None
    lambda_values: tuple = ()
    mu_values: tuple = ()
    replicates: int = 10
    seed: int = 0
    mode: str = "auto"
    eps_tail: float = 1e-3
    threads: int = 1
    probe_distances: tuple = ()
    confidence: float = 0.99
    dispersion_alpha: float = 0.01
    profile_options: dict = field(default_factory=dict)

    def build_options(self) -> BuildOptions:
        return BuildOptions(mode=self.mode, eps_tail=self.eps_tail)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "kernel": kernel_to_json(self.kernel),
            "torus": {"d": self.torus.d, "side": self.torus.side},
            "lambda": self.lam,
            "mu": self.mu,
            "lambda_values": list(self.lambda_values),
            "mu_values": list(self.mu_values),
            "replicates": self.replicates,
            "seed": self.seed,
            "mode": self.mode,
            "eps_tail": self.eps_tail,
            "threads": self.threads,
            "probe_distances": list(self.probe_distances),
            "confidence": self.confidence,
            "dispersion_alpha": self.dispersion_alpha,
            "profile_options": self.profile_options,
        }


def build_profile(config: ExperimentConfig):
    """Profile f = g * g with the config's tabulation overrides."""
    opts = dict(config.profile_options)
    grid = ConvolutionGrid(
        n_radii=int(opts.pop("n_radii", 1024)),
        t_max=opts.pop("t_max", None),
    )
    return self_convolve(config.kernel, grid=grid, **opts)


def _map_tasks(fn, tasks, threads: int):
    """Run tasks, optionally on a process pool; output order = task order."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _float_cell(x) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# degree experiment


@dataclass
class DegreeResult:
    histogram: np.ndarray  # index = degree, pooled over replicates
    empirical_mean: float
    empirical_stderr: float
    theoretical_mean: float | None
    isolated_fraction: float
    isolated_lower_bound: float
    replicates: int
    node_total: int
    warnings: list = field(default_factory=list)

    def report(self) -> dict:
        return {
            "empirical_mean": self.empirical_mean,
            "empirical_stderr": self.empirical_stderr,
            "theoretical_mean": self.theoretical_mean,
            "isolated_fraction": self.isolated_fraction,
            "isolated_lower_bound": self.isolated_lower_bound,
            "replicates": self.replicates,
            "node_total": self.node_total,
            "warnings": self.warnings,
        }


def _degree_replicate(args):
    config, k = args
    rng_v = rng_for(config.seed, KIND_DEGREE, k, STREAM_VERTICES)
    rng_u = rng_for(config.seed, KIND_DEGREE, k, STREAM_GROUPS)
    rng_m = rng_for(config.seed, KIND_DEGREE, k, STREAM_MEMBERSHIPS)
    V = sample_poisson(config.torus, config.lam, rng_v, role=VERTEX)
    U = sample_poisson(config.torus, config.mu, rng_u, role=GROUP)
    bi = build_bipartite(V, U, config.kernel, rng_m, config.build_options())
    hist = degree_histogram(project_onto_vertices(bi))
    return hist.counts, hist.mean, hist.node_count


def run_degree_experiment(config: ExperimentConfig, out_dir=None) -> DegreeResult:
    """Sample degree histograms of the vertex projection (replicates pooled)."""
    if config.lam is None or config.mu is None:
        raise ConfigError("degree experiment needs lambda and mu")
    results = _map_tasks(
        _degree_replicate, [(config, k) for k in range(config.replicates)], config.threads
    )
    width = max(c.size for c, _, _ in results)
    pooled = np.zeros(width, dtype=np.int64)
    means = []
    for counts, mean, _ in results:
        pooled[: counts.size] += counts
        means.append(mean)
    total = int(pooled.sum())
    empirical_mean = float(np.sum(np.arange(width) * pooled) / total) if total else 0.0
    stderr = stats.mean_stderr(means).stderr if len(means) >= 2 else 0.0

    warnings = []
    theoretical = None
    convergence_failure = None
    try:
        profile = build_profile(config)
        theoretical = analytics.expected_degree(profile, config.lam, config.mu)
    except ConvergenceError as exc:
        convergence_failure = exc
        warnings.append(f"profile tabulation did not converge: {exc}")
        if exc.estimate is not None:
            theoretical = analytics.expected_degree(exc.estimate, config.lam, config.mu)
            warnings.append("theoretical mean computed from the best available profile")

    result = DegreeResult(
        histogram=pooled,
        empirical_mean=empirical_mean,
        empirical_stderr=stderr,
        theoretical_mean=theoretical,
        isolated_fraction=float(pooled[0] / total) if total else 1.0,
        isolated_lower_bound=analytics.isolated_probability_bound(
            config.mu, kernel_norm(config.kernel)
        ),
        replicates=config.replicates,
        node_total=total,
        warnings=warnings,
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "histogram.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["degree", "count"])
            for degree, count in enumerate(result.histogram):
                writer.writerow([degree, int(count)])
        _write_json(os.path.join(out_dir, "report.json"), result.report())
    if convergence_failure is not None:
        raise ConvergenceError(
            "degree experiment finished but the theoretical mean is approximate: "
            f"{convergence_failure}",
            estimate=result,
            error_bound=convergence_failure.error_bound,
        )
    return result


# ---------------------------------------------------------------------------
# phase sweep


@dataclass
class PhaseGrid:
    lambda_values: np.ndarray
    mu_values: np.ndarray
    mean_v: np.ndarray  # (n_lambda, n_mu) largest-component fraction of the vertex projection
    stderr_v: np.ndarray
    mean_u: np.ndarray  # same for the group projection of the same builds
    stderr_u: np.ndarray
    replicates: int
    failures: list = field(default_factory=list)


def _phase_cell_replicate(args):
    (seed, kernel, torus, lam, mu, i, j, k, mode, eps_tail) = args
    try:
        rng_v = rng_for(seed, KIND_PHASE, i, j, k, STREAM_VERTICES)
        rng_u = rng_for(seed, KIND_PHASE, i, j, k, STREAM_GROUPS)
        rng_m = rng_for(seed, KIND_PHASE, i, j, k, STREAM_MEMBERSHIPS)
        V = sample_poisson(torus, lam, rng_v, role=VERTEX)
        U = sample_poisson(torus, mu, rng_u, role=GROUP)
        bi = build_bipartite(V, U, kernel, rng_m, BuildOptions(mode=mode, eps_tail=eps_tail))
        frac_v = (
            largest_component_fraction(project_onto_vertices(bi)) if bi.vertex_count else math.nan
        )
        frac_u = (
            largest_component_fraction(project_onto_groups(bi)) if bi.group_count else math.nan
        )
        return (i, j, k, frac_v, frac_u, None)
    except Exception as exc:  # per-cell failures recorded, sweep continues
        return (i, j, k, math.nan, math.nan, f"{type(exc).__name__}: {exc}")


def run_phase_sweep(config: ExperimentConfig, out_dir=None) -> PhaseGrid:
    """Largest-component fraction over a (lambda, mu) grid.

    Each cell runs `replicates` independent builds; both projections of
    every build are measured, so the vertex-side grid at (a, b) can be
    compared against the group-side grid at (b, a), which has the same
    distribution by the role-swap symmetry of the construction.
    """
    lams = np.asarray(config.lambda_values, dtype=float)
    mus = np.asarray(config.mu_values, dtype=float)
    if lams.size == 0 or mus.size == 0:
        raise ConfigError("phase sweep needs lambda_values and mu_values")
    tasks = [
        (config.seed, config.kernel, config.torus, float(lams[i]), float(mus[j]), i, j, k,
         config.mode, config.eps_tail)
        for i in range(lams.size)
        for j in range(mus.size)
        for k in range(config.replicates)
    ]
    results = _map_tasks(_phase_cell_replicate, tasks, config.threads)

    frac_v = np.full((lams.size, mus.size, config.replicates), math.nan)
    frac_u = np.full_like(frac_v, math.nan)
    failures = []
    for i, j, k, fv, fu, err in results:
        frac_v[i, j, k] = fv
        frac_u[i, j, k] = fu
        if err is not None:
            failures.append({"cell": [int(i), int(j)], "replicate": int(k), "error": err})

    def reduce(arr):
        mean = np.nanmean(arr, axis=2)
        with np.errstate(invalid="ignore"):
            std = np.nanstd(arr, axis=2, ddof=1)
        counts = np.sum(~np.isnan(arr), axis=2)
        stderr = np.where(counts > 1, std / np.sqrt(np.maximum(counts, 1)), np.nan)
        return mean, stderr

    mean_v, stderr_v = reduce(frac_v)
    mean_u, stderr_u = reduce(frac_u)
    grid = PhaseGrid(
        lambda_values=lams,
        mu_values=mus,
        mean_v=mean_v,
        stderr_v=stderr_v,
        mean_u=mean_u,
        stderr_u=stderr_u,
        replicates=config.replicates,
        failures=failures,
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_phase_csv(os.path.join(out_dir, "phase.csv"), grid, grid.mean_v)
        _write_phase_csv(os.path.join(out_dir, "phase_groups.csv"), grid, grid.mean_u)
        _write_phase_csv(os.path.join(out_dir, "phase_stderr.csv"), grid, grid.stderr_v)
        _write_json(
            os.path.join(out_dir, "phase_meta.json"),
            {
                "lambda_values": [float(v) for v in lams],
                "mu_values": [float(v) for v in mus],
                "replicates": config.replicates,
                "seed": config.seed,
                "failures": failures,
            },
        )
    return grid


def _write_phase_csv(path, grid: PhaseGrid, matrix: np.ndarray) -> None:
    """Matrix CSV: lambda values down the rows, mu values across columns."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda\\mu"] + [_float_cell(m) for m in grid.mu_values])
        for i, lam in enumerate(grid.lambda_values):
            writer.writerow([_float_cell(lam)] + [_float_cell(x) for x in matrix[i]])


# ---------------------------------------------------------------------------
# planted-pair validations


def _planted_pair_cloud(torus: Torus, t: float) -> PointCloud:
    """Two probe vertices at torus distance t: the origin and (t, 0, ...)."""
    if not 0 <= t <= torus.side / 2:
        raise ConfigError(
            f"probe distance {t} must lie in [0, side/2] so the torus metric equals t"
        )
    positions = np.zeros((2, torus.d))
    positions[1, 0] = t
    return PointCloud(role=VERTEX, positions=positions, intensity=0.0, torus=torus)


def _shared_group_count(bi) -> int:
    return int(np.intersect1d(bi.memberships[0], bi.memberships[1]).size)


def run_joint_groups_check(config: ExperimentConfig, out_dir=None) -> dict:
    """Poisson check for the number of groups shared by two planted vertices.

    At separation t the shared-group count is Poisson with mean mu * f(t);
    the runner compares empirical mean and variance against that value
    (3-sigma bands under the null) and runs a dispersion test.
    """
    if config.mu is None:
        raise ConfigError("joint-groups check needs mu")
    if not config.probe_distances:
        raise ConfigError("joint-groups check needs probe_distances")
    profile = build_profile(config)
    report = {"kind": "joint_groups", "probes": [], "all_passed": True}
    for p, t in enumerate(config.probe_distances):
        planted = _planted_pair_cloud(config.torus, float(t))
        counts = np.empty(config.replicates, dtype=np.int64)
        for k in range(config.replicates):
            rng_u = rng_for(config.seed, KIND_JOINT_GROUPS, p, k, STREAM_GROUPS)
            rng_m = rng_for(config.seed, KIND_JOINT_GROUPS, p, k, STREAM_MEMBERSHIPS)
            U = sample_poisson(config.torus, config.mu, rng_u, role=GROUP)
            bi = build_bipartite(planted, U, config.kernel, rng_m, config.build_options())
            counts[k] = _shared_group_count(bi)
        theory = config.mu * float(eval_profile(profile, float(t)))
        n = counts.size
        emp_mean = float(counts.mean())
        emp_var = float(counts.var(ddof=1))
        # null standard errors for a Poisson(theory) sample of size n
        se_mean = math.sqrt(theory / n) if theory > 0 else 0.0
        se_var = math.sqrt((2 * theory**2 + theory) / n) if theory > 0 else 0.0
        mean_v = stats.zscore_verdict(f"mean@t={t}", emp_mean, theory, se_mean, n)
        var_v = stats.zscore_verdict(f"variance@t={t}", emp_var, theory, se_var, n)
        disp = (
            stats.poisson_dispersion_test(counts, alpha=config.dispersion_alpha, name=f"dispersion@t={t}")
            if theory > 0
            else stats.TestVerdict(
                name=f"zero@t={t}",
                statistic=float(counts.max(initial=0)),
                threshold=(0.0, 0.0),
                passed=bool(np.all(counts == 0)),
                sample_size=n,
            )
        )
        probe = {
            "t": float(t),
            "theory_mean": theory,
            "empirical_mean": emp_mean,
            "empirical_variance": emp_var,
            "replicates": n,
            "verdicts": [v.to_json() for v in (mean_v, var_v, disp)],
        }
        report["probes"].append(probe)
        for v in (mean_v, var_v, disp):
            if v.passed is False:
                report["all_passed"] = False
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_json(os.path.join(out_dir, "report.json"), report)
    return report


def run_connection_check(config: ExperimentConfig, out_dir=None) -> dict:
    """Empirical edge frequency of planted pairs vs 1 - e^{-mu f(t)}.

    Each probe distance gets `replicates` independent backgrounds; the
    Wilson interval at the configured confidence must contain the closed
    form.  Probes beyond the doubled kernel support must never connect.
    """
    if config.mu is None:
        raise ConfigError("connection check needs mu")
    if not config.probe_distances:
        raise ConfigError("connection check needs probe_distances")
    profile = build_profile(config)
    s_max = support_radius(config.kernel, 0.0)
    report = {"kind": "connection", "probes": [], "all_passed": True}
    for p, t in enumerate(config.probe_distances):
        planted = _planted_pair_cloud(config.torus, float(t))
        hits = 0
        for k in range(config.replicates):
            rng_u = rng_for(config.seed, KIND_CONNECTION, p, k, STREAM_GROUPS)
            rng_m = rng_for(config.seed, KIND_CONNECTION, p, k, STREAM_MEMBERSHIPS)
            U = sample_poisson(config.torus, config.mu, rng_u, role=GROUP)
            bi = build_bipartite(planted, U, config.kernel, rng_m, config.build_options())
            if _shared_group_count(bi) > 0:
                hits += 1
        theory = analytics.connection_probability(profile, config.mu, float(t))
        lo, hi = stats.wilson_interval(hits, config.replicates, config.confidence)
        beyond_support = math.isfinite(s_max) and float(t) > 2.0 * s_max
        if beyond_support:
            passed = hits == 0
        else:
            passed = lo <= theory <= hi
        probe = {
            "t": float(t),
            "theory": theory,
            "frequency": hits / config.replicates,
            "successes": hits,
            "trials": config.replicates,
            "wilson": [lo, hi],
            "beyond_support": beyond_support,
            "passed": bool(passed),
        }
        report["probes"].append(probe)
        if not passed:
            report["all_passed"] = False
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_json(os.path.join(out_dir, "report.json"), report)
    return report


# ---------------------------------------------------------------------------
# typical-vertex degree sampling (plane, no torus wrap)


def sample_origin_degrees(
    spec: KernelSpec,
    lam: float,
    mu: float,
    n_samples: int,
    rng: np.random.Generator,
    eps_tail: float = 1e-6,
) -> np.ndarray:
    """Sample the degree of a vertex planted at the origin of the plane.

    Exact two-stage thinning up to a tail cutoff: groups are sampled on
    the ball where g retains all but eps_tail of its mass and joined with
    probability g(|u|); given the joined groups, the neighbor count is the
    thinned vertex process with hit probability 1 - prod(1 - g(|v - u|)),
    sampled on the bounding box of the groups padded by the same cutoff.
    """
    if lam < 0 or mu < 0:
        raise ValueError("intensities must be >= 0")
    if eps_tail <= 0:
        raise ValueError("eps_tail must be > 0 to bound the sampling region")
    d = spec.d
    radius = support_radius(spec, eps_tail)
    ball = ball_volume(d, radius)
    group_counts = rng.poisson(mu * ball, size=n_samples)
    degrees = np.zeros(n_samples, dtype=np.int64)
    for s in range(n_samples):
        m = int(group_counts[s])
        if m == 0:
            continue
        direction = rng.standard_normal((m, d))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        pos = direction * (radius * rng.random(m) ** (1.0 / d))[:, None]
        joined = pos[rng.random(m) < eval_kernel(spec, np.linalg.norm(pos, axis=1))]
        if joined.shape[0] == 0:
            continue
        lo = joined.min(axis=0) - radius
        hi = joined.max(axis=0) + radius
        volume = float(np.prod(hi - lo))
        n_v = rng.poisson(lam * volume)
        if n_v == 0:
            continue
        verts = lo + rng.random((n_v, d)) * (hi - lo)
        dists = np.linalg.norm(verts[:, None, :] - joined[None, :, :], axis=2)
        miss = np.prod(1.0 - eval_kernel(spec, dists), axis=1)
        degrees[s] = int(np.sum(rng.random(n_v) < 1.0 - miss))
    return degrees


# ---------------------------------------------------------------------------
# visualization


def export_visualization(config: ExperimentConfig, out_dir) -> dict:
    """Scene export: vertex dots, group crosses, projected edges (SVG+CSV).

    Edges wrapping around the torus are drawn as two straight stubs, one
    leaving each endpoint toward the nearest image of the other.
    """
    if config.torus.d != 2:
        raise ConfigError("visualization is only available for d = 2")
    if config.lam is None or config.mu is None:
        raise ConfigError("visualization needs lambda and mu")
    rng_v = rng_for(config.seed, KIND_VISUALIZE, STREAM_VERTICES)
    rng_u = rng_for(config.seed, KIND_VISUALIZE, STREAM_GROUPS)
    rng_m = rng_for(config.seed, KIND_VISUALIZE, STREAM_MEMBERSHIPS)
    V = sample_poisson(config.torus, config.lam, rng_v, role=VERTEX)
    U = sample_poisson(config.torus, config.mu, rng_u, role=GROUP)
    bi = build_bipartite(V, U, config.kernel, rng_m, config.build_options())
    gv = project_onto_vertices(bi)

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "points.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["role", "index", "x", "y"])
        for idx, pos in enumerate(V.positions):
            writer.writerow(["vertex", idx, _float_cell(pos[0]), _float_cell(pos[1])])
        for idx, pos in enumerate(U.positions):
            writer.writerow(["group", idx, _float_cell(pos[0]), _float_cell(pos[1])])
    edges_to_csv(gv, os.path.join(out_dir, "edges.csv"))
    svg_path = os.path.join(out_dir, "scene.svg")
    _write_scene_svg(svg_path, config.torus, V, U, gv)
    return {
        "vertices": int(V.positions.shape[0]),
        "groups": int(U.positions.shape[0]),
        "edges": int(gv.edge_count),
        "svg": svg_path,
    }


def _write_scene_svg(path, torus: Torus, V: PointCloud, U: PointCloud, gv) -> None:
    side = torus.side
    size = 800.0
    scale = size / side
    cross = 0.006 * size
    dot = 0.004 * size
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}" '
        f'viewBox="0 0 {size:.6f} {size:.6f}">',
        f'<rect width="{size:.6f}" height="{size:.6f}" fill="white"/>',
    ]
    for a, b in gv.edges:
        pa = V.positions[a]
        delta = min_image_displacement(torus, V.positions[a], V.positions[b])
        qa = pa + delta
        pb = V.positions[b]
        qb = pb - delta
        segments = [(pa, qa)] if np.allclose(qa, pb) else [(pa, qa), (pb, qb)]
        for p, q in segments:
            lines.append(
                f'<line x1="{p[0]*scale:.3f}" y1="{p[1]*scale:.3f}" '
                f'x2="{q[0]*scale:.3f}" y2="{q[1]*scale:.3f}" '
                'stroke="#999999" stroke-width="0.8"/>'
            )
    for pos in V.positions:
        lines.append(
            f'<circle cx="{pos[0]*scale:.3f}" cy="{pos[1]*scale:.3f}" r="{dot:.3f}" fill="black"/>'
        )
    for pos in U.positions:
        x, y = pos[0] * scale, pos[1] * scale
        lines.append(
            f'<path d="M {x-cross:.3f} {y-cross:.3f} L {x+cross:.3f} {y+cross:.3f} '
            f'M {x-cross:.3f} {y+cross:.3f} L {x+cross:.3f} {y-cross:.3f}" '
            'stroke="red" stroke-width="1.2"/>'
        )
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


# ---------------------------------------------------------------------------
# cloud sampling (CLI `sample` subcommand)


def run_sample(config: ExperimentConfig, out_dir) -> dict:
    """Sample the two clouds and write them out (CSV + JSON)."""
    from .geometry import cloud_to_csv, cloud_to_json

    if config.lam is None or config.mu is None:
        raise ConfigError("sampling needs lambda and mu")
    rng_v = rng_for(config.seed, KIND_SAMPLE, STREAM_VERTICES)
    rng_u = rng_for(config.seed, KIND_SAMPLE, STREAM_GROUPS)
    V = sample_poisson(
        config.torus, config.lam, rng_v, role=VERTEX,
        seed_record=(config.seed, KIND_SAMPLE, STREAM_VERTICES),
    )
    U = sample_poisson(
        config.torus, config.mu, rng_u, role=GROUP,
        seed_record=(config.seed, KIND_SAMPLE, STREAM_GROUPS),
    )
    os.makedirs(out_dir, exist_ok=True)
    cloud_to_csv(V, os.path.join(out_dir, "vertices.csv"))
    cloud_to_csv(U, os.path.join(out_dir, "groups.csv"))
    _write_json(os.path.join(out_dir, "vertices.json"), cloud_to_json(V))
    _write_json(os.path.join(out_dir, "groups.json"), cloud_to_json(U))
    return {"vertices": int(V.positions.shape[0]), "groups": int(U.positions.shape[0])}
