"""Statistics on cropped tessellations and the consistency / identity test harness.

The two-sample machinery compares a process built directly in a small window V
against a process built in a larger window W and cropped to V, over a fixed,
pre-registered family of statistics (total chord length, maximal segment
count, interior endpoints, probe hits) at fixed times, with Holm correction
over the whole family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import stats as scipy_stats

from .engine import CroppedTessellation, new_process
from .errors import ContainmentViolation, InsufficientSamples, ReplicateAborted
from .geometry import Polygon, Segment, regular_ngon, segment_hits_polygon, segments_intersect
from .measures import HyperplaneMeasure, hitting_mass, joint_hitting_mass
from .rules import RulePair, rate

Probe = Union[Polygon, Segment]


@dataclass(frozen=True)
class WindowStats:
    total_length: float
    segment_count: int
    interior_endpoints: int
    probe_hits: tuple[bool, ...]


def window_stats(T: CroppedTessellation, probes: Sequence[Probe] = ()) -> WindowStats:
    V = T.window
    for pr in probes:
        if isinstance(pr, Polygon):
            if not V.contains_polygon(pr):
                raise ContainmentViolation("probe polygon outside the window")
        elif not (V.contains_point(pr.p) and V.contains_point(pr.q)):
            raise ContainmentViolation("probe segment outside the window")

    total = 0.0
    interior = 0
    for s in T.segments:
        total += s.length
        for endpoint in (s.p, s.q):
            if V.strictly_contains_point(endpoint, tol=1e-9):
                interior += 1
    hits = []
    for pr in probes:
        if isinstance(pr, Polygon):
            hit = any(segment_hits_polygon(s, pr) for s in T.segments)
        else:
            hit = any(segments_intersect(s, pr) for s in T.segments)
        hits.append(hit)
    return WindowStats(total, len(T.segments), interior, tuple(hits))


def default_probes(V: Polygon, grid: int = 3, radius_frac: float = 0.1) -> list[Polygon]:
    """Grid of 32-gon disks spanning the bounding box of V."""
    xs = [p[0] for p in V.vertices]
    ys = [p[1] for p in V.vertices]
    side = min(max(xs) - min(xs), max(ys) - min(ys))
    r = radius_frac * side
    probes = []
    for i in range(grid):
        for j in range(grid):
            cx = min(xs) + (i + 1) / (grid + 1) * (max(xs) - min(xs))
            cy = min(ys) + (j + 1) / (grid + 1) * (max(ys) - min(ys))
            probes.append(regular_ngon((cx, cy), r, 32))
    return probes


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sided two-sample Kolmogorov-Smirnov with asymptotic p-value."""
    if len(a) < 20 or len(b) < 20:
        raise InsufficientSamples(f"need >= 20 samples per side, got {len(a)}/{len(b)}")
    res = scipy_stats.ks_2samp(np.asarray(a, float), np.asarray(b, float), method="asymp")
    return float(res.statistic), float(res.pvalue)


def chi_square_2x2(hits_a: Sequence[bool], hits_b: Sequence[bool]) -> tuple[float, float]:
    """Chi-square test for equal hit frequency; degenerate tables give p = 1."""
    ha = int(np.count_nonzero(hits_a))
    hb = int(np.count_nonzero(hits_b))
    table = np.array([[ha, len(hits_a) - ha], [hb, len(hits_b) - hb]], dtype=float)
    if (table.sum(axis=0) == 0).any() or (table.sum(axis=1) == 0).any():
        return 0.0, 1.0
    chi2, p, _, _ = scipy_stats.chi2_contingency(table, correction=True)
    return float(chi2), float(p)


def holm_adjust(pvalues: Sequence[float]) -> list[float]:
    m = len(pvalues)
    order = sorted(range(m), key=lambda i: pvalues[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, (m - rank) * pvalues[idx])
        adjusted[idx] = min(1.0, running)
    return adjusted


@dataclass(frozen=True)
class TestResult:
    time: float
    statistic: str
    kind: str  # "ks" or "chi2"
    value: float
    p_raw: float
    p_holm: float = float("nan")


CONSISTENT = "consistent-not-rejected"
INCONSISTENT = "inconsistent-detected"


@dataclass(frozen=True)
class ConsistencyReport:
    results: tuple[TestResult, ...]
    n_reps: int
    aborted: tuple[int, int]
    alpha: float
    verdict: str

    @property
    def min_p_holm(self) -> float:
        return min(r.p_holm for r in self.results)

    def to_dict(self) -> dict:
        return {
            "n_reps": self.n_reps,
            "aborted_direct": self.aborted[0],
            "aborted_cropped": self.aborted[1],
            "alpha": self.alpha,
            "verdict": self.verdict,
            "results": [
                {
                    "time": r.time,
                    "statistic": r.statistic,
                    "kind": r.kind,
                    "value": r.value,
                    "p_raw": r.p_raw,
                    "p_holm": r.p_holm,
                }
                for r in self.results
            ],
        }

    def to_text(self) -> str:
        lines = [
            f"consistency report  (n_reps={self.n_reps}, alpha={self.alpha})",
            f"verdict: {self.verdict}",
            f"{'time':>8} {'statistic':<20} {'kind':<5} {'value':>10} {'p_raw':>10} {'p_holm':>10}",
        ]
        for r in self.results:
            lines.append(
                f"{r.time:>8.4g} {r.statistic:<20} {r.kind:<5} "
                f"{r.value:>10.4g} {r.p_raw:>10.3e} {r.p_holm:>10.3e}"
            )
        return "\n".join(lines)


def _replicate_seed(seed: int, arm: int, rep: int) -> int:
    state = np.random.SeedSequence(entropy=(seed, arm, rep)).generate_state(1, np.uint64)
    return int(state[0])


def _collect_stats(
    rules: RulePair,
    build_window: Polygon,
    crop_window: Polygon,
    times: Sequence[float],
    rep_start: int,
    rep_count: int,
    probes: Sequence[Probe],
    seed: int,
    arm: int,
) -> tuple[list[list[WindowStats]], int]:
    """Per-time lists of replicate statistics; returns (stats, aborted count)."""
    from .engine import crop as crop_fn

    per_time: list[list[WindowStats]] = [[] for _ in times]
    aborted = 0
    same_window = build_window == crop_window
    for rep in range(rep_start, rep_start + rep_count):
        state = new_process(build_window, rules, _replicate_seed(seed, arm, rep))
        try:
            snaps = state.snapshots(list(times))
        except ReplicateAborted:
            aborted += 1
            continue
        for k, snap in enumerate(snaps):
            cropped = snap if same_window else crop_fn(snap, crop_window)
            per_time[k].append(window_stats(cropped, probes))
    return per_time, aborted


def _collect_stats_chunked(args):
    return _collect_stats(*args)


def _collect_parallel(
    rules, build_window, crop_window, times, n_reps, probes, seed, arm, n_jobs
) -> tuple[list[list[WindowStats]], int]:
    if n_jobs <= 1:
        return _collect_stats(rules, build_window, crop_window, times, 0, n_reps, probes, seed, arm)
    from concurrent.futures import ProcessPoolExecutor

    chunk = max(1, -(-n_reps // (n_jobs * 4)))
    tasks = []
    start = 0
    while start < n_reps:
        count = min(chunk, n_reps - start)
        tasks.append((rules, build_window, crop_window, times, start, count, probes, seed, arm))
        start += count
    per_time: list[list[WindowStats]] = [[] for _ in times]
    aborted = 0
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        for stats, ab in pool.map(_collect_stats_chunked, tasks):
            aborted += ab
            for k in range(len(times)):
                per_time[k].extend(stats[k])
    return per_time, aborted


def consistency_test(
    rules: RulePair,
    V: Polygon,
    W: Polygon,
    times: Sequence[float],
    n_reps: int,
    probes: Optional[Sequence[Probe]] = None,
    seed: int = 0,
    alpha: float = 0.001,
    max_abort_frac: float = 0.01,
    n_jobs: int = 1,
) -> ConsistencyReport:
    """Two-sample comparison of Y(V, t) against Y(W, t) cropped to V."""
    if n_reps < 100:
        raise ValueError("n_reps must be >= 100")
    if not W.contains_polygon(V):
        raise ContainmentViolation("V must be contained in W")
    if probes is None:
        probes = default_probes(V)

    direct, ab_d = _collect_parallel(rules, V, V, times, n_reps, probes, seed, 0, n_jobs)
    cropped, ab_c = _collect_parallel(rules, W, V, times, n_reps, probes, seed, 1, n_jobs)
    if ab_d > max_abort_frac * n_reps or ab_c > max_abort_frac * n_reps:
        raise ReplicateAborted(
            f"too many aborted replicates: {ab_d}/{ab_c} of {n_reps} per arm"
        )

    raw: list[TestResult] = []
    for k, t in enumerate(times):
        sa, sb = direct[k], cropped[k]
        for name in ("total_length", "segment_count", "interior_endpoints"):
            a = [getattr(s, name) for s in sa]
            b = [getattr(s, name) for s in sb]
            stat, p = ks_two_sample(a, b)
            raw.append(TestResult(t, name, "ks", stat, p))
        for j in range(len(probes)):
            stat, p = chi_square_2x2([s.probe_hits[j] for s in sa], [s.probe_hits[j] for s in sb])
            raw.append(TestResult(t, f"probe_{j}", "chi2", stat, p))

    adjusted = holm_adjust([r.p_raw for r in raw])
    results = tuple(
        TestResult(r.time, r.statistic, r.kind, r.value, r.p_raw, ph)
        for r, ph in zip(raw, adjusted)
    )
    verdict = INCONSISTENT if min(adjusted) < alpha else CONSISTENT
    return ConsistencyReport(results, n_reps, (ab_d, ab_c), alpha, verdict)


def rate_estimate(
    rules: RulePair,
    V: Polygon,
    B: Polygon,
    dt: float,
    n_reps: int,
    seed: int = 0,
) -> float:
    """(1/dt) * P-hat(the tessellation in V hits B by time dt).

    For a shared-measure pair this converges to the hitting mass of B as
    dt -> 0 (first-order division rate).
    """
    if not V.contains_polygon(B):
        raise ContainmentViolation("B must be contained in V")
    if rate(rules.selection, V) * dt >= 0.1:
        raise ValueError("dt too large: expected divisions in (0, dt) must stay below 0.1")
    hits = 0
    for rep in range(n_reps):
        state = new_process(V, rules, _replicate_seed(seed, 2, rep))
        state.advance(dt)
        if any(segment_hits_polygon(s, B) for s, _ in state.segments):
            hits += 1
    return hits / (n_reps * dt)


@dataclass(frozen=True)
class NuEstimate:
    window_sizes: tuple[float, ...]
    values: tuple[float, ...]
    limit_reached: bool


def nu_limit(rules: RulePair, H_probe: Polygon, sizes: Sequence[float]) -> NuEstimate:
    """Monotone window-exhaustion sequence whose limit reconstructs the driving measure.

    Evaluates rate(W_n) * P(hit probe | hit W_n) for centered square windows of
    the given sizes; for a shared-measure pair this equals the mass of lines
    hitting both the probe and W_n, which stabilizes at the probe's hitting
    mass once the probe is contained.
    """
    if any(s2 <= s1 for s1, s2 in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly ascending")
    if not rules.stit_flag:
        raise ValueError("nu_limit needs a shared-measure (selection = division) pair")
    measure = rules.division.measure
    values = []
    limit_reached = False
    for s in sizes:
        half = s / 2.0
        Wn = Polygon([(-half, -half), (half, -half), (half, half), (-half, half)])
        values.append(joint_hitting_mass(measure, H_probe, Wn))
        if Wn.contains_polygon(H_probe):
            limit_reached = True
    return NuEstimate(tuple(sizes), tuple(values), limit_reached)


def fundamental_residual(
    measure: HyperplaneMeasure, V: Polygon, W: Polygon, B: Polygon
) -> float:
    """Relative residual of rate(V)*P_V(hit B) = rate(W)*P_W(hit B) = mass(B).

    The left-hand sides are evaluated through the offset-overlap route (for the
    isotropic family: numerical quadrature), the right-hand side through the
    closed-form hitting mass, so agreement is a genuine cross-check.
    """
    if not (V.contains_polygon(B) and W.contains_polygon(V)):
        raise ContainmentViolation("need B subset V subset W")
    mass_b = hitting_mass(measure, B)
    via_v = joint_hitting_mass(measure, B, V)
    via_w = joint_hitting_mass(measure, B, W)
    return max(abs(via_v - via_w), abs(via_v - mass_b), abs(via_w - mass_b)) / mass_b


def rate_vs_nu_residual(rules: RulePair, measure: HyperplaneMeasure, C: Polygon) -> float:
    """Relative gap between a selection rule's rate and the reconstructed measure mass.

    Zero (to rounding) exactly when the selection rule is the hitting-mass rule
    of the given measure; order-one for area or vertex-count selection.
    """
    nu_c = hitting_mass(measure, C)
    return abs(rate(rules.selection, C) - nu_c) / nu_c


@dataclass(frozen=True)
class IdentityResult:
    name: str
    passed: bool
    max_residual: float
    threshold: float
    detail: str = ""


def _random_nested_triple(rng) -> tuple[Polygon, Polygon, Polygon]:
    from .geometry import random_convex_polygon, scale_about_centroid

    W = random_convex_polygon(
        rng,
        n_points=int(rng.integers(5, 11)),
        scale=0.5 + 2.0 * rng.random(),
        center=(4.0 * rng.standard_normal(), 4.0 * rng.standard_normal()),
    )
    V = scale_about_centroid(W, 0.35 + 0.4 * rng.random())
    B = scale_about_centroid(V, 0.3 + 0.4 * rng.random())
    return V, W, B


def identity_suite(
    rules: RulePair, identities: Sequence[str], n_cases: int = 100, seed: int = 0
) -> list[IdentityResult]:
    """Analytic identity checks for a rule pair; failures are informative, not errors.

    The shared-measure pair passes everything; an area or vertex-count
    selection fails 'rate_matches_nu' by design.
    """
    from .geometry import random_convex_polygon
    from .rules import (
        HittingMeasure,
        IntrinsicVolume,
        RestrictedMeasure,
        VertexCount as VertexCountRule,
        check_bound,
    )
    from .geometry import vertex_count as vcount

    measure = rules.division.measure if isinstance(rules.division, RestrictedMeasure) else None
    results: list[IdentityResult] = []
    name_ids = {"fundamental": 0, "corollary": 1, "nu_limit": 2, "rate_matches_nu": 3, "division_bound": 4}
    for name in identities:
        if name not in name_ids:
            raise ValueError(f"unknown identity '{name}'")
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, name_ids[name])))
        if name == "fundamental":
            if measure is None:
                results.append(IdentityResult(name, False, math.inf, 1e-10, "needs a measure-driven division rule"))
                continue
            worst = 0.0
            for _ in range(n_cases):
                V, W, B = _random_nested_triple(rng)
                worst = max(worst, fundamental_residual(measure, V, W, B))
            results.append(IdentityResult(name, worst < 1e-10, worst, 1e-10))
        elif name == "corollary":
            if measure is None:
                results.append(IdentityResult(name, False, math.inf, 1e-10, "needs a measure-driven division rule"))
                continue
            worst = 0.0
            for _ in range(n_cases):
                _, W, B = _random_nested_triple(rng)
                mass_b = hitting_mass(measure, B)
                worst = max(worst, abs(joint_hitting_mass(measure, B, W) - mass_b) / mass_b)
            results.append(IdentityResult(name, worst < 1e-10, worst, 1e-10))
        elif name == "nu_limit":
            if not rules.stit_flag:
                results.append(IdentityResult(name, False, math.inf, 1e-10, "needs a shared-measure pair"))
                continue
            worst = 0.0
            ok = True
            for _ in range(max(1, n_cases // 10)):
                probe = random_convex_polygon(
                    rng, n_points=6, scale=0.5, center=(rng.standard_normal(), rng.standard_normal())
                )
                est = nu_limit(rules, probe, [1.0, 2.0, 4.0, 8.0, 16.0])
                ok = ok and est.limit_reached
                target = hitting_mass(measure, probe)
                for v1, v2 in zip(est.values, est.values[1:]):
                    worst = max(worst, (v1 - v2) / target)  # monotonicity violation
                worst = max(worst, abs(est.values[-1] - target) / target)
            results.append(IdentityResult(name, ok and worst < 1e-10, worst, 1e-10))
        elif name == "rate_matches_nu":
            if measure is None:
                results.append(IdentityResult(name, False, math.inf, 1e-10, "needs a measure-driven division rule"))
                continue
            worst = 0.0
            for _ in range(n_cases):
                C = random_convex_polygon(rng, n_points=int(rng.integers(4, 10)), scale=1.0)
                worst = max(worst, rate_vs_nu_residual(rules, measure, C))
            results.append(IdentityResult(name, worst < 1e-10, worst, 1e-10))
        elif name == "division_bound":
            worst = 0.0
            for _ in range(max(1, n_cases // 5)):
                C = random_convex_polygon(rng, n_points=int(rng.integers(4, 10)), scale=1.0)
                k_hat = check_bound(rules.selection, C, 200, rng)
                if isinstance(rules.selection, VertexCountRule):
                    n = vcount(C)
                    bound = (n + 2) / n
                elif isinstance(rules.selection, (IntrinsicVolume, HittingMeasure)):
                    bound = 1.0 + 1e-12
                else:
                    bound = 1e3
                worst = max(worst, k_hat - bound)
            results.append(IdentityResult(name, worst <= 0.0, max(worst, 0.0), 0.0))
        else:
            raise ValueError(f"unknown identity '{name}'")
    return results
