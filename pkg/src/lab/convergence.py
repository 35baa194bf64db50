# src/lab/convergence.py

"""
Convergence studies: distances between the spectral data of A and of an
approximating sequence A_n, collected as series over n and judged with
smoothed trend checks.
"""

import logging
import math

import numpy as np

from src.analysis.charmap import char_map_hermitian, condition_number_flow, embedded_flow, graph_surface_area
from src.analysis.sobolev import family_difference, fd_derivative, lipschitz_constant_gap, lq_norm, metric_speed, q_energy, w1q_norm
from src.analysis.unordered import AlmgrenEmbedding
from src.errors import BadParams
from src.lab.families import ex_a_branch, scalar_family
from src.models.family import Grid, SampledFamily, ValueKind
from src.models.matrix import operator_norm, random_hermitian
from src.models.report import ExperimentReport

logger = logging.getLogger(__name__)

STUDIES = ("exA", "random", "kappa", "area")

DEFAULTS = {
    "exA": {"q": 2.0, "grid": 8001, "sweep": [4, 8, 16, 32, 64, 128, 256, 512, 1024], "threshold": 0.05,
            "pointwise_n": 256, "pointwise_eps": 0.05, "kink_margin": 0.5},
    "random": {"q": 2.0, "grid": 201, "sweep": [4, 8, 16, 32, 64, 128, 256, 512, 1024], "threshold": 0.05,
               "seed": 0, "d": 4},
    "kappa": {"q": 2.0, "grid": 201, "sweep": [4, 8, 16, 32, 64, 128, 256, 512, 1024], "threshold": 1e-2,
              "seed": 0, "d": 4},
    "area": {"grid": 4001, "sweep": [4, 8, 16, 32, 64, 128, 256], "threshold": 5e-3},
}


def smoothed(series, window: int = 3) -> np.ndarray:
    """Moving average over ``window`` consecutive entries."""
    values = np.asarray(series, dtype=np.float64)
    if values.size < window:
        return values
    return np.convolve(values, np.ones(window) / window, mode="valid")


def trend_decreasing(series, window: int = 3) -> bool:
    """True if the smoothed series is strictly decreasing."""
    return bool(np.all(np.diff(smoothed(series, window)) < 0.0))


def add_trend_checks(report: ExperimentReport, name: str, series, threshold: float | None = None):
    """Records the series plus its trend check and, optionally, a final-value threshold."""
    report.add_series(name, series)
    report.check(f"{name}_smoothed_decreasing", 1.0 if trend_decreasing(series) else 0.0, 1.0)
    if threshold is not None:
        report.check(f"{name}_final", series[-1], threshold, relation="le")


def _params(study: str, params: dict | None) -> dict:
    if study not in STUDIES:
        raise BadParams(f"Unknown study '{study}', expected one of {', '.join(STUDIES)}")
    merged = dict(DEFAULTS[study])
    for key, value in (params or {}).items():
        if value is not None:
            merged[key] = value
    sweep = [int(n) for n in merged["sweep"]]
    if len(sweep) < 2 or any(n < 1 for n in sweep) or sweep != sorted(set(sweep)):
        raise BadParams("Sweep must list at least two increasing positive integers")
    merged["sweep"] = sweep
    if int(merged["grid"]) < 3:
        raise BadParams("Study grids need at least three nodes")
    if "q" in merged and not float(merged["q"]) >= 1.0:
        raise BadParams(f"Exponent q must be >= 1, got {merged['q']}")
    return merged


def _tuple_flows(grid: Grid, branch: np.ndarray):
    """Ordered and unordered flows (-a, a) of the exA family."""
    pair = np.stack([-branch, branch], axis=-1)
    return (
        SampledFamily(grid, pair, ValueKind.ORDERED),
        SampledFamily(grid, pair.astype(np.complex128), ValueKind.UNORDERED),
    )


def _study_ex_a(report: ExperimentReport, p: dict):
    q = float(p["q"])
    grid = Grid.interval(-1.0, 1.0, int(p["grid"]))
    x = grid.axis_nodes(0)
    embedding = AlmgrenEmbedding.default(2)
    ordered, unordered = _tuple_flows(grid, ex_a_branch(math.inf, x))
    embedded = embedded_flow(ordered, embedding)
    speed = metric_speed(unordered)
    energy = q_energy(unordered, q)
    away = np.abs(x) >= p["kink_margin"]
    limit = scalar_family(grid, ex_a_branch(math.inf, x))

    w1q, rho, speed_gap, energy_gap, lip_gap = [], [], [], [], []
    for n in p["sweep"]:
        ordered_n, unordered_n = _tuple_flows(grid, ex_a_branch(n, x))
        w1q.append(w1q_norm(family_difference(ordered, ordered_n), q).w1q)
        rho.append(w1q_norm(family_difference(embedded, embedded_flow(ordered_n, embedding)), q).w1q)
        speed_gap.append(lq_norm(family_difference(speed, metric_speed(unordered_n)), q))
        energy_gap.append(abs(energy - q_energy(unordered_n, q)))
        lip_gap.append(lipschitz_constant_gap(limit, scalar_family(grid, ex_a_branch(n, x)), mask=away))
        logger.debug(f"exA n={n}: W1q {w1q[-1]:.4e}, rho {rho[-1]:.4e}")

    threshold = float(p["threshold"])
    add_trend_checks(report, "ordered_w1q", w1q, threshold)
    add_trend_checks(report, "rho_w1q", rho, threshold)
    add_trend_checks(report, "speed_gap_lq", speed_gap, threshold)
    add_trend_checks(report, "energy_gap", energy_gap, threshold)
    add_trend_checks(report, "lipschitz_gap_off_kink", lip_gap, threshold)

    # pointwise convergence of the top branch derivative, non-uniform near 0
    n = int(p["pointwise_n"])
    gap = np.abs(
        fd_derivative(limit, 0).values - fd_derivative(scalar_family(grid, ex_a_branch(n, x)), 0).values
    )
    fraction = float(np.mean(gap > p["pointwise_eps"]))
    report.add_scalar("pointwise_fraction", fraction)
    report.add_scalar("pointwise_sup", float(gap.max()))
    report.check("pointwise_fraction", fraction, 0.02, relation="le")
    report.check("pointwise_sup", float(gap.max()), 0.25)
    report.provenance += [
        "continuity of the ordered eigenvalue map in W^{1,q}",
        "almost everywhere convergence of eigenvalue derivatives, not uniform near the crossing",
        "convergence of metric speeds and q-energies of unordered eigenvalue curves",
    ]


def _random_family(p: dict):
    """A(x) = diag(2, 2.5, ...) + x T with ||T||_op = 0.2, and P with ||P||_op = 1."""
    rng = np.random.default_rng(int(p["seed"]))
    d = int(p["d"])
    t = random_hermitian(rng, d)
    perturbation = random_hermitian(rng, d)
    t_data = 0.2 * t.data / operator_norm(t)
    p_data = perturbation.data / operator_norm(perturbation)
    grid = Grid.interval(0.0, 1.0, int(p["grid"]))
    x = grid.axis_nodes(0)
    base = np.diag(2.0 + 0.5 * np.arange(d)).astype(np.complex128)
    values = base[np.newaxis] + x[:, np.newaxis, np.newaxis] * t_data[np.newaxis]
    return grid, values, p_data


def _study_random(report: ExperimentReport, p: dict):
    q = float(p["q"])
    grid, values, perturbation = _random_family(p)
    embedding = AlmgrenEmbedding.default(int(p["d"]))
    flow = char_map_hermitian(SampledFamily(grid, values, ValueKind.MATRIX)).flow
    embedded = embedded_flow(flow, embedding)
    ordered, rho = [], []
    for n in p["sweep"]:
        flow_n = char_map_hermitian(SampledFamily(grid, values + perturbation / n, ValueKind.MATRIX)).flow
        ordered.append(w1q_norm(family_difference(flow, flow_n), q).w1q)
        rho.append(w1q_norm(family_difference(embedded, embedded_flow(flow_n, embedding)), q).w1q)
    add_trend_checks(report, "ordered_w1q", ordered, float(p["threshold"]))
    add_trend_checks(report, "rho_w1q", rho, float(p["threshold"]))
    report.provenance.append("stability of ordered and embedded unordered eigenvalue flows under A + P/n")


def _study_kappa(report: ExperimentReport, p: dict):
    q = float(p["q"])
    grid, values, perturbation = _random_family(p)
    kappa = condition_number_flow(SampledFamily(grid, values, ValueKind.MATRIX))
    distances, sigma_min = [], []
    for n in p["sweep"]:
        kappa_n = condition_number_flow(SampledFamily(grid, values + perturbation / n, ValueKind.MATRIX))
        distances.append(w1q_norm(family_difference(kappa, kappa_n), q).w1q)
        sigma_min.append(kappa_n.meta["sigma_min"])
    add_trend_checks(report, "kappa_w1q", distances, float(p["threshold"]))
    report.add_series("sigma_min", sigma_min)
    report.add_scalar("sigma_min_limit", kappa.meta["sigma_min"])
    report.provenance.append("continuity of the condition number map in W^{1,q}")


def _study_area(report: ExperimentReport, p: dict):
    grid = Grid.interval(-1.0, 1.0, int(p["grid"]))
    x = grid.axis_nodes(0)
    limit = graph_surface_area(scalar_family(grid, ex_a_branch(math.inf, x)))
    areas = [graph_surface_area(scalar_family(grid, ex_a_branch(n, x))) for n in p["sweep"]]
    deficit = [limit - a for a in areas]
    report.add_scalar("area_limit", limit)
    report.add_series("area", areas)
    add_trend_checks(report, "area_deficit", deficit, float(p["threshold"]))
    report.check("area_deficit_nonnegative", min(deficit), 0.0, tol=1e-12)
    report.check("area_limit_exact", abs(limit - 2.0 * math.sqrt(2.0)), 0.0, relation="le", tol=1e-9)
    report.provenance.append("convergence of eigenvalue graph surface areas")


_RUNNERS = {"exA": _study_ex_a, "random": _study_random, "kappa": _study_kappa, "area": _study_area}


def run_convergence(study: str, params: dict | None = None) -> ExperimentReport:
    """Runs one convergence study; ``params`` overrides the study defaults."""
    p = _params(study, params)
    report = ExperimentReport(
        name=f"convergence_{study}",
        params={k: v for k, v in p.items() if k != "seed"},
        seed=p.get("seed"),
    )
    report.add_series("n", p["sweep"])
    logger.info(f"Studio di convergenza '{study}' su n = {p['sweep']}")
    _RUNNERS[study](report, p)
    return report
