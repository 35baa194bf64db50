# src/lab/fuzz.py

"""
Randomized checks of the eigenvalue perturbation inequalities.

Each trial draws its own generator from (seed, trial), so any trial can be
regenerated on its own and the worst offender dumped for inspection. Trials
are evaluated in chunks of EIGENFLOW_BATCH_SIZE through the stacked solvers.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from src import config
from src.analysis.eigen import eig_hermitian_stack, eig_normal_stack, singular_values_stack
from src.analysis.jacobi import gram_eigenvalues
from src.analysis.unordered import d2, d_inf
from src.errors import BadParams, SizeMismatch
from src.models.matrix import ComplexMatrix, random_general, random_hermitian, random_normal, random_unitary
from src.models.report import ExperimentReport
from src.models.spectrum import UnorderedSpectrum
from src.utils.io_helpers import parallel_map

logger = logging.getLogger(__name__)

KINDS = ("weyl", "loewner", "hw", "bdm", "singular")
SLACK_TOL = 1e-8
BDM_CONSTANT = 3.0
MAX_D = 16
# larger tuples go through the assignment solvers
FUZZ_BRUTE_MAX = 5

PROVENANCE = {
    "weyl": "Weyl: ||l(A) - l(B)||_inf <= ||A - B||_op for Hermitian A, B",
    "loewner": "Loewner: ||l(A) - l(B)||_2 <= ||A - B||_2 for Hermitian A, B",
    "hw": "Hoffman-Wielandt: d_2(L(A), L(B)) <= ||A - B||_2 for normal A, B",
    "bdm": "Bhatia-Davis-McIntosh: d_inf(L(A), L(B)) <= C ||A - B||_op, 1 < C < 3, for normal A, B",
    "singular": "singular values: ||s(A) - s(B)||_2 <= ||A - B||_2 for D x d A, B",
}


@dataclass(frozen=True)
class InequalitySample:
    """One instance lhs <= constant * rhs of a perturbation inequality."""

    kind: str
    lhs: float
    rhs: float
    constant: float = 1.0

    @property
    def slack(self) -> float:
        return self.constant * self.rhs - self.lhs

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else math.inf
        return self.lhs / self.rhs


def _check_kind(kind: str):
    if kind not in KINDS:
        raise BadParams(f"Unknown inequality '{kind}', expected one of {', '.join(KINDS)}")


def _constant(kind: str) -> float:
    return BDM_CONSTANT if kind == "bdm" else 1.0


def _ratios(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    positive = rhs > 0.0
    quotient = lhs / np.where(positive, rhs, 1.0)
    return np.where(positive, quotient, np.where(lhs == 0.0, 0.0, np.inf))


def _unordered_metric(metric, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    return np.array([
        metric(UnorderedSpectrum(x), UnorderedSpectrum(y), brute_force_max=FUZZ_BRUTE_MAX)
        for x, y in zip(xs, ys)
    ])


def _sides(kind: str, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of inequality ``kind`` for stacks ``a`` and ``b`` of equal shape."""
    difference = a - b
    frobenius = np.linalg.norm(difference, axis=(1, 2))

    def operator():
        return np.sqrt(gram_eigenvalues(difference)[:, -1])

    if kind in ("weyl", "loewner"):
        gap = eig_hermitian_stack(a).spectra.real - eig_hermitian_stack(b).spectra.real
        if kind == "loewner":
            return np.linalg.norm(gap, axis=1), frobenius
        return np.max(np.abs(gap), axis=1), operator()
    if kind == "singular":
        gap = singular_values_stack(a) - singular_values_stack(b)
        return np.linalg.norm(gap, axis=1), frobenius

    xs = eig_normal_stack(a).spectra
    ys = eig_normal_stack(b).spectra
    if kind == "hw":
        return _unordered_metric(d2, xs, ys), frobenius
    return _unordered_metric(d_inf, xs, ys), operator()


def _evaluate(kind: str, pairs: list) -> tuple[np.ndarray, np.ndarray]:
    """Sides for a list of (A, B) arrays, one stacked solve per matrix shape."""
    lhs, rhs = np.empty(len(pairs)), np.empty(len(pairs))
    groups = {}
    for i, (a, _) in enumerate(pairs):
        groups.setdefault(a.shape, []).append(i)
    for members in groups.values():
        a = np.stack([pairs[i][0] for i in members])
        b = np.stack([pairs[i][1] for i in members])
        lhs[members], rhs[members] = _sides(kind, a, b)
    return lhs, rhs


def inequality_slack(kind: str, a: ComplexMatrix, b: ComplexMatrix) -> InequalitySample:
    """Evaluates both sides of inequality ``kind`` on an explicit pair."""
    _check_kind(kind)
    if a.data.shape != b.data.shape:
        raise SizeMismatch(f"Pair shapes differ: {a.data.shape} and {b.data.shape}")
    lhs, rhs = _sides(kind, a.data[np.newaxis], b.data[np.newaxis])
    return InequalitySample(kind, float(lhs[0]), float(rhs[0]), _constant(kind))


def singular_shape(d: int, trial: int) -> tuple[int, int]:
    """Square, tall and wide shapes in turn."""
    return ((d, d), (2 * d, d), (d, 2 * d))[trial % 3]


def _draw_pair(seed: int, trial: int, d: int, kind: str) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng([seed, trial])
    if kind in ("hw", "bdm"):
        return random_normal(rng, d).data, random_normal(rng, d).data
    if kind == "singular":
        rows, cols = singular_shape(d, trial)
        a = random_general(rng, rows, cols).data
        e = random_general(rng, rows, cols).data
    else:
        a = random_hermitian(rng, d).data
        e = random_hermitian(rng, d).data
    scale = 10.0 ** rng.uniform(-3.0, 0.0)
    return a, a + scale * e


def regenerate_pair(seed: int, trial: int, d: int, kind: str):
    """The pair drawn by ``trial`` of a fuzz run; B = A + s E with s log-uniform in [1e-3, 1]."""
    _check_kind(kind)
    a, b = _draw_pair(seed, trial, d, kind)
    return ComplexMatrix(a), ComplexMatrix(b)


def structured_bdm_pair(seed: int, trial: int, d: int):
    """Normal pair with spectra on the d-th roots of unity, the second set rotated by a random angle."""
    rng = np.random.default_rng([seed, trial, 1])
    roots = np.exp(2j * np.pi * np.arange(d) / d)
    turn = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi / d))
    u = random_unitary(rng, d).data
    v = random_unitary(rng, d).data
    a = (u * roots[np.newaxis, :]) @ u.conj().T
    b = (v * (turn * roots)[np.newaxis, :]) @ v.conj().T
    return ComplexMatrix(a), ComplexMatrix(b)


def _run_trials(kind: str, count: int, draw, threads: int | None) -> tuple[np.ndarray, np.ndarray]:
    """Sides of ``count`` trials produced by ``draw(trial)``, chunked for the stacked solvers."""
    size = max(1, config.BATCH_SIZE)
    chunks = [range(start, min(start + size, count)) for start in range(0, count, size)]
    results = parallel_map(lambda chunk: _evaluate(kind, [draw(t) for t in chunk]), chunks, threads)
    if not results:
        return np.empty(0), np.empty(0)
    return np.concatenate([r[0] for r in results]), np.concatenate([r[1] for r in results])


def fuzz_inequalities(
    seed: int,
    trials: int,
    d: int,
    kind: str,
    structured_trials: int | None = None,
    threads: int | None = None,
) -> ExperimentReport:
    """Runs ``trials`` random pairs through inequality ``kind`` and records the slacks.

    For ``bdm`` a structured sub-sweep on roots of unity looks for ratios
    above 1; not finding one leaves that check inconclusive. ``meta`` keeps
    the trial behind every check so the handler can dump the offender.
    """
    _check_kind(kind)
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise BadParams(f"trials must be a positive integer, got {trials}")
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise BadParams(f"seed must be a nonnegative integer, got {seed}")
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= MAX_D:
        raise BadParams(f"d must lie in 1..{MAX_D}, got {d}")

    lhs, rhs = _run_trials(kind, trials, lambda t: _draw_pair(seed, t, d, kind), threads)
    slacks = _constant(kind) * rhs - lhs
    worst = int(np.argmin(slacks))

    report = ExperimentReport(
        name=f"fuzz_{kind}",
        params={"trials": trials, "d": d, "kind": kind},
        seed=seed,
        provenance=[PROVENANCE[kind]],
    )
    report.add_series("slack", slacks)
    report.add_scalar("worst_slack", slacks[worst])
    report.add_scalar("mean_slack", float(slacks.mean()))
    report.meta["worst_trial"] = worst
    report.check(f"worst slack of {kind}", slacks[worst], -SLACK_TOL)

    if kind == "bdm":
        ratios = _ratios(lhs, rhs)
        report.add_series("ratio", ratios)
        report.add_scalar("max_ratio", float(ratios.max()))
        report.meta["max_ratio_trial"] = int(np.argmax(ratios))
        report.check("d_inf / ||A - B||_op <= 3", float(ratios.max()), BDM_CONSTANT, relation="le", tol=SLACK_TOL)

        count = trials if structured_trials is None else structured_trials
        s_lhs, s_rhs = _run_trials(
            "bdm", count, lambda t: tuple(m.data for m in structured_bdm_pair(seed, t, d)), threads
        )
        structured = _ratios(s_lhs, s_rhs)
        best = float(structured.max()) if structured.size else 0.0
        overall = max(best, float(ratios.max()))
        report.add_scalar("structured_max_ratio", best)
        if structured.size:
            report.meta["structured_max_ratio_trial"] = int(np.argmax(structured))
        report.check("structured ratio <= 3", best, BDM_CONSTANT, relation="le", tol=SLACK_TOL)
        found = overall > 1.0
        report.meta["ratio_above_one"] = found
        report.check("ratio above 1 found", overall, 1.0, conclusive=found)
        if not found:
            logger.info(f"Nessun rapporto > 1 trovato per d={d}: verifica inconcludente")

    logger.info(f"Fuzz {kind} d={d}: {trials} prove, slack minimo {slacks[worst]:.3e} (prova {worst})")
    return report


def offending_pairs(report: ExperimentReport, seed: int, d: int, kind: str) -> dict:
    """Pairs behind every violated check of a fuzz report, keyed by a file label."""
    violated = {check.name for check in report.violations()}
    pairs = {}
    if f"worst slack of {kind}" in violated:
        pairs["worst"] = regenerate_pair(seed, report.meta["worst_trial"], d, kind)
    if "d_inf / ||A - B||_op <= 3" in violated:
        pairs["max_ratio"] = regenerate_pair(seed, report.meta["max_ratio_trial"], d, kind)
    if "structured ratio <= 3" in violated:
        pairs["structured"] = structured_bdm_pair(seed, report.meta["structured_max_ratio_trial"], d)
    return pairs
