"""Certification verdicts and Monte Carlo parameter sweeps."""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .bases import BasisPair
from .measure import DEFAULT_N_TOTAL, joint_probabilities, normalize_counts, simulate_counts
from .metrics import (
    analytic_mi_sum_rho_c,
    analytic_mi_sum_werner,
    delta_mi,
    mutual_information,
)
from .states import build_state

DEFAULT_TRIALS = 40
# slack for comparing computed sums against thresholds; an exact log2(d) must stay Inconclusive
COMPARE_ATOL = 1e-9


class Verdict(str, enum.Enum):
    ENTANGLED = "Entangled"
    MAXIMALLY_ENTANGLED_CONSISTENT = "MaximallyEntangledConsistent"
    INCONCLUSIVE = "Inconclusive"


class Method(str, enum.Enum):
    MI = "MI"
    PEARSON_CONJECTURE = "PearsonConjecture"


@dataclass(frozen=True)
class CertificationReport:
    value: float
    sigma: float
    threshold_ent: float
    threshold_max: float
    verdict: Verdict
    method: Method
    family: str | None = None
    d: int | None = None
    p: float | None = None
    pair_labels: tuple[str, ...] = ()
    per_pair: tuple[float, ...] = ()
    conjecture: bool = False

    def to_dict(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict.value
        out["method"] = self.method.value
        out["pair_labels"] = list(self.pair_labels)
        out["per_pair"] = list(self.per_pair)
        return out


def _verdict(value: float, sigma: float, t_ent: float, t_max: float) -> Verdict:
    if value - 2 * sigma > t_ent + COMPARE_ATOL:
        if value + 2 * sigma >= t_max - COMPARE_ATOL:
            return Verdict.MAXIMALLY_ENTANGLED_CONSISTENT
        return Verdict.ENTANGLED
    return Verdict.INCONCLUSIVE


def certify_mi(mi_sum: float, sigma: float, d: int) -> CertificationReport:
    """Entangled if the 2-sigma lower bound exceeds log2 d; maximally entangled
    consistent if, in addition, the 2-sigma interval reaches 2 log2 d.

    A failed test is reported as Inconclusive: the criterion is one-sided.
    """
    if mi_sum < 0:
        raise ValueError(f"mutual information sum must be nonnegative, got {mi_sum}")
    t = float(np.log2(d))
    return CertificationReport(mi_sum, sigma, t, 2 * t, _verdict(mi_sum, sigma, t, 2 * t), Method.MI)


def certify_pearson(pearson_sum: float, sigma: float = 0.0) -> CertificationReport:
    """Same margin logic against thresholds 1 and 2; rests on an unproven conjecture."""
    return CertificationReport(
        pearson_sum, sigma, 1.0, 2.0, _verdict(pearson_sum, sigma, 1.0, 2.0),
        Method.PEARSON_CONJECTURE, conjecture=True,
    )


def analytic_sum(family: str, d: int, p: float, pairs: Sequence[BasisPair]) -> float | None:
    """Closed-form MI sum when one exists for this family and pair choice."""
    labels = [pair.label for pair in pairs]
    if len(labels) != 2 or labels[0] != "comp" or labels[1] not in ("fourier", "sx"):
        return None
    if family == "rho_c":
        return analytic_mi_sum_rho_c(d, p)
    if family == "rho_w":
        return analytic_mi_sum_werner(d, p)
    return None


def certify_state(family: str, d: int, p: float | None, pairs: Sequence[BasisPair], *,
                  exact: bool = False, n_total: int = DEFAULT_N_TOTAL,
                  seed: int | None = 0) -> CertificationReport:
    """Certify one family member from exact tables or one simulated data set.

    With simulated data the uncertainty is the propagated Poisson error,
    summed linearly over the pairs.
    """
    rho = build_state(family, d, p)
    tables = [joint_probabilities(rho, pair) for pair in pairs]
    if exact:
        per_pair = [mutual_information(t) for t in tables]
        sigma = 0.0
    else:
        rng = np.random.default_rng(seed)
        per_pair, sigma = [], 0.0
        for t in tables:
            counts = simulate_counts(t, n_total, rng)
            per_pair.append(mutual_information(normalize_counts(counts)[0]))
            sigma += delta_mi(counts)
    base = certify_mi(float(np.sum(per_pair)), sigma, d)
    return CertificationReport(
        base.value, base.sigma, base.threshold_ent, base.threshold_max, base.verdict, base.method,
        family=family, d=int(d), p=p, pair_labels=tuple(pr.label for pr in pairs),
        per_pair=tuple(float(v) for v in per_pair),
    )


@dataclass(frozen=True)
class SweepRecord:
    family: str
    d: int
    p: float
    pair_labels: tuple[str, ...]
    exact_per_pair: tuple[float, ...]
    exact_sum: float
    analytic_sum: float | None
    mean_per_pair: tuple[float, ...]
    mean_sum: float
    sigma: float
    trials: int
    n_total: int | None
    verdict: Verdict
    sums: tuple[float, ...] = field(default=(), repr=False)

    @property
    def band(self) -> tuple[float, float]:
        return self.mean_sum - 2 * self.sigma, self.mean_sum + 2 * self.sigma

    @property
    def threshold(self) -> float:
        return float(np.log2(self.d))


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ENTCERT_THREADS", "1")))
    except ValueError:
        return 1


def _trial_rng(seed: int, point: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, trial)))


def _sweep_point(family, d, p, pairs, n_total, trials, seed, index, exact) -> SweepRecord:
    rho = build_state(family, d, p)
    tables = [joint_probabilities(rho, pair) for pair in pairs]
    exact_pp = tuple(mutual_information(t) for t in tables)
    exact_total = float(np.sum(exact_pp))
    labels = tuple(pair.label for pair in pairs)
    analytic = analytic_sum(family, d, p, pairs)
    if exact:
        return SweepRecord(family, d, p, labels, exact_pp, exact_total, analytic, exact_pp,
                           exact_total, 0.0, 0, None, certify_mi(exact_total, 0.0, d).verdict)
    per_trial = np.empty((trials, len(tables)))
    for k in range(trials):
        rng = _trial_rng(seed, index, k)
        for j, t in enumerate(tables):
            per_trial[k, j] = mutual_information(normalize_counts(simulate_counts(t, n_total, rng))[0])
    sums = per_trial.sum(axis=1)
    mean_sum = float(sums.mean())
    sigma = float(sums.std(ddof=1))
    return SweepRecord(
        family, d, p, labels, exact_pp, exact_total, analytic,
        tuple(float(v) for v in per_trial.mean(axis=0)), mean_sum, sigma, trials, n_total,
        certify_mi(mean_sum, sigma, d).verdict, tuple(float(s) for s in sums),
    )


def sweep(family: str, d: int, p_grid: Sequence[float], pairs: Sequence[BasisPair], *,
          n_total: int = DEFAULT_N_TOTAL, trials: int = DEFAULT_TRIALS, seed: int = 0,
          exact: bool = False, threads: int | None = None) -> list[SweepRecord]:
    """Exact and simulated MI sums over a grid of mixing parameters.

    Each trial draws from its own stream keyed by (seed, point index, trial
    index), so results do not depend on the thread count.
    """
    if not exact and trials < 2:
        raise ValueError(f"a Monte Carlo band needs trials >= 2, got {trials}")
    threads = threads or thread_count()
    args = [(family, d, float(p), pairs, n_total, trials, seed, i, exact) for i, p in enumerate(p_grid)]
    if threads == 1:
        return [_sweep_point(*a) for a in args]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda a: _sweep_point(*a), args))


def p_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid, rounded to suppress accumulation error (e.g. 0.1 * 3)."""
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValueError("grid stop must not be below start")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]
