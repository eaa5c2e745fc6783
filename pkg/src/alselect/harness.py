"""Batched active-learning simulation: biased equal-prevalence
initialization, per-round select/label/refit, hold-out evaluation,
multi-trial aggregation, plus a synthetic pocket-dataset generator and an
empirical validator for the hitting-probability bound.

RNG discipline: every stream is derived from (master_seed, purpose tag,
trial index), so the holdout split and the initial labeled set are shared
by all strategies at the same master seed, and trials are independent and
individually reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classifier import FitConfig, accuracy, fit
from .data import Dataset, standardize_apply, standardize_fit
from .errors import InfeasibleSpecError, InsufficientClassInstancesError
from .probs import LemmaBoundInput, LemmaBoundReport, lemma_bound
from .sampling import RngState, select_top_k, uniform_sample
from .strategies import StrategyConfig, score_pool, select_batch

# stream tags for RngState.derive
_HOLDOUT = 0
_INIT = 1
_SELECT = 2
_LEMMA = 3
_SYNTH = 4


@dataclass(frozen=True)
class ExperimentConfig:
    strategy: StrategyConfig
    fit: FitConfig = FitConfig()
    n0: int = 100
    rounds: int = 30
    batch: int = 30
    trials: int = 5
    holdout_fraction: float = 0.25
    master_seed: int = 0

    def __post_init__(self):
        if self.n0 < 0:
            raise ValueError(f"n0 must be >= 0, got {self.n0}")
        if self.rounds < 0:
            raise ValueError(f"rounds must be >= 0, got {self.rounds}")
        if self.batch < 1:
            raise ValueError(f"batch must be >= 1, got {self.batch}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not (0.0 < self.holdout_fraction < 1.0):
            raise ValueError(f"holdout_fraction must be in (0, 1), got {self.holdout_fraction}")
        if self.master_seed < 0:
            raise ValueError(f"master_seed must be >= 0, got {self.master_seed}")


@dataclass
class SplitState:
    """Disjoint partition of dataset ids; labeled only ever grows."""

    labeled_ids: set[int]
    pool_ids: set[int]
    holdout_ids: set[int]
    n_total: int

    def check(self) -> None:
        if self.labeled_ids & self.pool_ids or self.labeled_ids & self.holdout_ids \
                or self.pool_ids & self.holdout_ids:
            raise RuntimeError("labeled/pool/holdout sets overlap")
        if len(self.labeled_ids) + len(self.pool_ids) + len(self.holdout_ids) != self.n_total:
            raise RuntimeError("labeled/pool/holdout do not cover the dataset")


@dataclass(frozen=True)
class RoundRecord:
    trial: int
    round: int
    selected_ids: tuple[int, ...]
    labeled_count: int
    holdout_accuracy: float
    elapsed_ms: int


@dataclass(frozen=True)
class ExperimentResult:
    """All per-round records in (trial, round) order plus the final-round
    accuracy aggregate: mean and sample std (divisor trials-1; 0 for a
    single trial)."""

    records: tuple[RoundRecord, ...]
    final_accuracies: tuple[float, ...]
    final_accuracy_mean: float
    final_accuracy_std: float


def biased_init(labels: Sequence[int], n0: int, k: int, rng: RngState,
                ids: Sequence[int] | None = None) -> set[int]:
    """Equal-prevalence seed set: floor(n0/k) ids per class, drawn uniformly
    within each class; the n0 mod k remainder goes one per class in
    ascending class index.

    `ids` optionally names the candidate universe parallel to `labels`
    (defaults to positions 0..len-1).
    """
    y = np.asarray(labels, dtype=np.int64)
    if ids is None:
        ids = np.arange(len(y), dtype=np.int64)
    else:
        ids = np.asarray(ids, dtype=np.int64)
        if ids.shape != y.shape:
            raise ValueError("ids and labels must be parallel")
    if n0 == 0:
        return set()
    base, rem = divmod(n0, k)
    chosen: set[int] = set()
    for c in range(k):
        quota = base + (1 if c < rem else 0)
        if quota == 0:
            continue
        class_ids = ids[y == c]
        if len(class_ids) < quota:
            raise InsufficientClassInstancesError(c, len(class_ids), quota)
        class_ids = np.sort(class_ids)
        chosen |= uniform_sample(class_ids.tolist(), quota, rng)
    return chosen


def _note(exc, msg):
    if hasattr(exc, "add_note"):
        exc.add_note(msg)


def holdout_ids(n: int, cfg: ExperimentConfig) -> set[int]:
    """The holdout split for a dataset of n rows: derived from the master
    seed only, so every trial and every strategy shares it."""
    size = int(cfg.holdout_fraction * n)
    if size == 0:
        return set()
    return uniform_sample(range(n), size, RngState(cfg.master_seed).derive(_HOLDOUT))


def run_trial(dataset: Dataset, cfg: ExperimentConfig, trial_index: int) -> list[RoundRecord]:
    """One independent trial: shared holdout split, equal-prevalence init,
    then `rounds` iterations of score -> select -> reveal labels -> refit.

    The round-0 record is the pre-query baseline (the classifier fit on the
    initial labeled set). Standardization is fit on the initial labeled
    rows only and frozen for the whole trial. The oracle is the dataset's
    ground truth.
    """
    n = dataset.n
    master = RngState(cfg.master_seed)

    holdout = holdout_ids(n, cfg)
    remaining = sorted(set(range(n)) - holdout)

    if cfg.n0 + cfg.rounds * cfg.batch > len(remaining):
        raise ValueError(
            f"n0 + rounds*batch = {cfg.n0 + cfg.rounds * cfg.batch} exceeds "
            f"the {len(remaining)} ids left after the holdout split"
        )

    init_rng = master.derive(_INIT, trial_index)
    select_rng = master.derive(_SELECT, trial_index)

    labels_remaining = dataset.labels[remaining]
    labeled = biased_init(labels_remaining, cfg.n0, dataset.k, init_rng, ids=remaining)
    split = SplitState(
        labeled_ids=set(labeled),
        pool_ids=set(remaining) - labeled,
        holdout_ids=set(holdout),
        n_total=n,
    )
    split.check()

    std = standardize_fit(dataset.features[sorted(labeled)])
    Z = standardize_apply(std, dataset.features)
    hold_idx = np.asarray(sorted(split.holdout_ids), dtype=np.int64)

    def fit_and_score():
        lab_idx = np.asarray(sorted(split.labeled_ids), dtype=np.int64)
        model = fit(Z[lab_idx], dataset.labels[lab_idx], dataset.k, cfg.fit)
        acc = accuracy(model, Z[hold_idx], dataset.labels[hold_idx])
        return model, acc

    records: list[RoundRecord] = []
    t0 = time.perf_counter()
    model, acc = fit_and_score()
    records.append(RoundRecord(
        trial=trial_index, round=0, selected_ids=(),
        labeled_count=len(split.labeled_ids), holdout_accuracy=acc,
        elapsed_ms=int((time.perf_counter() - t0) * 1000),
    ))

    seen: set[int] = set(split.labeled_ids)
    for r in range(1, cfg.rounds + 1):
        t0 = time.perf_counter()
        try:
            pool_idx = np.asarray(sorted(split.pool_ids), dtype=np.int64)
            scores = score_pool(model, Z[pool_idx], cfg.strategy, ids=pool_idx)
            selected = select_batch(cfg.strategy, scores, cfg.batch, select_rng)
        except Exception as exc:
            _note(exc, f"while selecting in trial {trial_index}, round {r}")
            raise

        if not selected <= split.pool_ids:
            raise RuntimeError(f"round {r} selected ids outside the pool")
        if selected & seen:
            raise RuntimeError(f"round {r} re-selected already-labeled ids")
        seen |= selected

        split.pool_ids -= selected
        split.labeled_ids |= selected  # oracle: ground-truth labels revealed
        split.check()
        if len(split.labeled_ids) != cfg.n0 + r * cfg.batch:
            raise RuntimeError(f"round {r}: labeled_count arithmetic violated")

        try:
            model, acc = fit_and_score()
        except Exception as exc:
            _note(exc, f"while refitting in trial {trial_index}, round {r}")
            raise
        records.append(RoundRecord(
            trial=trial_index, round=r, selected_ids=tuple(sorted(selected)),
            labeled_count=len(split.labeled_ids), holdout_accuracy=acc,
            elapsed_ms=int((time.perf_counter() - t0) * 1000),
        ))
    return records


def run_experiment(dataset: Dataset, cfg: ExperimentConfig) -> ExperimentResult:
    """`trials` independent trials with derived seeds, aggregated into the
    final-round accuracy mean and sample standard deviation."""
    records: list[RoundRecord] = []
    finals: list[float] = []
    for t in range(cfg.trials):
        trial_records = run_trial(dataset, cfg, t)
        records.extend(trial_records)
        finals.append(trial_records[-1].holdout_accuracy)
    arr = np.asarray(finals)
    std = float(arr.std(ddof=1)) if cfg.trials > 1 else 0.0
    return ExperimentResult(
        records=tuple(records),
        final_accuracies=tuple(finals),
        final_accuracy_mean=float(arr.mean()),
        final_accuracy_std=std,
    )


@dataclass(frozen=True)
class SynthPocketSpec:
    """Gaussian cluster dataset with a planted pocket and optional
    maximal-entropy overlap region.

    Main clusters sit pairwise `separation` apart (unit variance). The
    pocket is a sub-cluster of `pocket_class` displaced `pocket_offset`
    from the decoy class's center along an off-simplex direction, so a
    model trained without pocket labels confidently mislabels it as the
    decoy. `overlap_fraction` of the data (if any) is an equal mixture of
    all k classes at a shared far center: irreducibly max-entropy, which
    starves purely greedy selection. train_prevalence declares the
    training-side class mix of the label-shift story; the realized data
    follows pool_prevalence.
    """

    n: int
    d: int
    k: int
    beta: float
    train_prevalence: tuple[float, ...]
    pool_prevalence: tuple[float, ...]
    pocket_class: int
    separation: float
    seed: int
    pocket_decoy: int | None = None
    pocket_offset: float = 3.25
    overlap_fraction: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.d < self.k:
            raise ValueError(f"need d >= k for the cluster layout, got d={self.d}, k={self.k}")
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        for name, vec in (("train_prevalence", self.train_prevalence),
                          ("pool_prevalence", self.pool_prevalence)):
            if len(vec) != self.k:
                raise ValueError(f"{name} must have {self.k} entries")
            if any(p < 0 for p in vec):
                raise ValueError(f"{name} entries must be >= 0")
            if abs(math.fsum(vec) - 1.0) > 1e-9:
                raise ValueError(f"{name} must sum to 1")
        if not (0 <= self.pocket_class < self.k):
            raise ValueError(f"pocket_class must be in [0, {self.k}), got {self.pocket_class}")
        if self.pocket_decoy is not None:
            if not (0 <= self.pocket_decoy < self.k):
                raise ValueError(f"pocket_decoy must be in [0, {self.k})")
            if self.pocket_decoy == self.pocket_class:
                raise ValueError("pocket_decoy must differ from pocket_class")
        if self.separation <= 0:
            raise ValueError(f"separation must be > 0, got {self.separation}")
        if not (0.0 <= self.overlap_fraction < 1.0):
            raise ValueError(f"overlap_fraction must be in [0, 1), got {self.overlap_fraction}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")

    @property
    def decoy(self) -> int:
        if self.pocket_decoy is not None:
            return self.pocket_decoy
        return (self.pocket_class + 1) % self.k


def _largest_remainder(total: int, shares) -> np.ndarray:
    raw = np.asarray(shares, dtype=np.float64) * total
    counts = np.floor(raw).astype(int)
    rem = total - counts.sum()
    # distribute leftovers by largest fractional part, ties to smaller index
    order = np.lexsort((np.arange(len(shares)), -(raw - counts)))
    for i in range(rem):
        counts[order[i]] += 1
    return counts


def _cluster_centers(spec: SynthPocketSpec):
    scale = spec.separation / math.sqrt(2.0)
    centers = np.zeros((spec.k, spec.d))
    for i in range(spec.k):
        centers[i, i] = scale
    if spec.d > spec.k:
        off = np.zeros(spec.d)
        off[spec.k] = 1.0
    else:
        off = centers[spec.decoy] - centers.mean(axis=0)
        off /= np.linalg.norm(off)
    pocket_center = centers[spec.decoy] + spec.pocket_offset * off
    if spec.d > spec.k + 1:
        overlap_dir = np.zeros(spec.d)
        overlap_dir[spec.k + 1] = -1.0
    else:
        overlap_dir = -np.ones(spec.d) / math.sqrt(spec.d)
    overlap_center = 1.25 * spec.separation * overlap_dir
    return centers, pocket_center, overlap_center


def generate_pocket_dataset(spec: SynthPocketSpec) -> tuple[Dataset, frozenset[int]]:
    """Realize the spec; returns the dataset and the pocket row ids.

    Row order is a seed-deterministic shuffle of the generated blocks, so
    pocket membership carries no positional signal.
    """
    pocket_m = int(round(spec.beta * spec.n))
    if spec.beta > 0 and pocket_m < 1:
        raise InfeasibleSpecError(f"beta*n = {spec.beta * spec.n:.3f} rounds to an empty pocket")

    counts = _largest_remainder(spec.n, spec.pool_prevalence)
    overlap_m = int(round(spec.overlap_fraction * spec.n))
    overlap_counts = _largest_remainder(overlap_m, [1.0 / spec.k] * spec.k) if overlap_m \
        else np.zeros(spec.k, dtype=int)

    main_counts = counts - overlap_counts
    main_counts[spec.pocket_class] -= pocket_m
    if (main_counts < 0).any():
        bad = int(np.argmin(main_counts))
        raise InfeasibleSpecError(
            f"class {bad}: pool_prevalence allocates {counts[bad]} rows but "
            f"pocket/overlap need more"
        )

    centers, pocket_center, overlap_center = _cluster_centers(spec)
    gen = RngState(spec.seed).derive(_SYNTH)

    blocks: list[tuple[np.ndarray, int, bool, int]] = []
    for c in range(spec.k):
        if main_counts[c] > 0:
            blocks.append((centers[c], int(main_counts[c]), False, c))
    if pocket_m > 0:
        blocks.append((pocket_center, pocket_m, True, spec.pocket_class))
    for c in range(spec.k):
        if overlap_counts[c] > 0:
            blocks.append((overlap_center, int(overlap_counts[c]), False, c))

    feats, labs, pocket_flags = [], [], []
    for center, count, is_pocket, label in blocks:
        feats.append(gen.standard_normal((count, spec.d)) + center)
        labs.append(np.full(count, label, dtype=np.int64))
        pocket_flags.append(np.full(count, is_pocket, dtype=bool))
    X = np.vstack(feats)
    y = np.concatenate(labs)
    flags = np.concatenate(pocket_flags)

    perm = gen.permutation(spec.n)
    X, y, flags = X[perm], y[perm], flags[perm]
    dataset = Dataset(
        features=X, labels=y, k=spec.k,
        feature_names=tuple(f"f{j}" for j in range(spec.d)),
        label_names=tuple(str(c) for c in range(spec.k)),
    )
    pocket_ids = frozenset(int(i) for i in np.flatnonzero(flags))
    return dataset, pocket_ids


@dataclass(frozen=True)
class LemmaValidationReport:
    bound: LemmaBoundReport
    repeats: int
    hits: int
    hit_rate: float
    target: float  # 1 - delta


def validate_lemma(spec: SynthPocketSpec, chi: float, delta: float,
                   repeats: int, equal_weights: bool = False) -> LemmaValidationReport:
    """Monte Carlo check of the hitting bound under worst-case weights.

    Pool of spec.n items with a round(beta*n) pocket; pocket items carry
    the entropy floor zeta, everything else ln k (the maximum), isolating
    the sampling claim from classifier behavior. Each repeat draws the
    bound's n_s items in one streaming pass and counts whether any pocket
    item was hit. With `equal_weights` the pocket carries ln k too, which
    has the closed-form hit rate 1 - (1-beta)^n_s for independent draws.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    pocket_m = int(round(spec.beta * spec.n))
    if pocket_m < 1:
        raise InfeasibleSpecError("pocket is empty; nothing to hit")

    bound = lemma_bound(LemmaBoundInput(beta=spec.beta, chi=chi, k=spec.k, delta=delta))
    if bound.n_s > spec.n:
        raise InfeasibleSpecError(
            f"bound requires n_s={bound.n_s} draws but the pool has only {spec.n} items"
        )

    top = math.log(spec.k)
    pocket_w = top if equal_weights else bound.zeta
    ids = list(range(spec.n))
    weights = [pocket_w] * pocket_m + [top] * (spec.n - pocket_m)

    hits = 0
    root = RngState(spec.seed)
    for rep in range(repeats):
        if bound.n_s == 0:
            break
        selected = select_top_k(zip(ids, weights), bound.n_s, root.derive(_LEMMA, rep))
        if any(i < pocket_m for i in selected):
            hits += 1
    return LemmaValidationReport(
        bound=bound, repeats=repeats, hits=hits,
        hit_rate=hits / repeats, target=1.0 - delta,
    )
