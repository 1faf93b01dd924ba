"""Per-instance and dataset-level task behavior metrics.

For every instance i, task t, and ground truth j (the candidate is matched and
judged against each GT separately because fp_raw depends on the GT):

    attempted_{i,t}   1 iff the candidate scene graph has a tuple of task t;
                      equals |TP| + |FP_raw| != 0 for every j, since
                      TP + FP_raw always covers the candidate's tuples of t
    error_rate        |FP_new| / (|TP| + |FP_raw|), averaged uniformly over j
    shift_rate        |AC| / (|AC| + |FN|), 0 when the denominator is 0,
                      averaged uniformly over j
    sensitivity       |candidate tuples of t| / |candidate tuples|

Dataset level: attempt_count and means of error/shift over attempting
instances; sensitivity is summed over attempting instances but divided by the
TOTAL instance count N (that asymmetry is deliberate and load-bearing for the
task comparison view).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError
from .judgment import JudgedMatchResult
from .sg import ALL_TASKS, SceneGraph, SynonymLexicon, TaskCategory, TaskVocab
from .sg.matching import by_category, canonicalize

DENSITY_POINTS = 101
DENSITY_BANDWIDTH_FLOOR = 0.01


@dataclass(frozen=True)
class TaskMetricsRecord:
    """One instance's behavior on one task, aggregated over its ground truths."""

    instance_id: str
    task: TaskCategory
    attempted: int  # 0 | 1
    error_rate: float | None  # None unless attempted
    shift_rate: float | None
    sensitivity: float | None
    per_gt: list[dict] = field(default_factory=list)  # [{"err":…, "sf":…} per GT]


@dataclass(frozen=True)
class DatasetTaskSummary:
    """Dataset-level aggregation of one task under one corruption key."""

    task: TaskCategory
    corruption_key: str
    attempt_count: int
    error_rate: float | None  # None when no instance attempts the task
    shift_rate: float | None
    sensitivity: float
    total_instances: int


def instance_task_metrics(
    instance_id: str,
    judged: Sequence[JudgedMatchResult],
    candidate_sg: SceneGraph,
    vocab: TaskVocab,
    lex: SynonymLexicon | None = None,
) -> dict[TaskCategory, TaskMetricsRecord]:
    """Behavior metrics of one instance for all six tasks.

    `judged` holds one judged match result per ground truth (M >= 1). The
    candidate graph is canonicalized through `lex` so that the attempt test
    and sensitivity shares line up exactly with the judged TP/FP_raw sets,
    which matching produced from canonical tuples.
    """
    if not judged:
        raise InputError("instance_task_metrics requires at least one judged result")

    if lex is not None:
        candidate_sg = canonicalize(candidate_sg, lex)
    cand_by_cat = by_category(candidate_sg, vocab)
    total_tuples = len(candidate_sg)
    records = {}
    for task in ALL_TASKS:
        attempted = 1 if cand_by_cat[task] else 0
        if not attempted:
            records[task] = TaskMetricsRecord(instance_id, task, 0, None, None, None, [])
            continue
        per_gt = []
        for jm in judged:
            attempt_size = len(jm.tp[task]) + len(jm.fp_raw[task])
            if attempt_size == 0:
                raise InputError(
                    f"candidate attempts task {task.value} but a judged result has no "
                    f"candidate tuples for it; judged results must come from this candidate"
                )
            err = len(jm.fp_new[task]) / attempt_size
            shift_denom = len(jm.ac[task]) + len(jm.fn[task])
            sf = len(jm.ac[task]) / shift_denom if shift_denom else 0.0
            per_gt.append({"err": err, "sf": sf})
        m = len(per_gt)
        records[task] = TaskMetricsRecord(
            instance_id=instance_id,
            task=task,
            attempted=1,
            error_rate=sum(g["err"] for g in per_gt) / m,
            shift_rate=sum(g["sf"] for g in per_gt) / m,
            sensitivity=len(cand_by_cat[task]) / total_tuples,
            per_gt=per_gt,
        )
    return records


def dataset_summary(
    records: Sequence[TaskMetricsRecord],
    task: TaskCategory,
    corruption_key: str,
    total_instances: int | None = None,
) -> DatasetTaskSummary:
    """Aggregate one task's records over the dataset."""
    rows = [r for r in records if r.task == task]
    if total_instances is None:
        total_instances = len(rows)
    if total_instances <= 0:
        raise InputError("dataset_summary needs a positive instance count")
    attempting = [r for r in rows if r.attempted]
    cnt = len(attempting)
    if cnt == 0:
        return DatasetTaskSummary(task, corruption_key, 0, None, None, 0.0, total_instances)
    return DatasetTaskSummary(
        task=task,
        corruption_key=corruption_key,
        attempt_count=cnt,
        error_rate=sum(r.error_rate for r in attempting) / cnt,
        shift_rate=sum(r.shift_rate for r in attempting) / cnt,
        sensitivity=sum(r.sensitivity for r in attempting) / total_instances,
        total_instances=total_instances,
    )


def silverman_bandwidth(values: np.ndarray) -> float:
    """Silverman's rule of thumb, robust variant, floored for degenerate data."""
    n = len(values)
    if n < 2:
        return DENSITY_BANDWIDTH_FLOOR
    std = float(np.std(values, ddof=1))
    q75, q25 = np.percentile(values, [75, 25])
    iqr = float(q75 - q25)
    spread = min(x for x in (std, iqr / 1.34) if x > 0) if (std > 0 or iqr > 0) else 0.0
    return max(0.9 * spread * n ** (-0.2), DENSITY_BANDWIDTH_FLOOR)


def metric_density(values: Sequence[float]) -> dict | None:
    """Gaussian KDE of metric values over [0, 1], sampled at 101 points.

    Returns {"x": [...], "density": [...]} or None for empty input. The
    trapezoidal integral over [0, 1] approximates the in-range probability
    mass (tails near the boundaries may clip up to a few percent).
    """
    vals = np.asarray(list(values), dtype=np.float64)
    if vals.size == 0:
        return None
    h = silverman_bandwidth(vals)
    x = np.linspace(0.0, 1.0, DENSITY_POINTS)
    z = (x[:, None] - vals[None, :]) / h
    dens = np.exp(-0.5 * z**2).sum(axis=1) / (vals.size * h * math.sqrt(2 * math.pi))
    return {"x": x.tolist(), "density": dens.tolist(), "bandwidth": h}
