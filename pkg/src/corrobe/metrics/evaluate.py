"""Corpus and per-instance metric reports, and severity performance curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import InputError
from ..sg import SceneGraph, SynonymLexicon, TaskVocab
from .bleu import corpus_bleu, sentence_bleu
from .cider import cider
from .meteor import METEOR_VARIANT, meteor_lite
from .rouge import rouge_l
from .spice import spice

METRIC_NAMES = ("bleu1", "bleu4", "meteor", "rouge_l", "cider", "spice")
SEVERITIES = (0, 1, 2, 3, 4, 5)


@dataclass(frozen=True)
class MetricReport:
    """Six metric values for one scope (whole corpus or one instance)."""

    bleu1: float
    bleu4: float
    meteor: float
    rouge_l: float
    cider: float
    spice: float
    scope: str  # "corpus" | "instance"
    corruption_key: str
    instance_id: str | None = None
    meteor_variant: str = METEOR_VARIANT

    def values(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}

    def __post_init__(self):
        for name, v in self.values().items():
            if not (v >= 0.0 and v == v and v != float("inf")):
                raise InputError(f"metric {name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class PerformanceCurve:
    """Per-metric arrays over severities 0..5; index 0 is the clean value."""

    kind: str
    metrics: dict[str, list[float]] = field(default_factory=dict)

    def __post_init__(self):
        for name, arr in self.metrics.items():
            if len(arr) != len(SEVERITIES):
                raise InputError(f"curve for {name} must have 6 points, got {len(arr)}")


def evaluate_corpus(
    candidates: Sequence[str],
    reference_sets: Sequence[Sequence[str]],
    candidate_sgs: Sequence[SceneGraph],
    reference_sg_sets: Sequence[Sequence[SceneGraph]],
    lex: SynonymLexicon,
    vocab: TaskVocab,
    corruption_key: str,
    instance_ids: Sequence[str] | None = None,
) -> tuple[MetricReport, list[MetricReport]]:
    """Evaluate one corruption key: corpus report plus per-instance reports.

    Corpus BLEU is the pooled corpus statistic; the other corpus values are
    means of the per-instance scores (CIDEr's idf always comes from the whole
    corpus). Instance reports feed the radar chart in the instance view.
    """
    n = len(candidates)
    if n == 0:
        raise InputError(f"no captions available for corruption key {corruption_key!r}")
    if not (len(reference_sets) == len(candidate_sgs) == len(reference_sg_sets) == n):
        raise InputError("evaluate_corpus inputs must align")
    if instance_ids is None:
        instance_ids = [str(i) for i in range(n)]

    cider_corpus, cider_each = cider(candidates, reference_sets)
    instance_reports = []
    sums = {name: 0.0 for name in METRIC_NAMES}
    for i in range(n):
        values = {
            "bleu1": sentence_bleu(candidates[i], reference_sets[i], n=1),
            "bleu4": sentence_bleu(candidates[i], reference_sets[i], n=4),
            "meteor": meteor_lite(candidates[i], reference_sets[i]),
            "rouge_l": rouge_l(candidates[i], reference_sets[i]),
            "cider": cider_each[i],
            "spice": spice(candidate_sgs[i], reference_sg_sets[i], lex, vocab),
        }
        for name, v in values.items():
            sums[name] += v
        instance_reports.append(
            MetricReport(scope="instance", corruption_key=corruption_key,
                         instance_id=instance_ids[i], **values)
        )

    corpus = MetricReport(
        bleu1=corpus_bleu(candidates, reference_sets, n=1),
        bleu4=corpus_bleu(candidates, reference_sets, n=4),
        meteor=sums["meteor"] / n,
        rouge_l=sums["rouge_l"] / n,
        cider=cider_corpus,
        spice=sums["spice"] / n,
        scope="corpus",
        corruption_key=corruption_key,
    )
    return corpus, instance_reports


def assemble_curve(kind: str, reports_by_severity: Mapping[int, MetricReport]) -> PerformanceCurve:
    """Build the 6-metric x 6-severity curve for one corruption kind.

    reports_by_severity maps severity (0..5) to the corpus report for that
    severity's corruption key (0 = clean).
    """
    missing = [s for s in SEVERITIES if s not in reports_by_severity]
    if missing:
        raise InputError(f"missing corpus reports for severities {missing} of kind {kind!r}")
    metrics = {
        name: [getattr(reports_by_severity[s], name) for s in SEVERITIES]
        for name in METRIC_NAMES
    }
    return PerformanceCurve(kind=kind, metrics=metrics)
