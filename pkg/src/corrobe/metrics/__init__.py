from .bleu import corpus_bleu, sentence_bleu
from .cider import cider
from .evaluate import (
    METRIC_NAMES,
    SEVERITIES,
    MetricReport,
    PerformanceCurve,
    assemble_curve,
    evaluate_corpus,
)
from .meteor import meteor_lite, stem
from .rouge import lcs_length, rouge_l
from .spice import spice
from .tokenizer import TOKENIZER_VERSION, tokenize

__all__ = [
    "METRIC_NAMES",
    "SEVERITIES",
    "MetricReport",
    "PerformanceCurve",
    "TOKENIZER_VERSION",
    "assemble_curve",
    "cider",
    "corpus_bleu",
    "evaluate_corpus",
    "lcs_length",
    "meteor_lite",
    "rouge_l",
    "sentence_bleu",
    "spice",
    "stem",
    "tokenize",
]
