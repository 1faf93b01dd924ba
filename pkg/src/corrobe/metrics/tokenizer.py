"""Frozen tokenization rule shared by all text metrics.

Changing this rule changes every metric value, so it is versioned and the
version participates in the pipeline config hash.
"""

import re

TOKENIZER_VERSION = "lower-alnum-v1"

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric run."""
    return _TOKEN_RE.findall(text.lower())
