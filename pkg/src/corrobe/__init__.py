"""corrobe: a corruption-robustness workbench for image captioning models.

Pipeline stages: corrupt images -> evaluate captions -> analyze task behavior
-> discover error patterns -> export augmentation subsets; served to the
dashboard through an HTTP API.
"""

__version__ = "0.1.0"
