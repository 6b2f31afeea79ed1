"""newsrec: a learner-oriented neural news recommendation toolkit.

The package is organized around the stages of a recommendation experiment:

- ``newsrec.corpus``: dataset download, parsing, and the unified corpus format
- ``newsrec.config``: per-model YAML configuration with override layers
- ``newsrec.models``: news/user encoders and three reference model families
- ``newsrec.metrics``: per-impression ranking metrics (AUC, MRR, nDCG)
- ``newsrec.runner``: training, validation, testing, checkpoints, tracking
- ``newsrec.cli`` / ``newsrec.server``: command line and HTTP control surfaces
"""

__version__ = "0.1.0"
