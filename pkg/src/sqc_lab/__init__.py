"""sqc-lab - numerical certification of strong quasiconvexity for norms and distance functions."""

__version__ = "0.1.0"

ARTIFACT_VERSION = "sqclab-report/1"
