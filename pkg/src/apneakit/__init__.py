"""PPG sleep-apnea sensing toolkit.

Pipeline: signal_io -> preprocess -> windowing -> pulse_features ->
balancing -> knn -> evaluation, with a deterministic synthetic generator
(synth) and a CLI orchestrator (cli).
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    balancing,
    evaluation,
    knn,
    pipeline,
    preprocess,
    pulse_features,
    signal_io,
    synth,
    windowing,
)
