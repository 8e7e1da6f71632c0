"""Hong-Ou-Mandel interference of photons from two dissimilar pulsed two-level emitters."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .tls import EmitterSpec, PulseSpec, propagate, t1t2_to_rates  # noqa: E402
from .grid import TimeGrid, make_grid  # noqa: E402
from .correlators import CorrelatorSet, compute_correlators  # noqa: E402
from .hom import HomConfig, HomResult, assemble, bin_histogram, normalization_terms  # noqa: E402
from .wandering import WanderingModel, averaged_g2, beat_washing_curve  # noqa: E402
from .oracle import IdealParams, ideal_g2hom, ideal_threshold  # noqa: E402
from .sweep import Axis, RunRecord, Scenario, SweepSpec, evaluate, find_threshold, run_sweep  # noqa: E402
