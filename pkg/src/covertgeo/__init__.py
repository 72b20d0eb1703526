"""Covert communication with multiple antennas in random wireless networks.

Analytic detection, covertness, connectivity and throughput models for
co-located (CAS) and distributed (DAS) antenna systems, with a Monte-Carlo
oracle and a command-line front end.
"""

from .errors import (
    CovertGeoError,
    CovertnessInfeasibleError,
    DomainError,
    NoRootError,
    UnattainableThresholdError,
)
from .model import AntennaLayout, NetworkConfig, PolarPoint, System, make_layout, uniform_circle_layout
from .interference import InterferenceField
from .detection import DetectionContext, avg_detection_exact4, avg_detection_general, optimal_threshold4
from .covertness import WORST_CASE, Fixed, OutageQuery, WorstCase, covert_outage, max_power
from .connectivity import CasLink, DasLink, conn_prob_cas, conn_prob_das
from .throughput import Method, ThroughputSolution, solve_throughput
from .montecarlo import MonteCarloEstimate, TrialConfig

__version__ = "0.1.0"
