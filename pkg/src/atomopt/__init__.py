"""Steady-state Gaussian correlations of a three-mode atom-optomechanical system."""

from . import errors, linalg, measures, model, sweep
from ._backend import active as active_backend, use as use_backend
from .errors import *  # noqa: F401,F403
from .measures import MeasureReport, ModeId, measure_report
from .model import CovarianceMatrix, PhysicalParams, SteadyMeans, SystemParams, steady_covariance
from .sweep import SweepConfig, SweepRecord, run_sweep, summarize

__version__ = "0.1.0"
