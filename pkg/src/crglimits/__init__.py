"""Scaling limits of critical random graph components.

Samplers for the limit objects (stick-broken trees, glued metric
spaces, 3-regular kernels, core length laws, length/count urns), a
finite G(n, p) reference pipeline, and a seeded verification suite
checking every closed-form law the samplers are supposed to realize.

Everything stochastic draws from an explicit RngStream; the same seed
gives the same bytes on every platform and backend.
"""

from .backend import active_name as backend_name
from .dist import ParameterError
from .finite_graph import (Component, ComponentSummary, HarvestShortfall,
                           SparseGraph, components_of, critical_p, decompose,
                           harvest_batches, harvest_conditioned, sample_gnp,
                           sample_gnp_components)
from .kernel import (KernelClass, Multigraph, enumerate_kernels,
                     kernel_class_index, sample_kernel)
from .limit_sampler import (CoreLengths, LimitComponent, sample_component_p1,
                            sample_component_p2, sample_core_lengths)
from .metric_tree import (GluedSpace, LocationError, MetricTree,
                          PointLocation, glue, glued_distance, graft,
                          parse_text, rescale, split_at, tree_distance)
from .process import stick_break
from .rng import RngStream
from .stats import TestReport, ks_one_sample, ks_two_sample, chi_square
from .urn import (PolyaTrajectory, UrnState, UrnTrajectory, polya_run,
                  urn_init, urn_run)
from .verify import GATES, SUITES, run_gates

__version__ = "0.1.0"

__all__ = [
    "Component",
    "ComponentSummary",
    "CoreLengths",
    "GATES",
    "GluedSpace",
    "HarvestShortfall",
    "KernelClass",
    "LimitComponent",
    "LocationError",
    "MetricTree",
    "Multigraph",
    "ParameterError",
    "PointLocation",
    "PolyaTrajectory",
    "RngStream",
    "SparseGraph",
    "SUITES",
    "TestReport",
    "UrnState",
    "UrnTrajectory",
    "backend_name",
    "chi_square",
    "components_of",
    "critical_p",
    "decompose",
    "enumerate_kernels",
    "glue",
    "glued_distance",
    "graft",
    "harvest_batches",
    "harvest_conditioned",
    "kernel_class_index",
    "ks_one_sample",
    "ks_two_sample",
    "parse_text",
    "polya_run",
    "rescale",
    "run_gates",
    "sample_component_p1",
    "sample_component_p2",
    "sample_core_lengths",
    "sample_gnp",
    "sample_gnp_components",
    "sample_kernel",
    "split_at",
    "stick_break",
    "tree_distance",
    "urn_init",
    "urn_run",
    "__version__",
]
