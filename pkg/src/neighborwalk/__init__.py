"""Random-walk feature estimation under a neighbor-query budget."""

from .access import ApiSession, BudgetExhausted, NeighborInfo
from .estimators import (
    Estimate,
    FeatureFn,
    builtin_features,
    exact_expectation,
    mean_estimate,
    reweighted_estimate,
)
from .graph import DirectedGraph, generate_dba, largest_weakly_connected_component, load_edge_list
from .labeling import LabelMode, PropertyMap, assign_labels
from .samplers import SampleRecord, SampleSequence, mhrw_walk, nbrw_walk, proposed_walk, srw_walk

__version__ = "0.1.0"
