"""Principal typings of capacitated flow networks, computed compositionally."""

from .netmodel import (Arc, FlowNetwork, Interval, LayeredEmbedding, parse_network,
                       serialize_network, validate_network)
from .typings import Feasible, Infeasible, Typing, make_typing, parse_typing, serialize_typing
from .typings import flow_bounds, is_subtyping, meet
from .compose import BindingSchedule, comp_pt, one_pt
from .planar import bind_schedule, greedy_schedule, to_3_regular
from .polyoracle import oracle_pt

__version__ = "0.1.0"
