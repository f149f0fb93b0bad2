from .base import Layer, RoutingBase
from .dsdv import Dsdv, DsdvEntry
from .dsr import Dsr, DsrRouteRecord
from .flooding import Flooding
from .tree import TreeRouting

MODELS = {"flood": Flooding, "tree": TreeRouting, "dsdv": Dsdv, "dsr": Dsr}

__all__ = [
    "MODELS", "Dsdv", "DsdvEntry", "Dsr", "DsrRouteRecord", "Flooding", "Layer",
    "RoutingBase", "TreeRouting",
]
