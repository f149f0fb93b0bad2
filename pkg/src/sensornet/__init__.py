"""Portable sensor-network algorithms on a deterministic simulator."""
from .kernel import BROADCAST, MTU, CallbackRegistry, ErrorCode, NetError

__version__ = "0.1.0"

__all__ = ["BROADCAST", "MTU", "CallbackRegistry", "ErrorCode", "NetError"]
