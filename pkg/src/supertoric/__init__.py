"""Exact combinatorics of decorated fans for toric supervarieties."""

from .decofan import DecoratedFan, SqrtDecoratedFan, validate
from .lattice import Cone, Fan
from .superlie import DecorationChain, Subspace, SupertorusData

__all__ = ["Cone", "DecoratedFan", "DecorationChain", "Fan", "SqrtDecoratedFan", "Subspace", "SupertorusData", "validate"]
