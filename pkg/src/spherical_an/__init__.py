"""Symbolic calculator for D_Z(X), X the minimal resolution of an A_n surface singularity."""

from .chain_core import ChainConfig, KClass, PicElement, SubchainLineBundle
from .derived_objects import DerivedObject
from .words import TwistWord, parse_word

__version__ = "0.1.0"

__all__ = ["ChainConfig", "DerivedObject", "KClass", "PicElement", "SubchainLineBundle", "TwistWord", "parse_word"]
