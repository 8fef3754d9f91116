"""Riccati chains, their linearizations and the Schwarzian derivatives hiding in them."""

__version__ = "0.1.0"

from .canon import normalize, same
from .chain import LinearODE, RiccatiEq, build_chain, cole_hopf_image, linearize
from .evaluate import SymbolTable, equals, evaluate, random_table
from .expr import Expr, differentiate, substitute, to_text
from .grid import GridFn
from .jet import ChainParams, JetPoly, apply_L, cole_hopf_check, total_derivative
from .numverify import IVP, IdentityReport, constrained_identity, integrate, ratio_schwarzian, riccati_residual
from .parser import ParseError, parse
from .reduce import GaugeFactor, ReducedODE, depress
from .schwarz import Mobius, mobius_apply, proportionality, schwarzian_at, sl_schwarzian

__all__ = [
    "ChainParams",
    "Expr",
    "GaugeFactor",
    "GridFn",
    "IVP",
    "IdentityReport",
    "JetPoly",
    "LinearODE",
    "Mobius",
    "ParseError",
    "ReducedODE",
    "RiccatiEq",
    "SymbolTable",
    "apply_L",
    "build_chain",
    "cole_hopf_check",
    "cole_hopf_image",
    "constrained_identity",
    "depress",
    "differentiate",
    "equals",
    "evaluate",
    "integrate",
    "linearize",
    "mobius_apply",
    "normalize",
    "parse",
    "proportionality",
    "random_table",
    "ratio_schwarzian",
    "riccati_residual",
    "same",
    "schwarzian_at",
    "sl_schwarzian",
    "substitute",
    "to_text",
    "total_derivative",
]
