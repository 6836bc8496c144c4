"""Quiver algebras over truncated chain rings and the string-algebra conditions."""

from .axioms import AxiomReport, Verdict, check_string
from .chainring import ChainRing, make_ring
from .freealg import AlgElem, Presentation, load_presentation, parse_element
from .orders import HomAssignment, OrderPattern, verify_order
from .quiver import Path, Quiver
from .quotient import NotFiniteAtPrecision, TruncatedAlgebra, build, normal_form
from .structure import (admissible_paths, cover_kernel, gabriel_quiver, radical_syzygies,
                        uniserial_chain)
from .trunclin import Howell, RowModule

__all__ = [
    "AlgElem", "AxiomReport", "ChainRing", "HomAssignment", "Howell", "NotFiniteAtPrecision",
    "OrderPattern", "Path", "Presentation", "Quiver", "RowModule", "TruncatedAlgebra", "Verdict",
    "admissible_paths", "build", "check_string", "cover_kernel", "gabriel_quiver",
    "load_presentation", "make_ring", "normal_form", "parse_element", "radical_syzygies",
    "uniserial_chain", "verify_order",
]
__version__ = "0.1.0"
