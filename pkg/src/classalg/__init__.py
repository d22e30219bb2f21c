"""Class algebra: four-valued class expressions, relation algebra, ontologies
and conditional attribute implications."""

from .expr import parse, to_text
from .logic4 import decide_relation, normal_form
from .ontology import Ontology, load_world
from .caisl import CaislStatement, CaislSystem, parse_statement

__version__ = "0.1.0"

__all__ = ["parse", "to_text", "decide_relation", "normal_form", "Ontology",
           "load_world", "CaislStatement", "CaislSystem", "parse_statement"]
