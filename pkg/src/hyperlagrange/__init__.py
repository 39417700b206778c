from .hypergraph import Hypergraph, HypergraphError, ParseError, make_hypergraph
from .families import FamilySpec, family

__version__ = "0.1.0"
