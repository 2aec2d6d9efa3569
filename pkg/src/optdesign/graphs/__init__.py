from .canon import canonical_form, canonical_graph, certificate
from .enumerate import connected_cubic_count, enumerate_connected
from .graph import Graph, decode_graph6, encode_graph6, petersen, read_graph6
from .proposition import PropTeReport, verify_prop_te

__all__ = [
    "Graph", "PropTeReport", "canonical_form", "canonical_graph", "certificate",
    "connected_cubic_count", "decode_graph6", "encode_graph6", "enumerate_connected",
    "petersen", "read_graph6", "verify_prop_te",
]
