"""Road-layout modeling toolkit: spatial graphs, a sequence model over them,
queue-based synthesis, likelihood-guided parsing, and evaluation metrics."""

__version__ = "0.1.0"
