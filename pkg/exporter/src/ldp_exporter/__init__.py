"""Offline exporter: LDP strings to sentence-encoder vectors on disk."""

from .export import ExportJob, encode_ldps, export, read_ldp_list, render_ldp, write_vectors

__version__ = "0.1.0"
