"""
Zak-transform construction and certification of multiple zero-correlation-zone
sequence sets, with an OTFS preamble synchronization simulator.

Modules
-------
zakcore      finite Zak transform, inverse, Zak-domain correlation
florentine   circular Florentine arrays (verify, extend, search)
zczgen       phase/index matrices, sequence families, admissibility checks
seqanalysis  correlations, ZCZ width, bounds, ambiguity functions
otfssim      OTFS modulation, channel, synchronization and BER campaigns
io, cli      file formats and the ``zakzcz`` command
"""

from . import florentine, otfssim, seqanalysis, zakcore, zczgen
from .seqanalysis import ambiguity, certify_family, pccf, zcz_width
from .zakcore import correlation_via_zak, fzt, ifzt, zak_correlate
from .zczgen import SequenceFamily, generate_family

__version__ = "0.1.0"

__all__ = [
    "florentine",
    "otfssim",
    "seqanalysis",
    "zakcore",
    "zczgen",
    "fzt",
    "ifzt",
    "zak_correlate",
    "correlation_via_zak",
    "generate_family",
    "SequenceFamily",
    "pccf",
    "zcz_width",
    "ambiguity",
    "certify_family",
]
