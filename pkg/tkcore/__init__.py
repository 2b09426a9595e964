"""
tkcore
======

Historical temporal k-core component search.

Given a temporal graph, an integer ``k``, a vertex and a time window, find
the connected component of the window's k-core that contains the vertex.
The `~tkcore.pecb.PECBIndex` answers such queries in time proportional to the
answer; `~tkcore.ctmsf.CTMSFIndex` is the simpler baseline.
"""
import sys

from .logger import _init_log
from .version import version as __version__

# Enforce Python version check during package import.
__minimum_python_version__ = "3.8"


class UnsupportedPythonError(Exception):
    pass


if sys.version_info < tuple(int(val) for val in __minimum_python_version__.split('.')):
    raise UnsupportedPythonError(
        f"tkcore does not support Python < {__minimum_python_version__}")

log = _init_log()

from .ctmsf import CTMSFIndex  # NOQA
from .graph import TemporalGraph, load_edge_list  # NOQA
from .pecb import PECBIndex  # NOQA
from .query import Query, batch_query, query  # NOQA

__all__ = ['log', 'TemporalGraph', 'load_edge_list', 'PECBIndex', 'CTMSFIndex', 'Query',
           'query', 'batch_query']
