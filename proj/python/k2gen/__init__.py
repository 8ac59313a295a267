"""K2-tree graph codec, sequence sampler and graph-set metrics."""

from ._k2gen import *  # noqa: F401,F403
from ._k2gen import Error, Graph, TokenSequence, __version__  # noqa: F401
