"""Violet: reason about the performance impact of configuration settings.

The pipeline: parse a ConfScript program, statically compute which
parameters are related, symbolically explore every config/input-dependent
path, profile per-path costs, build a performance impact model, and check
concrete configuration files against it for specious (valid-but-slow)
settings.
"""

__version__ = "0.1.0"
