"""
ergopt - ergodic optimization over subshifts of finite type.

Exact (rational) and certified-float computation of maximum and conditional
ergodic averages, ratio optima, irregular-point witnesses and suspension-flow
reductions.
"""

__version__ = "1.0.0"

from ergopt.config import Settings, get_settings, load_config, set_settings
from ergopt.system import SystemSpec, load_system, parse_system

__all__ = [
    "__version__",
    "Settings",
    "get_settings",
    "load_config",
    "set_settings",
    "SystemSpec",
    "load_system",
    "parse_system",
]
