"""Switched diffusion on weighted and metric graphs."""

try:
    from ._switchdiff import *  # noqa: F401,F403
    from ._switchdiff import __doc__  # noqa: F401
except ImportError:  # dev builds put the module next to this package
    from _switchdiff import *  # noqa: F401,F403
