"""Approximate Bayesian computation with transport distances.

Thin wrapper over the compiled extension module.  When installed as a wheel
the extension lives inside this package; in a plain CMake build it sits on
sys.path by itself.
"""

try:
    from wabc._wabc import *  # noqa: F401,F403
except ImportError:  # pragma: no cover - in-tree builds
    from _wabc import *  # noqa: F401,F403
