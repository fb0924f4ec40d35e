"""Day-ahead microgrid scheduling, battery plant emulation and plan/realization comparison."""

try:
    # In-tree build: the CMake build directory is on PYTHONPATH and takes precedence
    # over any installed copy of the extension.
    from _mgems import *  # noqa: F403
    from _mgems import __version__
except ImportError:
    from ._mgems import *  # noqa: F403
    from ._mgems import __version__
