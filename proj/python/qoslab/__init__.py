"""Python bindings for the qoslab simulation core."""

try:
    from qoslab._qoslab import *  # noqa: F401,F403
    from qoslab._qoslab import __doc__  # noqa: F401
except ImportError:  # in-tree CMake build: extension lives on sys.path directly
    from _qoslab import *  # noqa: F401,F403
    from _qoslab import __doc__  # noqa: F401
