"""Control sets, chain control sets, and Poincare-sphere projections for
linear control systems  xdot = A x + B u  with compact convex control range."""

try:
    from chainset._chainset import *  # noqa: F401,F403
    from chainset._chainset import __version__  # noqa: F401
except ImportError:  # in-tree build: extension sits on sys.path directly
    from _chainset import *  # noqa: F401,F403
    from _chainset import __version__  # noqa: F401
