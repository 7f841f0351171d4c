"""Structure-constant algebra and the bundled registry of four-dimensional algebras."""

from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .registry import *  # noqa: F401,F403
from .registry import __all__ as _registry_all

__all__ = list(_core_all) + list(_registry_all)
