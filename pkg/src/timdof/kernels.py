"""Backend selection for the numeric kernels.

The compiled extension is used when it has been built; otherwise the numpy
reference implementation is loaded. Both produce identical results.
"""

from types import ModuleType

from . import _kernels_py

try:
    from . import _kernels_c as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = ("cython", "python")


def available_backends() -> list[str]:
    return [name for name in BACKENDS if name == "python" or _compiled is not None]


def get_backend(name: str | None = None) -> ModuleType:
    if name is None:
        return _compiled if _compiled is not None else _kernels_py
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `python setup.py build_ext --inplace`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


_active = get_backend()
BACKEND = "cython" if _active is _compiled and _compiled is not None else "python"


def use_backend(name: str) -> None:
    """Switch the module-level kernel functions to another backend."""
    global _active, BACKEND
    _active = get_backend(name)
    BACKEND = name
    _rebind()


def _rebind() -> None:
    g = globals()
    for fn in ("floor_sum", "mac_search", "invert_floor", "alignment_extents", "image_set_size"):
        g[fn] = getattr(_active, fn)


floor_sum = mac_search = invert_floor = alignment_extents = image_set_size = None
_rebind()

__all__ = ["BACKEND", "available_backends", "get_backend", "use_backend", "floor_sum", "mac_search",
           "invert_floor", "alignment_extents", "image_set_size"]
