"""Numerical kernels for the three-node plant.

Two interchangeable backends implement the same integration API:

* ``crawlsim.kernels._core`` -- Cython extension, used when the compiled
  module is importable (built via ``python setup.py build_ext --inplace``
  or a regular pip install).
* ``crawlsim.kernels._pure`` -- pure-Python reference implementation,
  always available.

Set ``CRAWLSIM_PURE=1`` in the environment to force the pure backend,
e.g. for benchmarking one against the other.
"""

import os

from . import _pure

if os.environ.get("CRAWLSIM_PURE", "") not in ("", "0"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

DRIVE_ANALYTIC = _pure.DRIVE_ANALYTIC
DRIVE_PNEUMATIC = _pure.DRIVE_PNEUMATIC

STATUS_OK = _pure.STATUS_OK
STATUS_STIFF = _pure.STATUS_STIFF
STATUS_RUNAWAY = _pure.STATUS_RUNAWAY

integrate_adaptive = _impl.integrate_adaptive
integrate_rk4 = _impl.integrate_rk4
eval_rhs = _impl.eval_rhs
eval_drive = _impl.eval_drive


def get_backend(name: str):
    """Return a backend module by name ('pure' or 'compiled')."""
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _core

        return _core
    raise ValueError(f"unknown kernel backend: {name!r}")
