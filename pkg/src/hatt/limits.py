"""Resource guards for dense oracles and TT-core materialization.

Two independent caps:

* the *dense cap* bounds the element count of any explicit d-way array
  (dense oracles are desk-scale by design; default 10**6, overridable via
  the ``HATT_DENSE_CAP`` environment variable);
* the *core cap* bounds the element count of any single TT core.  It is
  disabled by default and exists to demonstrate, and test, that the
  Hadamard-avoiding sweep never materializes a product core.
"""

import os
from contextlib import contextmanager


class ResourceLimitError(RuntimeError):
    """An operation would allocate more elements than the configured cap."""


DEFAULT_DENSE_CAP = int(os.environ.get("HATT_DENSE_CAP", 1_000_000))

_dense_cap = DEFAULT_DENSE_CAP
_core_cap = None


def dense_cap():
    return _dense_cap


def set_dense_cap(n):
    """Set the dense element-count cap (None disables it). Returns the old value."""
    global _dense_cap
    old, _dense_cap = _dense_cap, None if n is None else int(n)
    return old


def core_cap():
    return _core_cap


def set_core_cap(n):
    """Set the per-core element-count cap (None disables it). Returns the old value."""
    global _core_cap
    old, _core_cap = _core_cap, None if n is None else int(n)
    return old


def check_dense(n_elements, what="dense tensor"):
    if _dense_cap is not None and n_elements > _dense_cap:
        raise ResourceLimitError(
            f"{what} with {n_elements} elements exceeds the dense cap {_dense_cap}"
        )


def check_core(n_elements):
    if _core_cap is not None and n_elements > _core_cap:
        raise ResourceLimitError(
            f"TT core with {n_elements} elements exceeds the core cap {_core_cap}"
        )


@contextmanager
def dense_limit(n):
    old = set_dense_cap(n)
    try:
        yield
    finally:
        set_dense_cap(old)


@contextmanager
def core_limit(n):
    old = set_core_cap(n)
    try:
        yield
    finally:
        set_core_cap(old)
