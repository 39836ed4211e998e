"""Pause the cyclic garbage collector around allocation-heavy work.

Evaluation allocates hundreds of thousands of short-lived tuples that form
no reference cycles; letting the collector rescan them dominates run time
on large documents.
"""

from __future__ import annotations

import gc
from contextlib import contextmanager
from functools import wraps


@contextmanager
def gc_paused():
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def without_gc(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        with gc_paused():
            return func(*args, **kwargs)
    return wrapper
