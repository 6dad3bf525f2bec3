"""Process-wide switches.

Debug mode turns on range assertions in the modular arithmetic wrappers and
inside every NTT butterfly. It is off by default and enabled with
``HEKL_DEBUG=1`` or :func:`set_debug`.
"""

import os

_debug = os.environ.get("HEKL_DEBUG", "0") not in ("", "0", "false", "False")


def debug() -> bool:
    return _debug


def set_debug(flag: bool) -> None:
    global _debug
    _debug = bool(flag)


def default_threads() -> int:
    env = os.environ.get("HEKL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
