"""Tractability caps for dense tree enumeration.

Tables and dynamic programs in this package are dense: a game of horizon N
over K outcomes touches K**N nodes.  Operations that sweep whole levels
refuse to run past the caps below.  Path-local operations (capital traces,
conditional values along a single path) are not capped.

The depth cap can be raised through the ``GTP_MAX_DEPTH`` environment
variable or per call where a ``depth_cap`` argument is accepted.
"""

from __future__ import annotations

import os

DEFAULT_DEPTH_CAP = 14
OUTCOME_CAP = 4

ENV_DEPTH_VAR = "GTP_MAX_DEPTH"


class DepthCapError(ValueError):
    """A dense enumeration would exceed the configured depth cap."""


def depth_cap(explicit: int | None = None) -> int:
    """Effective dense-depth cap: explicit override, else env, else default."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(ENV_DEPTH_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"{ENV_DEPTH_VAR} must be an integer, got {env!r}") from exc
    return DEFAULT_DEPTH_CAP


def require_dense(depth: int, explicit_cap: int | None = None, what: str = "enumeration") -> None:
    cap = depth_cap(explicit_cap)
    if depth > cap:
        raise DepthCapError(
            f"dense {what} to depth {depth} exceeds the cap {cap}; "
            f"raise {ENV_DEPTH_VAR} or pass an explicit depth_cap to allow it"
        )
