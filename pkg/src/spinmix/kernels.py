"""Hot sampling loops, compiled with numba when available.

The chain kernel is written once as a plain-Python/numpy function and wrapped
with @njit when numba is importable; setting SPINMIX_NO_NUMBA=1 forces the
interpreted path.  Both paths consume pregenerated vertex choices and uniform
draws, so their outputs are bit-identical — the flag trades speed only.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    njit = None
    HAS_NUMBA = False

__all__ = ["HAS_NUMBA", "glauber_chain", "numba_disabled"]


def numba_disabled() -> bool:
    """True when the environment pins the interpreted kernel."""
    return bool(os.environ.get("SPINMIX_NO_NUMBA"))


def _glauber_chain_impl(indptr, indices, beta, gamma, lams, spins, choices,
                        draws, burn_in, plus_steps, last_touch):
    """Run heat-bath single-site updates in place.

    spins is int8 (+1/-1) and is overwritten; plus_steps accumulates, for each
    vertex, the number of post-burn-in steps it spent at +1 (settled lazily:
    a vertex's clock only advances when it is touched, plus a final sweep).
    Returns the number of counted steps.
    """
    steps = choices.shape[0]
    n = spins.shape[0]
    for t in range(steps):
        v = choices[t]
        if t >= burn_in:
            since = t - max(last_touch[v], burn_in)
            if spins[v] > 0 and since > 0:
                plus_steps[v] += since
            last_touch[v] = t
        s = 0
        deg = indptr[v + 1] - indptr[v]
        for k in range(indptr[v], indptr[v + 1]):
            if spins[indices[k]] > 0:
                s += 1
        if beta == 0.0:
            odds = 0.0 if s > 0 else lams[v] * gamma ** (-deg)
        else:
            odds = lams[v] * beta ** s * gamma ** (s - deg)
        p_plus = odds / (1.0 + odds)
        if draws[t] < p_plus:
            spins[v] = 1
        else:
            spins[v] = -1
    for w in range(n):
        since = steps - max(last_touch[w], burn_in)
        if spins[w] > 0 and since > 0:
            plus_steps[w] += since
    return steps - burn_in


_glauber_chain_py = _glauber_chain_impl
_glauber_chain_jit = njit(cache=True)(_glauber_chain_impl) if HAS_NUMBA else None


def glauber_chain(indptr, indices, beta, gamma, lams, spins, choices, draws,
                  burn_in, plus_steps, last_touch):
    """Dispatch to the compiled kernel unless disabled or unavailable."""
    if _glauber_chain_jit is not None and not numba_disabled():
        impl = _glauber_chain_jit
    else:
        impl = _glauber_chain_py
    return impl(indptr, indices, beta, gamma, lams, spins, choices, draws,
                burn_in, plus_steps, last_touch)
