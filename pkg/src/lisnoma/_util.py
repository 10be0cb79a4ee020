"""Shared helpers: deterministic substreams and composite quadrature."""

from __future__ import annotations

import numpy as np

# Fixed chunk size keeps streams bit-identical regardless of how callers
# batch their draws.
CHUNK = 1 << 20


def chunk_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one chunk of a logical stream.

    The substream is keyed on (seed, *key) so results do not depend on how
    many chunks run, or in which order. Callers with several stream axes
    (grid point, user, chunk) pass them all as key components.
    """
    ss = np.random.SeedSequence(entropy=(int(seed),) + tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def chunk_counts(total: int, chunk: int = CHUNK):
    """Yield (chunk_index, count) pairs covering `total` draws."""
    i = 0
    done = 0
    while done < total:
        n = min(chunk, total - done)
        yield i, n
        done += n
        i += 1


def gauss_legendre_panels(f, lo: float, hi: float, *, abs_tol: float = 1e-10,
                          order: int = 48, max_panels: int = 4096) -> float:
    """Integrate a vectorized callable with panel doubling.

    Composite Gauss-Legendre; the panel count doubles until two successive
    refinements differ by less than abs_tol. Deterministic by construction.
    """
    if hi <= lo:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(order)
    panels = 8
    prev = None
    while panels <= max_panels:
        edges = np.linspace(lo, hi, panels + 1)
        a = edges[:-1, None]
        b = edges[1:, None]
        x = (a + b) / 2 + (b - a) / 2 * nodes[None, :]
        w = (b - a) / 2 * weights[None, :]
        val = float(np.sum(w * f(x.ravel()).reshape(x.shape)))
        if prev is not None and abs(val - prev) < abs_tol:
            return val
        prev = val
        panels *= 2
    return prev


def wilson_interval(k: int, n: int, z: float = 1.959963984540054):
    """Wilson score interval for a binomial proportion. Safe at k=0 and k=n."""
    if n <= 0:
        return 0.0, 1.0
    p = k / n
    z2 = z * z
    denom = 1 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)
