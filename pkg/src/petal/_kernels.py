"""Hot loops: orbit iteration, escape potential, ray pull-back.

With numba available (and ``PETAL_NO_NUMBA`` unset) these are compiled with
``@njit``; otherwise the same source runs as plain Python, and the batch
kernels switch to vectorised numpy.  Both paths give identical results up to
floating-point evaluation order.

Map kinds: 0 is ``z**2 + p0*z + p1``, 1 is ``p0*exp(z)``, 2 is ``z/(1-z)``,
3 is ``p0*z``.
"""

import cmath
import math
import os

import numpy as np

from .config import threads, use_numba

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA = numba is not None and use_numba()


def _jit(fn):
    if NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


QUADRATIC, EXPONENTIAL, MOBIUS, LINEAR = 0, 1, 2, 3

# orbit status codes
OK, MAX_ITER, NONFINITE, LEFT_PETAL = 0, 1, 2, 3

# stop predicates
STOP_NEAR, STOP_ATTRACTING, STOP_REPELLING = 0, 1, 2


@_jit
def fmap(kind, p0, p1, z):
    if kind == 0:
        return z * z + p0 * z + p1
    if kind == 1:
        if z.real > 700.0:
            return complex(math.nan, math.nan)
        return p0 * cmath.exp(z)
    if kind == 2:
        return z / (1.0 - z)
    return p0 * z


@_jit
def finv(kind, p0, p1, branch, z):
    """Inverse branch.  ``branch`` is the sqrt sign (kind 0) or log sheet (kind 1)."""
    if kind == 0:
        return 0.5 * (-p0 + branch * cmath.sqrt(p0 * p0 - 4.0 * p1 + 4.0 * z))
    if kind == 1:
        return cmath.log(z / p0) + 2j * math.pi * branch
    if kind == 2:
        return z / (1.0 + z)
    return z / p0


@_jit
def _stopped(stop, z, c0, c1, c2):
    if stop == 0:
        return abs(z - c0) < c1.real
    w = c0 * z + c1
    if w == 0:
        return False
    big = -1.0 / w
    if abs(big) < c2.imag:
        return False
    if stop == 1:
        return big.real > c2.real - abs(big.imag)
    return -big.real > c2.real - abs(big.imag)


@_jit
def run_orbit(kind, p0, p1, branch, forward, z, stop, c0, c1, c2, max_iter):
    """Iterate until the stop predicate holds.

    Returns ``(z_n, n, status)``.  For the petal predicates ``c0, c1`` is the
    affine chart ``w = c0*z + c1`` and ``c2 = L + 1j*R`` packs the petal scale
    and minimum radius.  A backward orbit whose chart value exceeds ``|w| > 2``
    is reported as ``LEFT_PETAL``.
    """
    n = 0
    while n < max_iter:
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return z, n, 2
        if _stopped(stop, z, c0, c1, c2):
            return z, n, 0
        if stop != 0 and abs(c0 * z + c1) > 1e6:
            return z, n, 2
        if not forward and stop == 2 and abs(c0 * z + c1) > 2.0:
            return z, n, 3
        if forward:
            z = fmap(kind, p0, p1, z)
        else:
            z = finv(kind, p0, p1, branch, z)
        n += 1
    return z, n, 1


@_jit
def continue_chain(kind, p0, p1, chain, y, slack):
    """Move a backward orbit ``y -> chain[0] -> chain[1] -> ...`` to a new start.

    Each preimage is the candidate nearest the old chain entry; the move is
    rejected (returns ``False``) if any entry travels more than ``slack``
    times the distance between competing preimages.
    """
    out = np.empty_like(chain)
    for j in range(chain.shape[0]):
        ref = chain[j]
        if kind == 0:
            r = cmath.sqrt(p0 * p0 - 4.0 * p1 + 4.0 * y)
            a = 0.5 * (-p0 + r)
            b = 0.5 * (-p0 - r)
            pick = a if abs(a - ref) <= abs(b - ref) else b
            sep = abs(r)
        elif kind == 1:
            base = cmath.log(y / p0)
            k = round((ref - base).imag / (2.0 * math.pi))
            pick = base + 2j * math.pi * k
            sep = 2.0 * math.pi
        else:
            pick = finv(kind, p0, p1, 1.0 + 0j, y)
            sep = math.inf
        if abs(pick - ref) > slack * sep:
            return out, False
        out[j] = pick
        y = pick
    return out, True


@_jit
def inverse_orbit(kind, p0, p1, branch, z, n):
    out = np.empty(n, dtype=np.complex128)
    for j in range(n):
        z = finv(kind, p0, p1, branch, z)
        out[j] = z
    return out


@_jit
def iterate_n(kind, p0, p1, z, n):
    for _ in range(n):
        z = fmap(kind, p0, p1, z)
    return z


@_jit
def green_escape(z, c, radius, max_iter):
    """``log|z_n| / 2**n`` at the first ``|z_n| > radius`` under ``z**2 + c``.

    Returns ``(value, n, escaped)``.
    """
    scale = 1.0
    for n in range(max_iter):
        a = abs(z)
        if a > radius:
            return math.log(a) * scale, n, True
        z = z * z + c
        scale *= 0.5
        if scale == 0.0:
            break
    return 0.0, max_iter, False


@_jit
def quadratic_pullback(top, c, total, gap):
    """Extend a ray from its highest unit interval of samples downward.

    ``top`` holds ``m`` samples at potentials ``t0, t0 - 1/m, ...``.  Sample
    ``j`` is the square-root preimage of sample ``j - m`` that lies nearest to
    sample ``j - 1``.  Returns ``(samples, k)`` where ``k`` is the first index
    at which both preimages were within ``gap`` of each other (the ray hit
    the critical point), or -1.
    """
    m = top.shape[0]
    out = np.empty(total, dtype=np.complex128)
    for j in range(min(m, total)):
        out[j] = top[j]
    for j in range(m, total):
        r = cmath.sqrt(out[j - m] - c)
        if 2.0 * abs(r) < gap:
            return out[:j], j
        # the image chord sweeping across c means the ray runs through 0
        a = out[j - m - 1] - c
        d = out[j - m] - c - a
        dd = d.real * d.real + d.imag * d.imag
        if j > m and dd > 0.0:
            s = -(a.real * d.real + a.imag * d.imag) / dd
            if s > 0.0 and s < 1.0 and abs(a + s * d) < gap * gap:
                return out[:j], j
        prev = out[j - 1]
        if abs(r - prev) <= abs(-r - prev):
            out[j] = r
        else:
            out[j] = -r
    return out, -1


if NUMBA:

    # the only parallel kernel; PETAL_THREADS caps the pool.  One command runs
    # per process, so the portable workqueue layer suffices (and skips the TBB probe).
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER = "workqueue"
    numba.set_num_threads(min(threads(), numba.config.NUMBA_NUM_THREADS))

    @numba.njit(cache=True, parallel=True)
    def green_escape_many(zs, c, radius, max_iter):
        out = np.empty(zs.shape[0], dtype=np.float64)
        for i in numba.prange(zs.shape[0]):
            out[i] = green_escape(zs[i], c, radius, max_iter)[0]
        return out

else:

    def green_escape_many(zs, c, radius, max_iter):
        zs = np.array(zs, dtype=np.complex128)
        out = np.zeros(zs.shape[0])
        live = np.arange(zs.shape[0])
        z = zs.copy()
        scale = 1.0
        for _ in range(max_iter):
            if live.size == 0:
                break
            a = np.abs(z)
            done = a > radius
            if done.any():
                out[live[done]] = np.log(a[done]) * scale
                live, z = live[~done], z[~done]
            z = z * z + c
            scale *= 0.5
        return out
