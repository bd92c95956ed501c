"""Truncated power-series arithmetic and the two local expansions built on it:
the asymptotic Fatou coordinate at a parabolic point and the Koenigs
linearizer at a non-indifferent fixed point."""

from __future__ import annotations

import cmath

import numpy as np

from .errors import IndifferentMultiplier, NotNormalized


def mul(a, b, n):
    return np.convolve(a, b)[:n]


def inv(a, n):
    """Reciprocal of a series with nonzero constant term."""
    a = np.asarray(a, dtype=np.complex128)
    out = np.zeros(n, dtype=np.complex128)
    out[0] = 1 / a[0]
    for k in range(1, n):
        m = min(k, len(a) - 1)
        out[k] = -np.dot(a[1 : m + 1], out[k - 1 :: -1][:m]) / a[0]
    return out


def log1p(x, n):
    """``log(1 + x)`` for a series with zero constant term."""
    out = np.zeros(n, dtype=np.complex128)
    p = np.zeros(n, dtype=np.complex128)
    p[0] = 1
    for j in range(1, n):
        p = mul(p, x, n)
        out += (-1) ** (j + 1) * p / j
    return out


def a_star_coefficient(coeffs) -> complex:
    """``1 - a3`` for ``w + w**2 + a3 w**3 + ...`` given ``(1, 1, a3)``."""
    c = [complex(x) for x in coeffs]
    if len(c) < 3 or abs(c[0] - 1) > 1e-12 or abs(c[1] - 1) > 1e-12:
        raise NotNormalized(f"expected leading coefficients (1, 1), got {c[:2]}")
    return 1 - c[2]


def fatou_series(coeffs, terms: int = 12):
    """Asymptotic expansion of the Fatou coordinate.

    ``coeffs`` are ``[1, 1, a3, a4, ...]`` of ``f(w) = w + w**2 + ...``.  In the
    coordinate ``Z = -1/w`` the map is ``g(Z) = Z + 1 + a*/Z + O(Z**-2)``, and

        Phi(Z) = Z - a* Log Z + sum_k b_k Z**-k

    solves ``Phi(g(Z)) = Phi(Z) + 1`` to order ``Z**-(terms+1)``.  Returns
    ``(a_star, b)`` with ``b[k-1] = b_k``.
    """
    a_star = a_star_coefficient(coeffs)
    n = terms + 3
    c = np.zeros(n, dtype=np.complex128)
    for k, a in enumerate(coeffs[:n]):
        c[k] = complex(a) * (-1) ** k
    # g(Z) = Z / P(u) with u = 1/Z and P(u) = sum a_{k+1} (-u)^k
    p = c
    one_plus_delta = inv(p, n)
    delta = one_plus_delta.copy()
    delta[0] = 0
    dv = np.zeros(n, dtype=np.complex128)
    dv[: n - 1] = delta[1:]
    base = dv.copy()
    base[0] -= 1
    base -= a_star * log1p(delta, n)
    # (1 + delta)^-k == P^k
    pk = np.zeros(n, dtype=np.complex128)
    pk[0] = 1
    shifted = []
    for k in range(1, terms + 1):
        pk = mul(pk, p, n)
        t = pk.copy()
        t[0] -= 1
        s = np.zeros(n, dtype=np.complex128)
        s[k:] = t[: n - k]
        shifted.append(s)
    b = np.zeros(terms, dtype=np.complex128)
    resid = base.copy()
    for m in range(1, terms + 1):
        b[m - 1] = resid[m + 1] / m
        resid = resid + b[m - 1] * shifted[m - 1]
    return a_star, b


def fatou_phi(Z, a_star, b, outgoing=False):
    """Evaluate the truncated expansion; the outgoing side uses ``Log(-Z)``."""
    Z = complex(Z)
    lg = cmath.log(-Z) if outgoing else cmath.log(Z)
    acc = 0j
    for bk in reversed(b):
        acc = (acc + bk) / Z
    return Z - a_star * lg + acc


def fatou_phi_prime(Z, a_star, b):
    Z = complex(Z)
    acc = 0j
    for k, bk in enumerate(b, start=1):
        acc -= k * bk / Z ** (k + 1)
    return 1 - a_star / Z + acc


def koenigs_coefficients(c, order):
    """Schroeder series ``kappa(q) = q + k2 q**2 + ...`` with ``kappa(F(q)) = mu kappa(q)``.

    ``c`` holds ``[c1, c2, ...]`` with ``F(q) = c1 q + c2 q**2 + ...`` and
    ``mu = c1``.  Returns coefficients indexed by power (index 0 is zero).
    """
    mu = complex(c[0])
    if abs(abs(mu) - 1) <= 1e-10:
        raise IndifferentMultiplier(f"|mu| = {abs(mu)} is too close to 1")
    n = order + 1
    f = np.zeros(n, dtype=np.complex128)
    for j, cj in enumerate(c[: order], start=1):
        f[j] = cj
    powers = [None, f]
    for j in range(2, n):
        powers.append(mul(powers[-1], f, n))
    k = np.zeros(n, dtype=np.complex128)
    k[1] = 1
    for m in range(2, n):
        acc = sum(k[j] * powers[j][m] for j in range(1, m))
        k[m] = acc / (mu - mu**m)
    return k


def poly_eval(coef, q):
    acc = 0j
    for ck in reversed(coef):
        acc = acc * q + ck
    return acc


def poly_deriv(coef, q):
    acc = 0j
    for k in range(len(coef) - 1, 0, -1):
        acc = acc * q + k * coef[k]
    return acc
