"""Fatou coordinates: parabolic charts at the base parameter and
Douady-Fatou charts (built from Koenigs linearizers) for perturbed members."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .config import DEFAULT, Tolerances
from .errors import (
    BranchLoss,
    DomainError,
    HornDomainMiss,
    IndifferentMultiplier,
    NoConvergence,
    NotInPetal,
    SectorViolation,
)
from .fixed_points import default_disk, find_pair, normalize_to_parabolic_form, parabolic_normal_coefficients
from .series import (
    a_star_coefficient,
    fatou_phi,
    fatou_series,
    koenigs_coefficients,
    poly_deriv,
    poly_eval,
)

__all__ = [
    "a_star_coefficient",
    "FatouChart",
    "parabolic_chart",
    "incoming_fatou",
    "outgoing_fatou",
    "KoenigsChart",
    "koenigs",
    "douady_fatou",
    "DouadyFatou",
    "track",
    "horn_normalize",
    "phase_B",
    "PhaseB",
]


def _nearest(value, ref, tau):
    """Shift ``value`` by a multiple of ``tau`` to land nearest ``ref``."""
    k = round(((ref - value) * tau.conjugate()).real / abs(tau) ** 2)
    return value + k * tau


# ---------------------------------------------------------------------------
# parabolic charts


@dataclass
class FatouChart:
    member: object
    side: str
    a_star: complex
    offset: complex
    residual: float
    petal_scale: float
    alpha: complex = field(repr=False, default=1)
    beta: complex = field(repr=False, default=0)
    b: np.ndarray = field(repr=False, default=None)
    tol: Tolerances = field(repr=False, default=DEFAULT)

    @property
    def outgoing(self):
        return self.side == "outgoing"

    def _phi(self, z):
        return fatou_phi(-1 / (self.alpha * z + self.beta), self.a_star, self.b, self.outgoing)

    def raw(self, z) -> complex:
        tol = self.tol
        kind, p0, p1 = self.member.kernel_spec
        L = self.petal_scale
        z = complex(z)
        if self.outgoing:
            branch = self.member.inverse_branch(self.member.id.z0)
            zn, n, st = K.run_orbit(
                kind, p0, p1, branch, False, z, K.STOP_REPELLING, self.alpha, self.beta, complex(L, L), tol.max_iter
            )
        else:
            branch = 0j
            zn, n, st = K.run_orbit(
                kind, p0, p1, branch, True, z, K.STOP_ATTRACTING, self.alpha, self.beta, complex(L, L), tol.max_iter
            )
        if st == K.MAX_ITER:
            raise NoConvergence(f"orbit of {z} did not reach the petal within {tol.max_iter} steps")
        if st == K.LEFT_PETAL:
            raise BranchLoss(f"backward orbit of {z} left the repelling petal")
        if st != K.OK:
            raise NotInPetal(f"{z} is not in the {'repelling' if self.outgoing else 'attracting'} petal basin")
        sign = 1 if self.outgoing else -1
        prev = self._phi(zn) + sign * n
        for _ in range(10_000):
            zn = K.finv(kind, p0, p1, branch, zn) if self.outgoing else K.fmap(kind, p0, p1, zn)
            n += 1
            cur = self._phi(zn) + sign * n
            if abs(cur - prev) < tol.fatou_tol * max(1.0, abs(cur)):
                return cur
            prev = cur
        raise NoConvergence("Fatou coordinate estimates did not settle")

    def __call__(self, z) -> complex:
        return self.raw(z) + self.offset

    def inverse(self, w) -> complex:
        """``psi`` with ``chart(psi(w)) = w``, by Newton from the leading-order guess."""
        v = complex(w) - self.offset
        if self.outgoing:
            Z = v + self.a_star * cmath.log(-v) if v != 0 else -1j
        else:
            Z = v + self.a_star * cmath.log(v) if v != 0 else 1j
        z = (-1 / Z - self.beta) / self.alpha
        for _ in range(60):
            fz = self(z) - w
            h = 1e-6 * max(abs(z - self.member.id.z0), 1e-8)
            d = (self(z + h) - self(z - h)) / (2 * h)
            step = fz / d
            z -= step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        if abs(self(z) - w) > 1e-9 * max(1.0, abs(w)):
            raise HornDomainMiss(f"could not invert the chart at {w}")
        return z

    def abel_residual(self, points) -> float:
        worst = 0.0
        for z in points:
            fz = complex(self.member.eval(complex(z)))
            worst = max(worst, abs(self(fz) - self(z) - 1))
        return worst

    def to_json(self, samples=()):
        return {
            "side": self.side,
            "a_star": [self.a_star.real, self.a_star.imag],
            "offset": [self.offset.real, self.offset.imag],
            "residual": self.residual,
            "petal_scale": self.petal_scale,
            "samples": [[complex(z).real, complex(z).imag] for z in samples],
        }


def _petal_samples(chart, count=50):
    """Points well inside the petal (in the ``Z = -1/w`` plane) for residual checks."""
    L = chart.petal_scale
    sign = -1 if chart.outgoing else 1
    out = []
    for k in range(count):
        ang = (k / count - 0.5) * 0.8 * math.pi
        Z = sign * (2 * L + 0.3 * L * k / count) * cmath.exp(1j * ang)
        w = -1 / Z
        out.append((w - chart.beta) / chart.alpha)
    return out


def parabolic_chart(m, side: str, tol: Tolerances = DEFAULT, offset: complex = 0j) -> FatouChart:
    """Incoming or outgoing Fatou chart of a member at its parabolic base."""
    if side not in ("incoming", "outgoing"):
        raise ValueError("side must be 'incoming' or 'outgoing'")
    if abs(complex(m.deriv(m.id.z0)) - 1) > 1e-12 or abs(complex(m.eval(m.id.z0)) - m.id.z0) > 1e-12:
        raise DomainError("member is not at its parabolic base")
    coeffs, alpha, beta = parabolic_normal_coefficients(m, tol.series_terms + 3)
    a_star, b = fatou_series(coeffs, tol.series_terms)
    L = tol.petal_scale
    for _ in range(4):
        chart = FatouChart(m, side, a_star, complex(offset), 0.0, L, alpha, beta, b, tol)
        chart.residual = chart.abel_residual(_petal_samples(chart))
        if chart.residual <= tol.abel_tol:
            return chart
        L *= 2
    raise NoConvergence(f"Abel residual {chart.residual:.3g} above tolerance even with L = {L / 2}")


def incoming_fatou(m, z, tol: Tolerances = DEFAULT, offset: complex = 0j) -> complex:
    return parabolic_chart(m, "incoming", tol, offset)(z)


def outgoing_fatou(m, z, tol: Tolerances = DEFAULT, offset: complex = 0j) -> complex:
    return parabolic_chart(m, "outgoing", tol, offset)(z)


# ---------------------------------------------------------------------------
# Koenigs linearizers


class _StepFail(Exception):
    pass


class KoenigsChart:
    """Linearizer at a non-indifferent fixed point and the Abel coordinate
    ``Log(kappa) / Log(mu)`` derived from it.

    Attracting points use forward orbits; repelling points use the inverse
    branch fixing the point.  ``scale`` sets the local disk radius
    ``koenigs_radius * scale`` where the Schroeder series is summed.
    """

    def __init__(self, m, fp, mu=None, scale=1.0, tol: Tolerances = DEFAULT):
        self.member, self.tol = m, tol
        self.fp = complex(fp)
        self.mu = complex(m.deriv(self.fp)) if mu is None else complex(mu)
        if abs(abs(self.mu) - 1) <= 1e-10:
            raise IndifferentMultiplier(f"|mu| = {abs(self.mu):.12g}")
        self.attracting = abs(self.mu) < 1
        taylor = m.taylor(self.fp, tol.koenigs_order)
        taylor[1] = self.mu
        self.coef = koenigs_coefficients(taylor[1:], tol.koenigs_order)
        self.rho = tol.koenigs_radius * scale
        self.kind, self.p0, self.p1 = m.kernel_spec
        self.branch = 0j if self.attracting else complex(m.inverse_branch(self.fp))
        self.L = cmath.log(self.mu)
        self.tau = 2j * math.pi / self.L

    # local series
    def local(self, q):
        return poly_eval(self.coef, q)

    def local_inverse(self, k):
        q = complex(k)
        for _ in range(50):
            step = (self.local(q) - k) / poly_deriv(self.coef, q)
            q -= step
            if abs(step) <= 1e-16 * max(abs(q), 1e-300):
                break
        return q

    def _orbit_end(self, z):
        zn, n, st = K.run_orbit(
            self.kind, self.p0, self.p1, self.branch, self.attracting, complex(z),
            K.STOP_NEAR, self.fp, complex(self.rho), 0j, self.tol.max_iter,
        )
        if st != K.OK:
            raise NoConvergence(f"orbit of {z} never entered the linearization disk")
        return zn - self.fp, n

    def kappa(self, z):
        q, n = self._orbit_end(z)
        return self.local(q) * self.mu ** (-n if self.attracting else n)

    def phi(self, z):
        """Abel coordinate on the principal branches (defined modulo ``tau``)."""
        q, n = self._orbit_end(z)
        return cmath.log(self.local(q)) / self.L + (-n if self.attracting else n)

    def psi(self, w):
        """Inverse of ``phi`` for a repelling point, extended by forward iteration."""
        if self.attracting:
            raise DomainError("psi is only available on the repelling side")
        w = complex(w)
        lr = math.log(self.rho / 4)
        n = max(0, math.ceil(((self.L * w).real - lr) / self.L.real))
        q = self.local_inverse(cmath.exp(self.L * (w - n)))
        return K.iterate_n(self.kind, self.p0, self.p1, self.fp + q, n)

    # continuation along paths -------------------------------------------
    def start(self, z):
        z = complex(z)
        if self.attracting:
            return {"value": self.phi(z), "z": z}
        q, n = self._orbit_end(z)
        chain = K.inverse_orbit(self.kind, self.p0, self.p1, self.branch, z, n)
        if n == 0:
            chain = np.array([z], dtype=np.complex128)[:0]
        value = cmath.log(self.local(q)) / self.L + n
        return {"value": value, "z": z, "chain": chain}

    def _chain_value(self, chain, z):
        last = chain[-1] if len(chain) else z
        return cmath.log(self.local(last - self.fp)) / self.L + len(chain)

    def step(self, state, z, max_dphi):
        z = complex(z)
        if self.attracting:
            raw = self.phi(z)
        else:
            chain = state["chain"]
            if len(chain):
                chain, ok = K.continue_chain(self.kind, self.p0, self.p1, chain, z, 0.25)
                if not ok:
                    raise _StepFail
            last = chain[-1] if len(chain) else z
            if abs(last - self.fp) > self.rho:
                _, extra = self._orbit_end(last)
                more = K.inverse_orbit(self.kind, self.p0, self.p1, self.branch, last, extra)
                chain = np.concatenate([chain, more])
            raw = self._chain_value(chain, z)
        value = _nearest(raw, state["value"], self.tau)
        if abs(value - state["value"]) > max_dphi:
            raise _StepFail
        new = {"value": value, "z": z}
        if not self.attracting:
            new["chain"] = chain
        return new

    def shift_start(self, state):
        """State at the first preimage: ``phi(y1) = phi(z) - 1`` with ``y1 = chain[0]``."""
        chain = state["chain"]
        return {"value": state["value"] - 1, "z": complex(chain[0]), "chain": chain[1:]}


def track(chart, vertices, state=None, max_dphi=0.25, min_len=1e-13):
    """Continue ``chart`` along the polyline ``vertices``.

    Returns ``(points, values, state)`` for the refined path.  Steps are
    bisected until every increment of the chart value is below ``max_dphi``.
    """
    vertices = [complex(v) for v in vertices]
    if state is None:
        state = chart.start(vertices[0])
    pts, vals = [state["z"]], [state["value"]]
    for a, b in zip(vertices[:-1], vertices[1:]):
        pos, h = 0.0, 1.0 / 16
        while pos < 1.0:
            h = min(h, 1.0 - pos)
            z = a + (b - a) * (pos + h)
            try:
                new = chart.step(state, z, max_dphi)
            except _StepFail:
                h /= 2
                if h * abs(b - a) < min_len:
                    raise BranchLoss(f"continuation stalled near {z}") from None
                continue
            state = new
            pos += h
            pts.append(z)
            vals.append(state["value"])
            h *= 1.5
    return np.array(pts), np.array(vals), state


def koenigs(m, fp, mu, z, scale=1.0, tol: Tolerances = DEFAULT) -> complex:
    return KoenigsChart(m, fp, mu, scale, tol).kappa(z)


# ---------------------------------------------------------------------------
# perturbed members


class DouadyFatou:
    """Outgoing and incoming Abel coordinates of a perturbed member.

    The outgoing chart is ``Log(kappa)/Log(mu)`` at the repelling point of the
    pair and the incoming chart the same at the other point.  Values are
    continued along straight paths from a common anchor placed above the
    repelling point, at distance ``horn_anchor * |z2 - z1|``, in the
    orientation of the normalized form.
    """

    def __init__(self, m, tol: Tolerances = DEFAULT, pair=None):
        self.member, self.tol = m, tol
        pair = pair or find_pair(m, default_disk(m, tol), tol, distinct=True)
        self.pair = pair
        if abs(pair.mu1) >= abs(pair.mu2):
            rep, att = (pair.z1, pair.mu1), (pair.z2, pair.mu2)
        else:
            rep, att = (pair.z2, pair.mu2), (pair.z1, pair.mu1)
        self.z_out, self.mu_out = rep
        self.z_in, self.mu_in = att
        self.gap = abs(self.z_in - self.z_out)
        self.outgoing = KoenigsChart(m, self.z_out, self.mu_out, self.gap, tol)
        self.incoming = KoenigsChart(m, self.z_in, self.mu_in, self.gap, tol)
        self.alpha = m.taylor(self.z_out, 2)[2]
        self.offsets = {"outgoing": 0j, "incoming": 0j}
        self.anchor = self.from_normal(1j * tol.horn_anchor * self.gap * abs(self.alpha))

    def from_normal(self, w):
        return self.z_out + complex(w) / self.alpha

    def to_normal(self, z):
        return self.alpha * (complex(z) - self.z_out)

    def chart(self, side):
        return self.outgoing if side == "outgoing" else self.incoming

    def raw(self, side, z, via=()):
        _, vals, _ = track(self.chart(side), [self.anchor, *via, z])
        return vals[-1]

    def __call__(self, side, z, via=()):
        return self.raw(side, z, via) + self.offsets[side]

    def gate_points(self, count=None):
        count = count or self.tol.gate_samples
        mid = (self.z_in + self.z_out) / 2
        perp = 1j * (self.z_in - self.z_out) / self.gap
        return [mid + perp * self.gap * x for x in np.linspace(-0.3, 0.3, count)]

    def abel_residual(self, side, points=None):
        """Max of ``|phi(f(z)) - phi(z) - 1|`` reduced modulo the chart period.

        Each value is continued from the anchor independently, so the two
        terms may sit on sheets one period apart.
        """
        ch = self.chart(side)
        worst = 0.0
        for z in points or self.gate_points():
            d = self.raw(side, complex(self.member.eval(z))) - self.raw(side, z) - 1
            worst = max(worst, abs(_nearest(d, 0j, ch.tau)))
        return worst

    def gate_constancy(self):
        """Spread of ``phi_out - phi_in`` across the gate, both continued along the gate."""
        pts = self.gate_points()
        path = [self.anchor, pts[0]]
        _, _, s_out = track(self.outgoing, path)
        _, _, s_in = track(self.incoming, path)
        diffs = []
        for z in pts:
            _, _, s_out = track(self.outgoing, [s_out["z"], z], s_out)
            _, _, s_in = track(self.incoming, [s_in["z"], z], s_in)
            diffs.append(s_out["value"] - s_in["value"])
        diffs = np.array(diffs)
        return float(np.max(np.abs(diffs - diffs[0]))), diffs


def douady_fatou(m, side, z, tol: Tolerances = DEFAULT) -> complex:
    return DouadyFatou(m, tol)(side, z)


@dataclass
class PhaseB:
    value: complex
    mu_check: complex
    mu_direct: complex
    horn_residual: float
    offset_in: complex = 0j
    offset_out: complex = 0j
    refinement: float = 0.0

    def to_json(self):
        c = lambda v: [v.real, v.imag]
        return {
            "B": c(self.value),
            "mu_check": c(self.mu_check),
            "mu_direct": c(self.mu_direct),
            "mu_error": abs(self.mu_check - self.mu_direct),
            "horn_residual": self.horn_residual,
            "offset_incoming": c(self.offset_in),
            "offset_outgoing": c(self.offset_out),
            "refinement": self.refinement,
        }


def horn_normalize(m, charts=None, tol: Tolerances = DEFAULT):
    """Fix offsets so the upper horn map has zero constant term and the
    incoming chart vanishes at the singular value.

    For a member at its parabolic base ``charts`` is ``(incoming, outgoing)``
    parabolic charts; otherwise a ``DouadyFatou``.  Returns
    ``(offset_in, offset_out, horn_residual)``.
    """
    if isinstance(charts, DouadyFatou) or (charts is None and abs(complex(m.deriv(m.id.z0)) - 1) > 1e-12):
        df = charts if isinstance(charts, DouadyFatou) else DouadyFatou(m, tol)
        return _horn_perturbed(df, tol)[:3]
    inc, out = charts if charts is not None else (
        parabolic_chart(m, "incoming", tol), parabolic_chart(m, "outgoing", tol))
    return _horn_parabolic(m, inc, out, tol)


def _horn_samples(h, k):
    return [complex(x / k, h * (1 + j)) for j in (0, 1) for x in range(k)]


def _horn_parabolic(m, inc, out, tol):
    inc.offset = out.offset = 0j

    def fit(h):
        vals = []
        for w in _horn_samples(h, tol.horn_samples):
            z = out.inverse(w)
            W = inc.alpha * z + inc.beta
            if abs(W) * inc.petal_scale > 1:
                raise HornDomainMiss(f"psi({w}) = {z} is outside the petal")
            vals.append(inc(z) - w)
        vals = np.array(vals)
        c = complex(np.mean(vals))
        return c, float(np.max(np.abs(vals - c)))

    h = tol.horn_height
    c, resid = fit(h)
    c2, _ = fit(2 * h)
    if abs(c - c2) > tol.horn_refine_tol:
        raise HornDomainMiss(f"horn constant moved by {abs(c - c2):.3g} between heights {h} and {2 * h}")
    s = m.singular_value()
    off_in = -inc.raw(s)
    off_out = off_in + c
    inc.offset, out.offset = off_in, off_out
    return off_in, off_out, resid


def _horn_perturbed(df: DouadyFatou, tol):
    cm, cp = df.outgoing, df.incoming
    top = df.anchor
    s_out, s_in = cm.start(top), cp.start(top)
    w_top = s_out["value"]
    c = s_in["value"] - w_top
    # horn map samples along the orbit arc leaving the anchor
    k = tol.horn_samples
    dev = []
    for j in range(k):
        w = w_top + j / k
        z = cm.psi(w)
        _, vin, _ = track(cp, [top, z], dict(s_in))
        _, vout, _ = track(cm, [top, z], dict(s_out))
        dev.append((vin[-1] - vout[-1]) - c)
        if abs(vout[-1] - w) > 1e-8 * max(1, abs(w)):
            raise HornDomainMiss(f"psi sample {z} does not invert the outgoing chart")
    resid = float(max(abs(x) for x in dev))
    # refinement: move the anchor halfway to the repelling point
    inner = df.from_normal(0.5 * df.to_normal(top))
    _, vin, _ = track(cp, [top, inner], dict(s_in))
    _, vout, _ = track(cm, [top, inner], dict(s_out))
    refine = abs((vin[-1] - vout[-1]) - c)
    if refine > tol.horn_refine_tol:
        raise HornDomainMiss(f"horn constant moved by {refine:.3g} under anchor refinement")
    # incoming chart vanishes at the singular value
    s = complex(df.member.singular_value())
    _, vs, _ = track(cp, [top, s], dict(s_in))
    off_in = -vs[-1]
    off_out = off_in + c
    df.offsets = {"incoming": off_in, "outgoing": off_out}
    return off_in, off_out, resid, refine


def phase_B(m, tol: Tolerances = DEFAULT) -> PhaseB:
    """``B = phi_out(s) - phi_in(s)`` under the horn normalization.

    The outgoing chart is carried from the anchor to the gate clockwise around
    the repelling point (right of it, then below), the incoming chart straight
    down to the gate (bent through the attracting side when that segment fails).  Their difference there is the gate constant, which
    extends the outgoing chart to the singular value.
    """
    if abs(complex(m.deriv(m.id.z0)) - 1) < 1e-12 and abs(complex(m.eval(m.id.z0)) - m.id.z0) < 1e-12:
        raise DomainError("phase_B needs a member off the parabolic base")
    df = DouadyFatou(m, tol)
    if abs(df.mu_in) >= 1:
        raise DomainError(
            "phase_B needs one attracting fixed point in the pair; "
            f"|mu| = {abs(df.mu_out):.6g}, {abs(df.mu_in):.6g}"
        )
    off_in, off_out, resid, refine = _horn_perturbed(df, tol)
    r = tol.horn_anchor * df.gap * abs(df.alpha)
    mid = (df.z_in + df.z_out) / 2
    around = [df.anchor, df.from_normal(r), df.from_normal(r - 1j * r), mid]
    _, v_out, _ = track(df.outgoing, around)
    try:
        _, v_in, _ = track(df.incoming, [df.anchor, mid])
    except (BranchLoss, NoConvergence):
        # for steep arg(lambda) the straight segment grazes the Julia set near
        # z_out; bend it through the attracting side instead
        _, v_in, _ = track(df.incoming, [df.anchor, df.from_normal(-r), mid])
    B = (v_out[-1] + off_out) - (v_in[-1] + off_in)
    mu_check = cmath.exp(-2j * math.pi / B)
    if B.real >= 1e-9 * abs(B):
        raise SectorViolation(f"Re B = {B.real:.6g} is not negative")
    return PhaseB(B, mu_check, df.mu_out, resid, off_in, off_out, refine)
