"""Stampacchia truncation calculus and the scalar inequalities built on it.

For an exponent p > 1 the truncation pair is

    g(s) = s**p                for s >= 0,      g(s) = 0 for s < 0,
    G(s) = s**(p+1) / (p+1)    for s >= 0,      G(s) = 0 for s < 0,

so G is the antiderivative of g, convex, C^1, and identically zero on the
nonpositive axis.  Energies of the form ``integral of G(state - level)``
switch off wherever the state sits below the truncation level, which is
what makes them useful for certifying input-to-state decay: disturbances
move the level, not the energy.

G obeys a small algebra of pointwise inequalities, numbered G1 through G8
(see :func:`property_sides` for the exact statements).  The certification
suite checks them numerically; everything downstream leans on them.

The module also carries the two workhorse scalar facts used by every decay
argument in this package: Young's product inequality with a free splitting
parameter, and the Gronwall upper envelope for linear differential
inequalities, evaluated with composite-trapezoid quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TruncationPair",
    "GAP_PROPERTY_IDS",
    "property_sides",
    "property_gap",
    "young_epsilon_gap",
    "gronwall_envelope",
    "gronwall_envelope_at",
]


def _as_finite(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _scalar_or_array(out):
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class TruncationPair:
    """Truncation pair (g, G) with exponent ``p`` in (1, inf)."""

    p: float

    def __post_init__(self):
        p = self.p
        if not (np.isfinite(p) and p > 1.0):
            raise ValueError(f"exponent p must lie in (1, inf), got {p!r}")

    def g(self, s):
        """Truncated power ``s**p`` for s >= 0, zero below. Vectorized."""
        s = _as_finite(s, "s")
        return _scalar_or_array(np.maximum(s, 0.0) ** self.p)

    def G(self, s):
        """Antiderivative of :meth:`g`: ``s**(p+1)/(p+1)`` for s >= 0, zero below."""
        s = _as_finite(s, "s")
        return _scalar_or_array(np.maximum(s, 0.0) ** (self.p + 1.0) / (self.p + 1.0))


# Inequalities exposed through property_gap and their argument counts.
GAP_PROPERTY_IDS = {"G4": 2, "G5": 2, "G6": 2, "G7": 3, "G8": 3}


def property_sides(pair, prop_id, args):
    """Both sides (lhs, rhs) of the inequality ``lhs <= rhs`` named by ``prop_id``.

    The supported inequalities, for all real s and tau >= 0 unless noted:

        G4: G(s)       <= G(s + tau) + G(s - tau)
        G5: G(|s| + tau) <= G(s + tau) + G(-s + tau)
        G6: G(s + tau) <= 2**p * (G(s) + G(tau))
        G7: G(|s|)     <= 2**p * (G(s + tau - m) + G(s - tau - m)
                                  + G(-s + tau - m) + G(-s - tau - m))
                          + 2**p * G(m)                  with m >= 0
        G8: g(s) * tau <= eps * G(s) + (p / eps)**p * G(tau)   with eps > 0

    Arguments are scalars or broadcastable arrays; the gap rhs - lhs is
    the certificate of interest, so callers usually want
    :func:`property_gap` instead.
    """
    if prop_id not in GAP_PROPERTY_IDS:
        raise ValueError(f"unknown property id {prop_id!r}")
    if len(args) != GAP_PROPERTY_IDS[prop_id]:
        raise ValueError(
            f"{prop_id} takes {GAP_PROPERTY_IDS[prop_id]} arguments, got {len(args)}"
        )
    G, g, p = pair.G, pair.g, pair.p
    if prop_id == "G4":
        s, tau = (_as_finite(a, n) for a, n in zip(args, ("s", "tau")))
        return G(s), G(s + tau) + G(s - tau)
    if prop_id == "G5":
        s, tau = (_as_finite(a, n) for a, n in zip(args, ("s", "tau")))
        return G(np.abs(s) + tau), G(s + tau) + G(-s + tau)
    if prop_id == "G6":
        s, tau = (_as_finite(a, n) for a, n in zip(args, ("s", "tau")))
        return G(s + tau), 2.0**p * (G(s) + G(tau))
    if prop_id == "G7":
        s, tau, m = (_as_finite(a, n) for a, n in zip(args, ("s", "tau", "m")))
        if np.any(m < 0):
            raise ValueError("G7 requires m >= 0")
        rhs = 2.0**p * (
            G(s + tau - m) + G(s - tau - m) + G(-s + tau - m) + G(-s - tau - m)
        ) + 2.0**p * G(m)
        return G(np.abs(s)), rhs
    # G8
    s, tau, eps = (_as_finite(a, n) for a, n in zip(args, ("s", "tau", "eps")))
    if np.any(eps <= 0):
        raise ValueError("G8 requires eps > 0")
    return g(s) * tau, eps * G(s) + (p / eps) ** p * G(tau)


def property_gap(pair, prop_id, args):
    """Gap rhs - lhs of the named inequality; nonnegative certifies it."""
    lhs, rhs = property_sides(pair, prop_id, args)
    return _scalar_or_array(rhs - lhs)


def young_epsilon_gap(r_exp, q_exp, a, b, eps):
    """Slack of ``a*b <= eps*a**r + C(eps)*b**q`` for conjugate exponents.

    Here ``C(eps) = (eps*r)**(-q/r) / q`` and (r, q) must satisfy
    1/r + 1/q = 1 up to 1e-12.  Inputs ``a`` and ``b`` must be
    nonnegative and ``eps`` positive; all three broadcast.
    """
    r = float(r_exp)
    q = float(q_exp)
    if not (r > 1.0 and q > 1.0):
        raise ValueError("exponents must exceed 1")
    if abs(1.0 / r + 1.0 / q - 1.0) > 1e-12:
        raise ValueError(f"exponents are not conjugate: 1/{r} + 1/{q} != 1")
    a = _as_finite(a, "a")
    b = _as_finite(b, "b")
    eps = _as_finite(eps, "eps")
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("a and b must be nonnegative")
    if np.any(eps <= 0):
        raise ValueError("eps must be positive")
    c_eps = (eps * r) ** (-q / r) / q
    return _scalar_or_array(eps * a**r + c_eps * b**q - a * b)


def _cumtrapz(y, x):
    # cumulative composite trapezoid with a leading zero
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x), out=out[1:])
    return out


def gronwall_envelope_at(times, phi, psi, eta0):
    """Gronwall envelope on an arbitrary increasing time lattice.

    Returns the array

        env(t_i) = exp(I(0, t_i)) * eta0
                   + integral over (0, t_i) of exp(I(s, t_i)) * psi(s) ds,

    where I(s, t) is the integral of phi over (s, t), every integral taken
    by composite trapezoid on the given lattice.  Any eta with
    eta' <= phi*eta + psi and eta(0) <= eta0 stays below env up to
    quadrature error.
    """
    t = _as_finite(times, "times")
    phi = _as_finite(phi, "phi")
    psi = _as_finite(psi, "psi")
    if t.ndim != 1 or t.shape != phi.shape or t.shape != psi.shape:
        raise ValueError("times, phi, psi must be 1-d arrays of equal length")
    if t.size < 1:
        raise ValueError("need at least one time stamp")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    big_phi = _cumtrapz(phi, t)
    inner = _cumtrapz(np.exp(-big_phi) * psi, t)
    return np.exp(big_phi) * (float(eta0) + inner)


def gronwall_envelope(phi, psi, eta0, dt):
    """Gronwall envelope on the uniform lattice t_i = i*dt carrying phi, psi."""
    phi = _as_finite(phi, "phi")
    if phi.ndim != 1:
        raise ValueError("phi must be a 1-d array")
    dt = float(dt)
    if dt <= 0:
        raise ValueError("dt must be positive")
    times = dt * np.arange(phi.size)
    return gronwall_envelope_at(times, phi, psi, eta0)
