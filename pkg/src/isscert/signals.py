"""Disturbance signals and space-time forcing fields.

Time signals are piecewise analytic, right-continuous, made of four piece
kinds (constant, sinusoid, exp_decay, polynomial).  Their windowed sup is
computed exactly per piece where closed forms exist and by dense sampling
for polynomials; windows are treated as closed intervals, so the sup is
conservative and monotone in the window.

Space-time fields wrap a callable f(y, t); spatially uniform fields built
from a time signal keep a handle on it so windowed sups stay exact.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "PIECE_KINDS",
    "Piece",
    "TimeSignal",
    "sup_window",
    "SpaceTimeField",
    "sup_field",
    "profile_constant",
    "profile_affine",
    "profile_sin",
    "profile_bump",
    "profile_poly",
    "profile_sum",
    "profile2d_constant",
    "profile2d_sinprod",
]

PIECE_KINDS = ("constant", "sinusoid", "exp_decay", "polynomial")

# parameter counts; polynomial takes any positive number of coefficients
_ARITY = {"constant": 1, "sinusoid": 4, "exp_decay": 3}


@dataclass(frozen=True)
class Piece:
    """One analytic piece, active from ``start`` until the next piece.

    Parameter conventions:
      constant:    (value,)
      sinusoid:    (amplitude, frequency, phase, offset), evaluated in
                   absolute time as offset + amplitude*sin(2*pi*frequency*t + phase)
      exp_decay:   (amplitude, rate, offset), evaluated in piece-local time
                   as offset + amplitude*exp(-rate*(t - start))
      polynomial:  (c0, c1, ...), sum of ck*(t - start)**k
    """

    start: float
    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in PIECE_KINDS:
            raise ValueError(f"unknown piece kind {self.kind!r}")
        want = _ARITY.get(self.kind)
        if want is not None and len(self.params) != want:
            raise ValueError(f"{self.kind} takes {want} parameters, got {len(self.params)}")
        if self.kind == "polynomial" and len(self.params) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        if not all(math.isfinite(float(v)) for v in self.params):
            raise ValueError("piece parameters must be finite")
        if not (math.isfinite(self.start) and self.start >= 0):
            raise ValueError("piece start must be finite and nonnegative")

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            out = np.full_like(t, float(self.params[0]))
        elif self.kind == "sinusoid":
            amp, freq, phase, off = (float(v) for v in self.params)
            out = off + amp * np.sin(2.0 * np.pi * freq * t + phase)
        elif self.kind == "exp_decay":
            amp, rate, off = (float(v) for v in self.params)
            out = off + amp * np.exp(-rate * (t - self.start))
        else:
            tau = t - self.start
            out = np.zeros_like(t)
            for k, ck in enumerate(self.params):
                out = out + float(ck) * tau**k
        return out


class TimeSignal:
    """Piecewise analytic signal on t >= 0, right-continuous at breakpoints."""

    def __init__(self, pieces: Sequence[Piece]):
        pieces = tuple(pieces)
        if not pieces:
            raise ValueError("signal needs at least one piece")
        if pieces[0].start != 0.0:
            raise ValueError("first piece must start at t = 0")
        starts = [p.start for p in pieces]
        if any(b - a <= 0 for a, b in zip(starts, starts[1:])):
            raise ValueError("piece starts must be strictly increasing")
        self.pieces = pieces
        self._starts = starts

    @classmethod
    def constant(cls, value):
        return cls([Piece(0.0, "constant", (float(value),))])

    @classmethod
    def sinusoid(cls, amplitude, frequency, phase=0.0, offset=0.0):
        return cls([Piece(0.0, "sinusoid",
                          (float(amplitude), float(frequency), float(phase), float(offset)))])

    @classmethod
    def exp_decay(cls, amplitude, rate, offset=0.0):
        return cls([Piece(0.0, "exp_decay", (float(amplitude), float(rate), float(offset)))])

    @classmethod
    def polynomial(cls, *coeffs):
        return cls([Piece(0.0, "polynomial", tuple(float(c) for c in coeffs))])

    def piece_index(self, t):
        # last piece whose start is <= t
        return max(bisect.bisect_right(self._starts, float(t)) - 1, 0)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise ValueError("signals are defined for t >= 0")
        if t_arr.ndim == 0:
            return float(self.pieces[self.piece_index(float(t_arr))].eval(t_arr))
        out = np.empty_like(t_arr)
        edges = self._starts[1:] + [np.inf]
        lo = 0.0
        for piece, hi in zip(self.pieces, edges):
            mask = (t_arr >= piece.start) & (t_arr < hi)
            if mask.any():
                out[mask] = piece.eval(t_arr[mask])
            lo = hi
        return out


def _piece_abs_sup(piece: Piece, a: float, b: float, resolution: int) -> float:
    """Sup of |piece| over the closed interval [a, b]."""
    if piece.kind == "constant":
        return abs(float(piece.params[0]))
    if piece.kind == "exp_decay":
        # monotone inside, so |.| peaks at an endpoint
        return float(max(abs(piece.eval(a)), abs(piece.eval(b))))
    if piece.kind == "sinusoid":
        amp, freq, phase, off = (float(v) for v in piece.params)
        if freq == 0.0 or amp == 0.0:
            return abs(off + amp * math.sin(phase))
        cand = [a, b]
        # interior critical times: 2*pi*freq*t + phase = pi/2 + k*pi
        w = 2.0 * math.pi * freq
        k_lo = math.ceil((w * a + phase - math.pi / 2.0) / math.pi)
        k_hi = math.floor((w * b + phase - math.pi / 2.0) / math.pi)
        for k in range(k_lo, k_hi + 1):
            cand.append((math.pi / 2.0 + k * math.pi - phase) / w)
        vals = piece.eval(np.asarray(cand))
        return float(np.max(np.abs(vals)))
    # polynomial: dense lattice, endpoints included
    lattice = np.linspace(a, b, max(int(resolution), 2))
    return float(np.max(np.abs(piece.eval(lattice))))


def sup_window(sig: TimeSignal, t0: float, t1: float, resolution: int = 4096) -> float:
    """Sup of |sig| over the closed window [t0, t1].

    Exact for constant, sinusoid, and exp_decay pieces; dense sampling at
    the given resolution for polynomial pieces (the result then dominates
    every sampled value).  Monotone in the window by construction.
    """
    t0, t1 = float(t0), float(t1)
    if not (0.0 <= t0 < t1):
        raise ValueError(f"need 0 <= t0 < t1, got ({t0}, {t1})")
    edges = list(sig._starts[1:]) + [math.inf]
    best = 0.0
    for piece, nxt in zip(sig.pieces, edges):
        a = max(t0, piece.start)
        b = min(t1, nxt)
        if a > b:
            continue
        if a == b and piece.start != a:
            continue
        best = max(best, _piece_abs_sup(piece, a, max(b, a), resolution))
    return best


class SpaceTimeField:
    """Scalar field on the spatial domain crossed with the time axis.

    ``fn(y, t)`` must broadcast: in one dimension ``y`` is an array of
    points, in two dimensions a tuple of coordinate meshes.  ``sup_hint``
    optionally declares an analytic bound on |f|; sampled sups never
    exceed it when it is honest, and :func:`sup_field` returns the hint
    whenever it dominates the sampled value.
    """

    def __init__(self, fn: Callable, sup_hint=None, label: str = "", signal=None,
                 parts=None):
        self.fn = fn
        self.sup_hint = None if sup_hint is None else float(sup_hint)
        self.label = label
        self.signal = signal  # set when the field is spatially uniform
        self.parts = parts  # (profile, signal) when the field is separable

    @classmethod
    def constant(cls, value):
        value = float(value)
        sig = TimeSignal.constant(value)
        return cls(lambda y, t: _uniform(y, value), sup_hint=abs(value),
                   label=f"const {value}", signal=sig)

    @classmethod
    def from_signal(cls, sig: TimeSignal, label: str = ""):
        return cls(lambda y, t: _uniform(y, float(sig(t))), label=label or "uniform",
                   signal=sig)

    @classmethod
    def separable(cls, profile: Callable, sig: TimeSignal, label: str = "",
                  sup_hint=None):
        return cls(lambda y, t: profile(y) * float(sig(t)), label=label or "separable",
                   sup_hint=sup_hint, parts=(profile, sig))

    def __call__(self, y, t):
        out = self.fn(y, float(t))
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)


def _uniform(y, value):
    if isinstance(y, tuple):
        shape = np.broadcast(*[np.asarray(c, dtype=float) for c in y]).shape
        return np.full(shape, value)
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 0:
        return value
    return np.full(arr.shape, value)


def sup_field(fld: SpaceTimeField, space, t0: float, t1: float,
              time_resolution: int = 512) -> float:
    """Sup of |fld| over space x [t0, t1].

    Spatially uniform fields defer to the exact signal sup.  Otherwise a
    lattice sample over the supplied space points and a uniform time
    lattice is taken, and the declared ``sup_hint`` is returned when it
    dominates the sample.  A degenerate window t0 == t1 samples the single
    time slice.
    """
    t0, t1 = float(t0), float(t1)
    if not (0.0 <= t0 <= t1):
        raise ValueError(f"need 0 <= t0 <= t1, got ({t0}, {t1})")
    if fld.signal is not None:
        if t1 > t0:
            return sup_window(fld.signal, t0, t1)
        return abs(float(fld.signal(t0)))
    if fld.parts is not None:
        profile, sig = fld.parts
        prof_sup = float(np.max(np.abs(np.asarray(profile(space), dtype=float))))
        sig_sup = sup_window(sig, t0, t1) if t1 > t0 else abs(float(sig(t0)))
        best = prof_sup * sig_sup
        if fld.sup_hint is not None and fld.sup_hint >= best:
            return fld.sup_hint
        return best
    if t1 > t0:
        times = np.linspace(t0, t1, max(int(time_resolution), 2))
    else:
        times = np.asarray([t0])
    best = 0.0
    for t in times:
        vals = fld(space, float(t))
        best = max(best, float(np.max(np.abs(vals))))
    if fld.sup_hint is not None and fld.sup_hint >= best:
        return fld.sup_hint
    return best


# ---------------------------------------------------------------------------
# spatial profiles (initial data and separable forcing shapes)

def profile_constant(value):
    value = float(value)
    return lambda y: _uniform(y, value)


def profile_affine(intercept, slope):
    intercept, slope = float(intercept), float(slope)
    return lambda y: intercept + slope * np.asarray(y, dtype=float)


def profile_sin(amplitude, mode=1):
    """amplitude * sin(mode * pi * y) on the unit interval."""
    amplitude = float(amplitude)
    mode = int(mode)
    return lambda y: amplitude * np.sin(mode * np.pi * np.asarray(y, dtype=float))


def profile_bump(amplitude, center, halfwidth):
    """Raised-cosine bump, compactly supported on |y - center| <= halfwidth."""
    amplitude, center, halfwidth = float(amplitude), float(center), float(halfwidth)
    if halfwidth <= 0:
        raise ValueError("halfwidth must be positive")

    def bump(y):
        y = np.asarray(y, dtype=float)
        z = (y - center) / halfwidth
        return amplitude * 0.5 * (1.0 + np.cos(np.pi * np.clip(z, -1.0, 1.0))) * (np.abs(z) <= 1.0)

    return bump


def profile_poly(*coeffs):
    coeffs = tuple(float(c) for c in coeffs)

    def poly(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        for k, ck in enumerate(coeffs):
            out = out + ck * y**k
        return out

    return poly


def profile_sum(*profiles):
    def total(y):
        vals = [np.asarray(p(y), dtype=float) for p in profiles]
        out = vals[0]
        for v in vals[1:]:
            out = out + v
        return out

    return total


def profile2d_constant(value):
    value = float(value)
    return lambda xy: _uniform(xy, value)


def profile2d_sinprod(amplitude, mode_x=1, mode_y=1):
    amplitude = float(amplitude)
    mx, my = int(mode_x), int(mode_y)

    def prof(xy):
        x, y = xy
        return amplitude * np.sin(mx * np.pi * np.asarray(x, dtype=float)) * \
            np.sin(my * np.pi * np.asarray(y, dtype=float))

    return prof
