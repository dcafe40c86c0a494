"""Working precision and a small forward-mode jet for kernel derivatives."""

from __future__ import annotations

import os

import numpy as np

PRECISION_ENV = "POLYOSTAT_PRECISION"


class PolyostatError(RuntimeError):
    """Base class for computational failures (CLI exit code 1)."""


class SeriesConvergenceError(PolyostatError):
    pass


class RootNotFoundError(PolyostatError):
    pass


class ChainStructureError(PolyostatError):
    pass


class ResourceLimitError(PolyostatError):
    """A requested size exceeds a documented computational cap."""


def working_dtype():
    """dtype selected by POLYOSTAT_PRECISION ("extended" or "double")."""
    mode = os.environ.get(PRECISION_ENV, "extended").strip().lower()
    if mode == "extended":
        return np.longdouble
    if mode == "double":
        return np.float64
    raise ValueError(f"{PRECISION_ENV} must be 'extended' or 'double', got {mode!r}")


def real(x):
    return working_dtype()(x)


class Jet:
    """Second order Taylor jet in the two kernel variables (w, z).

    Stores f, f_w, f_z, f_ww, f_wz, f_zz. Arithmetic propagates the
    derivatives exactly, so q-series written with plain operators get
    term-wise differentiated for free.
    """

    __slots__ = ("f", "w", "z", "ww", "wz", "zz")
    __array_ufunc__ = None  # make numpy scalars defer to the reflected ops

    def __init__(self, f, w=0, z=0, ww=0, wz=0, zz=0):
        self.f, self.w, self.z = f, w, z
        self.ww, self.wz, self.zz = ww, wz, zz

    @classmethod
    def seed(cls, w, z):
        """Independent variables w and z at the given point."""
        one, zero = type(w)(1), type(w)(0)
        return cls(w, one, zero, zero, zero, zero), cls(z, zero, one, zero, zero, zero)

    def _coerce(self, other):
        return other if isinstance(other, Jet) else Jet(other)

    def __add__(self, other):
        o = self._coerce(other)
        return Jet(self.f + o.f, self.w + o.w, self.z + o.z,
                   self.ww + o.ww, self.wz + o.wz, self.zz + o.zz)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.f, -self.w, -self.z, -self.ww, -self.wz, -self.zz)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.f * other, self.w * other, self.z * other,
                       self.ww * other, self.wz * other, self.zz * other)
        a, b = self, other
        return Jet(a.f * b.f,
                   a.w * b.f + a.f * b.w,
                   a.z * b.f + a.f * b.z,
                   a.ww * b.f + 2 * a.w * b.w + a.f * b.ww,
                   a.wz * b.f + a.w * b.z + a.z * b.w + a.f * b.wz,
                   a.zz * b.f + 2 * a.z * b.z + a.f * b.zz)

    __rmul__ = __mul__

    def reciprocal(self):
        g = self.f
        g2 = g * g
        g3 = g2 * g
        return Jet(1 / g, -self.w / g2, -self.z / g2,
                   2 * self.w * self.w / g3 - self.ww / g2,
                   2 * self.w * self.z / g3 - self.wz / g2,
                   2 * self.z * self.z / g3 - self.zz / g2)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise TypeError("Jet powers must be non-negative integers")
        out, base = Jet(type(self.f)(1)), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self):
        return abs(self.f)

    def __repr__(self):
        return (f"Jet(f={self.f!r}, w={self.w!r}, z={self.z!r}, "
                f"ww={self.ww!r}, wz={self.wz!r}, zz={self.zz!r})")


def value(x):
    return x.f if isinstance(x, Jet) else x


def ipow(x, n):
    """x**n for integer n >= 0 that works for scalars and jets alike."""
    if isinstance(x, Jet):
        return x ** int(n)
    return x ** int(n)
