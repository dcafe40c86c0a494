"""Generating-function building blocks for the six families.

All scalar functions here are written with plain arithmetic so they accept
real or complex scalars as well as :class:`~polyostat._numeric.Jet` values;
feeding jets gives exact first and second partial derivatives in (w, z)
by term-wise differentiation of the series.

Conventions. ``w`` marks width (columns), ``z`` marks area, ``theta`` marks
the size of the last column and ``xi = z*w``. For each family the width/area
generating function with first column of size ``i`` is ``N1(w, z, i) / h(w, z)``
where ``h`` is the kernel. The *base* series used for the amplitudes ``C1``,
``C2`` starts from a column of any size for dcc, cc, wa and from a single
cell for dc, st, es.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._numeric import Jet, SeriesConvergenceError, value, working_dtype
from .families import FamilyId, as_family

CONVERGENCE_TOL = 1e-10


def q_pochhammer(a, z, n: int):
    """(a; z)_n = (1 - a)(1 - a z)...(1 - a z^(n-1)); 1 when n = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = 1
    t = a
    for _ in range(n):
        out = out * (1 - t)
        t = t * z
    return out


@dataclass(frozen=True)
class KernelModel:
    family: FamilyId
    J_max: int = 16
    L_max: int = 60

    def __post_init__(self):
        object.__setattr__(self, "family", as_family(self.family))
        if self.J_max < 8:
            raise ValueError("J_max must be at least 8")
        if self.L_max < 40:
            raise ValueError("L_max must be at least 40")

    @property
    def closed_form(self) -> bool:
        return self.family in (FamilyId.DCC, FamilyId.CC, FamilyId.WA)


def default_model(family) -> KernelModel:
    return KernelModel(as_family(family))


@dataclass(frozen=True)
class ThetaSeries:
    """Truncated power series sum_l c[l] theta^l."""

    coefficients: np.ndarray

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, l):
        return self.coefficients[l]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def total(self):
        return self.coefficients.sum()

    def tail_ratio(self):
        c = np.abs(self.coefficients)
        return c[-1] / c.max()


@dataclass(frozen=True)
class ThetaPhi:
    """theta-expansion of phi(w, theta, z, i)/w near w = 1.

    ``phi`` and ``phi_w`` are the coefficients of the pole numerator (the part
    that multiplies 1/h) and of its w-derivative at w = 1; ``regular`` holds
    the part of phi/w without the kernel pole, evaluated at w = 1.
    """

    phi: ThetaSeries
    phi_w: ThetaSeries
    regular: ThetaSeries


class _Converger:
    """Running sum that checks the last retained term is negligible.

    The reference scale is the largest term seen, not the sum: kernels are
    evaluated at their own roots, where the sum itself vanishes.
    """

    def __init__(self, what):
        self.what = what
        self.total = 0
        self.last = 0
        self.scale = 0

    def add(self, term):
        self.total = self.total + term
        self.last = term
        self.scale = max(self.scale, abs(value(term)))
        return self

    def result(self):
        if self.scale != 0 and abs(value(self.last)) > CONVERGENCE_TOL * self.scale:
            raise SeriesConvergenceError(
                f"{self.what}: last retained term {abs(value(self.last)):.3e} "
                f"exceeds {CONVERGENCE_TOL:g} of the largest term; increase J_max")
        return self.total


# polynomial families -------------------------------------------------------

def _dcc_h(w, z):
    return -z * z + 2 * z + z * w - 1


def _dcc_N(w, z, i):
    zi = z ** (i - 1)
    n1 = (-z * z + z * z * w * i + 2 * z - z * w * i - 1 + z * w) * z * w * zi
    n2 = -zi * z * w * (i * z * z - 2 * i * z + 2 * z + i - 1 - z * z
                        + z * z * w * i - z * w * i + z * w)
    return n1, n2


def _cc_h(w, z):
    return (z ** 4 * (w - 1) + z ** 3 * (w * w - w + 4) - z * z * (w + 6)
            + z * (w + 4) - 1)


def _cc_N(w, z, i):
    zi = z ** i
    n1 = w * zi * (z - 1) ** 2 * (z * z * w * i - z * z + z * w - z * w * i + 2 * z - 1)
    n2 = ((z - 1) * (-i * z ** 3 + z ** 3 - 3 * z * z + z * z * w + 3 * i * z * z
                     + z * z * w * i - z * w * i - 3 * i * z + 3 * z + z * w + i - 1)
          * w * zi)
    return n1, n2


def _wa_h(w, z):
    return 1 - z - w * z


def _wa_N(w, z, i):
    return w * z ** i * (1 - z), 0 * w


# dc: q-Bessel type sums -----------------------------------------------------

def _dc_sum(xi, theta, z, J, leg):
    """xi * sum_j xi^j theta^(3j) z^(3j(j+1)/2)/(theta z; z)_j^2 * leg(j, theta z^(j+1))."""
    acc = _Converger("dc series")
    c = 1
    tz = theta * z
    for j in range(J):
        if j:
            c = c * xi * theta ** 3 * z ** (3 * j) / (1 - tz) ** 2
            tz = tz * z
        acc.add(c * leg(j, tz))
    return xi * acc.result()


def _dc_A1(xi, theta, z, i, J):
    t = theta ** (i - 1)
    return _dc_sum(xi, theta, z, J, lambda j, tz: t * z ** ((i - 1) * (j + 1)))


def _dc_B11(xi, theta, z, J):
    return _dc_sum(xi, theta, z, J, lambda j, tz: (2 - 3 * tz) / (1 - tz) ** 2)


def _dc_B12(xi, theta, z, J):
    return _dc_sum(xi, theta, z, J, lambda j, tz: 1 / (1 - tz))


def _dc_f1p(t, z):
    return (z - 3 * t * z * z) / (1 - t * z) ** 3


def _dc_f2p(t, z):
    return z / (1 - t * z) ** 2


def _dc_f3p(t, z):
    return t * t * z ** 3 * (3 - t * z) / (1 - t * z) ** 3


def _dc_second_row(xi, z, J, leg):
    """xi * sum_j xi^j z^j z^(3j(j+1)/2)/(z;z)_j^2 * leg(j, z^j)."""
    acc = _Converger("dc derivative series")
    d = 1
    zj = 1
    for j in range(J):
        if j:
            d = d * xi * z * z ** (3 * j) / (1 - zj * z) ** 2
            zj = zj * z
        acc.add(d * leg(j, zj))
    return xi * acc.result()


def _dc_B(w, z, J):
    xi = z * w
    b11 = _dc_B11(xi, 1, z, J)
    b12 = _dc_B12(xi, 1, z, J)
    b21 = _dc_second_row(xi, z, J, lambda j, t: _dc_f1p(t, z)
                         + _dc_f3p(t, z) * _dc_B11(xi, t * z, z, J))
    b22 = _dc_second_row(xi, z, J, lambda j, t: _dc_f2p(t, z)
                         + _dc_f3p(t, z) * _dc_B12(xi, t * z, z, J))
    return b11, b12, b21, b22


def _dc_A(w, z, i, J):
    xi = z * w
    a1 = _dc_A1(xi, 1, z, i, J)

    def leg(j, t):
        out = _dc_f3p(t, z) * _dc_A1(xi, t * z, z, i, J)
        if i > 1:
            out = out + (i - 1) * z ** ((i - 2) * j) * z ** (i - 1)
        return out

    return a1, _dc_second_row(xi, z, J, leg)


def _dc_h(w, z, J):
    b11, b12, b21, b22 = _dc_B(w, z, J)
    return b12 * b21 - b22 * b11 + b22 + b11 - 1


def _dc_N(w, z, i, J):
    b11, b12, b21, b22 = _dc_B(w, z, J)
    a1, a2 = _dc_A(w, z, i, J)
    n1 = -b12 * a2 - a1 + b22 * a1
    n2 = b11 * a2 - a2 - b21 * a1
    return n1, n2


# st: alternating sums -------------------------------------------------------

def _st_sum(xi, theta, z, J, leg):
    """xi * sum_j (-1)^j xi^j theta^j z^(j(j+1)/2)/(theta z; z)_j^2 * leg(j, theta z^(j+1))."""
    acc = _Converger("st series")
    c = 1
    tz = theta * z
    for j in range(J):
        if j:
            c = -c * xi * theta * z ** j / (1 - tz) ** 2
            tz = tz * z
        acc.add(c * leg(j, tz))
    return xi * acc.result()


def _st_A1(xi, theta, z, i, J):
    t = theta ** (i - 1)
    return _st_sum(xi, theta, z, J, lambda j, tz: t * z ** ((i - 1) * (j + 1)))


def _st_B1(xi, theta, z, J):
    return _st_sum(xi, theta, z, J, lambda j, tz: 1 / (1 - tz) ** 2)


def _st_h(w, z, J):
    return 1 - _st_B1(z * w, 1, z, J)


def _st_N(w, z, i, J):
    return _st_A1(z * w, 1, z, i, J), 0 * w


def st_theta_form(w, z, J=16):
    """sum_n (-1)^n w^n z^(n(n+1)/2)/(z;z)_n^2, an equivalent form of the st kernel."""
    acc = _Converger("st theta form")
    t = 1
    for n in range(J):
        if n:
            t = -t * w * z ** n / (1 - z ** n) ** 2
        acc.add(t)
    return acc.result()


# es: continued fraction apparatus ------------------------------------------

def es_Q(x, z, J=16):
    """Q(x, z) = sum_j (-1)^j z^(j^2) x^j/(z;z)_j, the es kernel."""
    acc = _Converger("es Q series")
    t = 1
    for j in range(J):
        if j:
            t = -t * x * z ** (2 * j - 1) / (1 - z ** j)
        acc.add(t)
    return acc.result()


def es_P(x, z, J=16):
    """P(x, z) = sum_j (-1)^j z^(j^2+j) x^j/(z;z)_j, so that K = P/Q."""
    acc = _Converger("es P series")
    t = 1
    for j in range(J):
        if j:
            t = -t * x * z ** (2 * j) / (1 - z ** j)
        acc.add(t)
    return acc.result()


def escalier_convergents(n: int, x, z):
    """(P_n, Q_n): n-th convergent of K = 1/(1 - zx/(1 - z^2 x/(1 - ...))).

    Uses P_n = P_{n-1} - z^n x P_{n-2} (same for Q) from P_{-1} = 0,
    P_0 = Q_{-1} = Q_0 = 1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    pm, p = 0, 1
    qm, q = 1, 1
    zn = 1
    for k in range(1, n + 1):
        zn = zn * z
        pm, p = p, p - zn * x * pm
        qm, q = q, q - zn * x * qm
    return p, q


def _es_Qn_list(n_max, x, z):
    """[Q_{-1}, Q_0, ..., Q_{n_max}]."""
    out = [1, 1]
    zn = 1
    for k in range(1, n_max + 1):
        zn = zn * z
        out.append(out[-1] - zn * x * out[-2])
    return out


def _es_S(w, z, i, J):
    qn = _es_Qn_list(max(i - 2, 0), w, z)  # qn[k + 1] = Q_k
    first = 0
    if i >= 2:
        for n in range(i - 1):
            first = first + (z ** (i * (i - 1) // 2 - n * (n + 1) // 2)
                             * w ** (i - 1 - n) * qn[n + 1])
        first = first * es_Q(z ** i * w, z, J)
    # closed form of sum_{n >= i-1} z^(n+1) Q(z^(n+2) w, z)
    acc = _Converger("es S series")
    t = 1  # (-1)^k z^(k^2+k) w^k/(z;z)_k
    for k in range(J):
        if k:
            t = -t * w * z ** (2 * k) / (1 - z ** k)
        acc.add(t * z ** (i * (k + 1)) / (1 - z ** (k + 1)))
    second = w * qn[i - 1] * acc.result()
    return w * z ** i * (first + second)


def es_H(n: int, w, z, J=16):
    """H_n(w, z); sum_n H_n(1, rho) = 1 at the es singularity."""
    acc = _Converger("es H series")
    t = 1
    for k in range(J):
        if k:
            t = -t / (1 - z ** k)
        acc.add(t * z ** ((k + 1) * (k + n + 1)) * w ** (k + 1))
    return acc.result()


# dispatch -------------------------------------------------------------------

def _model(family, model):
    return model if model is not None else default_model(family)


def kernel_h(family, w, z, model: KernelModel | None = None):
    """Kernel h(w, z) of the family (denominator of the width/area GF)."""
    f = as_family(family)
    J = _model(f, model).J_max
    if f is FamilyId.DCC:
        return _dcc_h(w, z)
    if f is FamilyId.CC:
        return _cc_h(w, z)
    if f is FamilyId.WA:
        return _wa_h(w, z)
    if f is FamilyId.DC:
        return _dc_h(w, z, J)
    if f is FamilyId.ST:
        return _st_h(w, z, J)
    return es_Q(w, z, J)


def kernel_numerators(family, w, z, i: int, model: KernelModel | None = None):
    """Numerators for a first column of size i.

    Returns the pair (N1, N2) for dcc, cc, dc, wa, st (N2 is identically zero
    for st and wa) and the single S(w, z, i) for es. In every case
    ``C2(i) = -N1(1, rho, i)/h_w(1, rho)``.
    """
    f = as_family(family)
    if i < 1:
        raise ValueError("i must be positive")
    J = _model(f, model).J_max
    if f is FamilyId.DCC:
        return _dcc_N(w, z, i)
    if f is FamilyId.CC:
        return _cc_N(w, z, i)
    if f is FamilyId.WA:
        return _wa_N(w, z, i)
    if f is FamilyId.DC:
        return _dc_N(w, z, i, J)
    if f is FamilyId.ST:
        return _st_N(w, z, i, J)
    return _es_S(w, z, i, J)


def first_numerator(family, w, z, i: int, model: KernelModel | None = None):
    """N1(w, z, i) (S(w, z, i) for es)."""
    out = kernel_numerators(family, w, z, i, model)
    return out if as_family(family) is FamilyId.ES else out[0]


def base_numerator(family, w, z, model: KernelModel | None = None):
    """N1 of the base series: any first column (dcc, cc, wa) or one cell."""
    f = as_family(family)
    if f is FamilyId.DCC:
        return z * w * (z - 1)
    if f is FamilyId.CC:
        return w * z * (z - 1) ** 3
    if f is FamilyId.WA:
        return w * z
    return first_numerator(f, w, z, 1, model)


# theta series ----------------------------------------------------------------

class _Series:
    """Helpers on coefficient arrays of fixed length L+1."""

    def __init__(self, L, dtype):
        self.L, self.dtype = L, dtype
        self.n = np.arange(L + 1)

    def zeros(self):
        return np.zeros(self.L + 1, dtype=self.dtype)

    def mono(self, power, coef=1):
        out = self.zeros()
        if power <= self.L:
            out[power] = coef
        return out

    def geo(self, c):
        """1/(1 - c theta)."""
        return self.dtype(c) ** self.n

    def mul(self, a, b):
        return np.convolve(a, b)[: self.L + 1]

    def shift(self, a, s):
        out = self.zeros()
        if s <= self.L:
            out[s:] = a[: self.L + 1 - s]
        return out


class _Accumulator:
    """Collects sum_t c_t(w) S_t(theta) with jet coefficients in w."""

    def __init__(self, ser):
        self.val = ser.zeros()
        self.der = ser.zeros()

    def add(self, coef, series):
        if isinstance(coef, Jet):
            self.val += coef.f * series
            self.der += coef.w * series
        else:
            self.val += coef * series


def _w_jet(dtype):
    one, zero = dtype(1), dtype(0)
    return Jet(one, one, zero, zero, zero, zero)


def _theta_poch_inv_sq(ser, z, j, prev=None):
    """1/(theta z; z)_j^2 built incrementally from the j-1 series."""
    if j == 0:
        return ser.mono(0)
    g = ser.geo(z ** j)
    return ser.mul(ser.mul(prev, g), g)


def theta_phi(family, z, i: int, model: KernelModel | None = None,
              order: int | None = None) -> ThetaPhi:
    """theta-coefficients of phi(w, theta, z, i)/w and its w-derivative at w = 1.

    Near the singularity phi/w = regular + pole/h(w, z); the pole numerator and
    its analytic w-derivative are returned along with the regular part, all
    truncated at ``order`` (default L_max).
    """
    f = as_family(family)
    m = _model(f, model)
    J = m.J_max
    L = m.L_max if order is None else int(order)
    dt = working_dtype()
    z = dt(z)
    ser = _Series(L, dt)
    acc = _Accumulator(ser)
    regular = ser.mono(i, z ** i)
    w = _w_jet(dt)

    if f in (FamilyId.DCC, FamilyId.CC, FamilyId.WA):
        n1, n2 = kernel_numerators(f, w, z, i, m)
        g = ser.geo(z)
        tz = ser.shift(g, 1) * z  # theta z/(1 - theta z)
        if f is FamilyId.CC:
            acc.add(n1, ser.mul(tz, g))
        else:
            acc.add(n1, tz)
        if f is not FamilyId.WA:
            acc.add(n2, tz)

    elif f is FamilyId.DC:
        n1, n2 = kernel_numerators(f, w, z, i, m)
        regular = ser.zeros()
        inv = None
        for j in range(J):
            inv = _theta_poch_inv_sq(ser, z, j, inv)
            base = ser.shift(inv, 3 * j + 1) * z ** (3 * j * (j + 1) // 2)
            zj = z ** (j + 1)
            g = ser.geo(zj)
            # (2 - 3 t)/(1 - t)^2 and 1/(1 - t) with t = theta z^(j+1)
            t11 = ser.mul(ser.mul(2 * ser.mono(0) - 3 * ser.mono(1, zj), g), g)
            a = (z * w) ** (j + 1) / w
            acc.add(a * n1, ser.mul(base, t11))
            acc.add(a * n2, ser.mul(base, g))
            regular += (z ** (j + 1) * z ** ((i - 1) * (j + 1))
                        * ser.shift(base, i - 1))

    elif f is FamilyId.ST:
        n1, _ = kernel_numerators(f, w, z, i, m)
        regular = ser.zeros()
        inv = None
        for j in range(J):
            inv = _theta_poch_inv_sq(ser, z, j, inv)
            base = ser.shift(inv, j + 1) * ((-1) ** j * z ** (j * (j + 1) // 2))
            g = ser.geo(z ** (j + 1))
            a = (z * w) ** (j + 1) / w
            acc.add(a * n1, ser.mul(ser.mul(base, g), g))
            regular += (z ** (j + 1) * z ** ((i - 1) * (j + 1))
                        * ser.shift(base, i - 1))

    else:  # es
        qn = _es_Qn_list(max(i - 2, 0), w, z)
        zi = z ** i
        q_i = es_Q(zi * w, z, J) if i >= 2 else None
        for n in range(L):
            if n <= i - 2:
                c = (z ** (i * (i - 1) // 2 - n * (n + 1) // 2) * w ** (i - 1 - n)
                     * qn[n + 1] * q_i)
            else:
                c = z ** (n + 1) * w * qn[i - 1] * es_Q(z ** (n + 2) * w, z, J)
            acc.add(zi * c, ser.mono(n + 1))

    return ThetaPhi(ThetaSeries(acc.val), ThetaSeries(acc.der), ThetaSeries(regular))


# known joint perimeter generating functions ----------------------------------

def _poch(a, z, n):
    return q_pochhammer(a, z, n)


def perimeter_gf(family, v, z, J: int = 16):
    """Denominator F(v, z) of the known perimeter/area GF (v marks half-perimeter).

    Its smallest root in z at v = 1 is the area singularity. Available for
    dcc, cc, st and wa.
    """
    f = as_family(family)
    if f is FamilyId.DCC:
        acc = _Converger("dcc perimeter GF")
        for j in range(1, J + 1):
            acc.add(v ** j * (v - 1) ** (j - 1) * z ** (j * (j + 1) // 2)
                    / (_poch(z, z, j) * _poch(v * z, z, j - 1) * _poch(v * z, z, j)))
        return 1 - acc.result()
    if f is FamilyId.WA:
        acc = _Converger("wa perimeter GF")
        for n in range(1, J + 1):
            acc.add(v ** n * (v - 1) ** (n - 1) * z ** (n * (n + 1) // 2)
                    / (_poch(z, z, n) * _poch(v * z, z, n - 1)))
        return 1 - acc.result()
    if f is FamilyId.ST:
        acc = _Converger("st perimeter GF")
        for n in range(J):
            acc.add((-1) ** n * v ** n * z ** (n * (n + 1) // 2)
                    / (_poch(z, z, n) * _poch(v * z, z, n)))
        return acc.result()
    if f is FamilyId.CC:
        # the j = 1 terms of W and v X combine into a closed rational form,
        # which removes the apparent (1 - v)^-1 factor
        acc = _Converger("cc perimeter GF")
        acc.add(1 - v * z * (1 + v * z) / ((1 - v * z) * (1 - z)))
        u = v * v * z
        for j in range(2, J + 1):
            x = ((-1) ** (j + 1) * v ** j * (1 - v) ** (2 * j - 4) * z ** (j * (j + 1) // 2)
                 * _poch(u, z, 2 * j - 2)
                 / (_poch(z, z, j - 1) * _poch(v * z, z, j - 2) * _poch(v * z, z, j - 1) ** 2
                    * _poch(v * z, z, j) * _poch(u, z, j - 1)))
            wt = ((-1) ** j * v ** j * (1 - v) ** (2 * j - 3) * z ** (j * (j + 1) // 2)
                  * _poch(u, z, 2 * j - 1)
                  / (_poch(z, z, j) * _poch(v * z, z, j - 1) ** 3 * _poch(v * z, z, j)
                     * _poch(u, z, j - 1)))
            acc.add(v * x + wt)
        return acc.result()
    raise ValueError(f"no known perimeter generating function for {f.value}")
