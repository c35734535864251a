"""Hot numeric kernels, in numba and pure-numpy variants.

Each public name dispatches on the backend chosen in `_backend`:
numba @njit loops by default, vectorized numpy when FRACGEL_BACKEND=numpy.
The two paths agree to floating-point roundoff (summation order differs).

Kernels:
  gagliardo_pairs      exact cell-pair sum of the nonlocal quadratic form (n=1)
  pv_outer_sum         far-field accumulation of the principal-value integral
  scaled_mass_scan     detector scan of r^{2ps-n} * ball masses of e^{pu} (n=1)
"""

import math

import numpy as np

from ._backend import USE_NUMBA

if USE_NUMBA:
    from numba import njit
else:  # identity decorator so the njit source doubles as slow reference
    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


# ----------------------------------------------------------------------
# Gagliardo pair sum (1-D uniform lattice, piecewise-linear field)
#
# For cells i < j the inner integral over the anti-diagonal variable
# w = (y - y_j) - (x - x_i) is a cubic polynomial branch on [-h, 0] and
# [0, h]; pairing it with the kernel (Delta + w)^(-1-2s) reduces to power
# moments, so every pair contribution is closed-form.


@njit(cache=True)
def _pair_moment(vlo, vhi, m, twos):
    # integral of v^(m-1-2s) over [vlo, vhi]
    e = m - twos
    if abs(e) < 1e-11:
        return math.log(vhi / vlo)
    if vlo <= 0.0:
        return vhi ** e / e
    return (vhi ** e - vlo ** e) / e


@njit(cache=True)
def _branch_integral(coef0, coef1, coef2, coef3, delta, vlo, vhi, twos, drop_low):
    # rebase polynomial in w = v - delta to powers of v, then take moments;
    # drop_low zeroes the m=0,1 coefficients, which vanish analytically for
    # corner-touching cells (their moments would be divergent or noisy)
    e0 = coef0 - coef1 * delta + coef2 * delta * delta - coef3 * delta ** 3
    e1 = coef1 - 2.0 * coef2 * delta + 3.0 * coef3 * delta * delta
    e2 = coef2 - 3.0 * coef3 * delta
    e3 = coef3
    total = 0.0
    if not drop_low:
        total += e0 * _pair_moment(vlo, vhi, 0.0, twos)
        total += e1 * _pair_moment(vlo, vhi, 1.0, twos)
    total += e2 * _pair_moment(vlo, vhi, 2.0, twos)
    total += e3 * _pair_moment(vlo, vhi, 3.0, twos)
    return total


@njit(cache=True)
def _gagliardo_pairs_impl(vals, h, s, i0, i1):
    twos = 2.0 * s
    ncell = i1 - i0
    total = 0.0
    for a in range(ncell):
        i = i0 + a
        p_i = (vals[i + 1] - vals[i]) / h
        # same-cell contribution
        total += 2.0 * p_i * p_i * h ** (3.0 - twos) * (
            1.0 / (2.0 - twos) - 1.0 / (3.0 - twos)
        )
        for b in range(a + 1, ncell):
            j = i0 + b
            p_j = (vals[j + 1] - vals[j]) / h
            c = vals[i] - vals[j]
            q = p_i - p_j
            delta = (j - i) * h
            # cubic branch coefficients of the inner integral
            a0 = c * c * h + q * c * h * h + q * q * h ** 3 / 3.0
            a1 = -(c * c + 2.0 * c * p_j * h) - q * (2.0 * c * h + p_j * h * h) - q * q * h * h
            a2 = (2.0 * c * p_j + p_j * p_j * h) + q * (c + 2.0 * p_j * h) + q * q * h
            a3 = -p_j * p_j - q * p_j - q * q / 3.0
            b1 = c * c - 2.0 * c * p_j * h - q * p_j * h * h
            b2 = p_j * p_j * h - 2.0 * c * p_j - q * c
            b3 = p_j * p_j + q * p_j + q * q / 3.0
            adjacent = j == i + 1
            neg = _branch_integral(a0, b1, b2, b3, delta, delta - h, delta, twos, adjacent)
            pos = _branch_integral(a0, a1, a2, a3, delta, delta, delta + h, twos, False)
            total += 2.0 * (neg + pos)
    return total


def _gagliardo_pairs_np(vals, h, s, i0, i1):
    twos = 2.0 * s
    idx = np.arange(i0, i1)
    slopes = (vals[idx + 1] - vals[idx]) / h
    total = float(
        np.sum(2.0 * slopes ** 2 * h ** (3.0 - twos) * (1.0 / (2.0 - twos) - 1.0 / (3.0 - twos)))
    )

    def moments(vlo, vhi, m, drop):
        e = m - twos
        safe_lo = np.where(vlo <= 0.0, 1.0, vlo)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                np.abs(e) < 1e-11,
                np.log(np.maximum(vhi, 1e-300) / np.maximum(safe_lo, 1e-300)),
                (vhi ** e - np.where(vlo <= 0.0, 0.0, safe_lo ** e))
                / np.where(np.abs(e) < 1e-11, 1.0, e),
            )
        return np.where(drop, 0.0, out)

    ncell = i1 - i0
    for a in range(ncell - 1):
        i = i0 + a
        j = idx[a + 1 :]
        p_i = slopes[a]
        p_j = slopes[a + 1 :]
        c = vals[i] - vals[j]
        q = p_i - p_j
        delta = (j - i) * h
        a0 = c * c * h + q * c * h * h + q * q * h ** 3 / 3.0
        a1 = -(c * c + 2.0 * c * p_j * h) - q * (2.0 * c * h + p_j * h * h) - q * q * h * h
        a2 = (2.0 * c * p_j + p_j * p_j * h) + q * (c + 2.0 * p_j * h) + q * q * h
        a3 = -p_j * p_j - q * p_j - q * q / 3.0
        b1 = c * c - 2.0 * c * p_j * h - q * p_j * h * h
        b2 = p_j * p_j * h - 2.0 * c * p_j - q * c
        b3 = p_j * p_j + q * p_j + q * q / 3.0
        adjacent = j == i + 1

        def branch(c0, c1, c2, c3, vlo, vhi, drop_low):
            e0 = c0 - c1 * delta + c2 * delta ** 2 - c3 * delta ** 3
            e1 = c1 - 2.0 * c2 * delta + 3.0 * c3 * delta ** 2
            e2 = c2 - 3.0 * c3 * delta
            out = e0 * moments(vlo, vhi, 0.0, drop_low)
            out += e1 * moments(vlo, vhi, 1.0, drop_low)
            out += e2 * moments(vlo, vhi, 2.0, np.zeros_like(drop_low))
            out += c3 * moments(vlo, vhi, 3.0, np.zeros_like(drop_low))
            return out

        neg = branch(a0, b1, b2, b3, delta - h, delta, adjacent)
        pos = branch(a0, a1, a2, a3, delta, delta + h, np.zeros_like(adjacent))
        total += 2.0 * float(np.sum(neg + pos))
    return total


# ----------------------------------------------------------------------
# PV far-field accumulation: sum_k w_k K(r, rho_k) (Ur - U_k)
# with the ring kernel inlined for n in {1, 3}; n=2 uses the numpy path.


@njit(cache=True)
def _pv_outer_sum_impl(rho, w, uvals, ur, r, n, beta):
    total = 0.0
    for k in range(rho.shape[0]):
        p = rho[k]
        d2 = (r - p) * (r - p)
        D2 = (r + p) * (r + p)
        if n == 1:
            kern = d2 ** (-beta / 2.0) + D2 ** (-beta / 2.0)
        else:  # n == 3
            rr = r * p
            if rr < 1e-300:
                kern = 4.0 * math.pi * (r * r + p * p) ** (-beta / 2.0)
            else:
                e = (2.0 - beta) / 2.0
                kern = 2.0 * math.pi / (rr * (beta - 2.0)) * (d2 ** e - D2 ** e)
        total += w[k] * p ** (n - 1) * kern * (ur - uvals[k])
    return total


def _pv_outer_sum_np(rho, w, uvals, ur, r, n, beta):
    d2 = (r - rho) ** 2
    D2 = (r + rho) ** 2
    if n == 1:
        kern = d2 ** (-beta / 2.0) + D2 ** (-beta / 2.0)
    else:
        rr = r * rho
        e = (2.0 - beta) / 2.0
        with np.errstate(divide="ignore"):
            kern = np.where(
                rr < 1e-300,
                4.0 * math.pi * (r * r + rho ** 2) ** (-beta / 2.0),
                2.0 * math.pi / (np.maximum(rr, 1e-300) * (beta - 2.0)) * (d2 ** e - D2 ** e),
            )
    return float(np.sum(w * rho ** (n - 1) * kern * (ur - uvals)))


# ----------------------------------------------------------------------
# Detector scan (1-D lattice): for each center index and each scale,
# the exact integral of e^{p*u} over the ball, u piecewise linear.


@njit(cache=True)
def _exp_segment(u0, u1, dx, p):
    d = p * (u1 - u0)
    if abs(d) < 1e-12:
        ratio = 1.0 + 0.5 * d
    else:
        ratio = math.expm1(d) / d
    return math.exp(p * u0) * dx * ratio


@njit(cache=True)
def _ball_exp_mass(vals, h, L, p, center, radius):
    a = center - radius
    b = center + radius
    m = vals.shape[0]
    ia = max(int(math.floor((a + L) / h)), 0)
    ib = min(int(math.floor((b + L) / h)), m - 2)
    total = 0.0
    for seg in range(ia, ib + 1):
        x0 = -L + seg * h
        x1 = x0 + h
        lo = a if a > x0 else x0
        hi = b if b < x1 else x1
        if hi <= lo:
            continue
        u0 = vals[seg] + (vals[seg + 1] - vals[seg]) * (lo - x0) / h
        u1 = vals[seg] + (vals[seg + 1] - vals[seg]) * (hi - x0) / h
        total += _exp_segment(u0, u1, hi - lo, p)
    return total


@njit(cache=True)
def _scaled_mass_scan_impl(vals, h, L, p, twos, centers, scales):
    out = np.empty((centers.shape[0], scales.shape[0]))
    for ic in range(centers.shape[0]):
        c = centers[ic]
        for isc in range(scales.shape[0]):
            r = scales[isc]
            mass = _ball_exp_mass(vals, h, L, p, c, r)
            out[ic, isc] = r ** (p * twos - 1.0) * mass
    return out


def _scaled_mass_scan_np(vals, h, L, p, twos, centers, scales):
    out = np.empty((len(centers), len(scales)))
    for ic, c in enumerate(centers):
        for isc, r in enumerate(scales):
            a, b = c - r, c + r
            edges = np.linspace(-L, L, len(vals))
            cuts = edges[(edges > a) & (edges < b)]
            pts = np.concatenate(([a], cuts, [b]))
            u0 = np.interp(pts[:-1], edges, vals)
            u1 = np.interp(pts[1:], edges, vals)
            dx = np.diff(pts)
            d = p * (u1 - u0)
            small = np.abs(d) < 1e-12
            ratio = np.where(small, 1.0 + 0.5 * d, np.expm1(np.where(small, 1.0, d)) / np.where(small, 1.0, d))
            mass = float(np.sum(np.exp(p * u0) * dx * ratio))
            out[ic, isc] = r ** (p * twos - 1.0) * mass
    return out


# ----------------------------------------------------------------------
# dispatch

if USE_NUMBA:
    gagliardo_pairs = _gagliardo_pairs_impl
    pv_outer_sum = _pv_outer_sum_impl
    scaled_mass_scan = _scaled_mass_scan_impl
else:
    gagliardo_pairs = _gagliardo_pairs_np
    pv_outer_sum = _pv_outer_sum_np
    scaled_mass_scan = _scaled_mass_scan_np
