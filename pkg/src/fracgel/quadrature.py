"""Shared 1-D quadrature machinery.

Everything singular in this package reduces to one-dimensional integrals
in a radius-like variable, possibly against a power weight or an angular
ring kernel.  This module owns:

  * cached Gauss-Legendre and Gauss-Jacobi rules,
  * panel builders (sample-aligned, geometrically graded, far-field),
  * the ring kernels  integral over S^{n-1} of (|r e1 - rho w|^2 + t^2)^(-beta/2)
    for n = 1, 2, 3 (closed form for 1 and 3, fixed composite rule for 2).
"""

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .gammafn import gamma_fn


@lru_cache(maxsize=64)
def gauss_legendre(k: int):
    x, w = np.polynomial.legendre.leggauss(k)
    return x, w


@lru_cache(maxsize=256)
def gauss_jacobi01(m: int, alpha: float):
    """Nodes/weights so that integral_0^1 t^alpha g(t) dt ~= sum w_i g(t_i)."""
    x, w = roots_jacobi(m, 0.0, alpha)
    t = 0.5 * (x + 1.0)
    return t, w / 2.0 ** (alpha + 1.0)


def weighted_interval_rule(a: float, b: float, alpha: float, m: int = 24):
    """Rule for integral_a^b (t-a)^alpha g(t) dt with g smooth."""
    t, w = gauss_jacobi01(m, alpha)
    h = b - a
    return a + h * t, w * h ** (alpha + 1.0)


def panel_rule(edges, k: int = 8):
    """Composite Gauss-Legendre nodes/weights over consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(k)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def geometric_edges(a: float, b: float, toward_a: bool, h0: float, ratio: float = 1.8):
    """Panel edges on [a, b] graded geometrically toward one endpoint.

    The panel adjacent to the graded endpoint has width h0; widths grow by
    `ratio` until the other endpoint is reached.
    """
    if b <= a:
        return np.array([a, b])
    length = b - a
    offs = [0.0]
    w = min(h0, length)
    pos = 0.0
    while pos + w < length:
        pos += w
        offs.append(pos)
        w *= ratio
    offs.append(length)
    offs = np.asarray(offs)
    if toward_a:
        return a + offs
    return b - offs[::-1]


def refine_edges_near(edges, point: float, h0: float, ratio: float = 1.8):
    """Insert geometric grading toward `point` into an edge list.

    Panels of `edges` that contain or touch `point` get subdivided so that
    widths shrink to ~h0 next to the point.  Used where an integrand has a
    singularity or a sharp kernel peak at a known location.
    """
    edges = np.asarray(edges, dtype=float)
    out = [edges]
    lo, hi = edges[0], edges[-1]
    if point < hi:
        a = max(point, lo)
        span = hi - a
        if span > h0:
            d = h0
            pts = []
            while d < span:
                pts.append(a + d)
                d *= ratio
            out.append(np.asarray(pts))
    if point > lo:
        b = min(point, hi)
        span = b - lo
        if span > h0:
            d = h0
            pts = []
            while d < span:
                pts.append(b - d)
                d *= ratio
            out.append(np.asarray(pts))
    merged = np.unique(np.concatenate(out))
    return merged[(merged >= lo) & (merged <= hi)]


def trim_edges(edges, lo: float, hi: float):
    """Clip an edge list to [lo, hi], keeping lo/hi as edges."""
    edges = np.asarray(edges, dtype=float)
    inner = edges[(edges > lo) & (edges < hi)]
    return np.concatenate(([lo], inner, [hi]))


def farfield_rule(L: float, decay: float, k: int = 10, w0: float = 0.4, ratio: float = 1.25):
    """Rule for integral_L^inf f(rho) drho when f ~ rho^(-1-decay) (x log factors).

    Substitutes rho = L e^w; the transformed integrand decays like
    e^(-decay w), so panels run to w_max = 45/decay with growing width.
    Returns (rho nodes, weights including the jacobian rho).
    """
    w_max = 45.0 / max(decay, 1e-3)
    edges = [0.0]
    w = w0
    pos = 0.0
    while pos < w_max:
        pos = min(pos + w, w_max)
        edges.append(pos)
        w *= ratio
    wn, ww = panel_rule(np.asarray(edges), k)
    rho = L * np.exp(wn)
    return rho, ww * rho


def sphere_area(n: int) -> float:
    """Surface measure of S^{n-1}."""
    return 2.0 * np.pi ** (n / 2.0) / gamma_fn(n / 2.0)


@lru_cache(maxsize=8)
def _psi_rule(k: int = 12):
    # fixed graded rule in psi on [0, pi/2] used by the n=2 ring kernel
    edges = geometric_edges(0.0, np.pi / 2.0, toward_a=True, h0=1e-9, ratio=2.0)
    return panel_rule(edges, k)


def ring_kernel(n: int, r: float, rho, t2: float, beta: float):
    """integral over S^{n-1} of (|r e1 - rho w|^2 + t^2)^(-beta/2) dsigma(w).

    Vectorized over rho.  Valid whenever the integrand is finite, i.e.
    t^2 > 0 or rho != r.
    """
    rho = np.asarray(rho, dtype=float)
    d2 = (r - rho) ** 2 + t2
    D2 = (r + rho) ** 2 + t2
    if n == 1:
        return d2 ** (-beta / 2.0) + D2 ** (-beta / 2.0)
    if n == 3:
        rr = r * rho
        out = np.empty_like(rho)
        small = rr < 1e-300
        if np.any(small):
            out[small] = 4.0 * np.pi * (r * r + rho[small] ** 2 + t2) ** (-beta / 2.0)
        big = ~small
        if np.any(big):
            if abs(beta - 2.0) < 1e-12:
                out[big] = np.pi / rr[big] * np.log(D2[big] / d2[big])
            else:
                e = (2.0 - beta) / 2.0
                out[big] = 2.0 * np.pi / (rr[big] * (beta - 2.0)) * (d2[big] ** e - D2[big] ** e)
        return out
    if n == 2:
        psi, wpsi = _psi_rule()
        s2 = np.sin(psi) ** 2
        # 4 * integral_0^{pi/2} (d2 + 4 r rho sin^2 psi)^(-beta/2) dpsi
        arg = d2[..., None] + 4.0 * r * rho[..., None] * s2[None, :]
        return 4.0 * np.sum(arg ** (-beta / 2.0) * wpsi[None, :], axis=-1)
    raise ValueError(f"ring_kernel supports n in {{1,2,3}}, got n={n}")


def ring_kernel_scalar(n: int, r: float, rho: float, t2: float, beta: float) -> float:
    return float(ring_kernel(n, r, np.asarray([rho]), t2, beta)[0])
