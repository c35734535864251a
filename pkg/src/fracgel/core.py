"""Problem parameters and normalizing constants.

All constants derive from Gamma evaluations; the two that the defining
papers leave implicit (the Poisson-kernel normalizer and the half-ball
weighted volume) additionally carry quadrature certificates computed at
construction time.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CertificateError
from .gammafn import gamma_fn
from .quadrature import (
    farfield_rule,
    gauss_jacobi01,
    geometric_edges,
    panel_rule,
    refine_edges_near,
    ring_kernel,
    sphere_area,
)

__all__ = ["Params", "ConstantSet", "constants", "poisson_kernel_mass"]


@dataclass(frozen=True)
class Params:
    """Ambient dimension n >= 1 and fractional order s in (0,1)."""

    n: int
    s: float

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"dimension n must be a positive integer, got {self.n}")
        if not (0.0 < self.s < 1.0):
            raise ValueError(f"fractional order s must lie in (0,1), got {self.s}")


@dataclass(frozen=True)
class ConstantSet:
    """Normalizing constants for one (n, s) pair.

    c_ns        fractional Laplacian normalizer
    kappa_s     weighted Neumann-trace constant
    d_ns        Poisson kernel normalizer (unit mass in y)
    c_s         integral of t^(1-2s) over the unit half-ball of R^{n+1}
    C_ns_riesz  half-space Riesz kernel normalizer (trace recovers kappa_s e^u)
    c_ns_fund   fundamental-solution normalizer (only defined for n > 2s)
    d_ns_residual, c_s_residual, riesz_residual: certificate residuals
    """

    c_ns: float
    kappa_s: float
    d_ns: float
    c_s: float
    C_ns_riesz: float
    c_ns_fund: float
    d_ns_residual: float
    c_s_residual: float
    riesz_residual: float


def abs_gamma_neg(s: float) -> float:
    """|Gamma(-s)| for s in (0,1), via the reflection formula."""
    return math.pi / (math.sin(math.pi * s) * gamma_fn(1.0 + s))


def frac_lap_normalizer(n: int, s: float) -> float:
    """Normalizer of the symmetrized second-difference form of (-Delta)^s.

    This is the c_{n,s} the ConstantSet reports.  The single-difference
    principal-value form of the same operator carries twice this value;
    see pv_normalizer.
    """
    return 2.0 ** (2.0 * s - 1.0) * gamma_fn((n + 2.0 * s) / 2.0) / (
        math.pi ** (n / 2.0) * abs_gamma_neg(s)
    )


def pv_normalizer(n: int, s: float) -> float:
    """Normalizer of the PV single-difference form, 2^{2s} Gamma((n+2s)/2) / (pi^{n/2} |Gamma(-s)|).

    With this constant the operator is the |xi|^{2s} Fourier multiplier,
    which is what the weighted Neumann-trace identity with kappa_s and the
    closed-form test profiles require.
    """
    return 2.0 * frac_lap_normalizer(n, s)


def neumann_trace_constant(s: float) -> float:
    return gamma_fn(1.0 - s) / (2.0 ** (2.0 * s - 1.0) * gamma_fn(s))


def poisson_normalizer(n: int, s: float) -> float:
    # Beta reduction of integral over R^n of (1+|z|^2)^(-(n+2s)/2)
    return gamma_fn((n + 2.0 * s) / 2.0) / (math.pi ** (n / 2.0) * gamma_fn(s))


def half_ball_weighted_volume(n: int, s: float) -> float:
    # polar reduction: (1/(n+2-2s)) |S^{n-1}| * (1/2) B(n/2, 1-s)
    return (
        math.pi ** (n / 2.0)
        * gamma_fn(1.0 - s)
        / ((n + 2.0 - 2.0 * s) * gamma_fn(n / 2.0 + 1.0 - s))
    )


def riesz_trace_normalizer(n: int, s: float) -> float:
    """C with -lim t^{1-2s} d_t [C (|x|^2+t^2)^{-(n-2s)/2} * f] = kappa_s f."""
    kappa = neumann_trace_constant(s)
    return (
        kappa
        * gamma_fn((n + 2.0) / 2.0 - s)
        / ((n - 2.0 * s) * math.pi ** (n / 2.0) * gamma_fn(1.0 - s))
    )


def fundamental_normalizer(n: int, s: float) -> float:
    """c with (-Delta)^s [c |x|^{2s-n}] = delta_0, requires n > 2s."""
    return gamma_fn((n - 2.0 * s) / 2.0) / (
        4.0 ** s * math.pi ** (n / 2.0) * gamma_fn(s)
    )


def poisson_kernel_mass(n: int, s: float, d_ns: float, r: float, t: float) -> float:
    """Quadrature of the Poisson kernel in y over R^n at the point (x, t), |x| = r."""
    beta = n + 2.0 * s
    L = max(10.0 * (r + t), 50.0 * t, 10.0)
    edges = geometric_edges(0.0, L, toward_a=True, h0=max(t, 1e-6) / 8.0, ratio=1.5)
    edges = refine_edges_near(edges, r, h0=t / 8.0, ratio=1.5)
    nodes, w = panel_rule(edges, 12)
    interior = np.sum(w * nodes ** (n - 1) * ring_kernel(n, r, nodes, t * t, beta))
    rho_f, w_f = farfield_rule(L, 2.0 * s, k=10)
    far = np.sum(w_f * rho_f ** (n - 2) * ring_kernel(n, r, rho_f, t * t, beta) * rho_f)
    return d_ns * t ** (2.0 * s) * (interior + far)


def _c_s_quadrature(n: int, s: float) -> float:
    # angular factor integral_0^1 c^{1-2s} (1-c^2)^{(n-2)/2} dc; both endpoint
    # powers go into the Jacobi weight, the remaining factor is smooth
    from scipy.special import roots_jacobi

    alpha = (n - 2) / 2.0
    beta = 1.0 - 2.0 * s
    x, w = roots_jacobi(48, alpha, beta)
    c = 0.5 * (1.0 + x)
    smooth = (1.0 + c) ** alpha
    ang = 0.5 ** (alpha + beta + 1.0) * np.sum(w * smooth)
    return sphere_area(n) * ang / (n + 2.0 - 2.0 * s)


def _riesz_trace_mass(n: int, s: float, C: float) -> float:
    # (n-2s) C t^{2-2s} integral over R^n of (|x|^2+t^2)^{-(n+2-2s)/2} dx at t=1
    beta = n + 2.0 - 2.0 * s
    edges = geometric_edges(0.0, 50.0, toward_a=True, h0=0.05, ratio=1.4)
    nodes, w = panel_rule(edges, 12)
    sa = sphere_area(n)
    interior = np.sum(w * nodes ** (n - 1) * (nodes ** 2 + 1.0) ** (-beta / 2.0)) * sa
    rho_f, w_f = farfield_rule(50.0, 2.0 - 2.0 * s, k=10)
    far = np.sum(w_f * rho_f ** (n - 1) * (rho_f ** 2 + 1.0) ** (-beta / 2.0)) * sa
    return (n - 2.0 * s) * C * (interior + far)


def constants(p: Params, certify: bool = True) -> ConstantSet:
    """All normalizing constants for (n, s), with quadrature certificates.

    Raises CertificateError if a defining integral misses its normalization
    by more than 1e-6 relative.
    """
    n, s = p.n, p.s
    c_ns = frac_lap_normalizer(n, s)
    kappa = neumann_trace_constant(s)
    d_ns = poisson_normalizer(n, s)
    c_s = half_ball_weighted_volume(n, s)
    C_riesz = riesz_trace_normalizer(n, s) if n > 2.0 * s else float("nan")
    c_fund = fundamental_normalizer(n, s) if n > 2.0 * s else float("nan")

    d_res = 0.0
    cs_res = 0.0
    rz_res = 0.0
    if certify:
        masses = [
            poisson_kernel_mass(n, s, d_ns, r, t)
            for (r, t) in ((0.0, 0.5), (0.7, 0.1), (1.3, 1.0))
        ]
        d_res = max(abs(m - 1.0) for m in masses)
        cs_res = abs(_c_s_quadrature(n, s) / c_s - 1.0)
        if n > 2.0 * s:
            rz_res = abs(_riesz_trace_mass(n, s, C_riesz) / kappa - 1.0)
        if d_res > 1e-6:
            raise CertificateError(
                f"Poisson kernel mass residual {d_res:.3e} exceeds 1e-6 for (n={n}, s={s})"
            )
        if cs_res > 1e-6:
            raise CertificateError(
                f"half-ball weighted volume residual {cs_res:.3e} exceeds 1e-6"
            )

    cs = ConstantSet(
        c_ns=c_ns,
        kappa_s=kappa,
        d_ns=d_ns,
        c_s=c_s,
        C_ns_riesz=C_riesz,
        c_ns_fund=c_fund,
        d_ns_residual=d_res,
        c_s_residual=cs_res,
        riesz_residual=rz_res,
    )
    for name in ("c_ns", "kappa_s", "d_ns", "c_s"):
        v = getattr(cs, name)
        if not (v > 0.0 and math.isfinite(v)):
            raise CertificateError(f"constant {name} not positive finite: {v}")
    return cs
