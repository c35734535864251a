"""Principal-value fractional Laplacian, Riesz potentials and the
nonlocal quadratic form.

The PV integral splits at a cutoff delta around the evaluation point:

  * inside, the symmetric pairing rho = r +/- tau removes the principal
    value; the field is replaced by a local polynomial fitted to nearby
    samples and the weight tau^(1-2s) goes into a Gauss-Jacobi rule;
  * outside, sample-aligned panels integrate the piecewise-linear
    interpolant against the kernel, with geometric refinement toward the
    cutoff and toward the origin;
  * beyond the sampled extent the analytic tail model is integrated on an
    exponentially substituted far-field rule.

Radial fields reduce to one dimension through the ring kernels; full
grids are supported in one dimension (higher-dimensional grids raise,
radial mode covers n = 2, 3).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Params, pv_normalizer
from .errors import CalibrationError, DomainError, SupportError
from .field import Field, TailModel
from .quadrature import (
    farfield_rule,
    gauss_jacobi01,
    geometric_edges,
    panel_rule,
    refine_edges_near,
    ring_kernel,
    sphere_area,
    trim_edges,
    weighted_interval_rule,
)

__all__ = [
    "PvQuadratureScheme",
    "frac_laplacian",
    "calibrate_singular_constant",
    "riesz_potential",
    "gagliardo_form",
]


@dataclass(frozen=True)
class PvQuadratureScheme:
    """Discretization of the principal-value integral.

    inner_radius: singularity-splitting radius; None means the local
    sample spacing.  inner_order: degree of the local polynomial used
    inside the cutoff.  outer_nodes: budget for graded far-field panels.
    tail_cutoff: radius where the analytic tail takes over (>= sampled
    extent; None means the sampled extent).
    """

    inner_radius: float | None = None
    inner_order: int = 4
    outer_nodes: int = 256
    tail_cutoff: float | None = None

    def __post_init__(self):
        if self.inner_order < 2:
            raise ValueError("inner_order must be >= 2")
        if self.outer_nodes < 64:
            raise ValueError("outer_nodes must be >= 64")
        if self.inner_radius is not None and self.inner_radius <= 0:
            raise ValueError("inner_radius must be positive")


DEFAULT_SCHEME = PvQuadratureScheme()


def _local_model(field: Field, r: float, delta0: float, order: int, spacing: float):
    """Polynomial model of the field around r, with adaptive window.

    Fits U(r+tau) ~ ur + c0 + sum c_k tau^k on samples within ~2 delta.
    The intercept c0 corrects interpolation bias in ur: the far-field
    integral multiplies any error in U(r) by the kernel mass ~ delta^{-2s},
    so U(r) must come from the same model as the inner expansion.  If the
    fit residual is large (a kink inside the window), delta shrinks.
    """
    if field.mode == "radial":
        coords, vals = field.radii, field.values
        ur = float(field.radial_eval(np.asarray([r]))[0])
    else:
        coords, vals = field.axis, field.values
        ur = float(field.eval(np.asarray([[r]]))[0])
    delta = delta0
    need = order + 4
    best = None
    for _ in range(8):
        w = 2.2 * delta
        sel = np.abs(coords - r) <= w
        k = 0
        while np.count_nonzero(sel) < need and k < 40:
            w *= 1.5
            sel = np.abs(coords - r) <= w
            k += 1
        taus = coords[sel] - r
        dus = vals[sel] - ur
        A = np.vander(taus / delta, order + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(A, dus, rcond=None)
        resid = float(np.max(np.abs(A @ coef - dus)))
        scale = float(np.max(np.abs(dus))) + 1e-300
        best = coef * delta ** -np.arange(order + 1).astype(float)
        if resid <= 1e-3 * scale + 1e-14:
            break
        if delta <= spacing:
            break
        delta = max(delta * 0.5, spacing)
    c0 = best[0]
    return delta, ur + c0, best


def _pv_radial(u: Field, r: float, p: Params, scheme: PvQuadratureScheme) -> float:
    n, s = p.n, p.s
    beta = n + 2.0 * s
    radii = u.radii
    if not (radii[0] <= r <= radii[-1]):
        raise DomainError(f"evaluation radius {r} outside sampled radii")
    spacing = u.local_spacing(r)
    delta0 = scheme.inner_radius if scheme.inner_radius is not None else 6.0 * spacing
    delta0 = min(delta0, 0.45 * r)
    delta, ur, coef = _local_model(u, r, delta0, scheme.inner_order, spacing)

    # inner: -integral_0^delta tau^(1-2s) sum_k c_k [tau^(k-2) x (DG or SG)] dtau
    tj, wj = gauss_jacobi01(24, 1.0 - 2.0 * s)
    tau = delta * tj
    wj = wj * delta ** (2.0 - 2.0 * s)
    Gp = ring_kernel(n, r, r + tau, 0.0, beta) * (r + tau) ** (n - 1) * tau ** (1.0 + 2.0 * s)
    Gm = ring_kernel(n, r, r - tau, 0.0, beta) * (r - tau) ** (n - 1) * tau ** (1.0 + 2.0 * s)
    SG = Gp + Gm
    DG = Gp - Gm
    integrand = np.zeros_like(tau)
    for k in range(1, scheme.inner_order + 1):
        part = DG / tau if k % 2 == 1 else SG
        integrand += coef[k] * tau ** (k - (1 if k % 2 == 1 else 2)) * part
    inner = -float(np.sum(wj * integrand))

    # outer: sample-aligned panels on [hole, r-delta] and [r+delta, L]
    h0 = delta / 3.0
    outer = 0.0
    lo_edge = radii[0] * 1e-10
    left_edges = np.concatenate(
        (geometric_edges(lo_edge, radii[0], True, lo_edge, 2.0), radii)
    )
    if r - delta > lo_edge:
        le = trim_edges(left_edges, lo_edge, r - delta)
        le = refine_edges_near(le, r - delta, h0, ratio=1.6)
        nodes, w = panel_rule(le, 10)
        uvals = u.radial_eval(nodes)
        outer += _outer_sum(nodes, w, uvals, ur, r, n, beta)
    if r + delta < radii[-1]:
        re = trim_edges(radii, r + delta, radii[-1])
        re = refine_edges_near(re, r + delta, h0, ratio=1.6)
        nodes, w = panel_rule(re, 10)
        uvals = u.radial_eval(nodes)
        outer += _outer_sum(nodes, w, uvals, ur, r, n, beta)

    # tail
    Lt = scheme.tail_cutoff if scheme.tail_cutoff is not None else radii[-1]
    if Lt < radii[-1] - 1e-12:
        raise DomainError("tail_cutoff must not truncate the sampled region")
    rho_f, w_f = farfield_rule(Lt, 2.0 * s, k=10)
    tail_vals = u.tail.value(rho_f)
    tail = _outer_sum(rho_f, w_f, tail_vals, ur, r, n, beta)
    return pv_normalizer(n, s) * (inner + outer + tail)


def _outer_sum(nodes, w, uvals, ur, r, n, beta):
    if n in (1, 3):
        return float(
            _kernels.pv_outer_sum(
                np.ascontiguousarray(nodes),
                np.ascontiguousarray(w),
                np.ascontiguousarray(uvals),
                float(ur),
                float(r),
                n,
                float(beta),
            )
        )
    kern = ring_kernel(n, r, nodes, 0.0, beta)
    return float(np.sum(w * nodes ** (n - 1) * kern * (ur - uvals)))


def _pv_radial_origin(u: Field, p: Params, scheme: PvQuadratureScheme) -> float:
    """PV value at the origin of a radial field (even local model).

    An intercept rides along in the even fit and corrects U(0): the outer
    integral multiplies any U(0) error by the kernel mass ~ delta^{-2s}.
    The window starts at a fraction of the field extent and shrinks if the
    quartic fit cannot follow the data.
    """
    n, s = p.n, p.s
    radii = u.radii
    delta = scheme.inner_radius if scheme.inner_radius is not None else radii[-1] / 64.0
    delta = max(delta, radii[0] * 4.0)
    kmax = scheme.inner_order if scheme.inner_order % 2 == 0 else scheme.inner_order + 1
    powers = np.arange(2, kmax + 1, 2)
    base0 = float(u.values[0])
    coef = np.zeros(len(powers))
    c0 = 0.0
    for _ in range(10):
        sel = radii <= 2.2 * delta
        if np.count_nonzero(sel) < len(powers) + 3:
            sel = radii <= radii[min(len(radii) - 1, len(powers) + 3)]
        taus = radii[sel]
        dus = u.values[sel] - base0
        A = np.concatenate(
            (np.ones((taus.size, 1)), (taus[:, None] / delta) ** powers[None, :]), axis=1
        )
        sol, *_ = np.linalg.lstsq(A, dus, rcond=None)
        resid = float(np.max(np.abs(A @ sol - dus)))
        scale = float(np.max(np.abs(dus))) + 1e-300
        c0, coef = sol[0], sol[1:] * delta ** -powers.astype(float)
        if resid <= 1e-3 * scale + 1e-14 or delta <= radii[0] * 4.0:
            break
        delta *= 0.5
    u0 = base0 + c0
    sa = sphere_area(n)
    inner = -sa * float(np.sum(coef * delta ** (powers - 2.0 * s) / (powers - 2.0 * s)))
    edges = trim_edges(radii, delta, radii[-1])
    edges = refine_edges_near(edges, delta, delta / 3.0, ratio=1.6)
    nodes, w = panel_rule(edges, 10)
    uvals = u.radial_eval(nodes)
    outer = sa * float(np.sum(w * nodes ** (-1.0 - 2.0 * s) * (u0 - uvals)))
    rho_f, w_f = farfield_rule(radii[-1], 2.0 * s, k=10)
    tail = sa * float(np.sum(w_f * rho_f ** (-1.0 - 2.0 * s) * (u0 - u.tail.value(rho_f))))
    return pv_normalizer(n, s) * (inner + outer + tail)


def _pv_grid1d(u: Field, x: float, p: Params, scheme: PvQuadratureScheme) -> float:
    s = p.s
    beta = 1.0 + 2.0 * s
    L = u.L
    if not (-L < x < L):
        raise DomainError(f"evaluation point {x} not interior to [-{L}, {L}]")
    delta0 = scheme.inner_radius if scheme.inner_radius is not None else 6.0 * u.h
    delta0 = min(delta0, (L - abs(x)) / 2.0)
    delta, ux, coef = _local_model(u, x, delta0, scheme.inner_order, u.h)
    # even kernel: odd powers cancel exactly in the pairing
    inner = 0.0
    for k in range(2, scheme.inner_order + 1, 2):
        inner -= 2.0 * coef[k] * delta ** (k - 2.0 * s) / (k - 2.0 * s)

    h0 = delta / 3.0
    outer = 0.0
    for (a, b, toward) in ((-L, x - delta, False), (x + delta, L, True)):
        if b <= a:
            continue
        edges = trim_edges(u.axis, a, b)
        edges = refine_edges_near(edges, x - delta if not toward else x + delta, h0, 1.6)
        nodes, w = panel_rule(edges, 10)
        uvals = u.eval(nodes[:, None])
        outer += float(np.sum(w * np.abs(x - nodes) ** (-beta) * (ux - uvals)))

    tail = 0.0
    for sign in (+1.0, -1.0):
        rho_f, w_f = farfield_rule(L, 2.0 * s, k=10)
        dist = np.abs(sign * rho_f - x)
        tail += float(np.sum(w_f * dist ** (-beta) * (ux - u.tail.value(rho_f))))
    return pv_normalizer(1, s) * (inner + outer + tail)


def frac_laplacian(u: Field, x, p: Params, scheme: PvQuadratureScheme = None) -> float:
    """c_{n,s} x PV integral of (u(x)-u(y)) |x-y|^{-n-2s} over R^n.

    The point must be interior to the sampled region and u locally smooth
    there; singular-set callers exclude flagged points themselves.
    """
    scheme = scheme or DEFAULT_SCHEME
    if u.mode == "radial":
        r = float(np.sqrt(np.sum(np.atleast_1d(np.asarray(x, dtype=float)) ** 2)))
        if r < u.radii[0] * 8.0:
            return _pv_radial_origin(u, p, scheme)
        return _pv_radial(u, r, p, scheme)
    if u.n == 1:
        xx = float(np.atleast_1d(np.asarray(x, dtype=float))[0])
        return _pv_grid1d(u, xx, p, scheme)
    raise NotImplementedError(
        "full-grid PV evaluation is implemented for n=1; use radial mode for n=2,3"
    )


def calibrate_singular_constant(
    p: Params, scheme: PvQuadratureScheme = None, n_radii: int = 20, tol: float = 1e-3
):
    """Constant lam with (-Delta)^s (-2s log|x|) = lam |x|^{-2s}.

    Evaluates |x|^{2s} (-Delta)^s of the log profile at n_radii radii and
    averages; spread beyond `tol` relative raises CalibrationError.  The
    shifted profile -2s log|x| + log(lam) then satisfies the exponential
    equation exactly, which is the toolkit's reference solution.
    """
    if p.n <= 2.0 * p.s:
        raise DomainError("calibration requires n > 2s")
    s = p.s
    radii = np.geomspace(1e-5, 1e4, 1537)
    prof = Field.from_radial(radii, -2.0 * s * np.log(radii), TailModel("log", a=-2.0 * s, b=0.0), p.n)
    targets = np.geomspace(0.05, 5.0, n_radii)
    vals = []
    for r in targets:
        v = frac_laplacian(prof, r, p, scheme)
        vals.append(v * r ** (2.0 * s))
    vals = np.asarray(vals)
    lam = float(np.mean(vals))
    spread = float((np.max(vals) - np.min(vals)) / abs(lam))
    if lam <= 0.0:
        raise CalibrationError(f"nonpositive calibration constant {lam}")
    if spread > tol:
        raise CalibrationError(f"calibration spread {spread:.3e} exceeds {tol:.1e}")
    return lam, spread


def riesz_potential(
    f: Field,
    x,
    p: Params,
    normalizer: float = 1.0,
    region_radius: float = 1.0,
    t: float = 0.0,
    density: str = "abs",
) -> float:
    """normalizer * integral_{B_R} (|x-y|^2 + t^2)^{-(n-2s)/2} g(y) dy.

    g is |f| for density="abs" and e^f for density="exp".  Requires
    n > 2s; the kernel singularity is integrable and handled by weighted
    rules on the panels adjacent to the evaluation radius.
    """
    n, s = p.n, p.s
    if n <= 2.0 * s:
        raise DomainError("Riesz potential requires n > 2s")
    beta = n - 2.0 * s
    g = (lambda v: np.exp(v)) if density == "exp" else (lambda v: np.abs(v))
    if f.mode == "radial":
        d = float(np.sqrt(np.sum(np.atleast_1d(np.asarray(x, dtype=float)) ** 2)))
        R = region_radius
        lo = f.radii[0] * 1e-10
        base = np.unique(
            np.concatenate(
                (geometric_edges(lo, f.radii[0], True, lo, 2.0), f.radii[f.radii < R], [R])
            )
        )
        if t < 1e-12 and 0.0 < d:
            base = refine_edges_near(base, d, max(d, R) * 1e-9, ratio=1.8)
        elif t >= 1e-12:
            base = refine_edges_near(base, d, t / 4.0, ratio=1.6)
        if d < R:
            base = np.unique(np.concatenate((base, [d] if lo < d < R else [])))
        nodes, w = panel_rule(base, 10)
        kern = ring_kernel(n, d, nodes, t * t, beta)
        gv = g(f.radial_eval(nodes))
        return normalizer * float(np.sum(w * nodes ** (n - 1) * kern * gv))
    if f.n != 1:
        raise NotImplementedError("full-grid Riesz potential implemented for n=1 only")
    xx = float(np.atleast_1d(np.asarray(x, dtype=float))[0])
    R = region_radius
    edges = trim_edges(f.axis, -R, R)
    if abs(xx) < R:
        if t < 1e-12:
            edges = refine_edges_near(edges, xx, R * 1e-9, ratio=1.8)
        else:
            edges = refine_edges_near(edges, xx, t / 4.0, ratio=1.6)
        edges = np.unique(np.concatenate((edges, [xx])))
    nodes, w = panel_rule(edges, 10)
    kern = ((nodes - xx) ** 2 + t * t) ** (-beta / 2.0)
    gv = g(f.eval(nodes[:, None]))
    return normalizer * float(np.sum(w * kern * gv))


def gagliardo_form(phi: Field, p: Params) -> float:
    """(c_{n,s}/2) double integral of (phi(x)-phi(y))^2 |x-y|^{-n-2s}.

    Exact for the piecewise-linear interpolant in one dimension: every
    cell pair reduces to closed-form power moments.  Requires a zero tail
    and compact support strictly inside the grid.
    """
    if phi.tail.kind != "zero":
        raise SupportError("gagliardo_form requires a zero-tail field")
    if phi.mode != "full" or phi.n != 1:
        raise NotImplementedError("gagliardo_form is implemented for 1-D grid fields")
    vals = phi.values
    nz = np.nonzero(vals)[0]
    if nz.size == 0:
        return 0.0
    if nz[0] == 0 or nz[-1] == len(vals) - 1:
        raise SupportError("support must be strictly inside the sampled box")
    i0 = max(int(nz[0]) - 1, 0)
    i1 = min(int(nz[-1]) + 1, len(vals) - 1)
    h = phi.h
    s = p.s
    core = _kernels.gagliardo_pairs(np.ascontiguousarray(vals, dtype=float), float(h), float(s), int(i0), int(i1))
    # complement term, both orderings: one leg in the support cells, the
    # other in the region where phi vanishes identically (beyond the
    # support edges A, B; zero samples plus zero tail make this exact)
    A = phi.axis[i0]
    B = phi.axis[i1]
    W = B - A
    x_edges = phi.axis[i0 : i1 + 1]
    comp = 0.0
    # edge cells: phi is exactly p*t there (zero at the support edge), so
    # the singular side integrates in closed form and the far side is smooth
    gx, gw = panel_rule(np.array([0.0, h]), 12)
    for p_edge, far_sign in ((vals[i0 + 1] / h, +1), (vals[i1 - 1] / h, -1)):
        comp += p_edge ** 2 * h ** (3.0 - 2.0 * s) / (3.0 - 2.0 * s)
        comp += p_edge ** 2 * float(np.sum(gw * gx ** 2 * (W - gx) ** (-2.0 * s)))
    if i1 - i0 > 2:
        nodes, w = panel_rule(x_edges[1:-1], 10)
        pv = phi.eval(nodes[:, None]) ** 2
        comp += float(np.sum(w * pv * ((B - nodes) ** (-2.0 * s) + (nodes - A) ** (-2.0 * s))))
    comp /= 2.0 * s
    return 0.5 * pv_normalizer(1, s) * (core + 2.0 * comp)
