"""Sampled scalar functions on R^n with analytic far-field tails.

Two sampling modes:

  * full grid: a uniform lattice over the box [-L, L]^n (n <= 3), values
    interpolated multilinearly, tail model outside the box;
  * radial: a profile U(rho) on increasing radii, interpolated linearly
    in (log rho, U).  Below the first radius the first segment's log-slope
    is extended inward, which reproduces logarithmic singularities exactly;
    beyond the last radius the tail model applies.

Tails are restricted to {constant, a*log|x| + b, zero}; every far-field
integral in the package evaluates these analytically.
"""

import io
import math
from dataclasses import dataclass

import numpy as np

from .core import Params
from .errors import DomainError, NonFiniteSampleError, SchemaError, TailModelError
from .quadrature import (
    farfield_rule,
    gauss_legendre,
    geometric_edges,
    panel_rule,
    sphere_area,
)

__all__ = [
    "TailModel",
    "Field",
    "MorreyDatum",
    "load_field",
    "save_field",
    "ls_norm",
    "lp_ball_norm",
    "morrey_norm",
    "rescale",
]

_TAIL_KINDS = ("constant", "log", "zero")


@dataclass(frozen=True)
class TailModel:
    """Analytic model for u on |x| > L.

    constant: u = a;  log: u = a*log|x| + b;  zero: u = 0.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in _TAIL_KINDS:
            raise TailModelError(f"unknown tail kind {self.kind!r}; use one of {_TAIL_KINDS}")
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise TailModelError("tail coefficients must be finite")

    def value(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.kind == "constant":
            return np.full_like(rho, self.a)
        if self.kind == "log":
            return self.a * np.log(rho) + self.b
        return np.zeros_like(rho)


class Field:
    """Sampled scalar function; immutable after construction."""

    def __init__(self, mode, n, values, tail, L=None, radii=None):
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise NonFiniteSampleError("field samples contain NaN or inf")
        if not isinstance(tail, TailModel):
            raise TailModelError("tail must be a TailModel")
        self.mode = mode
        self.n = int(n)
        self.tail = tail
        if mode == "full":
            if self.n > 3:
                raise SchemaError("full-grid mode supports n <= 3")
            if values.ndim != self.n:
                raise SchemaError(
                    f"full-grid values must be {self.n}-dimensional, got shape {values.shape}"
                )
            m = values.shape[0]
            if any(sz != m for sz in values.shape):
                raise SchemaError("full-grid lattice must be cubic")
            if m < 2 or m % 2 == 0:
                raise SchemaError("full-grid lattice needs an odd point count >= 3")
            self.L = float(L)
            self.h = 2.0 * self.L / (m - 1)
            if self.h > self.L / 8.0 + 1e-12:
                raise SchemaError(
                    f"grid spacing h={self.h:g} exceeds L/8={self.L / 8.0:g}"
                )
            self.axis = np.linspace(-self.L, self.L, m)
            self.values = values
            self.radii = None
        elif mode == "radial":
            radii = np.asarray(radii, dtype=float)
            if radii.ndim != 1 or values.ndim != 1 or radii.size != values.size:
                raise SchemaError("radial mode needs matching 1-D radii and values")
            if radii.size < 16:
                raise SchemaError("radial mode needs at least 16 radii")
            if radii[0] <= 0.0 or np.any(np.diff(radii) <= 0.0):
                raise SchemaError("radii must be strictly increasing and positive")
            self.radii = radii
            self.values = values
            self.L = float(radii[-1])
            self.h = None
            self._log_r = np.log(radii)
            # inward log-slope from the first segment
            self._slope_in = (values[1] - values[0]) / (self._log_r[1] - self._log_r[0])
        else:
            raise SchemaError(f"unknown field mode {mode!r}")

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def from_grid(cls, values, L, tail, n=None):
        values = np.asarray(values, dtype=float)
        if n is None:
            n = values.ndim
        return cls("full", n, values, tail, L=L)

    @classmethod
    def from_radial(cls, radii, values, tail, n):
        return cls("radial", n, values, tail, radii=radii)

    @classmethod
    def constant(cls, c, n=1, L=8.0, points=129):
        vals = np.full((points,) * n, float(c))
        return cls("full", n, vals, TailModel("constant", a=float(c)), L=L)

    # ------------------------------------------------------------------
    # evaluation

    def radial_eval(self, rho):
        """Profile value at radii rho (radial mode only)."""
        rho = np.asarray(rho, dtype=float)
        out = np.empty_like(rho)
        r0, rm = self.radii[0], self.radii[-1]
        inner = rho < r0
        outer = rho > rm
        mid = ~(inner | outer)
        if np.any(mid):
            out[mid] = np.interp(np.log(rho[mid]), self._log_r, self.values)
        if np.any(inner):
            with np.errstate(divide="ignore"):
                out[inner] = self.values[0] + self._slope_in * (np.log(rho[inner]) - self._log_r[0])
        if np.any(outer):
            out[outer] = self.tail.value(rho[outer])
        return out

    def eval(self, points):
        """Values at points, shape (..., n) in full mode, plain radii in radial."""
        if self.mode == "radial":
            pts = np.asarray(points, dtype=float)
            if pts.ndim >= 1 and pts.shape[-1] == self.n and pts.ndim > 1:
                pts = np.sqrt(np.sum(pts ** 2, axis=-1))
            return self.radial_eval(np.abs(pts))
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[-1] != self.n:
            raise DomainError(f"points must have {self.n} components")
        out = np.empty(pts.shape[0])
        inside = np.all(np.abs(pts) <= self.L, axis=-1)
        if np.any(inside):
            out[inside] = self._interp_grid(pts[inside])
        if np.any(~inside):
            out[~inside] = self.tail.value(np.sqrt(np.sum(pts[~inside] ** 2, axis=-1)))
        return out if np.asarray(points).ndim > 1 else out.reshape(np.asarray(points).shape[:-1] or ())

    def _interp_grid(self, pts):
        idx_f = (pts + self.L) / self.h
        m = self.values.shape[0]
        i0 = np.clip(np.floor(idx_f).astype(int), 0, m - 2)
        frac = idx_f - i0
        if self.n == 1:
            v0 = self.values[i0[:, 0]]
            v1 = self.values[i0[:, 0] + 1]
            return v0 + frac[:, 0] * (v1 - v0)
        if self.n == 2:
            fx, fy = frac[:, 0], frac[:, 1]
            i, j = i0[:, 0], i0[:, 1]
            v = self.values
            return (
                v[i, j] * (1 - fx) * (1 - fy)
                + v[i + 1, j] * fx * (1 - fy)
                + v[i, j + 1] * (1 - fx) * fy
                + v[i + 1, j + 1] * fx * fy
            )
        fx, fy, fz = frac[:, 0], frac[:, 1], frac[:, 2]
        i, j, k = i0[:, 0], i0[:, 1], i0[:, 2]
        v = self.values
        out = np.zeros(len(pts))
        for di in (0, 1):
            for dj in (0, 1):
                for dk in (0, 1):
                    wdi = fx if di else 1 - fx
                    wdj = fy if dj else 1 - fy
                    wdk = fz if dk else 1 - fz
                    out += v[i + di, j + dj, k + dk] * wdi * wdj * wdk
        return out

    def local_spacing(self, r: float) -> float:
        """Sample spacing near radius r, used to size singular cutoffs."""
        if self.mode == "full":
            return self.h
        j = int(np.clip(np.searchsorted(self.radii, max(r, self.radii[0])), 1, len(self.radii) - 1))
        return self.radii[j] - self.radii[j - 1]

    def scaled_by(self, c: float):
        """Pointwise multiple c*u with a consistently scaled tail."""
        tail = self.tail
        new_tail = TailModel(tail.kind, a=c * tail.a, b=c * tail.b)
        if self.mode == "full":
            return Field("full", self.n, c * self.values, new_tail, L=self.L)
        return Field("radial", self.n, c * self.values, new_tail, radii=self.radii)

    def shifted_by(self, c: float):
        """Pointwise u + c; constant/log tails shift, zero tail becomes constant."""
        t = self.tail
        if t.kind == "zero":
            new_tail = TailModel("constant", a=c)
        elif t.kind == "constant":
            new_tail = TailModel("constant", a=t.a + c)
        else:
            new_tail = TailModel("log", a=t.a, b=t.b + c)
        if self.mode == "full":
            return Field("full", self.n, self.values + c, new_tail, L=self.L)
        return Field("radial", self.n, self.values + c, new_tail, radii=self.radii)


# ----------------------------------------------------------------------
# CSV I/O
#
# full grid: "# mode=full n=<n> L=<L> h=<h> tail=<kind> tail_a=<a> tail_b=<b>"
#            rows x1,...,xn,u in lexicographic lattice order
# radial:    "# mode=radial n=<n> tail=<kind> tail_a=<a> tail_b=<b>"
#            rows r,u


def _parse_header(line: str) -> dict:
    if not line.startswith("#"):
        raise SchemaError("first line must be a '# key=value ...' header")
    fields = {}
    for tok in line[1:].split():
        if "=" not in tok:
            raise SchemaError(f"malformed header token {tok!r}")
        k, v = tok.split("=", 1)
        fields[k] = v
    return fields


def load_field(source, p: Params = None) -> Field:
    """Read a Field from a CSV path or file-like object."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaError("empty field file")
    hdr = _parse_header(lines[0])
    try:
        mode = hdr["mode"]
        n = int(hdr["n"])
        tail = TailModel(hdr.get("tail", "zero"), float(hdr.get("tail_a", 0.0)), float(hdr.get("tail_b", 0.0)))
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"bad header: {exc}") from exc
    if p is not None and p.n != n:
        raise SchemaError(f"header dimension n={n} does not match Params n={p.n}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        try:
            rows.append([float(x) for x in parts])
        except ValueError as exc:
            raise SchemaError(f"non-numeric row {ln!r}") from exc
    data = np.asarray(rows, dtype=float)
    if mode == "radial":
        if data.shape[1] != 2:
            raise SchemaError("radial rows must be r,u")
        return Field("radial", n, data[:, 1], tail, radii=data[:, 0])
    if mode == "full":
        try:
            L = float(hdr["L"])
            h = float(hdr["h"])
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"full-grid header needs L and h: {exc}") from exc
        if data.shape[1] != n + 1:
            raise SchemaError(f"full-grid rows must be x1..x{n},u")
        m = int(round(2.0 * L / h)) + 1
        if data.shape[0] != m ** n:
            raise SchemaError(
                f"expected {m ** n} rows for an n={n} grid with L={L}, h={h}; got {data.shape[0]}"
            )
        values = data[:, n].reshape((m,) * n)
        return Field("full", n, values, tail, L=L)
    raise SchemaError(f"unknown mode {mode!r}")


def save_field(field: Field, path) -> None:
    buf = io.StringIO()
    t = field.tail
    if field.mode == "radial":
        buf.write(f"# mode=radial n={field.n} tail={t.kind} tail_a={t.a!r} tail_b={t.b!r}\n")
        for r, u in zip(field.radii, field.values):
            buf.write(f"{r!r},{u!r}\n")
    else:
        buf.write(
            f"# mode=full n={field.n} L={field.L!r} h={field.h!r} "
            f"tail={t.kind} tail_a={t.a!r} tail_b={t.b!r}\n"
        )
        m = field.values.shape[0]
        grids = np.meshgrid(*([field.axis] * field.n), indexing="ij")
        coords = np.stack([g.ravel() for g in grids], axis=1)
        flat = field.values.ravel()
        for row, u in zip(coords, flat):
            buf.write(",".join(repr(float(c)) for c in row) + f",{u!r}\n")
    if hasattr(path, "write"):
        path.write(buf.getvalue())
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())


# ----------------------------------------------------------------------
# exact segment primitives


def _log_exp_linear_integral(u0, u1, dx, pexp):
    """log of integral_0^dx exp(p*(u0 + (u1-u0) x/dx)) dx, elementwise."""
    u0 = np.asarray(u0, dtype=float)
    delta = pexp * (np.asarray(u1) - u0)
    small = np.abs(delta) < 1e-12
    ratio = np.where(small, 1.0 + delta / 2.0, np.expm1(np.where(small, 1.0, delta)) / np.where(small, 1.0, delta))
    return pexp * u0 + np.log(dx) + np.log(ratio)


def _log_power_segment_integral(r0, r1, u0, u1, pexp, n):
    """log of integral_{r0}^{r1} rho^{n-1} exp(p*U(rho)) drho for U log-linear."""
    lr0, lr1 = math.log(r0), math.log(r1)
    a = (u1 - u0) / (lr1 - lr0)
    b = u0 - a * lr0
    q = n + pexp * a
    if abs(q) < 1e-12:
        return pexp * b + math.log(lr1 - lr0)
    if q > 0:
        # r1^q (1 - (r0/r1)^q) / q
        return pexp * b + q * lr1 + math.log1p(-math.exp(q * (lr0 - lr1))) - math.log(q)
    return pexp * b + q * lr0 + math.log1p(-math.exp(-q * (lr0 - lr1))) - math.log(-q)


def _logsumexp(vals):
    vals = np.asarray(vals, dtype=float)
    if vals.size == 0:
        return -np.inf
    m = np.max(vals)
    if not np.isfinite(m):
        return m
    return m + math.log(np.sum(np.exp(vals - m)))


def cap_measure(n: int, d: float, r: float, rho):
    """Surface measure of {w in S^{n-1} : |d e1 - rho w| <= r}, vectorized in rho."""
    rho = np.asarray(rho, dtype=float)
    if d < 1e-14:
        return np.where(rho <= r, sphere_area(n), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        cstar = (d * d + rho ** 2 - r * r) / (2.0 * d * rho)
    cstar = np.where(rho < 1e-300, np.where(d <= r, -1.0, 1.0), cstar)
    cstar = np.clip(cstar, -1.0, 1.0)
    if n == 1:
        inner = (np.abs(d - rho) <= r).astype(float)
        outer = (d + rho <= r).astype(float)
        return inner + outer
    if n == 2:
        return 2.0 * np.arccos(cstar)
    if n == 3:
        return 2.0 * np.pi * (1.0 - cstar)
    raise DomainError("cap_measure supports n in {1,2,3}")


# ----------------------------------------------------------------------
# norms and ball integrals


def _radial_weighted_integral(field: Field, weight_fn, k=10):
    """integral_0^inf rho^{n-1} |u(rho)| weight(rho) drho via sample-aligned panels."""
    r = field.radii
    edges = np.concatenate((geometric_edges(r[0] * 1e-10, r[0], toward_a=True, h0=r[0] * 1e-10, ratio=2.0), r))
    nodes, w = panel_rule(np.unique(edges), k)
    u = np.abs(field.radial_eval(nodes))
    val = np.sum(w * nodes ** (field.n - 1) * u * weight_fn(nodes))
    return val


def ls_norm(u: Field, p: Params) -> float:
    """Weighted norm integral over R^n of |u(x)| / (1 + |x|^{n+2s})."""
    n, s = p.n, p.s
    weight = lambda rho: 1.0 / (1.0 + rho ** (n + 2.0 * s))

    def tail_abs(rho):
        return np.abs(u.tail.value(rho))

    if u.mode == "radial":
        interior = sphere_area(n) * _radial_weighted_integral(u, weight)
        rho_f, w_f = farfield_rule(u.L, 2.0 * s)
        exterior = sphere_area(n) * np.sum(w_f * rho_f ** (n - 1) * tail_abs(rho_f) * weight(rho_f))
        return float(interior + exterior)
    if n == 1:
        edges = u.axis
        nodes, w = panel_rule(edges, 10)
        interior = np.sum(w * np.abs(u.eval(nodes[:, None])) * weight(np.abs(nodes)))
        rho_f, w_f = farfield_rule(u.L, 2.0 * s)
        exterior = 2.0 * np.sum(w_f * tail_abs(rho_f) * weight(rho_f))
        return float(interior + exterior)
    # n >= 2: box quadrature + (full radial tail integral - tail over the box)
    x, wx = gauss_legendre(2)
    half = u.h / 2.0
    centers = 0.5 * (u.axis[1:] + u.axis[:-1])
    pts_1d = (centers[:, None] + half * x[None, :]).ravel()
    w_1d = np.tile(wx * half, len(centers))
    grids = np.meshgrid(*([pts_1d] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wmat = w_1d
    for _ in range(n - 1):
        wmat = np.multiply.outer(wmat, w_1d)
    wflat = wmat.ravel()
    rad = np.sqrt(np.sum(pts ** 2, axis=-1))
    interior = np.sum(wflat * np.abs(u._interp_grid(pts)) * weight(rad))
    # tail term: integral over all R^n of |tail| * weight minus its box part
    hole = geometric_edges(1e-12, 1.0, toward_a=True, h0=1e-12, ratio=2.0)
    body = np.linspace(1.0, max(u.L * math.sqrt(n), 2.0), 64)
    nodes_r, w_r = panel_rule(np.unique(np.concatenate((hole, body))), 10)
    full_tail = sphere_area(n) * np.sum(w_r * nodes_r ** (n - 1) * tail_abs(nodes_r) * weight(nodes_r))
    rho_f, w_f = farfield_rule(max(u.L * math.sqrt(n), 2.0), 2.0 * s)
    full_tail += sphere_area(n) * np.sum(w_f * rho_f ** (n - 1) * tail_abs(rho_f) * weight(rho_f))
    box_tail = np.sum(wflat * tail_abs(np.maximum(rad, 1e-300)) * weight(rad))
    return float(interior + max(full_tail - box_tail, 0.0))


def _require_ball_inside(u: Field, center, radius: float):
    center = np.atleast_1d(np.asarray(center, dtype=float))
    d = float(np.sqrt(np.sum(center ** 2)))
    if u.mode == "radial":
        if d + radius > u.L * (1.0 + 1e-12):
            raise DomainError(f"ball of radius {radius} at |x0|={d} leaves the sampled region")
    else:
        if np.max(np.abs(center)) + radius > u.L * (1.0 + 1e-12):
            raise DomainError(f"ball of radius {radius} at {center} leaves the sampled grid")
    return center, d


def _grid1d_exp_log_mass(u: Field, center: float, radius: float, pexp: float) -> float:
    """log of integral_{B_r(c)} e^{p u} dx for a 1-D grid field, exact per segment."""
    a, b = center - radius, center + radius
    cuts = u.axis[(u.axis > a) & (u.axis < b)]
    edges = np.concatenate(([a], cuts, [b]))
    u_edges = u.eval(edges[:, None])
    logs = _log_exp_linear_integral(u_edges[:-1], u_edges[1:], np.diff(edges), pexp)
    return _logsumexp(logs)


def _radial_exp_log_mass(u: Field, radius: float, pexp: float) -> float:
    """log of integral_{B_r(0)} e^{p u} dx for a radial field, exact per segment."""
    r = u.radii
    r_lo = min(r[0], radius) * 1e-14
    inner_edges = geometric_edges(r_lo, min(r[0], radius), toward_a=True, h0=r_lo, ratio=2.0)
    edges = np.unique(np.concatenate((inner_edges, r[r < radius], [radius])))
    u_edges = u.radial_eval(edges)
    logs = [
        _log_power_segment_integral(edges[i], edges[i + 1], u_edges[i], u_edges[i + 1], pexp, u.n)
        for i in range(len(edges) - 1)
    ]
    return math.log(sphere_area(u.n)) + _logsumexp(np.asarray(logs))


def _radial_offcenter_mass(u: Field, d: float, radius: float, fn, k=12) -> float:
    """integral_{B_r(x0)} fn(u) dx for radial u and |x0| = d > 0, via cap weights."""
    lo, hi = max(d - radius, 0.0), d + radius
    r = u.radii
    base = np.unique(np.concatenate((r[(r > lo) & (r < hi)], [lo, hi])))
    if lo <= 0.0:
        hole = geometric_edges(1e-14 * hi, base[base > 0][0] if np.any(base > 0) else hi, True, 1e-14 * hi, 2.0)
        base = np.unique(np.concatenate((base[base > 0], hole)))
    edges = np.unique(np.concatenate((base, [abs(d - radius)] if abs(d - radius) > base[0] else [])))
    nodes, w = panel_rule(edges, k)
    vals = fn(u.radial_eval(nodes))
    return float(np.sum(w * nodes ** (u.n - 1) * vals * cap_measure(u.n, d, radius, nodes)))


def _gridnd_mass(u: Field, center, radius: float, fn) -> float:
    """Cell sum with midpoint-fraction boundary weights (full grids, n >= 2)."""
    centers = 0.5 * (u.axis[1:] + u.axis[:-1])
    grids = np.meshgrid(*([centers] * u.n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    dist = np.sqrt(np.sum((pts - center) ** 2, axis=-1))
    diag = u.h * math.sqrt(u.n)
    frac = np.clip(0.5 + (radius - dist) / diag, 0.0, 1.0)
    sel = frac > 0.0
    if not np.any(sel):
        return 0.0
    vals = fn(u._interp_grid(pts[sel]))
    return float(np.sum(vals * frac[sel]) * u.h ** u.n)


def lp_ball_norm(u: Field, exponent: float, center, radius: float, exponentiate: bool = False) -> float:
    """integral_{B_r(x0)} |u|^p dx, or integral of e^{p u} when exponentiate is set.

    Exponentials accumulate in log space, so steep negative or singular
    profiles do not overflow.
    """
    if exponent < 1.0:
        raise DomainError(f"exponent must be >= 1, got {exponent}")
    center, d = _require_ball_inside(u, center, radius)
    if exponentiate:
        if u.mode == "full" and u.n == 1:
            return float(math.exp(_grid1d_exp_log_mass(u, float(center[0]), radius, exponent)))
        if u.mode == "radial" and d < 1e-14:
            return float(math.exp(_radial_exp_log_mass(u, radius, exponent)))
        if u.mode == "radial":
            return _radial_offcenter_mass(u, d, radius, lambda v: np.exp(exponent * (v - 0.0)))
        return _gridnd_mass(u, center, radius, lambda v: np.exp(exponent * v))
    fn = lambda v: np.abs(v) ** exponent
    if u.mode == "full" and u.n == 1:
        a, b = float(center[0]) - radius, float(center[0]) + radius
        cuts = u.axis[(u.axis > a) & (u.axis < b)]
        edges = np.concatenate(([a], cuts, [b]))
        nodes, w = panel_rule(edges, 10)
        return float(np.sum(w * fn(u.eval(nodes[:, None]))))
    if u.mode == "radial" and d < 1e-14:
        r_lo = min(u.radii[0], radius) * 1e-12
        inner = geometric_edges(r_lo, min(u.radii[0], radius), True, r_lo, 2.0)
        edges = np.unique(np.concatenate((inner, u.radii[u.radii < radius], [radius])))
        nodes, w = panel_rule(edges, 10)
        return float(sphere_area(u.n) * np.sum(w * nodes ** (u.n - 1) * fn(u.radial_eval(nodes))))
    if u.mode == "radial":
        return _radial_offcenter_mass(u, d, radius, fn)
    return _gridnd_mass(u, center, radius, fn)


@dataclass(frozen=True)
class MorreyDatum:
    p: float
    domain_radius: float
    norm_value: float


def morrey_norm(f: Field, p: float, domain_radius: float, centers_per_axis: int = 17) -> MorreyDatum:
    """sup over sampled balls of integral_{Omega cap B_r} |f| / r^{n(1-1/p)}.

    Centers run over a lattice subsample of Omega = B_domain_radius(0);
    radii are dyadic from the grid resolution up to 2*domain_radius.
    """
    if p <= 1.0:
        raise DomainError("Morrey exponent must exceed 1")
    n = f.n
    scale = lambda r: r ** (n * (1.0 - 1.0 / p))
    h0 = f.h if f.mode == "full" else float(np.min(np.diff(f.radii)))
    radii = []
    r = max(h0, domain_radius / 256.0)
    while r <= 2.0 * domain_radius * (1.0 + 1e-12):
        radii.append(r)
        r *= 2.0
    best = 0.0
    if f.mode == "radial":
        cand = f.radii[f.radii <= domain_radius]
        step = max(1, len(cand) // centers_per_axis)
        centers = np.concatenate(([0.0], cand[::step]))
        for d in centers:
            for r in radii:
                lo = max(d - r, 0.0)
                hi = min(d + r, domain_radius)
                if hi <= lo:
                    continue
                mass = _radial_offcenter_clipped(f, d, r, domain_radius)
                best = max(best, mass / scale(r))
        return MorreyDatum(p=p, domain_radius=domain_radius, norm_value=float(best))
    ax = f.axis[np.abs(f.axis) <= domain_radius]
    step = max(1, len(ax) // centers_per_axis)
    ax = ax[::step]
    grids = np.meshgrid(*([ax] * n), indexing="ij")
    centers = np.stack([g.ravel() for g in grids], axis=-1)
    centers = centers[np.sqrt(np.sum(centers ** 2, axis=-1)) <= domain_radius]
    for c in centers:
        for r in radii:
            mass = _grid_mass_clipped(f, c, r, domain_radius)
            best = max(best, mass / scale(r))
    return MorreyDatum(p=p, domain_radius=domain_radius, norm_value=float(best))


def _radial_offcenter_clipped(f: Field, d: float, r: float, R: float) -> float:
    fn = lambda v: np.abs(v)
    lo, hi = max(d - r, 0.0), min(d + r, R)
    if hi <= lo and d > 1e-14:
        return 0.0
    if d < 1e-14:
        rr = min(r, R)
        r_lo = min(f.radii[0], rr) * 1e-12
        inner = geometric_edges(r_lo, min(f.radii[0], rr), True, r_lo, 2.0)
        edges = np.unique(np.concatenate((inner, f.radii[f.radii < rr], [rr])))
        nodes, w = panel_rule(edges, 10)
        return float(sphere_area(f.n) * np.sum(w * nodes ** (f.n - 1) * fn(f.radial_eval(nodes))))
    base = np.unique(np.concatenate((f.radii[(f.radii > lo) & (f.radii < hi)], [lo, hi])))
    if base[0] <= 0.0:
        base = base[base > 0]
    if lo <= 0.0:
        hole = geometric_edges(1e-14 * hi, base[0], True, 1e-14 * hi, 2.0)
        base = np.unique(np.concatenate((base, hole)))
    nodes, w = panel_rule(base, 10)
    vals = fn(f.radial_eval(nodes))
    return float(np.sum(w * nodes ** (f.n - 1) * vals * cap_measure(f.n, d, r, nodes)))


def _grid_mass_clipped(f: Field, center, r: float, R: float) -> float:
    if f.n == 1:
        a = max(center[0] - r, -R)
        b = min(center[0] + r, R)
        if b <= a:
            return 0.0
        cuts = f.axis[(f.axis > a) & (f.axis < b)]
        edges = np.concatenate(([a], cuts, [b]))
        nodes, w = panel_rule(edges, 10)
        return float(np.sum(w * np.abs(f.eval(nodes[:, None]))))
    centers = 0.5 * (f.axis[1:] + f.axis[:-1])
    grids = np.meshgrid(*([centers] * f.n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    dist_c = np.sqrt(np.sum((pts - center) ** 2, axis=-1))
    dist_0 = np.sqrt(np.sum(pts ** 2, axis=-1))
    diag = f.h * math.sqrt(f.n)
    frac = np.clip(0.5 + (r - dist_c) / diag, 0.0, 1.0) * np.clip(0.5 + (R - dist_0) / diag, 0.0, 1.0)
    sel = frac > 0.0
    if not np.any(sel):
        return 0.0
    vals = np.abs(f._interp_grid(pts[sel]))
    return float(np.sum(vals * frac[sel]) * f.h ** f.n)


def rescale(u: Field, x0, lam: float, p: Params) -> Field:
    """u_lambda(x) = u(x0 + lambda x) + 2 s log(lambda), resampled on u's lattice.

    The tail model transforms exactly for x0 = 0; for x0 != 0 the log tail
    keeps its slope and absorbs the shift into the offset.  The rescaled
    window must stay inside the sampled region plus tail coverage.
    """
    if not (0.0 < lam <= 1.0):
        raise DomainError(f"lambda must lie in (0, 1], got {lam}")
    shift = 2.0 * p.s * math.log(lam)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    t = u.tail
    if u.mode == "radial":
        if float(np.sqrt(np.sum(x0 ** 2))) > 1e-14:
            raise DomainError("radial fields rescale about the origin only")
        new_vals = u.radial_eval(lam * u.radii) + shift
        new_tail = _transformed_tail(t, lam, shift)
        return Field("radial", u.n, new_vals, new_tail, radii=u.radii)
    grids = np.meshgrid(*([u.axis] * u.n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    new_vals = (u.eval(x0[None, :] + lam * pts) + shift).reshape(u.values.shape)
    new_tail = _transformed_tail(t, lam, shift)
    # the three tail forms can only represent the rescaled far field when the
    # parent is already tail-like beyond the shrunk window; probe and refuse
    probe = np.zeros((3, u.n))
    probe[:, 0] = u.L * np.array([1.25, 2.0, 8.0])
    got = u.eval(x0[None, :] + lam * probe) + shift
    want = new_tail.value(np.sqrt(np.sum(probe ** 2, axis=-1)))
    scale = 1.0 + float(np.max(np.abs(u.values)))
    if np.max(np.abs(got - want)) > 0.02 * scale:
        raise DomainError(
            "rescaled window leaves the region the tail model can represent "
            f"(mismatch {np.max(np.abs(got - want)):.3g})"
        )
    return Field("full", u.n, new_vals, new_tail, L=u.L)


def _transformed_tail(t: TailModel, lam: float, shift: float) -> TailModel:
    if t.kind == "constant":
        return TailModel("constant", a=t.a + shift)
    if t.kind == "zero":
        return TailModel("constant", a=shift) if abs(shift) > 0 else t
    return TailModel("log", a=t.a, b=t.b + t.a * math.log(lam) + shift)
