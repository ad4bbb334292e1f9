"""Capacity-achieving inputs for the amplitude-constrained AWGN channel.

The optimum is a finite discrete law, symmetric about the origin.  The
solver alternates three steps on a finite support:

* weights by Blahut-Arimoto multiplicative updates, finished by an
  active-set Newton step on the equalities ``i(x_k) = C``;
* locations by bounded quasi-Newton ascent on ``I(X; Y)`` using the analytic
  gradient ``dI/dx_k = w_k i'(x_k)``;
* a joint Newton polish of the stationarity system.

A scan of ``i(x)`` over ``[-A, A]`` then either certifies the result
(``max_x i(x) <= C + kkt_tol``) or supplies the location of the next mass
point.

With ``enforce_symmetry`` the unknowns are *orbits*: a half-location
``u >= 0`` carrying total mass ``m`` split evenly between ``-u`` and ``+u``
(a single point when ``u = 0``).  Without it every point is its own orbit.
"""

from dataclasses import dataclass, field, replace
import json
import logging
import math
from typing import Optional

import numpy as np
from scipy import optimize

from . import kernels
from .mixture import (
    SMOOTH_RADIUS, DiscreteInput, GridEvaluator, MixtureDensity, check_amplitude,
)
from .quadrature import DEFAULT_QUAD, golden_section_max

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    A: float
    kkt_tol: float = 1e-8
    weight_tol: float = 1e-12
    location_tol: float = 1e-10
    grid_size: int = 2001
    max_support: int = 200
    enforce_symmetry: bool = True
    warm_start: Optional[DiscreteInput] = None
    max_rounds: int = 80
    ba_max_iter: int = 5000
    prune_tol: float = 1e-9
    merge_tol: float = 1e-6
    refine_count: int = 5
    new_point_mass: float = 1e-2
    birth_gap: float = 0.05
    coalesce_tol: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "A", check_amplitude(self.A))
        for name in ("kkt_tol", "weight_tol", "location_tol", "prune_tol", "merge_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.grid_size < 101:
            raise ValueError("grid_size must be at least 101")
        if self.max_support < 1:
            raise ValueError("max_support must be positive")


@dataclass
class KktReport:
    max_violation: float
    argmax: float
    equality_residuals: np.ndarray
    certified: bool
    capacity: float

    @property
    def max_residual(self):
        return float(np.max(self.equality_residuals)) if self.equality_residuals.size else 0.0


@dataclass
class SolverResult:
    input: DiscreteInput
    capacity: float
    kkt: KktReport
    iterations: list = field(default_factory=list)
    status: str = "certified"

    @property
    def A(self):
        return self.input.A

    @property
    def K(self):
        return self.input.K

    @property
    def certified(self):
        return self.kkt.certified

    def to_dict(self):
        return {
            "A": self.input.A,
            "capacity_nats": self.capacity,
            "points": [float(v) for v in self.input.points],
            "weights": [float(v) for v in self.input.weights],
            "kkt_max_violation": self.kkt.max_violation,
            "certified": bool(self.kkt.certified),
            "trace": self.iterations,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data, cfg=None):
        """Rebuild a result and re-run the KKT scan on the stored input."""
        d = DiscreteInput(data["points"], data["weights"], data["A"])
        cfg = cfg or SolverConfig(A=d.A)
        rep = kkt_report(d, float(data["capacity_nats"]), cfg)
        status = "certified" if rep.certified else "uncertified"
        return cls(d, float(data["capacity_nats"]), rep, list(data.get("trace", [])), status)


# ---------------------------------------------------------------------------
# orbit bookkeeping
# ---------------------------------------------------------------------------

def _expand(u, m, sym):
    if not sym:
        order = np.argsort(u, kind="stable")
        return u[order], m[order]
    pts, wts = [], []
    for uj, mj in zip(u, m):
        if uj == 0.0:
            pts.append(0.0)
            wts.append(mj)
        else:
            pts += [-uj, uj]
            wts += [0.5 * mj, 0.5 * mj]
    pts, wts = np.array(pts), np.array(wts)
    order = np.argsort(pts, kind="stable")
    return pts[order], wts[order]


def _evaluator(u, m, sym, A):
    pts, wts = _expand(u, m, sym)
    pos = wts > 0
    return GridEvaluator(pts[pos], wts[pos], A)


def _orbits_from_input(d, sym):
    """Fold a discrete input onto orbits (absolute locations when ``sym``)."""
    if not sym:
        return d.points.copy(), d.weights.copy()
    acc = {}
    for x, w in zip(np.abs(d.points), d.weights):
        key = float(x)
        acc[key] = acc.get(key, 0.0) + float(w)
    u = np.array(sorted(acc))
    m = np.array([acc[k] for k in u])
    return u, m / m.sum()


def _to_input(u, m, sym, A):
    pts, wts = _expand(u, m, sym)
    return DiscreteInput.normalized(pts, wts, A)


def _sort_orbits(u, m):
    order = np.argsort(u, kind="stable")
    return u[order], m[order]


def _merge_prune(u, m, sym, A, cfg, merge_tol=None):
    """Drop tiny weights, merge close orbits, snap near-boundary locations."""
    merge_tol = cfg.merge_tol if merge_tol is None else merge_tol
    keep = m > cfg.prune_tol
    u, m = u[keep], m[keep] / m[keep].sum()
    u = np.clip(u, 0.0 if sym else -A, A)
    u[np.abs(A - np.abs(u)) < cfg.location_tol] = np.sign(u[np.abs(A - np.abs(u)) < cfg.location_tol]) * A
    if sym:
        # an orbit at u represents two points 2u apart
        u[u < 0.5 * merge_tol] = 0.0
    u, m = _sort_orbits(u, m)
    out_u, out_m = [u[0]], [m[0]]
    for uj, mj in zip(u[1:], m[1:]):
        if uj - out_u[-1] < merge_tol:
            tot = out_m[-1] + mj
            if out_u[-1] in (0.0, A, -A):
                loc = out_u[-1]
            elif abs(uj) == A:
                loc = uj
            else:
                loc = (out_u[-1] * out_m[-1] + uj * mj) / tot
            out_u[-1], out_m[-1] = loc, tot
        else:
            out_u.append(uj)
            out_m.append(mj)
    return np.array(out_u), np.array(out_m)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def _orbit_logpdfs(u, sym, y):
    """Log-density of each orbit's own output component on the grid."""
    out = np.empty((u.size, y.size))
    for j, uj in enumerate(u):
        if sym and uj != 0.0:
            pts, lw = np.array([-uj, uj]), np.log([0.5, 0.5])
        else:
            pts, lw = np.array([uj]), np.zeros(1)
        out[j] = kernels.mixture_logpdf(y, pts, lw)
    return out


def _weight_jacobian(ev, u, sym):
    """``J[a, b] = d i(u_a) / d m_b = -int phi(y - u_a) g_b(y) / f(y) dy``."""
    lg = _orbit_logpdfs(u, sym, ev.y)
    J = np.empty((u.size, u.size))
    for b in range(u.size):
        ratio = np.exp(lg[b] - ev.log_f)
        s0, _, _ = kernels.gauss_smooth(u, ev.y0, ev.step, ratio, SMOOTH_RADIUS)
        J[:, b] = -s0
    return J


def _newton_weights(u, m, sym, A, tol, max_iter=60):
    """Active-set Newton for the weight KKT system on a fixed support.

    Solves ``i(u_j) = C`` on the active orbits with ``sum m = 1`` and checks
    ``i(u_j) <= C`` on the inactive ones.  Returns ``(m, C)`` or None.
    """
    m = np.asarray(m, dtype=float).copy()
    active = m > 0
    for _ in range(max_iter):
        ua, ma = u[active], m[active]
        ev = _evaluator(ua, ma, sym, A)
        iv = ev.info(u)
        C = float(ma @ iv[active])
        viol_in = np.abs(iv[active] - C).max()
        out = ~active & (iv > C + tol)
        if viol_in <= tol and not out.any():
            return m / m.sum(), C
        if out.any():
            j = np.flatnonzero(out)[np.argmax(iv[out])]
            active[j] = True
            m[j] = 1e-6
            m /= m.sum()
            continue
        n = ua.size
        J = _weight_jacobian(ev, ua, sym)
        # [J -1; 1' 0] [dm; dC] = [C - i; 0]
        M = np.zeros((n + 1, n + 1))
        M[:n, :n] = J
        M[:n, n] = -1.0
        M[n, :n] = 1.0
        rhs = np.concatenate([C - iv[active], [0.0]])
        try:
            dm = np.linalg.solve(M, rhs)[:n]
        except np.linalg.LinAlgError:
            return None
        target = ma + dm
        if np.all(target > 0):
            m[active] = target
        else:
            neg = target <= 0
            t = float(np.min(ma[neg] / (ma[neg] - target[neg])))
            if t < 1e-3:
                # the orbit heads for zero mass: drop it
                k = np.flatnonzero(active)[np.flatnonzero(neg)[np.argmin(target[neg])]]
                active[k] = False
                m[k] = 0.0
            else:
                m[active] = ma + 0.9 * t * dm
        m = np.where(active, m, 0.0)
        m /= m.sum()
    return None


def _fd_jacobian(fn, z, r0, h):
    J = np.empty((r0.size, z.size))
    for j in range(z.size):
        step = h * max(1.0, abs(z[j]))
        zp, zm = z.copy(), z.copy()
        zp[j] += step
        zm[j] -= step
        J[:, j] = (fn(zp) - fn(zm)) / (2.0 * step)
    return J


def _ba_orbits(u, m, sym, A, cfg, newton=True):
    """Blahut-Arimoto on orbit masses; returns ``(m, I, gap, converged)``.

    ``gap = max_j i(u_j) - I`` over orbits with positive mass.  Newton
    finishing is attempted after 10, 20, 40, ... multiplicative updates.
    """
    m = m / m.sum()
    gap = math.inf
    lower = 0.0
    next_newton = 10
    for it in range(cfg.ba_max_iter):
        ev = _evaluator(u, m, sym, A)
        iv = ev.info(u)
        lower = float(m @ iv)
        gap = float(iv.max() - lower)
        if gap <= cfg.weight_tol:
            return m, lower, gap, True
        if newton and it == next_newton:
            next_newton *= 2
            res = _newton_weights(u, m, sym, A, 0.1 * cfg.weight_tol)
            if res is not None:
                m_new, low = res
                keep = m_new > 0
                ev = _evaluator(u[keep], m_new[keep], sym, A)
                iv_all = ev.info(u)
                g = float(iv_all.max() - low)
                if g <= cfg.weight_tol:
                    return m_new, low, g, True
        m = m * np.exp(iv - iv.max())
        m /= m.sum()
    return m, lower, gap, False


def optimize_weights(support, cfg, init_weights=None):
    """Capacity-maximising weights for a fixed support.

    Returns ``(weights, capacity_estimate)`` with weights aligned to the
    sorted support.  At exit ``max_k i(x_k) - I <= weight_tol``; the
    estimate ``I`` is a lower bound on the fixed-support optimum and
    ``max_k i(x_k)`` an upper bound.  Weights may be zero for points the
    optimum does not use.
    """
    x = np.sort(np.asarray(support, dtype=float))
    A = cfg.A
    if np.any(np.abs(x) > A) or np.any(np.diff(x) <= 0):
        raise ValueError("support points must be distinct and inside [-A, A]")
    m0 = np.full(x.size, 1.0 / x.size) if init_weights is None else np.asarray(init_weights, float)
    sym = cfg.enforce_symmetry and np.allclose(x, -x[::-1], atol=0.0, rtol=0.0)
    if sym:
        u, mu = _orbits_from_input(DiscreteInput.normalized(x, m0, A), True)
        mu, cap, gap, ok = _ba_orbits(u, mu, True, A, cfg)
        full = np.zeros(x.size)
        for uj, mj in zip(u, mu):
            if uj == 0.0:
                full[x == 0.0] = mj
            else:
                full[x == uj] = 0.5 * mj
                full[x == -uj] = 0.5 * mj
        w = full
    else:
        w, cap, gap, ok = _ba_orbits(x, m0, False, A, cfg)
    if not ok:
        log.warning("weight optimisation stopped with sandwich gap %.3g", gap)
    return w / w.sum(), cap


# ---------------------------------------------------------------------------
# locations
# ---------------------------------------------------------------------------

def _location_ascent(u, m, sym, A, cfg, max_iter=200):
    lo = 0.0 if sym else -A

    def neg_info(z):
        ev = _evaluator(z, m, sym, A)
        _, d1, _ = ev.derivs(z)
        return -ev.mutual_information(), -(m * d1)

    res = optimize.minimize(
        neg_info, u, jac=True, method="L-BFGS-B",
        bounds=[(lo, A)] * u.size,
        options={"maxiter": max_iter, "ftol": 1e-16, "gtol": 1e-13},
    )
    z = np.clip(res.x, lo, A)
    if -res.fun + 1e-15 < -neg_info(u)[0]:
        # line-search failure: keep the last safe iterate
        return u.copy(), False
    return z, bool(res.success)


def _joint_ascent(u, m, sym, A, cfg, max_iter=500):
    """Quasi-Newton ascent on ``I`` over locations and softmax weights jointly.

    ``dI/du_b = m_b i'(u_b)`` and, with ``m = softmax(t)``,
    ``dI/dt_b = m_b (i(u_b) - I)``.
    """
    lo = 0.0 if sym else -A
    n = u.size

    def neg_info(z):
        uu, t = z[:n], z[n:]
        mm = np.exp(t - t.max())
        mm /= mm.sum()
        ev = _evaluator(uu, mm, sym, A)
        i0, i1, _ = ev.derivs(uu)
        val = float(mm @ i0)
        return -val, -np.concatenate([mm * i1, mm * (i0 - val)])

    z0 = np.concatenate([u, np.log(np.maximum(m, 1e-300))])
    res = optimize.minimize(
        neg_info, z0, jac=True, method="L-BFGS-B",
        bounds=[(lo, A)] * n + [(-700.0, 50.0)] * n,
        options={"maxiter": max_iter, "ftol": 1e-16, "gtol": 1e-14, "maxcor": 30},
    )
    if res.fun > neg_info(z0)[0]:
        return u, m
    uu, t = np.clip(res.x[:n], lo, A), res.x[n:]
    mm = np.exp(t - t.max())
    return uu, mm / mm.sum()


def optimize_locations(d, cfg):
    """Move mass points of ``d`` (weights fixed) to a stationary point of I.

    Boundary points may stay at ``+-A`` (projected ascent).  With
    ``enforce_symmetry`` only the non-negative half is optimised, so a
    symmetric start yields an exactly symmetric output.
    """
    sym = cfg.enforce_symmetry and d.is_symmetric()
    u, m = _orbits_from_input(d, sym)
    z, _ = _location_ascent(u, m, sym, d.A, cfg)
    z, m = _merge_prune(z, m, sym, d.A, cfg)
    return _to_input(z, m, sym, d.A)


# ---------------------------------------------------------------------------
# joint Newton polish of the stationarity system
# ---------------------------------------------------------------------------

def _orbit_terms(u, sym, y, log_f):
    """Per-orbit ``g_b / f`` and ``(d g_b / d u_b) / f`` tabulated on ``y``."""
    n = u.size
    ratio = np.empty((n, y.size))
    dratio = np.empty((n, y.size))
    for b, ub in enumerate(u):
        rp = np.exp(-0.5 * (y - ub) ** 2 - kernels.LOG_SQRT_2PI - log_f)
        if sym and ub != 0.0:
            rm = np.exp(-0.5 * (y + ub) ** 2 - kernels.LOG_SQRT_2PI - log_f)
            ratio[b] = 0.5 * (rp + rm)
            dratio[b] = 0.5 * ((y - ub) * rp - (y + ub) * rm)
        else:
            ratio[b] = rp
            dratio[b] = (y - ub) * rp
    return ratio, dratio


def _kkt_jacobian(ev, u, m, fi, sym):
    """Jacobian of ``[i(u_a) - C, i'(u_f), sum m - 1]`` w.r.t. ``[m, u_f, C]``.

    ``i(x) = -h(Z) - int phi(y - x) log f(y) dy`` depends on the orbit
    parameters through ``f`` and, for the residual rows, on the evaluation
    point itself.
    """
    n, nf = u.size, fi.size
    ratio, dratio = _orbit_terms(u, sym, ev.y, ev.log_f)
    J = np.zeros((n + nf + 1, n + nf + 1))
    _, d1, d2 = ev.derivs(u)
    smooth = lambda v: kernels.gauss_smooth(u, ev.y0, ev.step, v, SMOOTH_RADIUS)
    for b in range(n):
        s0, s1, _ = smooth(ratio[b])
        J[:n, b] = -s0
        J[n:n + nf, b] = -s1[fi]
    for col, b in enumerate(fi):
        s0, s1, _ = smooth(m[b] * dratio[b])
        J[:n, n + col] = -s0
        J[n:n + nf, n + col] = -s1[fi]
        # the evaluation point moves with the orbit
        J[b, n + col] += d1[b]
        J[n + col, n + col] += d2[b]
    J[:n, -1] = -1.0
    J[-1, :n] = 1.0
    return J


def _newton_kkt(u, m, sym, A, max_iter, tol):
    """Newton on ``i(u_j) = C``, ``i'(u_j) = 0`` (free orbits), ``sum m = 1``.

    Returns ``(u, m, residual, blocked)`` where ``blocked`` is the index of an
    orbit whose mass the iteration tries to push through zero, else None.
    """
    lo = 0.0 if sym else -A
    free = (u > lo + 1e-8) & (u < A - 1e-8) if sym else np.abs(u) < A - 1e-8
    fi = np.flatnonzero(free)
    n, nf = u.size, fi.size

    def unpack(z):
        uu = u.copy()
        uu[fi] = z[n:n + nf]
        if sym:
            uu = np.abs(uu)
        return uu, z[:n], z[-1]

    def resid(z):
        uu, mm, C = unpack(z)
        ev = _evaluator(uu, mm, sym, A)
        i0, i1, _ = ev.derivs(uu)
        return ev, np.concatenate([i0 - C, i1[fi], [mm.sum() - 1.0]])

    ev = _evaluator(u, m, sym, A)
    z = np.concatenate([m, u[fi], [float(m @ ev.info(u))]])
    ev, r = resid(z)
    norm = np.linalg.norm(r)
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= tol:
            break
        uu, mm, _ = unpack(z)
        J = _kkt_jacobian(ev, uu, mm, fi, sym)
        try:
            step = -np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            break
        dm = step[:n]
        t = 1.0
        neg = z[:n] + dm <= 0
        if neg.any():
            ratios = z[:n][neg] / -dm[neg]
            if ratios.min() < 1e-3:
                return uu, mm, np.max(np.abs(r)), int(np.flatnonzero(neg)[np.argmin(ratios)])
            t = 0.9 * ratios.min()
        for _ in range(40):
            zn = z + t * step
            un, _, _ = unpack(zn)
            if np.all(un <= A):
                evn, rn = resid(zn)
                if np.linalg.norm(rn) < norm:
                    break
            t *= 0.5
        else:
            break
        z, r, ev, norm = zn, rn, evn, np.linalg.norm(rn)
    uu, mm, _ = unpack(z)
    return uu, mm, np.max(np.abs(r)), None


def _polish(u, m, sym, A, cfg, max_iter=40, tol=1e-14, accept=1e-12, depth=0):
    """Joint Newton polish.

    When the full system does not converge, orbits whose mass collapses are
    candidates for removal: the reduced system is solved and the removal is
    kept only if the dropped location then satisfies ``i(u) <= C``.
    """
    uu, mm, res, blocked = _newton_kkt(u, m, sym, A, max_iter, tol)
    if res <= accept or u.size == 1 or depth >= 2:
        return uu, mm / mm.sum(), res
    order = [int(k) for k in np.argsort(mm) if mm[k] < 0.1 * mm.max()]
    if blocked is not None:
        if blocked in order:
            order.remove(blocked)
        order.insert(0, blocked)
    for drop in order[:2]:
        keep = np.arange(u.size) != drop
        m2 = np.maximum(mm[keep], 1e-12)
        ru, rm, rres = _polish(uu[keep], m2 / m2.sum(), sym, A, cfg, max_iter, tol, accept, depth + 1)
        if rres > accept:
            continue
        ev = _evaluator(ru, rm, sym, A)
        C = ev.mutual_information()
        if ev.info(np.array([uu[drop]]))[0] <= C + 1e-10:
            return ru, rm, rres
    return uu, mm / mm.sum(), res


# ---------------------------------------------------------------------------
# KKT scan
# ---------------------------------------------------------------------------

def _scan(ev, lo, hi, cfg):
    xs = np.linspace(lo, hi, cfg.grid_size)
    iv = ev.info(xs)
    interior = np.flatnonzero((iv[1:-1] >= iv[:-2]) & (iv[1:-1] >= iv[2:])) + 1
    cand = list(interior)
    if iv[0] >= iv[1]:
        cand.append(0)
    if iv[-1] >= iv[-2]:
        cand.append(xs.size - 1)
    cand.sort(key=lambda k: -iv[k])
    best_x, best_v = float(xs[np.argmax(iv)]), float(iv.max())
    f = lambda t: float(ev.info(np.array([t]))[0])
    for k in cand[: cfg.refine_count]:
        a, b = xs[max(k - 1, 0)], xs[min(k + 1, xs.size - 1)]
        x, v = golden_section_max(f, a, b, tol=1e-12)
        if v > best_v:
            best_x, best_v = float(x), float(v)
    return best_x, best_v


def kkt_report(d, capacity, cfg):
    """KKT certificate of a candidate optimum.

    ``max_violation = max_{|x| <= A} i(x) - capacity`` on a refined grid;
    ``equality_residuals[k] = |i(x_k) - capacity|``.  Certified iff both are
    within ``cfg.kkt_tol``.
    """
    ev = GridEvaluator(d.points, d.weights, d.A)
    lo = 0.0 if d.is_symmetric(1e-14) else -d.A
    x_star, v_star = _scan(ev, lo, d.A, cfg)
    res = np.abs(ev.info(d.points) - capacity)
    viol = v_star - capacity
    cert = bool(viol <= cfg.kkt_tol and np.all(res <= cfg.kkt_tol))
    return KktReport(float(viol), x_star, res, cert, float(capacity))


# ---------------------------------------------------------------------------
# outer loop
# ---------------------------------------------------------------------------

def _initial_orbits(cfg, sym):
    A = cfg.A
    if cfg.warm_start is None:
        d = DiscreteInput([-A, A], [0.5, 0.5], A)
    else:
        w = cfg.warm_start
        scale = A / w.A
        d = DiscreteInput(np.clip(w.points * scale, -A, A), w.weights, A)
    if sym and not d.is_symmetric():
        half = np.abs(d.points)
        d = DiscreteInput.normalized(np.concatenate([half, -half]),
                                     np.concatenate([d.weights, d.weights]), A)
    return _orbits_from_input(d, sym)


def _refine_support(u, m, sym, A, cfg):
    """Weights, then joint ascent over weights and locations, then polish.

    Intermediate iterates coalesce orbits closer than ``cfg.coalesce_tol``:
    near-coincident points leave ``I`` flat along the split direction and
    make the Newton systems singular.
    """
    ct = cfg.coalesce_tol
    m, _, _, _ = _ba_orbits(u, m, sym, A, cfg)
    u, m = _merge_prune(u, m, sym, A, cfg, ct)
    u, m = _joint_ascent(u, m, sym, A, cfg)
    u, m = _merge_prune(u, m, sym, A, cfg, ct)
    m, _, _, _ = _ba_orbits(u, m, sym, A, cfg)
    u, m = _merge_prune(u, m, sym, A, cfg, ct)
    pu, pm, res = _polish(u, m, sym, A, cfg)
    if res < 1e-11:
        u, m = _merge_prune(pu, pm, sym, A, cfg)
        # re-solve weights exactly on the polished support
        m, _, _, _ = _ba_orbits(u, m, sym, A, cfg)
        u, m = _merge_prune(u, m, sym, A, cfg)
    return _drop_inactive(u, m, sym, A, cfg)


def _drop_inactive(u, m, sym, A, cfg):
    """Remove light orbits with ``i(u) < C``; they carry no mass at the optimum."""
    ev = _evaluator(u, m, sym, A)
    iv = ev.info(u)
    C = float(m @ iv)
    dead = (m < 1e-3) & (iv < C - cfg.kkt_tol)
    if not dead.any() or dead.all():
        return u, m
    u, m = u[~dead], m[~dead] / m[~dead].sum()
    m, _, _, _ = _ba_orbits(u, m, sym, A, cfg)
    return _merge_prune(u, m, sym, A, cfg)


def solve_capacity(cfg):
    """Compute ``C(A)`` and a KKT-certified capacity-achieving input."""
    A = cfg.A
    sym = cfg.enforce_symmetry
    u, m = _initial_orbits(cfg, sym)
    trace = []
    prev_k = _to_input(u, m, sym, A).K
    status = "budget-exceeded"
    rep = None
    d = None
    for rnd in range(cfg.max_rounds):
        u, m = _refine_support(u, m, sym, A, cfg)
        d = _to_input(u, m, sym, A)
        ev = GridEvaluator(d.points, d.weights, A)
        cap = ev.mutual_information()
        rep = kkt_report(d, cap, cfg)
        entry = {
            "round": rnd,
            "K": d.K,
            "capacity_nats": cap,
            "max_violation": rep.max_violation,
            "birth": None,
        }
        if rep.certified and d.K == prev_k:
            trace.append(entry)
            status = "certified"
            break
        if rep.max_violation > cfg.kkt_tol:
            if d.K >= cfg.max_support:
                trace.append(entry)
                status = "max-support"
                break
            x_new = abs(rep.argmax) if sym else rep.argmax
            entry["birth"] = x_new
            if np.min(np.abs(u - x_new)) >= cfg.birth_gap:
                m = np.concatenate([m * (1.0 - cfg.new_point_mass), [cfg.new_point_mass]])
                u = np.concatenate([u, [x_new]])
                u, m = _sort_orbits(u, m)
        trace.append(entry)
        prev_k = d.K
    cap = GridEvaluator(d.points, d.weights, A).mutual_information()
    if status != "certified":
        log.warning("A=%g: solver stopped uncertified (%s)", A, status)
    return SolverResult(d, cap, rep, trace, status)


def golden_gap(candidate, optimal, q=DEFAULT_QUAD):
    """``(D(P_Y || P_Y*), C - I(X; Y))`` for a candidate input.

    The first never exceeds the second for a true optimum; the check allows
    twice the quadrature tolerance.
    """
    from .divergences import DensityPair, kl

    if abs(candidate.A - optimal.A) > 1e-12:
        raise ValueError("candidate and optimum must share the amplitude constraint")
    lhs = kl(DensityPair(MixtureDensity(candidate), MixtureDensity(optimal.input)), q)
    i_cand = GridEvaluator(candidate.points, candidate.weights, candidate.A).mutual_information()
    rhs = max(optimal.capacity - i_cand, 0.0)
    tol = q.tolerance(max(lhs, rhs))
    if lhs > rhs + 2.0 * tol:
        raise AssertionError(f"golden formula violated: {lhs:.3e} > {rhs:.3e}")
    return lhs, rhs


def support_size(A, **overrides):
    cfg = SolverConfig(A=A, **overrides)
    return solve_capacity(cfg).K


def support_transition(k_low, lo, hi, tol=2e-3, **overrides):
    """Bisect for the amplitude where the optimal support grows past ``k_low``.

    Requires ``K(lo) <= k_low < K(hi)``.  Returns the final bracket.
    """
    if support_size(lo, **overrides) > k_low or support_size(hi, **overrides) <= k_low:
        raise ValueError("bracket does not straddle the transition")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if support_size(mid, **overrides) > k_low:
            hi = mid
        else:
            lo = mid
    return lo, hi


__all__ = [
    "SolverConfig", "SolverResult", "KktReport", "SolverError",
    "optimize_weights", "optimize_locations", "solve_capacity", "kkt_report",
    "golden_gap", "support_transition", "replace",
]
