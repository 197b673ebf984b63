"""Dense bounded-variable simplex engine.

Solves  min c.x  s.t.  A x (<=|=|>=) b,  lo <= x <= up  on the small dense
problems this package produces.  Every row gets a slack column so the working
form is A_ext x = b with bounds; phase 1 minimizes the sum of bound
violations of the basic variables (no artificial columns), phase 2 is the
usual bounded primal, and a bounded dual simplex supports warm starts from a
parent basis inside branch and bound.

Pivot selection is deterministic: Dantzig pricing with lowest-index
tie-breaking, switching to Bland's lowest-index rule after a stall, and a
two-pass ratio test that prefers large pivot elements within a relative
window of the minimum ratio.
"""

from __future__ import annotations

import numpy as np

BASIC, AT_LO, AT_UP = 0, 1, 2

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_FEAS_TOL = 1e-9     # bound violation tolerance for basics during pivoting
_DJ_TOL = 1e-9       # reduced-cost optimality tolerance
_PIV_TOL = 1e-10     # smallest acceptable pivot magnitude in ratio tests
_STALL_LIMIT = 80    # non-improving iterations before switching to Bland
_RATIO_WINDOW = 1e-9


class NumericalError(RuntimeError):
    """The engine exceeded its pivot budget or met a degenerate pivot it
    cannot resolve; results so far are not trustworthy."""


class _Fallback(Exception):
    """Internal: warm start unusable, redo the solve from a cold basis."""


class BoundedSimplex:
    def __init__(self, c, A, sense, b, lo, up):
        A = np.asarray(A, dtype=float)
        m, n = A.shape
        self.m, self.n_struct = m, n
        self.N = n + m
        self.A = np.hstack([A, np.eye(m)])
        self.b = np.asarray(b, dtype=float).copy()
        self.c = np.concatenate([np.asarray(c, dtype=float), np.zeros(m)])
        self.lo = np.concatenate([np.asarray(lo, dtype=float), np.zeros(m)])
        self.up = np.concatenate([np.asarray(up, dtype=float), np.zeros(m)])
        for i, s in enumerate(sense):
            if s == "<=":
                self.lo[n + i], self.up[n + i] = 0.0, np.inf
            elif s == ">=":
                self.lo[n + i], self.up[n + i] = -np.inf, 0.0
            elif s == "=":
                self.lo[n + i], self.up[n + i] = 0.0, 0.0
            else:
                raise ValueError(f"unknown row sense {s!r}")
        self.pivot_budget = 5000 + 40 * (self.m + self.N)
        self._pivots = 0
        self.basis = None   # set by start_cold / restore
        self.stat = None
        self.x = None
        self.T = None       # Binv @ A_ext
        self.bcol = None    # Binv @ b

    # -- basis management ---------------------------------------------------

    def start_cold(self):
        n, m = self.n_struct, self.m
        self.basis = np.arange(n, n + m)
        self.stat = np.full(self.N, AT_LO, dtype=np.int8)
        self.stat[self.basis] = BASIC
        self.x = np.zeros(self.N)
        for j in range(n):
            if np.isfinite(self.lo[j]):
                self.x[j] = self.lo[j]
            elif np.isfinite(self.up[j]):
                self.x[j], self.stat[j] = self.up[j], AT_UP
        self.T = self.A.copy()
        self.bcol = self.b.copy()
        self._pivots = 0

    def snapshot(self):
        return (self.basis.copy(), self.stat.copy(), self.T.copy(),
                self.bcol.copy(), self.x.copy(), self.lo.copy(), self.up.copy())

    def restore(self, snap):
        (self.basis, self.stat, self.T, self.bcol, self.x,
         self.lo, self.up) = (a.copy() for a in snap)
        self._pivots = 0

    def light_state(self):
        """Basis header and statuses only; enough to rebuild the tableau."""
        return (self.basis.copy(), self.stat.copy(), self.x.copy())

    def rebuild(self, light):
        basis, stat, x = light
        self.basis, self.stat, self.x = basis.copy(), stat.copy(), x.copy()
        B = self.A[:, self.basis]
        try:
            binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("singular basis during tableau rebuild") from exc
        self.T = binv @ self.A
        self.bcol = binv @ self.b
        self._pivots = 0

    def set_bounds(self, j, lo, up):
        self.lo[j], self.up[j] = lo, up
        if self.stat is not None and self.stat[j] != BASIC:
            self.x[j] = lo if self.stat[j] == AT_LO else up
            self.x[j] = min(max(self.x[j], lo), up)

    # -- shared pieces ------------------------------------------------------

    def _refresh_basics(self):
        xn = np.where(self.stat != BASIC, self.x, 0.0)
        xb = self.bcol - self.T @ xn
        self.x[self.basis] = xb
        return xb

    def _reduced_costs(self):
        return self.c - self.c[self.basis] @ self.T

    def _fixed(self):
        return self.up - self.lo <= 1e-12

    def _spend_pivot(self):
        self._pivots += 1
        if self._pivots > self.pivot_budget:
            raise NumericalError(
                f"pivot budget {self.pivot_budget} exceeded; the problem is "
                f"numerically unstable for this engine")

    def _pivot(self, r, e):
        piv = self.T[r, e]
        if abs(piv) < _PIV_TOL:
            raise NumericalError(f"pivot element {piv:g} below tolerance")
        self.T[r] /= piv
        self.bcol[r] /= piv
        col = self.T[:, e].copy()
        col[r] = 0.0
        self.T -= np.outer(col, self.T[r])
        self.bcol -= col * self.bcol[r]
        self.T[:, e] = 0.0
        self.T[r, e] = 1.0
        self.basis[r] = e

    def _enter(self, score, cand, bland):
        """Deterministic entering choice: Dantzig on |score|, Bland on index."""
        if not cand.any():
            return -1
        if bland:
            return int(np.flatnonzero(cand)[0])
        masked = np.where(cand, np.abs(score), -np.inf)
        return int(np.argmax(masked))

    def _ratio_pivot(self, j, dirn, t_rows, tgt_rows):
        """Pick leaving row (or bound flip) among blocking events.

        t_rows: per-row step limits (inf = non-blocking), tgt_rows: bound the
        leaving basic stops at.  Returns ("flip", None) or ("pivot", row).
        """
        flip_t = self.up[j] - self.lo[j]
        row_min = t_rows.min() if t_rows.size else np.inf
        if flip_t <= row_min:
            if not np.isfinite(flip_t):
                return "unbounded", None
            self.x[j] = self.up[j] if dirn > 0 else self.lo[j]
            self.stat[j] = AT_UP if dirn > 0 else AT_LO
            return "flip", None
        window = row_min + _RATIO_WINDOW * (1.0 + abs(row_min))
        in_win = t_rows <= window
        w = self.T[:, j]
        r = int(np.argmax(np.where(in_win, np.abs(w), -np.inf)))
        leave = self.basis[r]
        self.x[j] += dirn * max(t_rows[r], 0.0)
        self.x[leave] = self.lo[leave] if tgt_rows[r] == AT_LO else self.up[leave]
        self.stat[leave] = tgt_rows[r]
        self._pivot(r, j)
        self.stat[j] = BASIC
        return "pivot", r

    # -- phase 1: minimize the sum of bound violations ----------------------

    def phase1(self):
        bland = False
        stall = 0
        best = np.inf
        while True:
            self._spend_pivot()
            xb = self._refresh_basics()
            blo, bup = self.lo[self.basis], self.up[self.basis]
            below = xb < blo - _FEAS_TOL
            above = xb > bup + _FEAS_TOL
            infeas = float(np.sum((blo - xb)[below]) + np.sum((xb - bup)[above]))
            if not below.any() and not above.any():
                return True
            if infeas < best - 1e-12:
                best, stall = infeas, 0
            else:
                stall += 1
                if stall > _STALL_LIMIT:
                    bland = True
            q = above.astype(float) - below.astype(float)
            r = -(q @ self.T)
            fixed = self._fixed()
            cand = (((self.stat == AT_LO) & (r < -_DJ_TOL)) |
                    ((self.stat == AT_UP) & (r > _DJ_TOL))) & ~fixed
            j = self._enter(r, cand, bland)
            if j < 0:
                return False  # no improving move left: infeasible
            dirn = 1.0 if self.stat[j] == AT_LO else -1.0
            w = -dirn * self.T[:, j]
            t = np.full(self.m, np.inf)
            tgt = np.full(self.m, AT_LO, dtype=np.int8)
            rising = w > _PIV_TOL
            falling = w < -_PIV_TOL
            # rising basics: infeasible-below stop at lo, feasible stop at up
            rb = rising & below
            t[rb] = (blo[rb] - xb[rb]) / w[rb]
            tgt[rb] = AT_LO
            rf = rising & ~below & ~above & np.isfinite(bup)
            t[rf] = (bup[rf] - xb[rf]) / w[rf]
            tgt[rf] = AT_UP
            # falling basics: infeasible-above stop at up, feasible stop at lo
            fa = falling & above
            t[fa] = (xb[fa] - bup[fa]) / (-w[fa])
            tgt[fa] = AT_UP
            ff = falling & ~below & ~above & np.isfinite(blo)
            t[ff] = (xb[ff] - blo[ff]) / (-w[ff])
            tgt[ff] = AT_LO
            np.maximum(t, 0.0, out=t)
            kind, _ = self._ratio_pivot(j, dirn, t, tgt)
            if kind == "unbounded":
                raise NumericalError("phase-1 direction unblocked; inconsistent bounds?")

    # -- phase 2: bounded primal --------------------------------------------

    def phase2(self):
        bland = False
        stall = 0
        best = np.inf
        while True:
            self._spend_pivot()
            xb = self._refresh_basics()
            blo, bup = self.lo[self.basis], self.up[self.basis]
            if (xb < blo - 1e-6).any() or (xb > bup + 1e-6).any():
                # feasibility drifted; repair before optimizing
                if not self.phase1():
                    return INFEASIBLE
                xb = self._refresh_basics()
                blo, bup = self.lo[self.basis], self.up[self.basis]
            d = self._reduced_costs()
            obj = float(self.c @ self.x)
            if obj < best - 1e-12:
                best, stall = obj, 0
            else:
                stall += 1
                if stall > _STALL_LIMIT:
                    bland = True
            fixed = self._fixed()
            cand = (((self.stat == AT_LO) & (d < -_DJ_TOL)) |
                    ((self.stat == AT_UP) & (d > _DJ_TOL))) & ~fixed
            j = self._enter(d, cand, bland)
            if j < 0:
                return OPTIMAL
            dirn = 1.0 if self.stat[j] == AT_LO else -1.0
            w = -dirn * self.T[:, j]
            t = np.full(self.m, np.inf)
            tgt = np.full(self.m, AT_LO, dtype=np.int8)
            rising = (w > _PIV_TOL) & np.isfinite(bup)
            t[rising] = (bup[rising] - xb[rising]) / w[rising]
            tgt[rising] = AT_UP
            falling = (w < -_PIV_TOL) & np.isfinite(blo)
            t[falling] = (xb[falling] - blo[falling]) / (-w[falling])
            tgt[falling] = AT_LO
            np.maximum(t, 0.0, out=t)
            kind, _ = self._ratio_pivot(j, dirn, t, tgt)
            if kind == "unbounded":
                return UNBOUNDED

    # -- bounded dual simplex for warm starts -------------------------------

    def dual(self, max_iters=600):
        """Re-optimize after bound changes, starting from a dual-feasible
        basis.  Raises _Fallback when the start is unusable or progress
        stalls; returns OPTIMAL/INFEASIBLE otherwise.

        The entering variable may overshoot its own bounds; the resulting
        violation simply becomes a later leaving candidate, as usual for the
        bounded dual method.  Reduced costs and basic values are updated
        incrementally and refreshed periodically.
        """
        xb = self._refresh_basics()
        d = self._reduced_costs()
        fixed = self._fixed()
        dual_infeas = np.maximum(
            np.where((self.stat == AT_LO) & ~fixed, -d, 0.0),
            np.where((self.stat == AT_UP) & ~fixed, d, 0.0)).max()
        if dual_infeas > 1e-7:
            raise _Fallback
        for it in range(max_iters):
            self._spend_pivot()
            if it and it % 50 == 0:  # hygiene refresh against drift
                xb = self._refresh_basics()
                d = self._reduced_costs()
            blo, bup = self.lo[self.basis], self.up[self.basis]
            vio_lo = blo - xb
            vio_up = xb - bup
            vio = np.maximum(vio_lo, vio_up)
            r = int(np.argmax(vio))
            if vio[r] <= _FEAS_TOL:
                self.x[self.basis] = xb
                return OPTIMAL
            rho = 1.0 if vio_lo[r] > vio_up[r] else -1.0
            alpha = self.T[r]
            if rho > 0:
                cand = (((self.stat == AT_LO) & (alpha < -_PIV_TOL)) |
                        ((self.stat == AT_UP) & (alpha > _PIV_TOL))) & ~fixed
            else:
                cand = (((self.stat == AT_LO) & (alpha > _PIV_TOL)) |
                        ((self.stat == AT_UP) & (alpha < -_PIV_TOL))) & ~fixed
            cand[self.basis] = False
            if not cand.any():
                return INFEASIBLE
            denom = np.where(cand, np.abs(alpha), 1.0)
            theta = np.where(cand, np.abs(d) / denom, np.inf)
            tmin = theta.min()
            window = tmin + _RATIO_WINDOW * (1.0 + tmin)
            e = int(np.argmax(np.where(theta <= window, np.abs(alpha), -np.inf)))
            target = blo[r] if rho > 0 else bup[r]
            delta = (xb[r] - target) / alpha[e]
            te = d[e] / alpha[e]
            leave = self.basis[r]
            col = self.T[:, e].copy()
            d = d - te * alpha
            d[e] = 0.0
            xb = xb - delta * col
            xb[r] = self.x[e] + delta
            self.x[e] += delta
            self.x[leave] = target
            self.stat[leave] = AT_LO if rho > 0 else AT_UP
            self._pivot(r, e)
            self.stat[e] = BASIC
            self.x[self.basis] = xb
        raise _Fallback

    # -- drivers ------------------------------------------------------------

    def solve_cold(self):
        self.start_cold()
        if not self.phase1():
            return INFEASIBLE
        return self.phase2()

    def solve_warm(self):
        """Dual simplex from the current basis, falling back to a cold solve."""
        try:
            status = self.dual()
            if status == INFEASIBLE:
                return INFEASIBLE
            # certify: phase2 exits immediately when already optimal
            return self.phase2()
        except _Fallback:
            return self.solve_cold()

    def objective(self):
        return float(self.c @ self.x)

    def solution(self):
        return self.x[: self.n_struct].copy()
