"""Source-side tradeoff: best key gain from the source for a given channel rate.

For an auxiliary t with t -> u -> v, every rate that enters the bounds is an
affine function of the weights p(t) once the posteriors p(u | t) are fixed:

    I(t;u) = H(u) - sum_t p(t) H(u | t)
    I(t;v) = H(v) - sum_t p(t) H(q_t P_v|u)
    I(t;w) = H(w) - sum_t p(t) H(q_t P_w|u)

with the consistency constraint sum_t p(t) q_t = p_u. Picking weights over a
fixed set of candidate posteriors ("atoms") is therefore a linear program:

    maximize   gain(w) = beta [I(t;v) - I(t;w)]
    subject to beta [I(t;u) - I(t;v)] <= r,  sum_t w_t q_t = p_u,  w >= 0.

A basic optimal solution has at most |U| + 1 atoms in its support, which is
the cardinality bound on t. The atom set is a simplex grid, refined locally
around the support ("zoom") when an exact value is needed.
"""

import numpy as np
from scipy.optimize import linprog

from .optim import grid_resolution, simplex_grid
from .probkit import ZERO_TOL, entropy_bits

_LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


class SourceFrontier:
    """G(r) = max source gain subject to a Wyner-Ziv cost budget r.

    Parameters
    ----------
    p_uv : ndarray (|U|, |V|)
        Joint source law.
    beta : float
        Source symbols per channel use; gains and costs are scaled by it.
    w_given_v : ndarray (|V|, |W|), optional
        Eavesdropper's source observation. When given, the gain is
        beta [I(t;v) - I(t;w)].
    atom_budget : int
        Size of the coarse atom grid.
    """

    def __init__(self, p_uv, beta, w_given_v=None, atom_budget=320, zoom_rounds=3, seed=0):
        p_uv = np.asarray(p_uv, dtype=float)
        pu = p_uv.sum(axis=1)
        self.keep = np.flatnonzero(pu > ZERO_TOL)
        self.n_u = p_uv.shape[0]
        self.pu = pu[self.keep]
        self.pu = self.pu / self.pu.sum()
        self.beta = float(beta)
        self.v_given_u = p_uv[self.keep] / pu[self.keep, None]
        self.w_given_u = None if w_given_v is None else self.v_given_u @ np.asarray(w_given_v)
        self.zoom_rounds = zoom_rounds
        d = self.pu.size
        if d <= 5:
            m = grid_resolution(d, atom_budget, 4096)
            atoms = simplex_grid(d, m)
        else:
            rng = np.random.default_rng(seed)
            atoms = rng.dirichlet(np.ones(d), size=atom_budget)
        self.step = 1.0 / (m if d <= 5 else max(2, int(atom_budget ** (1 / (d - 1)))))
        atoms = np.vstack([atoms, np.eye(d), self.pu[None]])
        self.atoms = atoms
        self._gain_coef, self._cost_coef = self._coefficients(atoms)
        self._gain_const, self._cost_const = self._constants()
        self._cache = {}
        self.gain_max, self.r_sat = self._saturation()

    # -- linear program ---------------------------------------------------

    def _constants(self):
        hu = float(entropy_bits(self.pu))
        hv = float(entropy_bits(self.pu @ self.v_given_u))
        hw = 0.0 if self.w_given_u is None else float(entropy_bits(self.pu @ self.w_given_u))
        return self.beta * (hv - hw), self.beta * (hu - hv)

    def _coefficients(self, atoms):
        h = entropy_bits(atoms)
        hv = entropy_bits(atoms @ self.v_given_u)
        hw = 0.0 if self.w_given_u is None else entropy_bits(atoms @ self.w_given_u)
        gain = self.beta * (hw - hv)
        cost = self.beta * (hv - h)
        return gain, cost

    def _lp(self, atoms, gain, cost, r):
        a_eq = atoms.T
        if r is None:
            res = linprog(-gain, A_eq=a_eq, b_eq=self.pu, bounds=(0, None),
                          method="highs-ds", options=_LP_OPTIONS)
        else:
            rhs = r - self._cost_const + 1e-13
            res = linprog(-gain, A_ub=cost[None], b_ub=[rhs], A_eq=a_eq, b_eq=self.pu,
                          bounds=(0, None), method="highs-ds", options=_LP_OPTIONS)
        if res.status != 0:
            return None
        return res.x

    def _saturation(self):
        w = self._lp(self.atoms, self._gain_coef, self._cost_coef, None)
        gmax = float(w @ self._gain_coef) + self._gain_const
        # cheapest way to reach the unconstrained optimum
        a_ub = -self._gain_coef[None]
        b_ub = [-(gmax - self._gain_const) + 1e-11]
        res = linprog(self._cost_coef, A_ub=a_ub, b_ub=b_ub, A_eq=self.atoms.T, b_eq=self.pu,
                      bounds=(0, None), method="highs-ds", options=_LP_OPTIONS)
        r_sat = float(res.x @ self._cost_coef) + self._cost_const if res.status == 0 else 0.0
        return gmax, max(0.0, r_sat)

    def _zoomed(self, support_atoms, scale):
        d = self.pu.size
        out = []
        for q in support_atoms:
            for i in range(d):
                for j in range(d):
                    if i == j:
                        continue
                    for s in (scale, scale / 2):
                        p = q.copy()
                        amt = min(s, p[j])
                        if amt <= 0:
                            continue
                        p[i] += amt
                        p[j] -= amt
                        out.append(p)
        return np.asarray(out).reshape(-1, d)

    # -- public -----------------------------------------------------------

    def coarse_value(self, r):
        """G(r) on the coarse atom grid (a lower bound on the zoomed value)."""
        if r >= self.r_sat:
            return self.gain_max
        w = self._lp(self.atoms, self._gain_coef, self._cost_coef, r)
        if w is None:
            return -np.inf
        return float(w @ self._gain_coef) + self._gain_const

    def table(self, points=33):
        """Coarse G on an even grid of budgets in [0, r_sat]."""
        rs = np.linspace(0.0, self.r_sat, points) if self.r_sat > 0 else np.zeros(1)
        return rs, np.array([self.coarse_value(r) for r in rs])

    def solve(self, r):
        """Zoomed LP at budget r.

        Returns ``(gain, atoms, weights)`` where the support has at most
        |U| + 1 atoms. Results are memoized on r, so G is a deterministic
        function of the budget.
        """
        key = float(r)
        if key in self._cache:
            return self._cache[key]
        r_eff = min(key, self.r_sat) if self.r_sat > 0 else key
        atoms, gain, cost = self.atoms, self._gain_coef, self._cost_coef
        w = self._lp(atoms, gain, cost, r_eff)
        if w is None:
            out = (-np.inf, None, None)
            self._cache[key] = out
            return out
        scale = self.step / 2
        for _ in range(self.zoom_rounds):
            sup = atoms[w > 1e-14]
            extra = self._zoomed(sup, scale)
            if extra.size == 0:
                break
            atoms2 = np.vstack([atoms, extra])
            g2, c2 = self._coefficients(extra)
            gain2 = np.concatenate([gain, g2])
            cost2 = np.concatenate([cost, c2])
            w2 = self._lp(atoms2, gain2, cost2, r_eff)
            if w2 is not None and w2 @ gain2 >= w @ gain - 1e-14:
                atoms, gain, cost, w = atoms2, gain2, cost2, w2
            scale /= 4
        sel = w > 1e-14
        out = (float(w @ gain) + self._gain_const, atoms[sel], w[sel])
        self._cache[key] = out
        return out

    def channel_matrix(self, atoms, weights, t_card):
        """Test channel p(t | u) on the full u alphabet, padded to ``t_card`` columns."""
        k = len(weights)
        if k > t_card:
            raise ValueError(f"support of {k} atoms exceeds |T| = {t_card}")
        full = np.zeros((self.n_u, t_card))
        full[:, 0] = 1.0
        joint = weights[:, None] * atoms  # (k, |U'|) = p(t, u)
        cond = joint.T / self.pu[:, None]
        cond = cond / cond.sum(axis=1, keepdims=True)
        full[self.keep] = 0.0
        full[np.ix_(self.keep, np.arange(k))] = cond
        return full
