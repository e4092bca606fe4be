"""Thin wrapper over scipy's HiGHS MILP interface for 0/1 covering programs."""

import math
from fractions import Fraction

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix

from .errors import DesignError, INFEASIBLE


def integer_weights(costs):
    """Scale rational costs to integers. Each weight also carries a small
    rank term so that among equal-cost optima the solver prefers the same set
    every time."""
    fr = [c if isinstance(c, Fraction) else Fraction(c) for c in costs]
    denom = 1
    for f in fr:
        denom = denom * f.denominator // math.gcd(denom, f.denominator)
    n = len(fr)
    spread = n + 1
    return [int(f * denom) * spread * (n + 1) + (j + 1) for j, f in enumerate(fr)]


def solve_covering(costs, rows, fixed_one=(), fixed_zero=()):
    """Minimize sum c_j x_j over binary x subject to sum_{j in row} x_j >= rhs.

    ``rows`` is a list of (column indices, rhs). Returns the chosen column set.
    """
    n = len(costs)
    if n == 0:
        if any(rhs > 0 for _, rhs in rows):
            raise DesignError(INFEASIBLE, "empty program with positive demand")
        return set()
    weights = np.array(integer_weights(costs), dtype=float)
    lb = np.zeros(n)
    ub = np.ones(n)
    for j in fixed_one:
        lb[j] = 1
    for j in fixed_zero:
        ub[j] = 0
    constraints = []
    if rows:
        data, ri, ci, lo = [], [], [], []
        for r, (cols, rhs) in enumerate(rows):
            for j in cols:
                data.append(1.0)
                ri.append(r)
                ci.append(j)
            lo.append(rhs)
        A = csr_matrix((data, (ri, ci)), shape=(len(rows), n))
        constraints.append(LinearConstraint(A, lb=np.array(lo, dtype=float), ub=np.inf))
    res = milp(weights, integrality=np.ones(n), bounds=Bounds(lb, ub), constraints=constraints,
               options={"mip_rel_gap": 0.0, "presolve": True})
    if res.status != 0 or res.x is None:
        raise DesignError(INFEASIBLE, f"covering program has no solution ({res.message})")
    return {j for j in range(n) if res.x[j] > 0.5}
