"""Design-parameter optimisation for the binary policies.

* ``delta_star`` -- the distance threshold that max-min balances the worst
  silent receiver against the cell-edge reflector.
* ``p_star``     -- the reflection probability that maximises the cell-edge
  receiver's expected retro power.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import qbar_re
from .model import SystemParams

#: default stopping widths from the design notes
DELTA_XTOL = 1e-6
P_XTOL = 1e-6
#: the solved balance equation is polished to this relative residual
RESIDUAL_RTOL = 1e-10

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptResult:
    """argument: optimiser (m for the threshold, probability for p).
    objective: value of the optimised quantity (W).
    branch: which balance case produced the result.
    converged: False when no balance point exists and a boundary is returned.
    """

    argument: float
    objective: float
    branch: str
    converged: bool = True


def _omni(d: float, params: SystemParams) -> float:
    return (params.rf_dc_efficiency * params.tx_power
            * d ** (-params.path_loss_exp))


def _edge_total(delta: float, params: SystemParams) -> float:
    """Mean total harvest of a cell-edge receiver when only receivers beyond
    `delta` reflect."""
    rho = params.cell_radius
    return _omni(rho, params) + qbar_re(rho, delta, params.er_density, params)


def delta_star(params: SystemParams, xtol: float = DELTA_XTOL,
               residual_rtol: float = RESIDUAL_RTOL) -> OptResult:
    """Max-min distance threshold for the binary distance policy.

    The worst silent receiver sits just inside the threshold and harvests only
    the omni component; the worst reflector is the cell-edge receiver. Raising
    the threshold helps the edge (fewer competing reflectors) and hurts the
    silent side, so the max-min optimum balances the two curves:

    * if even the best achievable edge total (no competing reflectors) covers
      the omni power at the exclusion radius, the silent side is pinned there
      and the threshold solves  edge_total(delta) = omni(exclusion_radius);
    * otherwise it solves  edge_total(delta) = omni(delta).

    Bisection, continued past `xtol` until the balance equation's relative
    residual drops below `residual_rtol`. If the balance curve does not change
    sign on the open interval, the boundary with the smaller gap is returned
    with converged=False.
    """
    xi, rho = params.exclusion_radius, params.cell_radius
    pinned = _omni(xi, params) <= _edge_total(rho, params)

    if pinned:
        def gap(delta: float) -> float:
            return _edge_total(delta, params) - _omni(xi, params)
        branch = "inner_at_exclusion"
    else:
        def gap(delta: float) -> float:
            return _edge_total(delta, params) - _omni(delta, params)
        branch = "inner_at_threshold"

    lo, hi = xi, rho
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0.0:
        return OptResult(lo, _omni(xi if pinned else lo, params), branch)
    if g_hi == 0.0:
        return OptResult(hi, _omni(xi if pinned else hi, params), branch)
    if g_lo * g_hi > 0.0:
        best = lo if abs(g_lo) <= abs(g_hi) else hi
        objective = min(_omni(xi if pinned else best, params),
                        _edge_total(best, params))
        return OptResult(best, objective, branch, converged=False)

    mid = 0.5 * (lo + hi)
    for _ in range(200):
        probe = 0.5 * (lo + hi)
        if probe <= lo or probe >= hi:  # bracket at float resolution
            break
        mid = probe
        g_mid = gap(mid)
        if g_mid == 0.0:
            break
        if g_mid * g_lo < 0.0:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
        inner = _omni(xi, params) if pinned else _omni(mid, params)
        scale = max(abs(g_mid + inner), abs(inner))
        if hi - lo <= xtol and abs(g_mid) <= residual_rtol * scale:
            break
    objective = min(_omni(xi if pinned else mid, params), _edge_total(mid, params))
    return OptResult(mid, objective, branch)


def p_star(params: SystemParams, xtol: float = P_XTOL,
           include_self_reflection: bool = True) -> OptResult:
    """Reflection probability maximising the cell-edge mean retro power.

    Objective p * qbar_re(cell_radius, exclusion_radius, p * density): the
    leading p is the probability that the tagged edge receiver itself
    reflects, and the thinned density captures the competing reflectors. With
    include_self_reflection=False the leading factor is dropped; the objective
    is then monotone decreasing and the search degenerates toward p = 0.
    Golden-section search on (0, 1).
    """
    rho, xi = params.cell_radius, params.exclusion_radius

    def objective(p: float) -> float:
        value = qbar_re(rho, xi, p * params.er_density, params)
        return p * value if include_self_reflection else value

    lo, hi = 1e-9, 1.0
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = objective(x1), objective(x2)
    while hi - lo > xtol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = objective(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = objective(x2)
    arg = 0.5 * (lo + hi)
    branch = "with_self_reflection" if include_self_reflection else "no_self_reflection"
    return OptResult(arg, objective(arg), branch)
