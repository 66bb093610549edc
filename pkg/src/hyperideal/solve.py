"""Maximization of the total truncated volume over the coherent polytope.

The objective F is the sum of per-triangle truncated volumes; it is smooth
and strictly concave on the open polytope, with a +infinity inward derivative
at the mildly degenerate parts of the boundary, so the maximizer is interior
and unique.  Newton's method in reduced coordinates (an orthonormal basis of
the equality null space) with an Armijo backtracking line search reaches it
quadratically; steps are capped so every strict inequality keeps at least 1%
of its current slack, which keeps all Lobachevsky arguments away from their
singularities.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .coherent import (
    AngleSystem,
    ConstraintSystem,
    Infeasible,
    build_constraints,
    find_coherent,
    is_coherent,
    tangent_basis,
)
from .energy import tet_volume, tet_volume_grad, tet_volume_hess
from .errors import DomainError, NotCoherentError
from .pattern import compat_residuals
from .surface import INTERIOR, AngleData, GluedTriangulation

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 200
ARMIJO_C1 = 1e-4
ARMIJO_SHRINK = 0.5
SLACK_KEEP = 1e-2
ILL_CONDITIONED = 1e12
# below this projected-gradient norm the objective differences fall under the
# float noise floor, so the full Newton step is taken without an Armijo test
# (quadratic contraction takes over)
NEWTON_TRUST_PGN = 1e-6

CONVERGED = "converged"
MAX_ITERS = "max_iters"
INFEASIBLE = "infeasible"


@dataclass
class SolveReport:
    objective: float
    projected_grad_norm: float
    iterations: int
    min_slack: float
    compat1: float
    compat2: float
    status: str
    diagnostics: list = field(default_factory=list)


def objective_f(x: AngleSystem) -> float:
    """F = sum of per-triangle truncated volumes; finite and nonnegative."""
    try:
        return float(np.sum(tet_volume(x.alphas(), x.gammas())))
    except DomainError as exc:
        raise DomainError(f"objective_f: {exc}") from exc


def objective_grad(x: AngleSystem) -> np.ndarray:
    """Gradient of F, shape (6|T|,); requires strict Delta membership."""
    return tet_volume_grad(x.alphas(), x.gammas()).reshape(-1)


def _hess_blocks(x: AngleSystem) -> np.ndarray:
    return tet_volume_hess(x.alphas(), x.gammas())


def _reduced_hessian(blocks, basis):
    n_t = blocks.shape[0]
    hn = np.empty((6 * n_t, basis.shape[1]))
    for t in range(n_t):
        hn[6 * t:6 * t + 6] = blocks[t] @ basis[6 * t:6 * t + 6]
    return basis.T @ hn


def _max_step(cs, x, d):
    """Largest step along d keeping every strict slack >= SLACK_KEEP of itself."""
    slack = cs.h_ineq - cs.g_ineq @ x
    drop = cs.g_ineq @ d
    mask = drop > 0.0
    if not np.any(mask):
        return 1.0
    return float(min(1.0, np.min((1.0 - SLACK_KEEP) * slack[mask] / drop[mask])))


def maximize(tri: GluedTriangulation, data: AngleData, x0: AngleSystem,
             tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS,
             cs: ConstraintSystem = None, callback=None):
    """Maximize F from a strictly coherent start; returns (x*, SolveReport).

    Newton with Armijo backtracking in reduced coordinates; falls back to a
    projected-gradient step when the reduced Hessian is ill-conditioned.
    Stationarity is the sup norm of the gradient projected onto the tangent
    space of the equality constraints.  ``callback(iteration, x, f)`` is
    invoked after every accepted step.
    """
    if cs is None:
        cs = build_constraints(tri, data)
    check = is_coherent(x0, cs)
    if not check.ok:
        raise NotCoherentError(f"starting point is not coherent: {check.violations[:3]}")
    basis = tangent_basis(cs)
    x = x0.values.copy()

    def report(status, iters, pgn):
        xs = AngleSystem(x)
        c1, c2 = compat_residuals(tri, xs)
        slack = float(np.min(cs.h_ineq - cs.g_ineq @ x))
        rep = SolveReport(
            objective=objective_f(xs),
            projected_grad_norm=pgn,
            iterations=iters,
            min_slack=slack,
            compat1=c1,
            compat2=c2,
            status=status,
            diagnostics=_flip_diagnostics(tri, data, xs),
        )
        return xs, rep

    if basis.shape[1] == 0:
        return report(CONVERGED, 0, 0.0)

    fx = objective_f(AngleSystem(x))
    for it in range(max_iters):
        g = objective_grad(AngleSystem(x))
        gz = basis.T @ g
        pgn = float(np.max(np.abs(basis @ gz)))
        if pgn <= tol:
            return report(CONVERGED, it, pgn)

        hz = _reduced_hessian(_hess_blocks(AngleSystem(x)), basis)
        use_newton = np.linalg.cond(hz) < ILL_CONDITIONED
        if use_newton:
            dz = np.linalg.solve(hz, -gz)
            if dz @ gz <= 0.0:  # not an ascent direction; concavity must have failed numerically
                dz = gz
        else:
            dz = gz
        d = basis @ dz

        if use_newton and pgn <= NEWTON_TRUST_PGN:
            x = x + _max_step(cs, x, d) * d
            fx = objective_f(AngleSystem(x))
            if callback is not None:
                callback(it, AngleSystem(x.copy()), fx)
            continue

        step = _max_step(cs, x, d)
        slope = float(g @ d)
        accepted = False
        for _ in range(60):
            cand = x + step * d
            f_cand = objective_f(AngleSystem(cand))
            if f_cand >= fx + ARMIJO_C1 * step * slope:
                accepted = True
                break
            step *= ARMIJO_SHRINK
        if not accepted:
            logger.warning("line search failed at iteration %d", it)
            return report(MAX_ITERS, it, pgn)
        x = cand
        fx = f_cand
        if callback is not None:
            callback(it, AngleSystem(x.copy()), fx)

    g = objective_grad(AngleSystem(x))
    pgn = float(np.max(np.abs(basis @ (basis.T @ g))))
    status = CONVERGED if pgn <= tol else MAX_ITERS
    return report(status, max_iters, pgn)


def _flip_diagnostics(tri, data, x: AngleSystem):
    """Edges with theta = 0 whose alpha collapsed: the face circles coincide
    and the edge could be flipped out of the triangulation."""
    notes = []
    values = x.values
    for e in tri.edges:
        if e.kind == INTERIOR and data.theta[e.index] < 1e-12:
            for (t, s) in e.sides:
                if values[6 * t + s] < 1e-8:
                    notes.append(
                        f"edge {e.index}: theta = 0 and alpha[{t}][{s}] < 1e-8; "
                        "the two face circles coincide and a flip is recommended"
                    )
                    break
    return notes


def tangent_span_vectors(tri: GluedTriangulation):
    """The edge and cycle tangent vectors that span the coherent tangent space.

    One vector per interior edge (+1 on one side's alpha, -1 on the other's)
    plus one per fundamental cycle of the vertex/triangle incidence graph
    (alternating +-1 on gamma coordinates around the cycle).
    """
    n = 6 * tri.triangle_count
    vectors = []
    for e in tri.edges:
        if e.kind != INTERIOR:
            continue
        (t, s), (t2, s2) = e.sides
        v = np.zeros(n)
        v[6 * t + s] += 1.0
        v[6 * t2 + s2] -= 1.0
        vectors.append(v)

    # spanning tree of the bipartite incidence graph; corners are its edges
    parent = {("v", 0): None}  # node -> (parent node, connecting corner)
    queue = [("v", 0)]
    corners_of_class = {v: cls for v, cls in enumerate(tri.vertices)}
    tree_corners = set()
    while queue:
        node = queue.pop()
        if node[0] == "v":
            incident = [(("t", t), (t, c)) for t, c in corners_of_class[node[1]]]
        else:
            t = node[1]
            incident = [(("v", tri.corner_class[(t, c)]), (t, c)) for c in range(3)]
        for nxt, corner in incident:
            if nxt not in parent:
                parent[nxt] = (node, corner)
                tree_corners.add(corner)
                queue.append(nxt)

    def root_chain(node):
        """[(node, corner to parent), ..., (root, None)]"""
        chain = []
        while True:
            link = parent[node]
            if link is None:
                chain.append((node, None))
                return chain
            chain.append((node, link[1]))
            node = link[0]

    for t in range(tri.triangle_count):
        for c in range(3):
            corner = (t, c)
            if corner in tree_corners:
                continue
            # fundamental cycle: class(c) --corner-- t --tree path-- class(c)
            chain_t = root_chain(("t", t))
            chain_v = root_chain(("v", tri.corner_class[corner]))
            nodes_t = [nd for nd, _ in chain_t]
            nodes_v = [nd for nd, _ in chain_v]
            # strip the common tail above the lowest common ancestor
            ka, kb = len(chain_v) - 1, len(chain_t) - 1
            while ka > 0 and kb > 0 and nodes_v[ka - 1] == nodes_t[kb - 1]:
                ka -= 1
                kb -= 1
            # corner sequence of the closed walk starting at class(c):
            # the non-tree corner, up from t to the LCA, down from LCA to class(c)
            walk = [corner]
            walk += [cr for _, cr in chain_t[:kb]]
            walk += [cr for _, cr in reversed(chain_v[:ka])]
            # nodes alternate class/triangle; each triangle visit contributes
            # +gamma(exit corner) - gamma(entry corner)
            node = ("v", tri.corner_class[corner])
            v = np.zeros(n)
            for k, cr in enumerate(walk):
                if node[0] == "t":
                    tt = node[1]
                    entry, exit_ = walk[k - 1], cr
                    v[6 * tt + 3 + entry[1]] -= 1.0
                    v[6 * tt + 3 + exit_[1]] += 1.0
                nxt_t = ("t", cr[0])
                node = nxt_t if node[0] == "v" else ("v", tri.corner_class[cr])
            vectors.append(v)
    return np.array(vectors) if vectors else np.zeros((0, n))


def solve_problem(tri: GluedTriangulation, data: AngleData,
                  tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS):
    """find_coherent + maximize; returns (x, report) with x None when infeasible."""
    cs = build_constraints(tri, data)
    start = find_coherent(cs)
    if isinstance(start, Infeasible):
        rep = SolveReport(
            objective=float("nan"), projected_grad_norm=float("nan"),
            iterations=0, min_slack=float("nan"), compat1=float("nan"),
            compat2=float("nan"), status=INFEASIBLE,
            diagnostics=[start.message],
        )
        return None, rep
    return maximize(tri, data, start, tol=tol, max_iters=max_iters, cs=cs)
