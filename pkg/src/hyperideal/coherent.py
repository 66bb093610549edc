"""Coherent angle systems: constraint assembly, membership, feasibility.

A coherent angle system assigns six angles to every triangle (see
``energy`` for the layout) subject to:

* per triangle: membership in Delta;
* per interior edge: the two incident alphas sum to pi - theta;
* per boundary side: alpha = pi - theta;
* per vertex class: the incident gammas sum to Xi.

Variable indexing is fixed once per triangulation: triangle ``t`` owns the
slice ``6t..6t+5`` as (a_side0, a_side1, a_side2, g_corner0, g_corner1,
g_corner2); side ``s`` runs between corners ``s`` and ``s+1``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from . import _simplex
from .energy import in_delta
from .errors import NotCoherentError
from .surface import BOUNDARY, AngleData, GluedTriangulation

EQ_TOL = 1e-10
SLACK_TOL = 1e-10
FEASIBLE_SLACK = 1e-9


def alpha_index(t, s):
    return 6 * t + s


def gamma_index(t, c):
    return 6 * t + 3 + c


@dataclass
class AngleSystem:
    """A point of R^{6|T|} in the per-triangle angle layout."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size % 6:
            raise ValueError("AngleSystem needs a flat vector of length 6|T|")

    @property
    def triangle_count(self):
        return self.values.size // 6

    def as_triangles(self):
        """View of shape (T, 6) rows (a12, a23, a31, g1, g2, g3)."""
        return self.values.reshape(-1, 6)

    def alphas(self):
        return self.as_triangles()[:, :3]

    def gammas(self):
        return self.as_triangles()[:, 3:]

    def copy(self):
        return AngleSystem(self.values.copy())


@dataclass
class ConstraintSystem:
    """Linear description of the closure of the coherent polytope.

    Equalities ``a_eq x = b_eq``; strict inequalities ``g_ineq x < h_ineq``.
    """

    a_eq: np.ndarray
    b_eq: np.ndarray
    labels_eq: list
    g_ineq: np.ndarray
    h_ineq: np.ndarray
    labels_ineq: list
    rank: int

    @property
    def dimension(self):
        return self.a_eq.shape[1]

    def permuted(self, perm_eq, perm_ineq):
        """Row-permuted copy (same polytope, different solver path)."""
        return ConstraintSystem(
            a_eq=self.a_eq[perm_eq],
            b_eq=self.b_eq[perm_eq],
            labels_eq=[self.labels_eq[i] for i in perm_eq],
            g_ineq=self.g_ineq[perm_ineq],
            h_ineq=self.h_ineq[perm_ineq],
            labels_ineq=[self.labels_ineq[i] for i in perm_ineq],
            rank=self.rank,
        )


def build_constraints(tri: GluedTriangulation, data: AngleData) -> ConstraintSystem:
    """Assemble the coherence constraints for (tri, data), deterministically."""
    data.validate(tri)
    n = 6 * tri.triangle_count
    rows, rhs, labels = [], [], []

    for t in range(tri.triangle_count):
        r = np.zeros(n)
        r[[gamma_index(t, c) for c in range(3)]] = 1.0
        rows.append(r)
        rhs.append(np.pi)
        labels.append(f"triangle {t} gamma sum")

    for e in tri.edges:
        r = np.zeros(n)
        if e.kind == BOUNDARY:
            ((t, s),) = e.sides
            r[alpha_index(t, s)] = 1.0
            labels.append(f"edge {e.index} boundary alpha")
        else:
            (t, s), (t2, s2) = e.sides
            r[alpha_index(t, s)] += 1.0
            r[alpha_index(t2, s2)] += 1.0
            labels.append(f"edge {e.index} alpha sum")
        rows.append(r)
        rhs.append(np.pi - data.theta[e.index])

    for v, corners in enumerate(tri.vertices):
        r = np.zeros(n)
        for t, c in corners:
            r[gamma_index(t, c)] += 1.0
        rows.append(r)
        rhs.append(data.xi[v])
        labels.append(f"vertex {v} gamma sum")

    a_eq = np.array(rows)
    b_eq = np.array(rhs)

    g_rows, g_rhs, g_labels = [], [], []
    for t in range(tri.triangle_count):
        for s in range(3):
            r = np.zeros(n)
            r[alpha_index(t, s)] = -1.0
            g_rows.append(r)
            g_rhs.append(0.0)
            g_labels.append(f"alpha[{t}][{s}] > 0")
        for c in range(3):
            r = np.zeros(n)
            r[gamma_index(t, c)] = -1.0
            g_rows.append(r)
            g_rhs.append(0.0)
            g_labels.append(f"gamma[{t}][{c}] > 0")
    for t in range(tri.triangle_count):
        for c in range(3):
            r = np.zeros(n)
            r[gamma_index(t, c)] = 1.0
            r[alpha_index(t, c)] = 1.0
            r[alpha_index(t, (c + 2) % 3)] = 1.0
            g_rows.append(r)
            g_rhs.append(np.pi)
            g_labels.append(f"triangle {t} corner {c} delta bound")

    return ConstraintSystem(
        a_eq=a_eq,
        b_eq=b_eq,
        labels_eq=labels,
        g_ineq=np.array(g_rows),
        h_ineq=np.array(g_rhs),
        labels_ineq=g_labels,
        rank=int(np.linalg.matrix_rank(a_eq)),
    )


@dataclass
class CoherenceReport:
    ok: bool
    max_equality_residual: float
    min_slack: float
    violations: list = field(default_factory=list)


def is_coherent(x: AngleSystem, cs: ConstraintSystem,
                eq_tol=EQ_TOL, slack_tol=SLACK_TOL) -> CoherenceReport:
    """Test membership in the open coherent polytope, with per-constraint residuals."""
    v = x.values
    if v.size != cs.dimension:
        raise NotCoherentError("angle system dimension does not match constraints")
    res = cs.a_eq @ v - cs.b_eq
    slack = cs.h_ineq - cs.g_ineq @ v
    violations = [
        (cs.labels_eq[i], float(res[i])) for i in np.flatnonzero(np.abs(res) > eq_tol)
    ] + [
        (cs.labels_ineq[i], float(slack[i])) for i in np.flatnonzero(slack <= slack_tol)
    ]
    # per-triangle Delta membership is implied by the rows above at equal
    # tolerances; re-checked for safety.
    if not np.all(in_delta(x.alphas(), x.gammas(), closed=False, tol=slack_tol)):
        if not violations:
            violations.append(("delta membership", float("nan")))
    return CoherenceReport(
        ok=not violations,
        max_equality_residual=float(np.max(np.abs(res))) if res.size else 0.0,
        min_slack=float(np.min(slack)) if slack.size else float("inf"),
        violations=violations,
    )


@dataclass
class Infeasible:
    """Certificate that no strictly coherent angle system exists."""

    reason: str
    s_star: float = None
    message: str = ""

    def __bool__(self):
        return False


def find_coherent(cs: ConstraintSystem):
    """Max-slack feasibility: a deep interior point, or an Infeasible certificate.

    Maximizes s subject to the equalities and every inequality holding with
    slack >= s.  An optimum s* <= 1e-9 means the open polytope is empty (a
    zero-slack-only polytope has no strictly coherent point), reported as
    Infeasible together with s*.
    """
    status, x, s = _simplex.max_slack_lp(cs.a_eq, cs.b_eq, cs.g_ineq, cs.h_ineq)
    if status == _simplex.INFEASIBLE:
        return Infeasible(
            reason="equalities_inconsistent",
            message="the equality constraints have no solution",
        )
    if status != _simplex.OPTIMAL:
        raise RuntimeError(f"max-slack LP ended with status {status}")
    if s > FEASIBLE_SLACK:
        # tableau elimination leaves ~1e-12 equality residue; a least-squares
        # correction (far below the slack scale) removes it
        res = cs.a_eq @ x - cs.b_eq
        x = x - np.linalg.lstsq(cs.a_eq, res, rcond=None)[0]
        return AngleSystem(x)
    degenerate = " (polytope is nonempty but has empty relative interior)" if s > 0 else ""
    return Infeasible(
        reason="max_slack_nonpositive",
        s_star=s,
        message=f"maximum uniform slack {s:.3e} <= {FEASIBLE_SLACK:.0e}{degenerate}",
    )


def tangent_basis(cs: ConstraintSystem, rcond=1e-10):
    """Orthonormal basis of the equality null space, shape (6|T|, k)."""
    return null_space(cs.a_eq, rcond=rcond)


def sample_coherent(cs: ConstraintSystem, rng, n=1, spread=0.8):
    """Random strictly coherent angle systems (empty list if infeasible).

    Starts from the max-slack point and perturbs within the tangent space,
    capping each step so that every strict inequality keeps at least
    ``1 - spread`` of the center's slack.
    """
    center = find_coherent(cs)
    if isinstance(center, Infeasible):
        return []
    basis = tangent_basis(cs)
    out = []
    x0 = center.values
    slack0 = cs.h_ineq - cs.g_ineq @ x0
    for _ in range(n):
        if basis.shape[1] == 0:
            out.append(AngleSystem(x0.copy()))
            continue
        d = basis @ rng.standard_normal(basis.shape[1])
        drop = cs.g_ineq @ d
        with np.errstate(divide="ignore"):
            caps = np.where(drop > 0.0, spread * slack0 / drop, np.inf)
        step = rng.uniform(0.0, 1.0) * min(1.0, float(np.min(caps)))
        out.append(AngleSystem(x0 + step * d))
    return out
