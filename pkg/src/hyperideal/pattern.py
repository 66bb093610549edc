"""Circle-pattern reconstruction and the forward geometric oracle.

From a critical angle system, Schlaefli-type derivative identities give
truncated hyperbolic lengths: ``a_edge = -2 dF/dalpha`` (agreeing from both
sides of each interior edge) and vertex potentials ``a_vertex`` integrated
from the gamma-partial differences over the vertex/triangle incidence graph.
These convert to euclidean data by

    r_i = exp(-a_i)       (up to the gauge a = 0, r = 1 at vertex class 0),
    l_ij^2 = r_i^2 + r_j^2 + 2 r_i r_j cosh(a_ij).

The forward direction reads angles off an explicitly drawn decorated
triangle: gamma is the euclidean corner angle, alpha the intersection angle
of an edge line with the triangle's orthocircle (the circle orthogonal to
the three vertex circles, centered at their radical center).
"""

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .coherent import AngleSystem, build_constraints, is_coherent
from .energy import in_delta, tet_volume_grad
from .errors import NotCriticalError, PreconditionError
from .surface import INTERIOR, AngleData, GluedTriangulation

COMPAT_TOL = 1e-7


# -- compatibility residuals and potentials ----------------------------------


def _potential_walk(tri, gp):
    """BFS potentials on the vertex-class/triangle incidence graph.

    Returns (psi_vertex, max_cycle_residual) where psi differences along a
    class->triangle->class path accumulate the gamma-partial differences; the
    residual is the largest mismatch over non-tree incidences (one per
    fundamental cycle of the graph).
    """
    n_v = len(tri.vertices)
    n_t = tri.triangle_count
    psi_v = np.full(n_v, np.nan)
    psi_t = np.full(n_t, np.nan)
    psi_v[0] = 0.0
    queue = deque([("v", 0)])
    residual = 0.0
    corners_of_class = {v: cls for v, cls in enumerate(tri.vertices)}
    while queue:
        kind, i = queue.popleft()
        if kind == "v":
            for t, c in corners_of_class[i]:
                cand = psi_v[i] - gp[t, c]
                if math.isnan(psi_t[t]):
                    psi_t[t] = cand
                    queue.append(("t", t))
                else:
                    residual = max(residual, abs(psi_t[t] - cand))
        else:
            for c in range(3):
                v = tri.corner_class[(i, c)]
                cand = psi_t[i] + gp[i, c]
                if math.isnan(psi_v[v]):
                    psi_v[v] = cand
                    queue.append(("v", v))
                else:
                    residual = max(residual, abs(psi_v[v] - cand))
    if np.any(np.isnan(psi_v)) or np.any(np.isnan(psi_t)):
        raise PreconditionError("surface is disconnected")
    return psi_v, residual


def compat_residuals(tri, x: AngleSystem):
    """(max |compat_1| over interior edges, max |compat_2| over fundamental cycles)."""
    grads = tet_volume_grad(x.alphas(), x.gammas())
    ap, gp = grads[:, :3], grads[:, 3:]
    c1 = 0.0
    for e in tri.edges:
        if e.kind == INTERIOR:
            (t, s), (t2, s2) = e.sides
            c1 = max(c1, abs(ap[t, s] - ap[t2, s2]))
    _, c2 = _potential_walk(tri, gp)
    return c1, c2


# -- truncated lengths and the decorated metric -------------------------------


@dataclass
class TruncatedLengths:
    """Truncated hyperbolic edge lengths and gauge-fixed vertex potentials."""

    a_edge: np.ndarray  # per edge index, > 0
    a_vertex: np.ndarray  # per vertex class, a_vertex[0] == 0
    max_cycle_residual: float


def truncated_lengths(x: AngleSystem, tri: GluedTriangulation,
                      compat_tol=COMPAT_TOL) -> TruncatedLengths:
    """Truncated lengths at a critical point; raises if x is not critical."""
    grads = tet_volume_grad(x.alphas(), x.gammas())
    ap, gp = grads[:, :3], grads[:, 3:]
    a_edge = np.empty(len(tri.edges))
    for e in tri.edges:
        if e.kind == INTERIOR:
            (t, s), (t2, s2) = e.sides
            one, two = -2.0 * ap[t, s], -2.0 * ap[t2, s2]
            if abs(one - two) > 2.0 * compat_tol:
                raise NotCriticalError(
                    f"edge {e.index}: truncated length differs across the edge "
                    f"({one:.12g} vs {two:.12g}); angle system is not critical"
                )
            a_edge[e.index] = 0.5 * (one + two)
        else:
            ((t, s),) = e.sides
            a_edge[e.index] = -2.0 * ap[t, s]
    psi_v, cycle_res = _potential_walk(tri, gp)
    if cycle_res > compat_tol:
        raise NotCriticalError(
            f"gamma-potential cycle residual {cycle_res:.3e} too large; "
            "angle system is not critical"
        )
    a_vertex = -2.0 * psi_v
    a_vertex -= a_vertex[0]
    if np.any(a_edge <= 0.0):
        raise NotCriticalError("nonpositive truncated edge length")
    return TruncatedLengths(a_edge=a_edge, a_vertex=a_vertex,
                            max_cycle_residual=cycle_res)


@dataclass
class DecoratedMetric:
    """Euclidean edge lengths and vertex-circle radii (a circle pattern, up to scale)."""

    lengths: np.ndarray  # per edge index
    radii: np.ndarray  # per vertex class

    def scaled(self, factor):
        return DecoratedMetric(lengths=self.lengths * factor, radii=self.radii * factor)

    def triangle_sides(self, tri, t):
        return np.array([self.lengths[tri.side_edge[(t, s)]] for s in range(3)])

    def corner_radii(self, tri, t):
        return np.array([self.radii[tri.corner_class[(t, c)]] for c in range(3)])

    def validate(self, tri):
        if np.any(self.lengths <= 0.0) or np.any(self.radii <= 0.0):
            raise PreconditionError("lengths and radii must be positive")
        for e in tri.edges:
            (t, s) = e.sides[0]
            ri = self.radii[tri.corner_class[(t, s)]]
            rj = self.radii[tri.corner_class[(t, (s + 1) % 3)]]
            if ri + rj >= self.lengths[e.index]:
                raise PreconditionError(
                    f"edge {e.index}: vertex circles touch or overlap "
                    f"(r_i + r_j = {ri + rj:.12g} >= l = {self.lengths[e.index]:.12g})"
                )
        for t in range(tri.triangle_count):
            l = self.triangle_sides(tri, t)
            if (l[0] + l[1] <= l[2]) or (l[1] + l[2] <= l[0]) or (l[2] + l[0] <= l[1]):
                raise PreconditionError(f"triangle {t} violates the triangle inequality")


def metric_from_lengths(tl: TruncatedLengths, tri: GluedTriangulation) -> DecoratedMetric:
    """Euclidean lengths and radii from truncated hyperbolic data (gauge r[0] = 1)."""
    radii = np.exp(-(tl.a_vertex - tl.a_vertex[0]))
    lengths = np.empty(len(tri.edges))
    for e in tri.edges:
        t, s = e.sides[0]
        ri = radii[tri.corner_class[(t, s)]]
        rj = radii[tri.corner_class[(t, (s + 1) % 3)]]
        lengths[e.index] = math.sqrt(
            ri * ri + rj * rj + 2.0 * ri * rj * math.cosh(tl.a_edge[e.index])
        )
    return DecoratedMetric(lengths=lengths, radii=radii)


# -- planar geometry of one decorated triangle --------------------------------


def place_canonical(l12, l23, l31):
    """Corners of a triangle with the given side lengths: corner 0 at the
    origin, corner 1 at (l12, 0), corner 2 in the upper half plane."""
    if l12 + l23 <= l31 or l23 + l31 <= l12 or l31 + l12 <= l23:
        raise PreconditionError("triangle inequality violated")
    x = (l12 * l12 + l31 * l31 - l23 * l23) / (2.0 * l12)
    y2 = l31 * l31 - x * x
    if y2 <= 0.0:
        raise PreconditionError("degenerate triangle")
    return np.array([[0.0, 0.0], [l12, 0.0], [x, math.sqrt(y2)]])


def place_on_segment(l_sides, pa, pb):
    """Corners (3, 2) of a triangle with sides ``l_sides`` so that corner 0
    is at ``pa``, corner 1 at ``pb``, corners in counterclockwise order."""
    pa = np.asarray(pa, dtype=float)
    pb = np.asarray(pb, dtype=float)
    local = place_canonical(*l_sides)
    u = (pb - pa) / l_sides[0]
    rot = np.array([[u[0], -u[1]], [u[1], u[0]]])
    return pa + local @ rot.T


def radical_center(points, radii):
    """Radical center of three circles and its common power.

    The power is the squared orthocircle radius; it must be positive for the
    orthocircle to exist.
    """
    p1, p2, p3 = (np.asarray(p, dtype=float) for p in points)
    r1, r2, r3 = radii
    # equal-power conditions linearized: 2 (p_j - p_i) . c = |p_j|^2 - |p_i|^2 - r_j^2 + r_i^2
    A = 2.0 * np.array([p2 - p1, p3 - p1])
    b = np.array(
        [
            p2 @ p2 - p1 @ p1 - r2 * r2 + r1 * r1,
            p3 @ p3 - p1 @ p1 - r3 * r3 + r1 * r1,
        ]
    )
    center = np.linalg.solve(A, b)
    power = float((center - p1) @ (center - p1) - r1 * r1)
    return center, power


def orthocircle(l12, l23, l31, r1, r2, r3):
    """Center and radius of the circle orthogonal to the three vertex circles,
    in the canonical placement."""
    points = place_canonical(l12, l23, l31)
    for (i, j, l) in ((0, 1, l12), (1, 2, l23), (2, 0, l31)):
        radii = (r1, r2, r3)
        if radii[i] + radii[j] >= l:
            raise PreconditionError("vertex circles touch or overlap")
    center, power = radical_center(points, (r1, r2, r3))
    if power <= 0.0:
        raise PreconditionError("radical center has nonpositive power; no orthocircle")
    return center, math.sqrt(power)


def _cross2(u, v):
    return float(u[0] * v[1] - u[1] * v[0])


def _signed_edge_distances(points, center):
    """Signed distance of ``center`` from each directed side (s -> s+1);
    positive on the interior (left/counterclockwise) side."""
    out = np.empty(3)
    for s in range(3):
        pa, pb = points[s], points[(s + 1) % 3]
        u = pb - pa
        out[s] = _cross2(u, center - pa) / float(np.hypot(*u))
    return out


def _corner_angles(points):
    out = np.empty(3)
    for c in range(3):
        u = points[(c + 1) % 3] - points[c]
        v = points[(c + 2) % 3] - points[c]
        out[c] = math.atan2(abs(_cross2(u, v)), float(u @ v))
    return out


def read_angles(lengths, radii):
    """Angles (a12, a23, a31, g1, g2, g3) of the decorated triangle with side
    lengths (l12, l23, l31) and vertex radii (r1, r2, r3).

    gamma is the euclidean corner angle; alpha the angle between an edge line
    and the orthocircle, obtuse exactly when the orthocircle center lies on
    the far side of that edge.  The result lies in Delta.
    """
    l12, l23, l31 = lengths
    r1, r2, r3 = radii
    points = place_canonical(l12, l23, l31)
    center, radius = orthocircle(l12, l23, l31, r1, r2, r3)
    h = _signed_edge_distances(points, center)
    if np.any(np.abs(h) >= radius):
        raise PreconditionError("an edge line does not meet the orthocircle")
    alpha = np.arccos(np.clip(h / radius, -1.0, 1.0))
    gamma = _corner_angles(points)
    if not np.all(in_delta(alpha, gamma, closed=False)):
        raise PreconditionError("read-off angles fall outside Delta")
    return np.concatenate([alpha, gamma])


# -- probing and verification --------------------------------------------------


def _face_circle_on_edge(tri, dm, t, s):
    """(center_x_along_edge, height_above_edge, radius) of the face circle of
    ``t`` in coordinates where side ``s`` runs from corner s at 0 to corner
    s+1 at (l, 0) and the triangle lies above."""
    sides = dm.triangle_sides(tri, t)
    radii = dm.corner_radii(tri, t)
    rolled_l = np.roll(sides, -s)
    rolled_r = np.roll(radii, -s)
    points = place_canonical(*rolled_l)
    center, power = radical_center(points, rolled_r)
    if power <= 0.0:
        raise PreconditionError(f"triangle {t}: no orthocircle")
    return center[0], center[1], math.sqrt(power)


def face_circle_intersection_angle(tri, dm, edge):
    """Intersection angle of the two face circles across an interior edge.

    Zero means the circles coincide; this is the problem datum theta at the
    edge.  The two circles meet on the edge line, so the angle can be read
    from an abutting placement of the two triangles.
    """
    (t, s), (t2, s2) = edge.sides
    cx, h, rad = _face_circle_on_edge(tri, dm, t, s)
    cx2, h2, rad2 = _face_circle_on_edge(tri, dm, t2, s2)
    l = dm.lengths[edge.index]
    # the second chart is glued with reversed direction: x -> l - x, y -> -y
    d2 = (cx - (l - cx2)) ** 2 + (h + h2) ** 2
    cosang = (rad * rad + rad2 * rad2 - d2) / (2.0 * rad * rad2)
    return math.acos(min(1.0, max(-1.0, cosang)))


def delaunay_margins(tri, dm, edge):
    """Condition (ii) margins (pi/2 minus the face/far-vertex-circle angle)
    for the two face circles across an interior edge; non-intersection counts
    as margin pi/2."""
    (t, s), (t2, s2) = edge.sides
    l = dm.lengths[edge.index]
    margins = []
    for (ta, sa, tb, sb) in ((t, s, t2, s2), (t2, s2, t, s)):
        cx, h, rad = _face_circle_on_edge(tri, dm, ta, sa)
        far = place_on_segment(np.roll(dm.triangle_sides(tri, tb), -sb),
                               (l, 0.0), (0.0, 0.0))[2]
        rho = dm.corner_radii(tri, tb)[(sb + 2) % 3]
        d2 = (cx - far[0]) ** 2 + (h - far[1]) ** 2
        cosang = (d2 - rad * rad - rho * rho) / (2.0 * rad * rho)
        if abs(cosang) > 1.0:
            margins.append(0.5 * math.pi)
        else:
            margins.append(0.5 * math.pi - math.acos(cosang))
    return margins


def probe(tri: GluedTriangulation, dm: DecoratedMetric, cross_check_tol=1e-10):
    """Read (AngleData, AngleSystem) off an explicit decorated metric.

    Preconditions: condition (i) on every edge and the edge-local Delaunay
    condition (ii) across every interior edge.  The interior theta computed
    as pi - alpha - alpha' is cross-checked against the direct intersection
    angle of the two face circles.
    """
    dm.validate(tri)
    for e in tri.edges:
        if e.kind == INTERIOR:
            for m in delaunay_margins(tri, dm, e):
                if m <= 0.0:
                    raise PreconditionError(
                        f"edge {e.index}: Delaunay condition (ii) violated "
                        f"(face circle meets far vertex circle at {0.5 * math.pi - m:.6g} rad)"
                    )
    values = np.empty(6 * tri.triangle_count)
    for t in range(tri.triangle_count):
        values[6 * t:6 * t + 6] = read_angles(
            dm.triangle_sides(tri, t), dm.corner_radii(tri, t)
        )
    x = AngleSystem(values)
    theta = np.empty(len(tri.edges))
    for e in tri.edges:
        if e.kind == INTERIOR:
            (t, s), (t2, s2) = e.sides
            theta[e.index] = np.pi - values[6 * t + s] - values[6 * t2 + s2]
            direct = face_circle_intersection_angle(tri, dm, e)
            if abs(direct - theta[e.index]) > cross_check_tol:
                raise PreconditionError(
                    f"edge {e.index}: face-circle angle cross-check failed "
                    f"({direct:.12g} vs {theta[e.index]:.12g})"
                )
        else:
            ((t, s),) = e.sides
            theta[e.index] = np.pi - values[6 * t + s]
        if not 0.0 <= theta[e.index] < np.pi:
            raise PreconditionError(f"edge {e.index}: theta out of range [0, pi)")
    xi = np.zeros(len(tri.vertices))
    for v, corners in enumerate(tri.vertices):
        xi[v] = sum(values[6 * t + 3 + c] for t, c in corners)
    data = AngleData(theta=theta, xi=xi)
    report = is_coherent(x, build_constraints(tri, data))
    if not report.ok:
        raise PreconditionError(f"probed angle system is not coherent: {report.violations[:3]}")
    return data, x


@dataclass
class PatternReport:
    """Residuals of a decorated metric against problem data (all scale-invariant)."""

    max_theta_residual: float
    max_xi_residual: float
    min_condition_i_slack: float  # min over edges of (l - r_i - r_j) / l
    min_condition_ii_margin: float  # min over interior edges, radians


def verify_pattern(tri, data: AngleData, dm: DecoratedMetric) -> PatternReport:
    """Compare the pattern read off ``dm`` with the problem data."""
    values = np.empty(6 * tri.triangle_count)
    for t in range(tri.triangle_count):
        values[6 * t:6 * t + 6] = read_angles(
            dm.triangle_sides(tri, t), dm.corner_radii(tri, t)
        )
    theta_res = 0.0
    cond_i = math.inf
    cond_ii = 0.5 * math.pi
    for e in tri.edges:
        if e.kind == INTERIOR:
            (t, s), (t2, s2) = e.sides
            theta = np.pi - values[6 * t + s] - values[6 * t2 + s2]
            cond_ii = min(cond_ii, *delaunay_margins(tri, dm, e))
        else:
            ((t, s),) = e.sides
            theta = np.pi - values[6 * t + s]
        theta_res = max(theta_res, abs(theta - data.theta[e.index]))
        t, s = e.sides[0]
        ri = dm.radii[tri.corner_class[(t, s)]]
        rj = dm.radii[tri.corner_class[(t, (s + 1) % 3)]]
        cond_i = min(cond_i, (dm.lengths[e.index] - ri - rj) / dm.lengths[e.index])
    xi_res = 0.0
    for v, corners in enumerate(tri.vertices):
        xi = sum(values[6 * t + 3 + c] for t, c in corners)
        xi_res = max(xi_res, abs(xi - data.xi[v]))
    return PatternReport(
        max_theta_residual=float(theta_res),
        max_xi_residual=float(xi_res),
        min_condition_i_slack=float(cond_i),
        min_condition_ii_margin=float(cond_ii),
    )
