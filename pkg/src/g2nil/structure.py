"""Existence criteria for coclosed and purely coclosed structures.

Everything is driven by the metric decomposition of a 7-dimensional 2-step
nilpotent algebra: the derived algebra n' (dimension 1, 2 or 3), its
orthogonal complement r, and the abelian part a = center ∩ n'-perp, whose
dimension dim(center) - dim(n') is metric independent.

Criteria, by dim n':

* 1 — coclosed always; purely coclosed iff tr^2(A^2) = 4 tr(A^4) for
  A = -j(z), z spanning n' (the condition is scale invariant).
* 2 — coclosed iff a != 0; purely coclosed iff on the canonical oriented
  4-plane the self-dual parts of d(zeta_1), d(zeta_2) are orthogonal with
  equal norms for an orthonormal basis {zeta_i} of (n')*, for one of the two
  orientations. For a symmetric 2x2 Gram matrix S this is tr^2(S) = 2 tr(S^2).
* 3 — coclosed always; purely coclosed iff tr^2(S) = 2 tr(S^2) for the 3x3
  self-dual Gram matrix S, for one of the two orientations.

In exact mode every trace above has the form x + y*sqrt(T) with x, y, T
rational, so the criteria are decided with zero tolerance: when sqrt(T) is
irrational both components must vanish separately (which also makes the
verdict orientation independent).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._linalg import dot, gram_schmidt_sq, nullspace, rational_sqrt, vec
from .exterior import (DegenerateError, ExactnessError, G2nilError, KForm, Mode,
                       close, form_inner, resolve_tolerance)
from .liealg import LieAlgebra, Metric, bracket_float, jz_matrix

__all__ = [
    "UnsupportedAlgebraError", "MetricDecomposition", "decompose",
    "CriterionReport", "case1_exists", "case2_exists", "case3_exists",
    "coclosed_exists", "purely_coclosed_exists", "coclosed_always",
    "symmetrize_M", "m_matrix", "sd_basis_forms",
]


class UnsupportedAlgebraError(G2nilError):
    """The algebra is outside the supported family (7-dim, 2-step, dim n' <= 3)."""


# ---------------------------------------------------------------------------
# metric decomposition


@dataclass
class MetricDecomposition:
    L: LieAlgebra
    g: Metric
    mode: Mode
    nprime: list          # basis of the derived algebra (always exact)
    complement: list      # basis of r = orthogonal complement of n'
    center: list          # basis of the center (always exact)
    abelian: list         # basis of a = center ∩ n'-perp
    rtilde: list          # canonical oriented 4-plane inside r (dim n' in {2,3})

    @property
    def derived_dim(self) -> int:
        return len(self.nprime)

    @property
    def abelian_dim(self) -> int:
        return len(self.abelian)


def _orthocomplement_exact(span_rows, g: Metric, inside=None):
    """Exact basis of {x : g(x, w) = 0 for w in span}, optionally within a subspace."""
    if not span_rows:
        rows = []
    else:
        rows = [mat_row for mat_row in
                (tuple(dot(w, col) for col in zip(*g.rows)) for w in span_rows)]
    if inside is None:
        if not rows:
            n = g.dim
            return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        return nullspace(tuple(rows))
    # coordinates relative to `inside` basis
    if not rows:
        return list(inside)
    reduced = tuple(tuple(dot(r, b) for b in inside) for r in rows)
    coords = nullspace(reduced)
    return [tuple(sum(c[k] * inside[k][j] for k in range(len(inside)))
                  for j in range(g.dim)) for c in coords]


def _orthocomplement_float(span_rows, g: Metric, inside=None):
    import numpy as np
    gm = np.array([[float(x) for x in row] for row in g.rows])
    n = g.dim
    basis = np.eye(n) if inside is None else np.array(
        [[float(x) for x in v] for v in inside]).T  # columns span the subspace
    if span_rows:
        A = np.array([[float(x) for x in w] for w in span_rows]) @ gm @ basis
        _, s, vt = np.linalg.svd(A)
        rank = int(np.sum(s > 1e-12 * (s[0] if len(s) else 1.0)))
        coords = vt[rank:].T
    else:
        coords = np.eye(basis.shape[1])
    vecs = basis @ coords
    return [tuple(float(x) for x in vecs[:, k]) for k in range(vecs.shape[1])]


def decompose(L: LieAlgebra, g: Metric) -> MetricDecomposition:
    """Split the algebra along the metric; entry point for all criteria."""
    if L.dim != 7:
        raise UnsupportedAlgebraError("expected a 7-dimensional algebra")
    if not L.is_two_step():
        raise UnsupportedAlgebraError("expected a 2-step nilpotent algebra")
    if g.dim != 7:
        raise ValueError("metric dimension mismatch")
    nprime = L.derived_basis()
    if not 1 <= len(nprime) <= 3:
        raise UnsupportedAlgebraError(
            f"derived algebra has dimension {len(nprime)}; supported: 1, 2, 3")
    center = L.center_basis()
    exact = g.mode is Mode.EXACT
    ortho = _orthocomplement_exact if exact else _orthocomplement_float
    complement = ortho(nprime, g)
    abelian = ortho(nprime, g, inside=center)
    rtilde: list = []
    if len(nprime) == 3:
        rtilde = list(complement)  # dim r = 4, the plane is forced
    elif len(nprime) == 2 and abelian:
        w0 = ortho(abelian, g, inside=complement)
        rtilde = list(w0)
        for a_vec in abelian:
            if len(rtilde) == 4:
                break
            rtilde.append(tuple(a_vec))
    return MetricDecomposition(L, g, g.mode, nprime, complement, center, abelian, rtilde)


# ---------------------------------------------------------------------------
# reports


@dataclass
class CriterionReport:
    case: int
    kind: str                      # "purely" or "coclosed"
    exists: bool
    orientation: str | None       # "+", "-" or None
    witness: dict | None
    diagnostics: dict
    mode: Mode

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, Fraction):
                return str(x)
            if isinstance(x, (list, tuple)):
                return [enc(v) for v in x]
            if isinstance(x, dict):
                return {k: enc(v) for k, v in x.items()}
            return x
        return {
            "case": self.case,
            "kind": self.kind,
            "exists": self.exists,
            "orientation": self.orientation,
            "witness": enc(self.witness),
            "diagnostics": enc(self.diagnostics),
            "mode": self.mode.value,
        }


# ---------------------------------------------------------------------------
# case 1


def case1_exists(D: MetricDecomposition, tol: float | None = None) -> CriterionReport:
    """Purely coclosed existence for dim n' = 1: tr^2(A^2) = 4 tr(A^4)."""
    if D.derived_dim != 1:
        raise UnsupportedAlgebraError("case 1 requires a 1-dimensional derived algebra")
    z = D.nprime[0]
    J = jz_matrix(D.L, D.g, z, D.complement)
    m = len(J)
    # A = -J; traces of even powers are insensitive to the sign
    if D.mode is Mode.EXACT:
        J2 = [[sum(J[i][k] * J[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
        tr2 = sum(J2[i][i] for i in range(m))
        tr4 = sum(sum(J2[i][k] * J2[k][i] for k in range(m)) for i in range(m))
        lhs, rhs = tr2 * tr2, 4 * tr4
        exists = lhs == rhs
    else:
        import numpy as np
        A2 = np.array(J) @ np.array(J)
        tr2 = float(np.trace(A2))
        tr4 = float(np.trace(A2 @ A2))
        lhs, rhs = tr2 * tr2, 4.0 * tr4
        exists = close(lhs, rhs, tol)
    witness = {"z": [str(c) for c in z]} if exists else None
    return CriterionReport(1, "purely", exists, None, witness,
                           {"lhs": lhs, "rhs": rhs,
                            "identity": "tr^2(A^2) = 4 tr(A^4)"}, D.mode)


# ---------------------------------------------------------------------------
# shared self-dual machinery for cases 2 and 3


def _beta_coords(D: MetricDecomposition):
    """2-forms d(z_i^b) restricted to the canonical 4-plane.

    Returns (p, K, W, Q): squared norms p_i of an orthogonal basis of n';
    K_ij = <beta_i, beta_j> in the orthonormal frame of the plane;
    W_ij = coefficient of beta_i ∧ beta_j on the plane's orthonormal volume,
    times sqrt(Q); Q = product of the plane basis squared norms. All exact
    (or float, following the metric mode). beta_i(x, y) = -g(z_i, [x, y]).
    """
    L, g = D.L, D.g
    exact = D.mode is Mode.EXACT
    if exact:
        zs, p = gram_schmidt_sq([vec(v) for v in D.nprime], g.inner)
        ws, q = gram_schmidt_sq([vec(v) for v in D.rtilde], g.inner)
    else:
        from .liealg import _float_gram_schmidt
        zs, p = _float_gram_schmidt([[float(x) for x in v] for v in D.nprime], g.inner)
        ws, q = _float_gram_schmidt([[float(x) for x in v] for v in D.rtilde], g.inner)
    k = len(zs)
    brk = (L.bracket if exact else (lambda x, y: bracket_float(L, x, y)))
    # beta_i(w_a, w_b) for a < b
    pairs = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    B = []
    for z in zs:
        row = {}
        for (a, b) in pairs:
            row[(a, b)] = -g.inner(z, brk(ws[a], ws[b]))
        B.append(row)
    zero = Fraction(0) if exact else 0.0
    K = [[zero] * k for _ in range(k)]
    W = [[zero] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            acc = zero
            for (a, b) in pairs:
                acc += B[i][(a, b)] * B[j][(a, b)] / (q[a] * q[b])
            K[i][j] = acc
            # (beta_i ∧ beta_j)(w1, w2, w3, w4) over the six (2,2)-shuffles
            W[i][j] = (B[i][(0, 1)] * B[j][(2, 3)]
                       - B[i][(0, 2)] * B[j][(1, 3)]
                       + B[i][(0, 3)] * B[j][(1, 2)]
                       + B[j][(0, 1)] * B[i][(2, 3)]
                       - B[j][(0, 2)] * B[i][(1, 3)]
                       + B[j][(0, 3)] * B[i][(1, 2)])
    Q = q[0] * q[1] * q[2] * q[3]
    return p, K, W, Q


def _trace_identity_exact(p, K, W, Q, factor: int):
    """Evaluate tr^2(S) ?= factor * tr(S^2) exactly for both orientations.

    S_or = (K_ij + or * W_ij / sqrt(Q)) / (2 sqrt(p_i p_j)). Returns
    (exists, orientation, pairs) with pairs mapping "+"/"-" to a (lhs, rhs)
    tuple: Fractions when sqrt(Q) is rational, floats otherwise.
    """
    k = len(p)
    A = sum(Fraction(K[i][i]) / (2 * p[i]) for i in range(k))
    Bc = sum(Fraction(W[i][i]) / (2 * p[i]) for i in range(k))
    T = Fraction(1, 1) / Q
    C = sum((Fraction(K[i][j]) ** 2 + Fraction(W[i][j]) ** 2 * T) / (4 * p[i] * p[j])
            for i in range(k) for j in range(k))
    Dd = sum(Fraction(K[i][j]) * W[i][j] / (2 * p[i] * p[j])
             for i in range(k) for j in range(k))
    t0 = rational_sqrt(T)
    if t0 is not None:
        pairs, verdicts = {}, {}
        for orient, s in (("+", 1), ("-", -1)):
            tr = A + s * Bc * t0
            tr_sq = C + s * Dd * t0
            pairs[orient] = (tr * tr, factor * tr_sq)
            verdicts[orient] = tr * tr == factor * tr_sq
        orient = "+" if verdicts["+"] else ("-" if verdicts["-"] else None)
        return orient is not None, orient, pairs
    # irrational sqrt: rational and radical components must vanish separately,
    # so the verdict is orientation independent (conjugation swaps S_+ and S_-)
    ok = (A * A + Bc * Bc * T == factor * C) and (2 * A * Bc == factor * Dd)
    tf = float(T) ** 0.5
    pairs = {}
    for orient, s in (("+", 1), ("-", -1)):
        lhs = (float(A) + s * float(Bc) * tf) ** 2
        rhs = factor * (float(C) + s * float(Dd) * tf)
        pairs[orient] = (lhs, rhs)
    return ok, ("+" if ok else None), pairs


def _trace_identity_float(p, K, W, Q, factor: int, tol):
    from math import sqrt
    k = len(p)
    rq = sqrt(Q)
    pairs, verdicts = {}, {}
    for orient, s in (("+", 1), ("-", -1)):
        S = [[(K[i][j] + s * W[i][j] / rq) / (2.0 * sqrt(p[i] * p[j]))
              for j in range(k)] for i in range(k)]
        tr = sum(S[i][i] for i in range(k))
        tr_sq = sum(S[i][j] * S[j][i] for i in range(k) for j in range(k))
        pairs[orient] = (tr * tr, factor * tr_sq)
        verdicts[orient] = close(tr * tr, factor * tr_sq, tol)
    orient = "+" if verdicts["+"] else ("-" if verdicts["-"] else None)
    return orient is not None, orient, pairs


def _plane_witness(D: MetricDecomposition, orient) -> dict:
    if D.mode is Mode.EXACT:
        plane = [[str(x) for x in v] for v in D.rtilde]
    else:
        plane = [[float(x) for x in v] for v in D.rtilde]
    return {"rtilde": plane, "orientation": orient}


def _identity_diagnostics(orient, pairs) -> dict:
    lead = pairs[orient if orient is not None else "+"]
    return {"identity": "tr^2(S) = 2 tr(S^2)",
            "lhs": lead[0], "rhs": lead[1],
            "plus": list(pairs["+"]), "minus": list(pairs["-"])}


def sd_gram(D: MetricDecomposition, orientation: int = 1):
    """Gram matrix S of the self-dual parts of the d(zeta_i) on the canonical
    4-plane, for the given orientation (+1 or -1).

    Exact mode: entries are Fractions when rational and Surd values otherwise;
    float mode: plain floats.
    """
    if not D.rtilde:
        raise DegenerateError("no canonical 4-plane (abelian part is trivial)")
    p, K, W, Q = _beta_coords(D)
    k = len(p)
    if D.mode is Mode.FLOAT:
        from math import sqrt
        rq = sqrt(Q)
        return [[(K[i][j] + orientation * W[i][j] / rq)
                 / (2.0 * sqrt(p[i] * p[j])) for j in range(k)] for i in range(k)]
    from ._radicals import Surd
    inv_rq = Surd.sqrt(Fraction(1, 1) / Q)
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            try:
                num = Surd(Fraction(K[i][j])) + orientation * (Fraction(W[i][j]) * inv_rq)
                entry = num * Surd.sqrt(Fraction(1, 4) / (p[i] * p[j]))
            except ValueError as exc:
                raise ExactnessError(
                    f"S[{i}][{j}] mixes incompatible radicals; "
                    "use a float metric for this Gram matrix") from exc
            row.append(entry.as_fraction() if entry.is_rational else entry)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# cases 2 and 3


def case2_exists(D: MetricDecomposition, tol: float | None = None) -> CriterionReport:
    """Purely coclosed existence for dim n' = 2."""
    if D.derived_dim != 2:
        raise UnsupportedAlgebraError("case 2 requires a 2-dimensional derived algebra")
    if D.abelian_dim == 0:
        return CriterionReport(2, "purely", False, None, None,
                               {"lhs": None, "rhs": None, "abelian_dim": 0,
                                "reason": "no coclosed structures: center equals "
                                          "the derived algebra"}, D.mode)
    p, K, W, Q = _beta_coords(D)
    if D.mode is Mode.EXACT:
        exists, orient, pairs = _trace_identity_exact(p, K, W, Q, 2)
    else:
        exists, orient, pairs = _trace_identity_float(p, K, W, Q, 2, tol)
    witness = _plane_witness(D, orient) if exists else None
    return CriterionReport(2, "purely", exists, orient, witness,
                           _identity_diagnostics(orient, pairs), D.mode)


def case3_exists(D: MetricDecomposition, tol: float | None = None) -> CriterionReport:
    """Purely coclosed existence for dim n' = 3."""
    if D.derived_dim != 3:
        raise UnsupportedAlgebraError("case 3 requires a 3-dimensional derived algebra")
    p, K, W, Q = _beta_coords(D)
    if D.mode is Mode.EXACT:
        exists, orient, pairs = _trace_identity_exact(p, K, W, Q, 2)
    else:
        exists, orient, pairs = _trace_identity_float(p, K, W, Q, 2, tol)
    witness = _plane_witness(D, orient) if exists else None
    return CriterionReport(3, "purely", exists, orient, witness,
                           _identity_diagnostics(orient, pairs), D.mode)


def purely_coclosed_exists(L: LieAlgebra, g: Metric,
                           tol: float | None = None) -> CriterionReport:
    D = decompose(L, g)
    if D.derived_dim == 1:
        return case1_exists(D, tol)
    if D.derived_dim == 2:
        return case2_exists(D, tol)
    return case3_exists(D, tol)


def coclosed_exists(L: LieAlgebra, g: Metric, tol: float | None = None) -> CriterionReport:
    """Coclosed existence: metric independent (dim n' != 2, or abelian part != 0)."""
    D = decompose(L, g)
    exists = D.derived_dim != 2 or D.abelian_dim > 0
    diag = {"derived_dim": D.derived_dim, "abelian_dim": D.abelian_dim,
            "lhs": None, "rhs": None}
    return CriterionReport(D.derived_dim, "coclosed", exists, None, None, diag, D.mode)


def coclosed_always(L: LieAlgebra) -> bool:
    """Metric-free coclosed admissibility of the algebra."""
    derived = len(L.derived_basis())
    center = len(L.center_basis())
    return derived != 2 or center > 2


# ---------------------------------------------------------------------------
# coframe-level data and the symmetrization of M


def sd_basis_forms(coframe: Sequence[KForm]) -> list[KForm]:
    """sigma_1 = e13 - e24, sigma_2 = -e14 - e23, sigma_3 = e12 + e34
    built from the first four coframe covectors (each has norm sqrt(2))."""
    e = list(coframe[:4])
    return [
        e[0].wedge(e[2]) - e[1].wedge(e[3]),
        -1 * e[0].wedge(e[3]) - e[1].wedge(e[2]),
        e[0].wedge(e[1]) + e[2].wedge(e[3]),
    ]


def m_matrix(L: LieAlgebra, coframe: Sequence[KForm], g: Metric) -> list[list]:
    """M_ij = g(sigma_i, d e^{4+j}) for an adapted coframe.

    The coframe's last three covectors span the annihilator-dual of n'; the
    structure is purely coclosed iff M is symmetric and trace free.
    """
    sigmas = sd_basis_forms(coframe)
    alphas = [L.ce_diff(coframe[4 + j]) for j in range(3)]
    return [[form_inner(s, a, g.rows, g.ctx) for a in alphas] for s in sigmas]


def symmetrize_M(M, tol: float | None = None) -> dict:
    """Find P in O(3) with A = M P symmetric and trace free.

    Feasible iff tr^2(S) = 2 tr(S^2) for S = (1/2) M^T M; equivalently the
    singular values a >= b >= c of M satisfy a = b + c. P is assembled from
    the SVD M = U Sigma V^T as P = V diag(1, 1, -1)* U^T with the -1 at the
    position of the dominant singular value. Raises DegenerateError when the
    identity fails.
    """
    import numpy as np
    eps = resolve_tolerance(tol)
    Mf = np.array([[float(x) for x in row] for row in M], dtype=float)
    if Mf.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    S = 0.5 * (Mf.T @ Mf)
    lhs, rhs = float(np.trace(S)) ** 2, 2.0 * float(np.trace(S @ S))
    if not close(lhs, rhs, eps):
        raise DegenerateError(
            f"no orthogonal P makes MP symmetric trace-free: tr^2(S)={lhs} vs 2tr(S^2)={rhs}")
    U, sv, Vt = np.linalg.svd(Mf)
    # singular values are sorted descending; feasibility forces sv0 = sv1 + sv2
    signs = np.array([1.0, 1.0, 1.0])
    signs[0] = -1.0
    P = Vt.T @ np.diag(signs) @ U.T
    A = Mf @ P
    scale = 1.0 + float(np.max(np.abs(Mf)))
    assert np.max(np.abs(P @ P.T - np.eye(3))) < 1e-12 * (1.0 + float(np.max(np.abs(P))))
    if np.max(np.abs(A - A.T)) > 10 * eps * scale or abs(np.trace(A)) > 10 * eps * scale:
        raise DegenerateError("symmetrization failed numerically")
    return {"P": P.tolist(), "A": A.tolist()}
