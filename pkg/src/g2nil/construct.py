"""Constructive production of coclosed and purely coclosed coframes.

Given an algebra and a metric that passes the relevant existence criterion,
these routines output an explicit orthonormal adapted coframe (seven 1-forms)
whose induced structure realises the requested torsion class, verified a
posteriori through the torsion machinery. Everything here runs in float mode;
the exact criteria live in `structure`.

The common normal form: a coframe (e^1..e^7) is *adapted* when e^1..e^4 span
the duals of the canonical 4-plane and the remaining covectors are fed into
the standard 3-form as phi = sigma_1 ∧ e^5 + sigma_2 ∧ e^6 + sigma_3 ∧ e^7
+ e^567 (which is the standard pattern). Torsion conditions then become
linear-algebra statements about the matrix M_mj = <sigma_m, d e^{4+j}>:
symmetric for coclosed, symmetric trace-free for purely coclosed. Cases 1
and 2 use the analogous reductions described in `structure`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exterior import DegenerateError, KForm, Mode, resolve_tolerance
from .g2su3 import TorsionReport, induced_metric, phi_from_coframe, torsion_class
from .liealg import LieAlgebra, Metric, bracket_float
from .structure import (CriterionReport, MetricDecomposition, decompose,
                        purely_coclosed_exists, symmetrize_M)

__all__ = ["Construction", "construct", "construct_coclosed",
           "construct_case1", "construct_case2", "construct_case3"]


# ---------------------------------------------------------------------------
# small numerical helpers


def _gram_schmidt(vectors, gm: np.ndarray, tol: float = 1e-12):
    """Orthonormal rows spanning the same space, inner product x^T gm y."""
    out = []
    for v in vectors:
        w = np.array([float(x) for x in v], dtype=float)
        for u in out:
            w = w - (u @ gm @ w) * u
        n = float(w @ gm @ w)
        if n > tol:
            out.append(w / np.sqrt(n))
    return out


def _flat(v: np.ndarray, gm: np.ndarray) -> KForm:
    """Covector g(v, .) as a float 1-form."""
    coeffs = gm @ v
    return KForm.from_terms(len(v), 1, {(i + 1,): float(c)
                                        for i, c in enumerate(coeffs) if abs(c) > 0.0},
                            Mode.FLOAT)


# sigma_1 = e13 - e24, sigma_2 = -e14 - e23, sigma_3 = e12 + e34 as
# coefficient maps on index pairs of an orthonormal 4-frame (0-based)
_SIGMA = (
    {(0, 2): 1.0, (1, 3): -1.0},
    {(0, 3): -1.0, (1, 2): -1.0},
    {(0, 1): 1.0, (2, 3): 1.0},
)
_SIGMA_MINUS = (
    {(0, 2): 1.0, (1, 3): 1.0},
    {(0, 3): -1.0, (1, 2): 1.0},
    {(0, 1): 1.0, (2, 3): -1.0},
)
_PAIRS4 = tuple((a, b) for a in range(4) for b in range(a + 1, 4))


def _sigma_matrices(table):
    mats = []
    for coeffs in table:
        m = np.zeros((4, 4))
        for (a, b), c in coeffs.items():
            m[a, b] = c
            m[b, a] = -c
        mats.append(m)
    return mats


_SIG_P = _sigma_matrices(_SIGMA)
_SIG_M = _sigma_matrices(_SIGMA_MINUS)


def _sd_action(O: np.ndarray, mats) -> np.ndarray:
    """3x3 matrix of the O-induced rotation on the (anti-)self-dual 2-forms:
    D(O)_mn = -1/4 tr(O^T Sigma_m O Sigma_n)."""
    return np.array([[-0.25 * float(np.trace(O.T @ Sm @ O @ Sn)) for Sn in mats]
                     for Sm in mats])


def _so3_vee(W: np.ndarray) -> np.ndarray:
    return np.array([W[2, 1], W[0, 2], W[1, 0]])


def _so3_log(R: np.ndarray) -> np.ndarray:
    """Matrix logarithm on SO(3), robust at both angle extremes."""
    c = max(-1.0, min(1.0, (float(np.trace(R)) - 1.0) / 2.0))
    theta = float(np.arccos(c))
    if theta < 1e-8:
        return 0.5 * (R - R.T)
    if abs(np.pi - theta) < 1e-6:
        # R = exp(pi * K(n)): extract the axis from (R + I) / 2 = n n^T
        B = 0.5 * (R + np.eye(3))
        k = int(np.argmax(np.diag(B)))
        n = B[:, k] / np.sqrt(max(B[k, k], 1e-300))
        n = n / np.linalg.norm(n)
        W = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
        return theta * W
    return theta / (2.0 * np.sin(theta)) * (R - R.T)


def _skew_exp(xi: np.ndarray) -> np.ndarray:
    """exp of a real skew matrix via a Hermitian eigendecomposition."""
    lam, U = np.linalg.eigh(1j * xi)
    return np.real(U @ np.diag(np.exp(-1j * lam)) @ U.conj().T)


def _lift_so3_to_so4(R: np.ndarray) -> np.ndarray:
    """O in SO(4) inducing the rotation R on self-dual 2-forms and the
    identity on anti-self-dual ones, via the generator calculus
    d/dt D(exp(tE)) = (1/4) tr(E [Sigma_m, Sigma_n])."""
    gens = []
    for (a, b) in _PAIRS4:
        E = np.zeros((4, 4))
        E[a, b], E[b, a] = 1.0, -1.0
        gens.append(E)
    rows = []
    for mats in (_SIG_P, _SIG_M):
        comm = [[mats[m] @ mats[n] - mats[n] @ mats[m] for n in range(3)] for m in range(3)]
        for E in gens:
            W = np.array([[0.25 * float(np.trace(E @ comm[m][n])) for n in range(3)]
                          for m in range(3)])
            rows.append(_so3_vee(W))
    # system: columns indexed by generators, first 3 rows = SD part, last 3 = ASD
    A = np.zeros((6, 6))
    for g_idx in range(6):
        A[:3, g_idx] = rows[g_idx]
        A[3:, g_idx] = rows[6 + g_idx]
    target = np.concatenate([_so3_vee(_so3_log(R)), np.zeros(3)])
    coeffs = np.linalg.solve(A, target)
    xi = sum(c * E for c, E in zip(coeffs, gens))
    O = _skew_exp(xi)
    if (np.max(np.abs(_sd_action(O, _SIG_P) - R)) > 1e-9
            or np.max(np.abs(_sd_action(O, _SIG_M) - np.eye(3))) > 1e-9):
        raise DegenerateError("self-dual lift failed to calibrate")
    return O


# ---------------------------------------------------------------------------
# shared assembly


@dataclass
class Construction:
    case: int
    kind: str                    # "purely" or "coclosed"
    coframe: list                # seven float 1-forms
    phi: KForm
    torsion: TorsionReport
    metric_residual: float

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "kind": self.kind,
            "coframe": [f.to_json() for f in self.coframe],
            "phi": self.phi.to_json(),
            "torsion": self.torsion.to_json(),
            "metric_residual": self.metric_residual,
        }


def _float_metric(g: Metric) -> tuple[Metric, np.ndarray]:
    gf = g if g.mode is Mode.FLOAT else g.to_float()
    gm = np.array([[float(x) for x in row] for row in gf.rows])
    return gf, gm


def _finish(L: LieAlgebra, g: Metric, coframe, case: int, kind: str,
            tol: float | None) -> Construction:
    eps = resolve_tolerance(tol)
    phi = phi_from_coframe(coframe)
    metric, _vol = induced_metric(phi)
    _gf, gm = _float_metric(g)
    residual = float(np.max(np.abs(np.array(
        [[float(x) for x in row] for row in metric.rows]) - gm)))
    report = torsion_class(L, phi, tol=tol)
    if not report.coclosed:
        raise DegenerateError(
            f"constructed coframe is not coclosed (residual {report.residual_coclosed})")
    if kind == "purely" and not report.purely_coclosed:
        raise DegenerateError(
            f"constructed coframe is not purely coclosed (tau0 {report.tau0})")
    if residual > 100 * eps:
        raise DegenerateError(f"induced metric drifts from the input ({residual})")
    return Construction(case, kind, list(coframe), phi, report, residual)


def _beta_matrix(L: LieAlgebra, gm: np.ndarray, z: np.ndarray, frame) -> np.ndarray:
    """B_ab = -g(z, [u_a, u_b]) on an orthonormal frame (matrix of d z-flat)."""
    k = len(frame)
    B = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            w = np.array(bracket_float(L, frame[a], frame[b]))
            B[a, b] = -float(z @ gm @ w)
            B[b, a] = -B[a, b]
    return B


# ---------------------------------------------------------------------------
# case 1: dim n' = 1


def _skew_blocks(B: np.ndarray, eps: float):
    """Decompose a real skew matrix into planar blocks and a kernel.

    Returns (blocks, kernel): blocks are (v, w, a) with B v = -a w, B w = a v
    (so the 2-form represented by B restricts to -a v-flat ∧ w-flat ... the
    sign is normalised by the caller), a > 0; kernel is a list of orthonormal
    vectors spanning ker B. All vectors are mutually orthonormal.
    """
    mu, V = np.linalg.eigh(-B @ B)     # eigenvalues a^2, ascending
    scale = max(1.0, float(np.max(np.abs(B))) ** 2)
    kernel, blocks = [], []
    idx = list(np.argsort(mu))
    remaining = [V[:, k] for k in idx]
    vals = [mu[k] for k in idx]
    for v, m in zip(remaining, vals):
        # project away directions already consumed
        for u in ([*kernel] + [x for b in blocks for x in b[:2]]):
            v = v - (u @ v) * u
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            continue
        v = v / nv
        if m < eps * scale:
            kernel.append(v)
            continue
        a = float(np.sqrt(m))
        w = B @ v / a
        w = w / np.linalg.norm(w)
        blocks.append((v, w, a))
    return blocks, kernel


def construct_case1(D: MetricDecomposition, purely: bool = True,
                    tol: float | None = None) -> list:
    """Adapted coframe for dim n' = 1; returns the seven 1-forms."""
    eps = resolve_tolerance(tol)
    L = D.L
    _gf, gm = _float_metric(D.g)
    z = np.array([float(x) for x in D.nprime[0]])
    z = z / np.sqrt(float(z @ gm @ z))
    frame6 = _gram_schmidt(D.complement, gm)
    if len(frame6) != 6:
        raise DegenerateError("complement frame collapsed")
    B = _beta_matrix(L, gm, z, frame6)
    blocks, kernel = _skew_blocks(B, eps)
    amps = [a for (_v, _w, a) in blocks]
    signs = [1.0] * len(blocks)
    if purely:
        best, best_sum = None, None
        for mask in range(2 ** len(blocks)):
            s = [1.0 if mask & (1 << k) else -1.0 for k in range(len(blocks))]
            total = abs(sum(si * ai for si, ai in zip(s, amps)))
            if best_sum is None or total < best_sum:
                best, best_sum = s, total
        scale = 1.0 + sum(amps)
        if best_sum > 1e-7 * scale:
            raise DegenerateError(
                f"cannot balance the torsion blocks (best residual {best_sum}); "
                "the metric fails the existence criterion")
        signs = best
    # assemble pairs: block (v, w) realises d z-flat = -a v-flat ∧ w-flat + ...,
    # so (w, v) carries +a; flip the pair to flip the sign
    pair_coords = []
    for (v, w, a), s in zip(blocks, signs):
        pair_coords.extend([w, v] if s > 0 else [v, w])
    pair_coords.extend(kernel)
    if len(pair_coords) != 6:
        raise DegenerateError("block decomposition lost directions")
    F6 = np.array(frame6)        # rows are the frame vectors in ambient coords
    coframe = [_flat(c @ F6, gm) for c in pair_coords] + [_flat(z, gm)]
    return coframe


# ---------------------------------------------------------------------------
# cases 2 and 3


def _oriented_plane_frame(D: MetricDecomposition, gm: np.ndarray, orientation: str):
    frame = _gram_schmidt(D.rtilde, gm)
    if len(frame) != 4:
        raise DegenerateError("canonical 4-plane frame collapsed")
    if orientation == "-":
        frame[0] = -frame[0]
    return frame


def _sd_coords(L: LieAlgebra, gm: np.ndarray, zs, frame4, sigma_table):
    """Rows y_i: coordinates of (d z_i-flat)^+ in the orthonormal SD basis."""
    out = []
    for z in zs:
        B = _beta_matrix(L, gm, z, frame4)
        y = [sum(c * B[a, b] for (a, b), c in sig.items()) / np.sqrt(2.0)
             for sig in sigma_table]
        out.append(np.array(y))
    return np.array(out)


def construct_case2(D: MetricDecomposition, report: CriterionReport | None = None,
                    purely: bool = True, tol: float | None = None) -> list:
    """Adapted coframe for dim n' = 2; returns the seven 1-forms."""
    eps = resolve_tolerance(tol)
    L = D.L
    gf, gm = _float_metric(D.g)
    if D.abelian_dim == 0:
        raise DegenerateError("no coclosed structures: the center equals n'")
    orientation = "+"
    if purely:
        if report is None:
            report = purely_coclosed_exists(L, gf, tol)
        if not report.exists:
            raise DegenerateError("the metric fails the purely coclosed criterion")
        orientation = report.orientation or "+"
    frame4 = _oriented_plane_frame(D, gm, orientation)
    zs = _gram_schmidt(D.nprime, gm)
    # the remaining r-direction orthogonal to the 4-plane
    rest = _gram_schmidt(list(D.rtilde) + list(D.complement), gm)
    if len(rest) != 5:
        raise DegenerateError("complement frame collapsed")
    x = rest[4]
    Y = _sd_coords(L, gm, zs, frame4, _SIGMA)
    rho = float(np.linalg.norm(Y[0]))
    scale = 1.0 + float(np.max(np.abs(Y)))
    if purely:
        if rho < eps * scale:
            R = np.eye(3)
        else:
            y1, y2 = Y[0] / rho, Y[1] / float(np.linalg.norm(Y[1]))
            e3 = np.cross(y1, y2)
            n3 = np.linalg.norm(e3)
            if n3 < 1e-10:
                raise DegenerateError("self-dual parts are collinear; criterion violated")
            S = np.column_stack([y1, y2, e3 / n3])
            T = np.column_stack([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
            R = T @ S.T
    else:
        # align the row space and symmetrize: a plane polar decomposition
        _u, _s, Vt = np.linalg.svd(Y)
        T0 = Vt[:2]
        C0 = Y @ T0.T
        Uc, _sc, Vct = np.linalg.svd(C0)
        Q = Uc @ Vct
        T = Q @ T0
        t3 = np.cross(T[0], T[1])
        R = np.vstack([T, t3])
    O = _lift_so3_to_so4(R) if np.max(np.abs(R - np.eye(3))) > 1e-13 else np.eye(4)
    # e'^a = sum_b O[a, b] e^b realises sigma'_m = O^T Sigma_m O, the same
    # convention _sd_action uses, so the new coordinates are y' = R y
    new_frame = [sum(O[a, b] * frame4[b] for b in range(4)) for a in range(4)]
    coframe = ([_flat(v, gm) for v in new_frame]
               + [_flat(zs[0], gm), _flat(zs[1], gm), _flat(x, gm)])
    return coframe


def construct_case3(D: MetricDecomposition, report: CriterionReport | None = None,
                    purely: bool = True, tol: float | None = None) -> list:
    """Adapted coframe for dim n' = 3; returns the seven 1-forms."""
    L = D.L
    gf, gm = _float_metric(D.g)
    orientation = "+"
    if purely:
        if report is None:
            report = purely_coclosed_exists(L, gf, tol)
        if not report.exists:
            raise DegenerateError("the metric fails the purely coclosed criterion")
        orientation = report.orientation or "+"
    frame4 = _oriented_plane_frame(D, gm, orientation)
    zs = _gram_schmidt(D.nprime, gm)
    Y = _sd_coords(L, gm, zs, frame4, _SIGMA)
    M0 = np.sqrt(2.0) * Y.T      # M_mj = <sigma_m, d z_j-flat>
    if purely:
        P = np.array(symmetrize_M(M0.tolist(), tol)["P"])
    else:
        U, _sv, Vt = np.linalg.svd(M0)
        P = Vt.T @ U.T
    zetas = [_flat(z, gm) for z in zs]
    rotated = []
    for j in range(3):
        form = KForm.zero(7, 1, Mode.FLOAT)
        for k in range(3):
            if abs(P[k, j]) > 0.0:
                form = form + float(P[k, j]) * zetas[k]
        rotated.append(form)
    return [_flat(v, gm) for v in frame4] + rotated


# ---------------------------------------------------------------------------
# entry points


def construct(L: LieAlgebra, g: Metric, kind: str = "purely",
              tol: float | None = None) -> Construction:
    """Produce a verified adapted coframe of the requested torsion class."""
    if kind not in ("purely", "coclosed"):
        raise ValueError("kind must be 'purely' or 'coclosed'")
    gf, _gm = _float_metric(g)
    D = decompose(L, gf)
    purely = kind == "purely"
    if D.derived_dim == 1:
        coframe = construct_case1(D, purely=purely, tol=tol)
    elif D.derived_dim == 2:
        coframe = construct_case2(D, purely=purely, tol=tol)
    else:
        coframe = construct_case3(D, purely=purely, tol=tol)
    return _finish(L, gf, coframe, D.derived_dim, kind, tol)


def construct_coclosed(L: LieAlgebra, g: Metric, tol: float | None = None) -> Construction:
    return construct(L, g, kind="coclosed", tol=tol)
