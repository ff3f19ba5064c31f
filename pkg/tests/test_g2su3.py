"""G2-structures: the standard 3-form, induced metrics, torsion reports,
SU(3)-reductions along a unit direction, and calibration of subspaces."""

import random
from fractions import Fraction

import pytest

from g2nil.exterior import KForm, Mode, forms_close, wedge
from g2nil.g2su3 import (
    G2Structure,
    calibrates,
    induced_metric,
    is_half_flat,
    is_special_half_flat,
    nondegenerate,
    phi_from_coframe,
    phi_standard,
    starphi_standard,
    su3_reduce,
    torsion_class,
)
from g2nil.liealg import LieAlgebra, Metric

SEED = 424242


def rand_frac(rng, lo=-2, hi=2, den=3):
    return Fraction(rng.randint(lo * den, hi * den), den)


def rand_coframe(rng):
    while True:
        A = [[rand_frac(rng) for _ in range(7)] for _ in range(7)]
        try:
            cof = [KForm.from_terms(7, 1, {(j + 1,): A[i][j] for j in range(7) if A[i][j]})
                   for i in range(7)]
            G2Structure.from_coframe(cof)  # probes invertibility
            return A, cof
        except Exception:
            continue


def _mat_inv(rows):
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c])
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


PHI_TERMS = {(1, 2, 7): 1, (3, 4, 7): 1, (5, 6, 7): 1, (1, 3, 5): 1,
             (1, 4, 6): -1, (2, 3, 6): -1, (2, 4, 5): -1}
STARPHI_TERMS = {(1, 2, 3, 4): 1, (1, 2, 5, 6): 1, (3, 4, 5, 6): 1, (1, 3, 6, 7): 1,
                 (1, 4, 5, 7): 1, (2, 3, 5, 7): 1, (2, 4, 6, 7): -1}


def test_standard_forms_pinned():
    assert phi_standard() == KForm.from_terms(7, 3, PHI_TERMS)
    assert starphi_standard() == KForm.from_terms(7, 4, STARPHI_TERMS)


def test_standard_phi_round_trip():
    struct = G2Structure.from_phi(phi_standard())
    assert struct.metric.rows == Metric.identity(7).rows
    assert struct.orientation == 1
    assert struct.starphi == starphi_standard()
    e = [KForm.basis(7, i) for i in range(1, 8)]
    assert struct.volume * wedge(*e) == struct.hodge(KForm.from_terms(7, 0, {(): 1}))


def test_induced_metric_is_gram_of_coframe():
    rng = random.Random(SEED)
    for _ in range(15):
        A, cof = rand_coframe(rng)
        struct = G2Structure.from_coframe(cof)
        AtA = [[sum(A[k][i] * A[k][j] for k in range(7)) for j in range(7)]
               for i in range(7)]
        assert [list(r) for r in struct.metric.rows] == AtA


def test_from_coframe_handles_either_orientation():
    e = [KForm.basis(7, i) for i in range(1, 8)]
    flipped = [-e[0]] + e[1:]  # negative determinant
    struct = G2Structure.from_coframe(flipped)
    assert struct.metric.rows == Metric.identity(7).rows


def test_degenerate_three_form_detected():
    assert not nondegenerate(KForm.from_terms(7, 3, {(1, 2, 3): 1}))
    assert nondegenerate(phi_standard())


def test_su3_reduction_of_standard_phi():
    s = su3_reduce(phi_standard(), tuple(Fraction(int(i == 6)) for i in range(7)))
    assert s.omega == KForm.from_terms(7, 2, {(1, 2): 1, (3, 4): 1, (5, 6): 1})
    assert s.psi_plus == KForm.from_terms(
        7, 3, {(1, 3, 5): 1, (1, 4, 6): -1, (2, 3, 6): -1, (2, 4, 5): -1})
    assert s.psi_minus == KForm.from_terms(
        7, 3, {(1, 3, 6): 1, (1, 4, 5): 1, (2, 3, 5): 1, (2, 4, 6): -1})


def test_su3_reduction_identities():
    # For any unit z: phi = omega ^ z_flat + psi_plus,
    # *phi = (1/2) omega^2 + psi_minus ^ z_flat, omega ^ psi_pm = 0,
    # and psi_plus ^ psi_minus = (2/3) omega^3.
    rng = random.Random(SEED + 1)
    for _ in range(10):
        A, cof = rand_coframe(rng)
        struct = G2Structure.from_coframe(cof)
        z = tuple(row[6] for row in _mat_inv(A))  # 7th dual-frame vector: unit
        s = su3_reduce(struct, z)
        assert struct.phi == s.omega.wedge(s.z_flat) + s.psi_plus
        half_w2 = s.omega.wedge(s.omega) * Fraction(1, 2)
        assert struct.starphi == half_w2 + s.psi_minus.wedge(s.z_flat)
        assert not s.omega.wedge(s.psi_plus)
        assert not s.omega.wedge(s.psi_minus)
        w3 = s.omega.wedge(s.omega).wedge(s.omega)
        assert s.psi_plus.wedge(s.psi_minus) * 3 == w3 * 2


def test_su3_requires_unit_vector():
    with pytest.raises(ValueError):
        su3_reduce(phi_standard(), tuple(Fraction(2 * int(i == 6)) for i in range(7)))


H5_R2 = LieAlgebra.from_structure("h5_R2", [None] * 6 + [{(1, 2): 1, (3, 4): 1}])
N5_2_R2 = LieAlgebra.from_structure(
    "n5_2_R2", [None] * 4 + [{(1, 2): 1}, {(1, 3): 1}, None])


def perm_coframe(order):
    return [KForm.basis(7, i) for i in order]


def test_half_flat_from_coclosed_reduction():
    # a purely coclosed structure reduced along a unit direction in the
    # abelian factor is half-flat
    cof = perm_coframe([1, 2, 4, 3, 5, 6, 7])  # purely coclosed on h5 + R^2
    struct = G2Structure.from_coframe(cof)
    rep = torsion_class(H5_R2, struct)
    assert rep.coclosed and rep.purely_coclosed
    for k in (4, 5):  # f5, f6 span the abelian factor
        z = tuple(Fraction(int(i == k)) for i in range(7))
        s = su3_reduce(struct, z)
        assert is_half_flat(H5_R2, s)


def test_special_half_flat_detects_extra_condition():
    e = [KForm.basis(7, i) for i in range(1, 8)]
    cof = [e[1], e[2], e[3], e[0], -e[5], e[4], e[6]]  # purely coclosed on n5_2 + R^2
    struct = G2Structure.from_coframe(cof)
    assert torsion_class(N5_2_R2, struct).purely_coclosed
    z = tuple(Fraction(int(i == 6)) for i in range(7))
    s = su3_reduce(struct, z)
    assert is_half_flat(N5_2_R2, s)
    assert is_special_half_flat(N5_2_R2, s) == (
        not L_dw_psi(N5_2_R2, s))


def L_dw_psi(L, s):
    return bool(L.ce_diff(s.omega).wedge(s.psi_plus))


def test_torsion_reports_on_heisenberg_like_families():
    # identity coframe on h5 + R^2: d e^7 = e^12 + e^34, and the M data is
    # symmetric but not trace-free in the mixed frame
    struct = G2Structure.from_phi(phi_standard())
    rep = torsion_class(H5_R2, struct)
    assert isinstance(rep.coclosed, bool)
    assert rep.purely_coclosed == (rep.coclosed and rep.tau0 == 0)


def test_torsion_float_matches_exact():
    rng = random.Random(SEED + 2)
    for _ in range(8):
        _, cof = rand_coframe(rng)
        struct = G2Structure.from_coframe(cof)
        rep = torsion_class(H5_R2, struct)
        struct_f = G2Structure.from_coframe([f.to_float() for f in cof])
        rep_f = torsion_class(H5_R2, struct_f)
        assert rep.coclosed == rep_f.coclosed
        assert rep.purely_coclosed == rep_f.purely_coclosed
        assert abs(float(rep.tau0) - float(rep_f.tau0)) < 1e-9 * (1 + abs(float(rep.tau0)))


def test_calibrates_standard_associative_planes():
    phi = phi_standard()
    f = [tuple(Fraction(int(i == k)) for i in range(7)) for k in range(7)]
    assert calibrates(phi, [f[0], f[1], f[6]])   # e127 is a term of phi
    assert calibrates(phi, [f[0], f[2], f[4]])   # e135 is a term of phi
    assert not calibrates(phi, [f[0], f[1], f[2]])  # e123 is not associative


def test_calibrates_is_basis_independent():
    rng = random.Random(SEED + 3)
    phi = phi_standard()
    f = [tuple(Fraction(int(i == k)) for i in range(7)) for k in range(7)]
    plane = [f[0], f[1], f[6]]
    for _ in range(10):
        c = [[rand_frac(rng) for _ in range(3)] for _ in range(3)]
        det = (c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1])
               - c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0])
               + c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0]))
        if not det:
            continue
        mixed = [tuple(sum(c[i][k] * plane[k][j] for k in range(3)) for j in range(7))
                 for i in range(3)]
        assert calibrates(phi, mixed)


def test_calibrates_rejects_wrong_dimension():
    phi = phi_standard()
    f = [tuple(Fraction(int(i == k)) for i in range(7)) for k in range(7)]
    with pytest.raises(ValueError):
        calibrates(phi, [f[0], f[1]])
