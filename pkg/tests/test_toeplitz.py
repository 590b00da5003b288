import numpy as np
import pytest

from freefock import toeplitz as tp
from freefock.errors import InputError
from freefock.linalg import adjoint
from freefock.words import GradedBasis

ONE = np.array([[1.0]])


def scalar_coeffs(mapping):
    return {w: np.array([[c]]) for w, c in mapping.items()}


def random_coeffs(rng, n, m, p, selfadjoint_b0=True):
    out = {}
    for w in GradedBasis(n, m).words:
        c = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
        if not w and selfadjoint_b0:
            c = (c + adjoint(c)) / 2.0
        out[w] = c
    return out


def test_assemble_T_classical():
    t = tp.assemble_T(scalar_coeffs({(): 2.0, (1,): 1.0}), 1, 1)
    assert np.allclose(t.entries, [[2.0, 1.0], [1.0, 2.0]])


def test_assemble_T_two_generators():
    c = 0.3 + 0.4j
    t = tp.assemble_T(scalar_coeffs({(): 1.0, (1,): c, (2,): c}), 2, 1)
    want = np.array(
        [[1.0, np.conj(c), np.conj(c)], [c, 1.0, 0.0], [c, 0.0, 1.0]], dtype=complex
    )
    assert np.allclose(t.entries, want)


def test_assemble_T_diagonal_only():
    rng = np.random.default_rng(0)
    b0 = rng.standard_normal((2, 2))
    b0 = b0 + b0.T
    t = tp.assemble_T({(): b0}, 2, 2)
    assert np.allclose(t.entries, np.kron(b0, np.eye(7)))
    with pytest.raises(InputError):
        tp.assemble_T({(1,): np.eye(2)}, 2, 2)  # b_0 missing


def test_assemble_kernel_matches_assemble_T():
    rng = np.random.default_rng(1)
    for k in range(100):
        n = 1 + k % 3
        m = 1 + k % 3
        p = 1 + k % 2
        coeffs = random_coeffs(rng, n, m, p)
        a = tp.assemble_T(coeffs, n, m).entries
        b = tp.assemble_kernel(coeffs, n, m).entries
        assert np.max(np.abs(a - b)) <= 1e-14


def test_assemble_classical_toeplitz():
    coeffs = scalar_coeffs({(): 1.0, (1,): 0.5, (1, 1): 0.25})
    t = tp.assemble_kernel(coeffs, 1, 2)
    want = np.array([[1, 0.5, 0.25], [0.5, 1, 0.5], [0.25, 0.5, 1.0]])
    # classical Hermitian Toeplitz with first column (1, .5, .25)
    assert np.allclose(t.entries, want.T)


def test_assemble_nesting():
    rng = np.random.default_rng(2)
    n, p = 2, 2
    coeffs = random_coeffs(rng, n, 2, p)
    big = tp.assemble_T(coeffs, n, 3)
    small = tp.assemble_T(coeffs, n, 2)
    dim_small = GradedBasis(n, 2).size
    dim_big = GradedBasis(n, 3).size
    idx = np.concatenate([np.arange(dim_small) + i * dim_big for i in range(p)])
    compressed = big.entries[np.ix_(idx, idx)]
    assert np.max(np.abs(compressed - small.entries)) == 0.0


def test_orbit_structure_partitions_pairs():
    structure = tp.orbit_structure(2, 2)
    d = structure.basis.size
    count = len(structure.diag) + len(structure.zero)
    for ai, bi in structure.classes.values():
        count += 2 * len(ai)  # each class plus its mirror
    assert count == d * d


def test_project_affine_fixed_point_and_zero_class():
    rng = np.random.default_rng(3)
    coeffs = random_coeffs(rng, 2, 2, 1)
    t = tp.assemble_T(coeffs, 2, 2)
    structure = tp.orbit_structure(2, 2)
    prescribed = {w: coeffs[w] for w in coeffs if len(w) <= 1}
    again = tp.project_affine(t.entries, structure, prescribed)
    assert np.max(np.abs(again - t.entries)) <= 1e-13

    h = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
    h = h + adjoint(h)
    proj = tp.project_affine(h, structure, {})
    basis = structure.basis
    for a, wa in enumerate(basis.words):
        for b, wb in enumerate(basis.words):
            from freefock.words import right_quotient

            if a != b and right_quotient(wa, wb) is None and right_quotient(wb, wa) is None:
                assert proj[a, b] == 0.0


def test_project_affine_classical_averaging():
    # n = 1: free orbits average along the Toeplitz diagonals
    rng = np.random.default_rng(4)
    h = rng.standard_normal((4, 4))
    h = h + h.T
    structure = tp.orbit_structure(1, 3)
    proj = tp.project_affine(h, structure, {(): np.array([[1.0]])})
    assert np.allclose(np.diag(proj), 1.0)
    for k in range(1, 4):
        vals = np.diagonal(proj, -k)
        assert np.allclose(vals, vals[0])
        want = (np.diagonal(h, -k).sum() + np.diagonal(h, k).sum()) / (
            2 * len(np.diagonal(h, -k))
        )
        assert vals[0] == pytest.approx(want)


def test_project_affine_idempotent_nonexpansive_orthogonal():
    rng = np.random.default_rng(5)
    structure = tp.orbit_structure(2, 2)
    prescribed = {(): np.array([[1.0]]), (1,): np.array([[0.2 + 0.1j]]), (2,): np.array([[0.0]])}

    def rand_herm():
        h = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
        return h + adjoint(h)

    h1, h2 = rand_herm(), rand_herm()
    p1 = tp.project_affine(h1, structure, prescribed)
    p2 = tp.project_affine(h2, structure, prescribed)
    assert np.max(np.abs(tp.project_affine(p1, structure, prescribed) - p1)) <= 1e-13
    assert np.linalg.norm(p1 - p2) <= np.linalg.norm(h1 - h2) + 1e-12
    # projection residual is Frobenius-orthogonal to the affine set's directions
    diff = h1 - p1
    direction = p2 - p1  # lies in the linear part of the affine set
    inner = np.trace(adjoint(diff) @ direction)
    assert abs(inner) <= 1e-10 * (1 + np.linalg.norm(h1))


def test_min_eig():
    t = tp.assemble_T(scalar_coeffs({(): 2.0, (1,): 1.0}), 1, 1)
    assert tp.min_eig(t) == pytest.approx(1.0, abs=1e-12)
    t = tp.assemble_T(scalar_coeffs({(): 2.0, (1,): 3.0}), 1, 1)
    assert tp.min_eig(t) == pytest.approx(-1.0, abs=1e-12)

    b0 = np.diag([3.0, 0.5])
    t = tp.assemble_T({(): b0}, 2, 1)
    assert tp.min_eig(t) == pytest.approx(0.5, abs=1e-12)
