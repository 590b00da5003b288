"""Multi-Toeplitz matrices on the graded word basis: assembly from
symbol coefficients, the orbit (constant-block) structure of the
multi-Toeplitz subspace, and the Frobenius projection onto its affine
slices with prescribed low-order orbits.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .fock import get_trunc
from .linalg import adjoint, as_cmatrix, check_hermitian, kron, min_eig_hermitian
from .words import GradedBasis, left_quotient, right_quotient, validate_word


class OrbitStructure:
    """Partition of ordered word-index pairs by divisibility quotient.

    For the right orientation, the pair (a, b) lies in the class of the
    word s when word_a = s word_b; (b, a) then lies in the adjoint-paired
    class.  diag holds the pairs (a, a), zero the pairs with no
    divisibility either way.  A multi-Toeplitz matrix is constant on
    every class, adjoint-constant on the mirrored classes, and zero on
    the zero class.
    """

    def __init__(self, basis, orientation="right"):
        if orientation not in ("right", "left"):
            raise InputError(f"unknown orientation {orientation!r}")
        self.basis = basis
        self.orientation = orientation
        quotient = right_quotient if orientation == "right" else left_quotient
        classes = {}
        zero = []
        words = basis.words
        for a, wa in enumerate(words):
            for b, wb in enumerate(words):
                if a == b:
                    continue
                s = quotient(wa, wb)
                if s is not None:
                    classes.setdefault(s, []).append((a, b))
                elif quotient(wb, wa) is None:
                    zero.append((a, b))
        self.diag = [(a, a) for a in range(len(words))]
        self.classes = {
            s: (np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))
            for s, pairs in classes.items()
        }
        self.zero = zero


@functools.lru_cache(maxsize=32)
def orbit_structure(n, m, orientation="right"):
    return OrbitStructure(GradedBasis(n, m), orientation)


@dataclass
class MultiToeplitzMatrix:
    n: int
    m: int
    block_size: int
    basis: GradedBasis
    entries: np.ndarray  # coefficient-major on C^p (x) P^(m)
    orbits: OrbitStructure
    orientation: str = "right"

    def block(self, a, b):
        p, d = self.block_size, self.basis.size
        e4 = self.entries.reshape(p, d, p, d)
        return e4[:, a, :, b].copy()

    def min_eig(self):
        return min_eig_hermitian(self.entries)


def _validate_coeffs(coeffs, n, m):
    out = {}
    p = None
    for w, c in coeffs.items():
        w = tuple(w)
        validate_word(w, n)
        if len(w) > m:
            raise InputError(f"coefficient word longer than degree {m}")
        c = as_cmatrix(c)
        if p is None:
            p = c.shape[0]
        if c.shape != (p, p):
            raise InputError("coefficients must be square matrices of one size")
        out[w] = c
    if () not in out:
        raise InputError("missing constant coefficient b_0")
    return out, out[()].shape[0]


def assemble_T(coeffs, n, m):
    """T_m = sum b_a* (x) (S_a^(m))* + b_0 (x) I + sum b_a (x) S_a^(m).

    b_0 must be Hermitian; the result is then Hermitian by construction.
    """
    coeffs, p = _validate_coeffs(coeffs, n, m)
    check_hermitian(coeffs[()])
    ft = get_trunc(n, m)
    out = kron(coeffs[()], np.eye(ft.dim, dtype=complex))
    for w, c in coeffs.items():
        if w:
            s = ft.s_word(w)
            out += kron(c, s) + kron(adjoint(c), s.T)
    return MultiToeplitzMatrix(n, m, p, ft.basis, out, orbit_structure(n, m), "right")


def assemble_kernel(coeffs, n, m):
    """The same matrix assembled entrywise from the right-divisibility
    kernel: block (a, b) = b_{a \\ b} when a >_r b, its adjoint when
    b >_r a, b_0 on the diagonal, zero otherwise."""
    coeffs, p = _validate_coeffs(coeffs, n, m)
    basis = GradedBasis(n, m)
    d = basis.size
    b4 = np.zeros((d, d, p, p), dtype=complex)
    for a, wa in enumerate(basis.words):
        for b, wb in enumerate(basis.words):
            if a == b:
                b4[a, b] = coeffs[()]
                continue
            s = right_quotient(wa, wb)
            if s is not None:
                c = coeffs.get(s)
                if c is not None:
                    b4[a, b] = c
            else:
                s = right_quotient(wb, wa)
                if s is not None:
                    c = coeffs.get(s)
                    if c is not None:
                        b4[a, b] = adjoint(c)
    entries = b4.transpose(2, 0, 3, 1).reshape(d * p, d * p)
    return MultiToeplitzMatrix(n, m, p, basis, entries, orbit_structure(n, m), "right")


def project_affine(H, structure, prescribed):
    """Frobenius-orthogonal projection of a Hermitian matrix onto the
    affine set of multi-Toeplitz matrices whose orbits named in
    ``prescribed`` carry those exact blocks.

    Free orbits are replaced by the average of their blocks together
    with the adjoints of the mirrored blocks, which keeps the output
    Hermitian to machine precision; the zero class is zeroed; prescribed
    orbits are overwritten verbatim.  Idempotent and nonexpansive.
    """
    H = as_cmatrix(H)
    d = structure.basis.size
    if H.shape[0] != H.shape[1] or H.shape[0] % d:
        raise InputError(f"matrix of size {H.shape} does not fit the word basis ({d})")
    p = H.shape[0] // d
    h4 = H.reshape(p, d, p, d)
    out = np.zeros_like(h4)

    b0 = prescribed.get(())
    if b0 is None:
        diag = h4[:, range(d), :, range(d)]  # (d, p, p)
        b0 = diag.mean(axis=0)
        b0 = (b0 + adjoint(b0)) / 2.0
    for a in range(d):
        out[:, a, :, a] = b0

    for s, (ai, bi) in structure.classes.items():
        val = prescribed.get(s)
        if val is None:
            direct = h4[:, ai, :, bi]  # (k, p, p)
            mirrored = h4[:, bi, :, ai]
            val = (direct.sum(axis=0) + adjoint(mirrored.sum(axis=0))) / (2.0 * len(ai))
        out[:, ai, :, bi] = np.asarray(val, dtype=complex)
        out[:, bi, :, ai] = adjoint(np.asarray(val, dtype=complex))
    return out.reshape(p * d, p * d)


def min_eig(T):
    """Smallest eigenvalue of a (Hermitian) multi-Toeplitz matrix."""
    return T.min_eig()
