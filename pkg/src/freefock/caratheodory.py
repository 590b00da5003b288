"""Caratheodory interpolation for free holomorphic functions with
positive real part.

Feasibility is the positivity of the truncated multi-Toeplitz operator
built from the data (an exact finite-dimensional criterion).  The
constructive extension runs Dykstra's alternating projections between
the PSD cone (with a strict-feasibility floor) and the affine set of
multi-Toeplitz matrices with the prescribed low-order orbits; every
output is certified by a fresh eigenvalue computation and random
nilpotent evaluations, so the solver never has to be trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, InputError, NoConvergenceError, ScopeError
from .fock import get_trunc, random_nilpotent_tuple
from .linalg import (
    adjoint,
    as_cmatrix,
    check_hermitian,
    kron,
    min_eig_hermitian,
    operator_norm,
    psd_project,
)
from .series import extract_coeffs, truncated_cayley
from .toeplitz import assemble_T, orbit_structure, project_affine
from .transforms import MomentFunctional
from .words import GradedBasis, left_quotient, reverse, validate_word


def _validated_coeffs(coeffs, n, m, require_b0):
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
    if require_b0 and () not in out:
        raise InputError("missing constant coefficient b_0")
    return out, p


@dataclass
class CaratheodoryProblem:
    """Prescribed coefficients {b_a}_{|a|<=m}, b_0 Hermitian PSD; absent
    words are zero."""

    n: int
    m: int
    coeffs: dict
    block_size: int = 0

    def __post_init__(self):
        self.coeffs, p = _validated_coeffs(self.coeffs, self.n, self.m, require_b0=True)
        if self.block_size and self.block_size != p:
            raise InputError("block_size disagrees with coefficient shape")
        self.block_size = p
        try:
            b0 = check_hermitian(self.coeffs[()])
        except ScopeError as exc:
            raise InputError(f"b_0 must be Hermitian: {exc}") from exc
        if min_eig_hermitian(b0) < -1e-12:
            raise InputError("b_0 must be positive semidefinite")

    def coefficient(self, w):
        c = self.coeffs.get(tuple(w))
        if c is None:
            return np.zeros((self.block_size, self.block_size), dtype=complex)
        return c.copy()


@dataclass
class CFProblem:
    """Caratheodory-Fejer data {A_a}_{|a|<=m} for the norm-one completion
    problem of multi-analytic operators."""

    n: int
    m: int
    coeffs: dict
    block_size: int = 0

    def __post_init__(self):
        self.coeffs, p = _validated_coeffs(self.coeffs, self.n, self.m, require_b0=False)
        if p is None and not self.block_size:
            raise InputError("empty CF problem needs an explicit block_size")
        if p is not None and self.block_size and self.block_size != p:
            raise InputError("block_size disagrees with coefficient shape")
        self.block_size = self.block_size or p

    def coefficient(self, w):
        c = self.coeffs.get(tuple(w))
        if c is None:
            return np.zeros((self.block_size, self.block_size), dtype=complex)
        return c.copy()


@dataclass
class FeasibilityReport:
    feasible: bool
    min_eig: float
    matrix_dim: int
    tol: float


def check_feasibility(prob, tol=1e-9):
    """Assemble T_m and test its smallest eigenvalue against -tol."""
    t = assemble_T(prob.coeffs, prob.n, prob.m)
    me = t.min_eig()
    return FeasibilityReport(me >= -tol, me, t.entries.shape[0], tol)


@dataclass
class ExtensionResult:
    target_deg: int
    coeffs: dict
    certificate: dict


def extend(prob, M, tol=1e-9, max_iter=5000, slack=None):
    """Complete the data to degree M with T_M PSD, by Dykstra alternating
    projections in the Hermitian Frobenius geometry.

    The PSD side projects onto eigenvalues >= slack (a small strict-
    feasibility floor; boundary instances stall otherwise), the affine
    side restores the multi-Toeplitz structure with the problem's
    coefficients as hard constraints.  On convergence the extension
    coefficients are read off the affine iterate and re-certified from a
    fresh assembly.  Raises InfeasibleError when the data fails the
    degree-m criterion and NoConvergenceError when the budget runs out.
    """
    if M <= prob.m:
        raise InputError(f"target degree {M} must exceed m = {prob.m}")
    feas = check_feasibility(prob, tol)
    if not feas.feasible:
        raise InfeasibleError(
            f"data is infeasible at degree {prob.m}: min eig {feas.min_eig:.3e}",
            min_eig=feas.min_eig,
        )
    b0 = prob.coeffs[()]
    eps = slack if slack is not None else max(tol, 1e-9 * operator_norm(b0))
    structure = orbit_structure(prob.n, M)
    p = prob.block_size
    zeros = np.zeros((p, p), dtype=complex)
    prescribed = {(): b0.copy()}
    for w in GradedBasis(prob.n, prob.m).words:
        if w:
            prescribed[w] = prob.coeffs.get(w, zeros).copy()

    x = assemble_T(prob.coeffs, prob.n, M).entries
    p_corr = np.zeros_like(x)
    q_corr = np.zeros_like(x)
    scale = 1.0 + np.linalg.norm(x)
    prev_step = np.inf
    monotone_violations = 0
    residual = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        y = psd_project(x + p_corr, floor=eps)
        p_corr = x + p_corr - y
        x_new = project_affine(y + q_corr, structure, prescribed)
        q_corr = y + q_corr - x_new
        residual = float(np.linalg.norm(x_new - y))
        step = float(np.linalg.norm(x_new - x))
        if step > prev_step + 1e-12 * scale:
            monotone_violations += 1
        prev_step = step
        x = x_new
        if residual <= tol:
            break
    else:
        raise NoConvergenceError(
            f"Dykstra residual {residual:.3e} above {tol:.1e} after {max_iter} iterations",
            residual=residual,
            iterations=max_iter,
        )

    ext_coeffs = {w: v.copy() for w, v in prescribed.items()}
    x4 = x.reshape(p, structure.basis.size, p, structure.basis.size)
    for s, (ai, bi) in structure.classes.items():
        if s not in ext_coeffs:
            ext_coeffs[s] = x4[:, ai[0], :, bi[0]].copy()

    fresh = assemble_T(ext_coeffs, prob.n, M)
    prescribed_error = max(
        float(np.max(np.abs(fresh.block(ai, bi) - prescribed[s])))
        for s, (ai, bi) in _prescribed_pairs(structure, prob.m)
    )
    certificate = {
        "min_eig_tm": fresh.min_eig(),
        "iterations": iterations,
        "proj_residual": residual,
        "prescribed_error": prescribed_error,
        "slack": eps,
        "monotone_violations": monotone_violations,
    }
    return ExtensionResult(M, ext_coeffs, certificate)


def _prescribed_pairs(structure, m):
    yield (), (structure.diag[0][0], structure.diag[0][1])
    for s, (ai, bi) in structure.classes.items():
        if len(s) <= m:
            yield s, (ai[0], bi[0])


def _inv_sqrt_psd(a, reg):
    a = check_hermitian(a)
    w, v = np.linalg.eigh((a + adjoint(a)) / 2.0)
    w = w + reg
    if w[0] <= 0:
        raise ScopeError(f"b_0 + {reg:.1e} I is not positive definite")
    return (v / np.sqrt(w)) @ adjoint(v)


def cayley_route(prob, reg_eps=None, tol=1e-9):
    """Reduce a feasible problem to Caratheodory-Fejer data.

    Normalizes by (b_0 + eps I)^(-1/2) on both sides, forms
    Y = sum D_a (x) S_a^(m), applies the inverse truncated Cayley
    transform, and reads the CF coefficients off the result; the output
    operator is a contraction up to 1e-9 whenever the data is feasible.
    """
    feas = check_feasibility(prob, tol)
    if not feas.feasible:
        raise InfeasibleError(
            f"data is infeasible: min eig {feas.min_eig:.3e}", min_eig=feas.min_eig
        )
    b0 = prob.coeffs[()]
    if reg_eps is None:
        reg_eps = 1e-10 * (1.0 + operator_norm(b0))
    nrm = _inv_sqrt_psd(b0, reg_eps)
    ft = get_trunc(prob.n, prob.m)
    p = prob.block_size
    y = np.zeros((p * ft.dim, p * ft.dim), dtype=complex)
    for w, c in prob.coeffs.items():
        if w:
            y += kron(nrm @ c @ nrm, ft.s_word(w))
    x = truncated_cayley(y, "inverse", ft)
    xn = operator_norm(x)
    if xn > 1.0 + 1e-9:
        raise ScopeError(f"inverse Cayley image has norm {xn:.12f} > 1 + 1e-9")
    analytic, _ = extract_coeffs(x, ft, p)
    analytic.pop((), None)  # zero constant term by construction
    return CFProblem(prob.n, prob.m, analytic, p)


@dataclass
class CFReport:
    norm: float
    within: bool
    cross_check_dev: float
    tol: float


def cf_matrix(prob):
    """The multi-analytic matrix [A_{a,b}] of the CF data: block (a, b)
    is A_{a \\_l b} when a >=_l b, zero otherwise (coefficient-major)."""
    basis = GradedBasis(prob.n, prob.m)
    d = basis.size
    p = prob.block_size
    b4 = np.zeros((d, d, p, p), dtype=complex)
    for a, wa in enumerate(basis.words):
        for b, wb in enumerate(basis.words):
            if wa == wb:
                s = ()
            else:
                s = left_quotient(wa, wb)
                if s is None:
                    continue
            c = prob.coeffs.get(s)
            if c is not None:
                b4[a, b] = c
    return b4.transpose(2, 0, 3, 1).reshape(d * p, d * p)


def cf_check(prob, tol=1e-9):
    """Solvability criterion ||A_m|| <= 1 for the CF problem, with a
    cross-check that the entrywise matrix matches the right-translation
    kron sum (the commutant picture of multi-analytic operators)."""
    m1 = cf_matrix(prob)
    ft = get_trunc(prob.n, prob.m)
    m2 = np.zeros_like(m1)
    for w, c in prob.coeffs.items():
        m2 += kron(c, ft.append_matrix(w))
    dev = float(np.linalg.norm(m1 - m2))
    if dev > 1e-10 * (1.0 + np.linalg.norm(m1)):
        raise ScopeError(f"multi-analytic assembly mismatch {dev:.3e}; internal defect")
    nrm = operator_norm(m1)
    return CFReport(nrm, nrm <= 1.0 + tol, dev, tol)


def cf_to_caratheodory(prob, tol=1e-9):
    """Lift CF data to a feasible Caratheodory problem at degree m + 1:
    B = sum A_a (x) S_{g1 a}^(m+1), forward Cayley, b_0 = I."""
    report = cf_check(prob, tol)
    if not report.within:
        raise InfeasibleError(f"CF norm {report.norm:.6f} exceeds 1", min_eig=None)
    ft = get_trunc(prob.n, prob.m + 1)
    p = prob.block_size
    b = np.zeros((p * ft.dim, p * ft.dim), dtype=complex)
    for w, c in prob.coeffs.items():
        b += kron(c, ft.s_word((1,) + w))
    g = truncated_cayley(b, "forward", ft)
    analytic, _ = extract_coeffs(g, ft, p)
    analytic.pop((), None)
    coeffs = {(): np.eye(p, dtype=complex)}
    coeffs.update(analytic)
    return CaratheodoryProblem(prob.n, prob.m + 1, coeffs, p)


@dataclass
class VerificationReport:
    passed: bool
    checks: dict  # name -> (ok, value)


def verify_solution(prob, ext, samples=20, seed=0, tol=1e-8):
    """Independent certificate of an extension: exact reproduction of the
    prescribed coefficients, fresh positivity of T_M, positivity of
    Re g at random jointly nilpotent tuples (g has constant b_0 / 2),
    and the per-degree coefficient bound against ||b_0||."""
    M = ext.target_deg
    p = prob.block_size
    checks = {}

    dev = 0.0
    for w in GradedBasis(prob.n, prob.m).words:
        e = ext.coeffs.get(w)
        e = e if e is not None else np.zeros((p, p), dtype=complex)
        dev = max(dev, float(np.max(np.abs(e - prob.coefficient(w)))))
    checks["prescribed_exact"] = (dev == 0.0, dev)

    fresh = assemble_T(ext.coeffs, prob.n, M)
    me = fresh.min_eig()
    checks["extension_psd"] = (me >= -tol, me)

    rng = np.random.default_rng(seed)
    b0 = prob.coeffs[()]
    worst = np.inf
    for _ in range(samples):
        X = random_nilpotent_tuple(
            rng, prob.n, M + 1, row_norm=float(rng.uniform(0.2, 0.95))
        )
        g = kron(b0 / 2.0, np.eye(X.dim, dtype=complex))
        for w, c in ext.coeffs.items():
            if w:
                g += kron(c, X.word(w))
        worst = min(worst, min_eig_hermitian((g + adjoint(g)) / 2.0))
    checks["nilpotent_positive"] = (worst >= -tol, worst)

    bound = operator_norm(b0) + tol
    worst_slice = 0.0
    for k in range(1, M + 1):
        gram = np.zeros((p, p), dtype=complex)
        for w, c in ext.coeffs.items():
            if len(w) == k:
                gram += adjoint(c) @ c
        worst_slice = max(worst_slice, float(np.sqrt(operator_norm(gram))))
    checks["coefficient_bound"] = (worst_slice <= bound, worst_slice)

    return VerificationReport(all(ok for ok, _ in checks.values()), checks)


def moment_problem_view(prob):
    """The trigonometric moment data of a scalar problem: the functional
    with mu(R_~a) = conj(b_a), mu(R_~a*) = b_a, mu(I) = b_0; bookkeeping
    only, nothing is solved."""
    if prob.block_size != 1:
        raise InputError("moment view is defined for scalar problems only")
    forward = {}
    backward = {}
    for w, c in prob.coeffs.items():
        if w:
            forward[reverse(w)] = np.conj(c)
            backward[reverse(w)] = c.copy()
    return MomentFunctional(prob.n, prob.m, prob.coeffs[()], forward, backward)
