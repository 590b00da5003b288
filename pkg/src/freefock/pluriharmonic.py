"""Free pluriharmonic functions: paired analytic/co-analytic coefficient
families, evaluation, radial boundary operators, and the positivity,
Harnack, coefficient-bound, mean-value, and multi-Toeplitz checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ScopeError
from .fock import get_trunc, poisson_transform_block, reconstruction_operator
from .linalg import adjoint, as_cmatrix, kron, min_eig_hermitian, operator_norm, solve
from .series import FreeSeries, eval_report, jsr_estimate
from .words import validate_word


@dataclass
class PluriharmonicFn:
    """h(X) = sum B_a (x) X_a* + A_0 (x) I + sum A_a (x) X_a, stored to a
    shared cutoff.  analytic holds the A family (including the empty
    word), coanalytic the B family (words of length >= 1)."""

    n: int
    cutoff: int
    shape: tuple
    analytic: dict = field(default_factory=dict)
    coanalytic: dict = field(default_factory=dict)

    def __post_init__(self):
        self.shape = tuple(self.shape)
        if self.shape[0] != self.shape[1]:
            raise InputError("pluriharmonic coefficients must be square")
        self.analytic = self._clean(self.analytic, allow_empty=True)
        self.coanalytic = self._clean(self.coanalytic, allow_empty=False)

    def _clean(self, coeffs, allow_empty):
        out = {}
        for w, c in coeffs.items():
            w = tuple(w)
            validate_word(w, self.n)
            if not w and not allow_empty:
                raise InputError("co-analytic coefficients start at degree 1")
            if len(w) > self.cutoff:
                raise InputError(f"word length {len(w)} exceeds cutoff {self.cutoff}")
            c = as_cmatrix(c)
            if c.shape != self.shape:
                raise InputError(f"coefficient shape {c.shape} != {self.shape}")
            if c.any():
                out[w] = c
        return out

    @property
    def p(self):
        return self.shape[0]

    def a_coeff(self, w):
        c = self.analytic.get(tuple(w))
        return c.copy() if c is not None else np.zeros(self.shape, dtype=complex)

    def b_coeff(self, w):
        c = self.coanalytic.get(tuple(w))
        return c.copy() if c is not None else np.zeros(self.shape, dtype=complex)

    def is_selfadjoint(self, tol=1e-12):
        a0 = self.a_coeff(())
        scale = 1.0 + operator_norm(a0)
        if operator_norm(a0 - adjoint(a0)) > tol * scale:
            return False
        for w in set(self.analytic) | set(self.coanalytic):
            if not w:
                continue
            if operator_norm(self.b_coeff(w) - adjoint(self.a_coeff(w))) > tol * scale:
                return False
        return True


def real_part(f):
    """Re f = (f + f*)/2 as a pluriharmonic function.

    Analytic part: (f_0 + f_0*)/2 at the empty word and f_a/2 beyond;
    co-analytic part f_a*/2.
    """
    if not f.is_square():
        raise InputError("real part needs square coefficients")
    f0 = f.constant_term()
    analytic = {(): (f0 + adjoint(f0)) / 2.0}
    coanalytic = {}
    for w, c in f.coeffs.items():
        if w:
            analytic[w] = c / 2.0
            coanalytic[w] = adjoint(c) / 2.0
    return PluriharmonicFn(f.n, f.cutoff, f.shape, analytic, coanalytic)


def _analytic_series(h):
    return FreeSeries(h.n, h.cutoff, h.shape, dict(h.analytic))


def _coanalytic_series(h):
    """B_a* as a series; its scope governs the co-analytic sum."""
    return FreeSeries(
        h.n, h.cutoff, h.shape, {w: adjoint(c) for w, c in h.coanalytic.items()}
    )


def eval_at(h, X, jsr_depth=None):
    """Evaluate h at an operator tuple; same scope rules as series.eval_at."""
    rep_a = eval_report(_analytic_series(h), X, jsr_depth)
    rep_b = eval_report(_coanalytic_series(h).without_constant(), X, jsr_depth)
    return rep_a.value + adjoint(rep_b.value)


def radial_boundary(h, r, m):
    """h(r S^(m)) on C^p (x) P^(m); r = 1 is allowed at finite m."""
    if not 0.0 <= r <= 1.0:
        raise InputError(f"radius {r} outside [0, 1]")
    ft = get_trunc(h.n, m)
    p = h.p
    out = kron(h.a_coeff(()), np.eye(ft.dim, dtype=complex))
    for w, c in h.analytic.items():
        if w and len(w) <= m:
            out += kron(c, (r ** len(w)) * ft.s_word(w))
    for w, c in h.coanalytic.items():
        if len(w) <= m:
            out += kron(c, (r ** len(w)) * ft.s_word(w).T)
    return out


def pluriharmonic_poisson_kernel(ft, X):
    """P(R^(N), X) = sum R_~a (x) X_a* + I + adjoint, on P^(N) (x) C^p.

    Equals (I-R_X)^(-1) + (I-R_X*)^(-1) - I on the truncated space; the
    resolvent is taken by a solve inside the open ball and by the
    terminating Neumann sum for nilpotent tuples.
    """
    if X.n != ft.n:
        raise InputError(f"tuple has {X.n} operators, Fock space expects {ft.n}")
    rx = reconstruction_operator(ft, X)
    eye = np.eye(rx.shape[0], dtype=complex)
    if X.row_norm < 1.0 - 1e-12:
        analytic = solve(eye - rx, eye) - eye
    else:
        est = jsr_estimate(X, max(X.dim, 1))
        if est.nilpotent_order is None:
            raise ScopeError(
                f"row norm {X.row_norm:.4f} >= 1 and tuple is not nilpotent"
            )
        analytic = np.zeros_like(rx)
        power = eye
        for _ in range(min(ft.N, est.nilpotent_order - 1)):
            power = power @ rx
            analytic += power
    return eye + analytic + adjoint(analytic)


# -- checks ------------------------------------------------------------------


@dataclass
class PositivityReport:
    passed: bool
    min_eigs: list
    m_max: int
    tol: float


def check_positive(h, m_max, tol):
    """min eig of h(S^(m)) for every m <= m_max; positive pluriharmonic
    functions pass at every truncation level."""
    if not h.is_selfadjoint():
        raise InputError("positivity check needs a selfadjoint function")
    eigs = []
    for m in range(m_max + 1):
        eigs.append(min_eig_hermitian(radial_boundary(h, 1.0, m)))
    return PositivityReport(all(e >= -tol for e in eigs), eigs, m_max, tol)


@dataclass
class CoefficientBoundReport:
    passed: bool
    rows: list  # (degree, slice_norm, bound)


def coefficient_bound_check(h, tol=1e-9):
    """|| sum_{|a|=k} A_a* A_a ||^(1/2) <= ||A_0|| for each degree."""
    bound = operator_norm(h.a_coeff(())) + tol
    fa = _analytic_series(h)
    rows = []
    for k in range(1, h.cutoff + 1):
        lhs = math.sqrt(fa.degree_slice_gram_norm(k))
        rows.append((k, lhs, bound))
    return CoefficientBoundReport(all(lhs <= b for _, lhs, b in rows), rows)


@dataclass
class HarnackReport:
    passed: bool
    bound: float
    values: list


def harnack_check(h, samples, r, tol=1e-9):
    """||h(X)|| <= ||A_0|| (1+r)/(1-r) on nilpotent samples of norm <= r."""
    if not 0.0 <= r < 1.0:
        raise InputError(f"radius {r} outside [0, 1)")
    bound = operator_norm(h.a_coeff(())) * (1.0 + r) / (1.0 - r) + tol
    values = []
    for X in samples:
        if X.row_norm > r + 1e-12:
            raise InputError(f"sample row norm {X.row_norm:.4f} exceeds {r}")
        if jsr_estimate(X, max(X.dim, 1)).nilpotent_order is None:
            raise InputError("Harnack samples must be jointly nilpotent")
        values.append(operator_norm(eval_at(h, X)))
    return HarnackReport(all(v <= bound for v in values), bound, values)


@dataclass
class MeanValueReport:
    passed: bool
    deviation: float
    allowance: float


def mean_value_check(h, X, r, N):
    """Poisson mean value property: h(X) equals the transform of the
    radial boundary h(r S^(N)) at X/r, exactly within truncation."""
    if not 0.0 < r < 1.0:
        raise InputError(f"radius {r} outside (0, 1)")
    if X.row_norm >= r:
        raise ScopeError(f"sample norm {X.row_norm:.4f} must be below r = {r}")
    est = jsr_estimate(X, max(X.dim, 1))
    if est.nilpotent_order is None:
        raise ScopeError("mean value check needs a jointly nilpotent sample")
    if N < est.nilpotent_order + h.cutoff:
        raise ScopeError(
            f"truncation N = {N} below nilpotency order {est.nilpotent_order} "
            f"+ cutoff {h.cutoff}; the identity would not be exact"
        )
    lhs = eval_at(h, X)
    ft = get_trunc(h.n, N)
    rhs = poisson_transform_block(ft, radial_boundary(h, r, N), X.scale(1.0 / r), h.p)
    dev = operator_norm(lhs - rhs)
    allowance = 1e-9 * (1.0 + operator_norm(lhs))
    return MeanValueReport(dev <= allowance, dev, allowance)


def is_multi_toeplitz(A, ft, margin, tol):
    """Test the defining compressions (I (x) R_i*) A (I (x) R_j) = d_ij A
    on the truncation-safe zone of degree <= N - margin."""
    if margin < 1:
        raise InputError("margin must be >= 1")
    A = as_cmatrix(A)
    if A.shape[0] != A.shape[1] or A.shape[0] % ft.dim:
        raise InputError(f"operator of size {A.shape} does not fit C^p (x) P^({ft.N})")
    p = A.shape[0] // ft.dim
    eye = np.eye(p, dtype=complex)
    q = kron(eye, ft.degree_projection(ft.N - margin))
    scale = 1.0 + operator_norm(A)
    for i in range(1, ft.n + 1):
        ri = kron(eye, ft.right_creation(i))
        for j in range(1, ft.n + 1):
            rj = kron(eye, ft.right_creation(j))
            d = adjoint(ri) @ A @ rj
            if i == j:
                d = d - A
            if operator_norm(q @ d @ q) > tol * scale:
                return False
    return True
