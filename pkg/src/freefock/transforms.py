"""Moment functionals on the operator system spanned by the right
creation operators and their adjoints, with the Poisson, Herglotz, and
Fantappie transforms, positivity equivalence checks, Fejer inequality
checks, and radial scalings.

A functional is stored through its finite moment data mu(R_a), mu(R_a*)
up to a cutoff length, optionally with a vector-state realization on a
truncated Fock space that reproduces the moments exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ScopeError
from .fock import get_trunc
from .linalg import adjoint, as_cmatrix, kron, min_eig_hermitian, operator_norm, solve
from .pluriharmonic import PluriharmonicFn
from .series import eval_at_creation, jsr_estimate
from .toeplitz import MultiToeplitzMatrix, orbit_structure
from .words import GradedBasis, left_quotient, reverse, validate_word


@dataclass
class MomentFunctional:
    n: int
    cutoff: int
    unit: np.ndarray  # mu(I), p x p
    forward: dict = field(default_factory=dict)  # word -> mu(R_word)
    backward: dict = field(default_factory=dict)  # word -> mu(R_word*)
    realization: tuple | None = None  # (FockTrunc, [(weight, xi, eta), ...])

    def __post_init__(self):
        self.unit = as_cmatrix(self.unit)
        p = self.unit.shape[0]
        if self.unit.shape != (p, p):
            raise InputError("mu(I) must be square")
        self.forward = self._clean(self.forward, p)
        self.backward = self._clean(self.backward, p)

    def _clean(self, coeffs, p):
        out = {}
        for w, c in coeffs.items():
            w = tuple(w)
            validate_word(w, self.n)
            if not w:
                raise InputError("moments at the empty word belong in unit")
            if len(w) > self.cutoff:
                raise InputError(f"moment word longer than cutoff {self.cutoff}")
            c = as_cmatrix(c)
            if c.shape != (p, p):
                raise InputError("moment shape mismatch")
            if c.any():
                out[w] = c
        return out

    @property
    def p(self):
        return self.unit.shape[0]

    def is_selfadjoint(self, tol=1e-12):
        scale = 1.0 + operator_norm(self.unit)
        if operator_norm(self.unit - adjoint(self.unit)) > tol * scale:
            return False
        for w in set(self.forward) | set(self.backward):
            f = self.forward.get(w, np.zeros_like(self.unit))
            b = self.backward.get(w, np.zeros_like(self.unit))
            if operator_norm(b - adjoint(f)) > tol * scale:
                return False
        return True


def _vector_degree(ft, v):
    v = np.asarray(v, dtype=complex)
    if v.shape != (ft.dim,):
        raise InputError(f"vector length {v.shape} does not match dim {ft.dim}")
    nz = np.nonzero(v)[0]
    if len(nz) == 0:
        return 0
    top = int(nz[-1])
    for k in range(ft.N + 1):
        if top < ft.basis.degree_slice(k)[1]:
            return k
    return ft.N


def _apply_append(ft, word, v):
    src, dst = ft.append_indices(word)
    out = np.zeros_like(v)
    out[dst] = v[src]
    return out


def from_vector_states(ft, pairs, cutoff):
    """Moments mu(f) = sum_k w_k <f xi_k, eta_k> from vectors in P^(N).

    Every vector must have degree <= N - cutoff so that the truncated
    creation matrices reproduce the untruncated moments exactly; the
    functional is completely positive when the pairs are (w, xi, xi)
    with w >= 0.
    """
    if cutoff > ft.N:
        raise InputError(f"cutoff {cutoff} exceeds truncation {ft.N}")
    prepared = []
    for w, xi, eta in pairs:
        xi = np.asarray(xi, dtype=complex)
        eta = np.asarray(eta, dtype=complex)
        if max(_vector_degree(ft, xi), _vector_degree(ft, eta)) > ft.N - cutoff:
            raise InputError(
                f"vector degree exceeds N - cutoff = {ft.N - cutoff}; "
                "moments would be truncated"
            )
        prepared.append((complex(w), xi, eta))
    unit = sum(w * np.vdot(eta, xi) for w, xi, eta in prepared)
    forward = {}
    backward = {}
    for word in GradedBasis(ft.n, cutoff).words:
        if not word:
            continue
        # R_word = R_{i1}...R_{ik} appends reverse(word)
        fwd = sum(
            w * np.vdot(eta, _apply_append(ft, reverse(word), xi))
            for w, xi, eta in prepared
        )
        bwd = sum(
            w * np.vdot(_apply_append(ft, reverse(word), eta), xi)
            for w, xi, eta in prepared
        )
        if fwd != 0:
            forward[word] = np.array([[fwd]])
        if bwd != 0:
            backward[word] = np.array([[bwd]])
    return MomentFunctional(
        ft.n,
        cutoff,
        np.array([[unit]]),
        forward,
        backward,
        realization=(ft, prepared),
    )


# -- transforms --------------------------------------------------------------


def poisson_transform_of(mu, X):
    """(P mu)(X) = sum mu(R_~a) (x) X_a* + mu(I) (x) I + sum mu(R_~a*) (x) X_a."""
    if X.n != mu.n:
        raise InputError(f"tuple has {X.n} operators, functional expects {mu.n}")
    out = kron(mu.unit, np.eye(X.dim, dtype=complex))
    for tau, c in mu.forward.items():
        out += kron(c, adjoint(X.word(reverse(tau))))
    for tau, c in mu.backward.items():
        out += kron(c, X.word(reverse(tau)))
    return out


def fantappie_transform(mu, X):
    """(F mu)(X) = mu(I) (x) I + sum_{|a|>=1} mu(R_~a*) (x) X_a."""
    if X.n != mu.n:
        raise InputError(f"tuple has {X.n} operators, functional expects {mu.n}")
    out = kron(mu.unit, np.eye(X.dim, dtype=complex))
    for tau, c in mu.backward.items():
        out += kron(c, X.word(reverse(tau)))
    return out


def herglotz_transform(mu, X):
    """(H mu)(X) = 2 (F mu)(X) - mu(I) (x) I."""
    if X.n != mu.n:
        raise InputError(f"tuple has {X.n} operators, functional expects {mu.n}")
    out = kron(mu.unit, np.eye(X.dim, dtype=complex))
    for tau, c in mu.backward.items():
        out += 2.0 * kron(c, X.word(reverse(tau)))
    return out


def herglotz_from_isometries(V, W, X, im_part, domain_projection=None, tol=1e-10):
    """Stinespring form of a Herglotz transform:
    (W* (x) I)[2 (I - sum V_i* (x) X_i)^(-1) - I](W (x) I) + i Im (x) I.

    The V_i must satisfy V_i* V_j = d_ij I to ``tol``, compressed by
    ``domain_projection`` when given (truncated creation operators are
    isometric only below the top degree)."""
    q = V.dim
    eye_q = np.eye(q, dtype=complex)
    for i, vi in enumerate(V.matrices):
        for j, vj in enumerate(V.matrices):
            dev = adjoint(vi) @ vj - (eye_q if i == j else 0.0)
            if domain_projection is not None:
                dev = domain_projection @ dev @ domain_projection
            if operator_norm(dev) > tol:
                raise ScopeError(
                    f"V_{i+1}* V_{j+1} deviates from isometry relations by "
                    f"{operator_norm(dev):.3e}"
                )
    if jsr_estimate(X, max(X.dim, 1)).nilpotent_order is None:
        raise ScopeError("evaluation point must be jointly nilpotent")
    p = X.dim
    W = as_cmatrix(W)
    im_part = as_cmatrix(im_part)
    m = sum(kron(adjoint(vi), xi) for vi, xi in zip(V.matrices, X.matrices))
    eye = np.eye(m.shape[0], dtype=complex)
    core = 2.0 * solve(eye - m, eye) - eye
    lifted = kron(W, np.eye(p, dtype=complex))
    return adjoint(lifted) @ core @ lifted + 1j * kron(im_part, np.eye(p, dtype=complex))


# -- kernels and positivity equivalences -------------------------------------


def kernel_from_series(f):
    """Left-divisibility kernel of a free series: K(a, a) = A_0 + A_0*,
    K(a, b) = A*_{reverse(b \\_l a)} when b >_l a, the unstarred mirror
    when a >_l b, zero otherwise; over all words of length <= cutoff."""
    if not f.is_square():
        raise InputError("kernel needs square coefficients")
    m = f.cutoff
    basis = GradedBasis(f.n, m)
    p = f.shape[0]
    d = basis.size
    a0 = f.coefficient(())
    diag = a0 + adjoint(a0)
    b4 = np.zeros((d, d, p, p), dtype=complex)
    for a, wa in enumerate(basis.words):
        for b, wb in enumerate(basis.words):
            if a == b:
                b4[a, b] = diag
                continue
            s = left_quotient(wb, wa)
            if s is not None:
                b4[a, b] = adjoint(f.coefficient(reverse(s)))
                continue
            s = left_quotient(wa, wb)
            if s is not None:
                b4[a, b] = f.coefficient(reverse(s))
    entries = b4.transpose(2, 0, 3, 1).reshape(d * p, d * p)
    return MultiToeplitzMatrix(
        f.n, m, p, basis, entries, orbit_structure(f.n, m, "left"), "left"
    )


@dataclass
class EquivalenceReport:
    radial_positive: bool  # A_r >= 0 over the r grid and truncation levels
    kernel_positive: bool  # the divisibility kernel is PSD
    creation_positive: bool  # Re f(S^(m)) >= 0 for every tested m
    min_eigs: dict
    tol: float

    @property
    def agree(self):
        return self.radial_positive == self.kernel_positive == self.creation_positive

    @property
    def all_positive(self):
        return self.radial_positive and self.kernel_positive and self.creation_positive


def positivity_equivalence_check(f, m_max, r_grid, tol=1e-8):
    """Evaluate the three finite positivity predicates for Re f >= 0 and
    report whether they agree: radial compressions A_r over an r grid,
    the divisibility kernel, and Re f at the compressed creations."""
    if not f.is_square():
        raise InputError("positivity check needs square coefficients")
    p = f.shape[0]
    a0 = f.coefficient(())
    half_diag = (a0 + adjoint(a0)) / 2.0

    radial_min = math.inf
    for m in range(m_max + 1):
        ft = get_trunc(f.n, m)
        eye = np.eye(ft.dim, dtype=complex)
        for r in r_grid:
            ar = kron(half_diag, eye)
            for w, c in f.coeffs.items():
                if w and len(w) <= m:
                    rw = (r ** len(w)) * ft.r_word(w)
                    ar += 0.5 * (kron(c, rw) + kron(adjoint(c), rw.T))
            radial_min = min(radial_min, min_eig_hermitian(ar))

    kernel_min = kernel_from_series(f).min_eig()

    creation_min = math.inf
    for m in range(m_max + 1):
        e = eval_at_creation(f, m)
        creation_min = min(creation_min, min_eig_hermitian((e + adjoint(e)) / 2.0))

    eigs = {"radial": radial_min, "kernel": kernel_min, "creation": creation_min}
    return EquivalenceReport(
        radial_min >= -tol, kernel_min >= -tol, creation_min >= -tol, eigs, tol
    )


@dataclass
class FejerReport:
    passed: bool
    rows: list  # (k, lhs, bound)


def fejer_check(mu, m, tol=1e-10):
    """Cosine bounds on the moments of a positive scalar functional whose
    moments vanish from length m on:
    (sum_{|a|=k} |mu(R_a)|^2)^(1/2) <= mu(I) cos(pi / (floor((m-1)/k) + 2)).
    """
    if mu.p != 1:
        raise InputError("Fejer check applies to scalar functionals")
    if mu.cutoff < m - 1:
        raise InputError(f"functional must carry moments to length {m - 1}")
    scale = 1.0 + abs(complex(mu.unit[0, 0]))
    for w, c in mu.forward.items():
        if len(w) >= m and abs(complex(c[0, 0])) > 1e-12 * scale:
            raise InputError(
                f"moment at word of length {len(w)} is nonzero; hypothesis fails"
            )
    unit = complex(mu.unit[0, 0]).real
    rows = []
    for k in range(1, m):
        lhs = math.sqrt(
            sum(abs(complex(c[0, 0])) ** 2 for w, c in mu.forward.items() if len(w) == k)
        )
        bound = unit * math.cos(math.pi / ((m - 1) // k + 2)) + tol
        rows.append((k, lhs, bound))
    return FejerReport(all(lhs <= b for _, lhs, b in rows), rows)


# -- pluriharmonic bridge -----------------------------------------------------


def radial_functional(h, r):
    """Moments induced by the radial boundary of a pluriharmonic function:
    mu(R_~a) = r^|a| B_a, mu(R_~a*) = r^|a| A_a, mu(I) = A_0."""
    if not 0.0 <= r < 1.0:
        raise InputError(f"radius {r} outside [0, 1)")
    forward = {}
    backward = {}
    for w, c in h.coanalytic.items():
        forward[reverse(w)] = (r ** len(w)) * c
    for w, c in h.analytic.items():
        if w:
            backward[reverse(w)] = (r ** len(w)) * c
    return MomentFunctional(h.n, h.cutoff, h.a_coeff(()), forward, backward)


def poisson_pluriharmonic(mu):
    """The pluriharmonic function P mu: A_a = mu(R_~a*), B_a = mu(R_~a),
    constant mu(I)."""
    analytic = {(): mu.unit.copy()}
    coanalytic = {}
    for tau, c in mu.backward.items():
        analytic[reverse(tau)] = c.copy()
    for tau, c in mu.forward.items():
        coanalytic[reverse(tau)] = c.copy()
    return PluriharmonicFn(mu.n, mu.cutoff, mu.unit.shape, analytic, coanalytic)
