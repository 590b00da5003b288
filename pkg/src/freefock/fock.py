"""Truncated Fock space over n generators: compressed creation operators,
degree projections, reconstruction operator, Berezin and Poisson kernels,
vector-state Berezin transforms, and isometric dilations.

Layout conventions, used consistently everywhere:

* Operators on ``Fock (x) H`` (reconstruction operator, kernels) are
  Fock-major: composite index = fock_index * p + h_index.
* Operators on ``E (x) Fock`` (symbol evaluations, radial boundaries)
  are coefficient-major: composite index = e_index * dim + fock_index.

Kernel matrices grow like dim(P^(N)) * p, which explodes for n = 3 past
N ~ 5; the ``apply_*`` functions act on tall vectors through index
bookkeeping instead of forming the dense operators, and are exact on the
truncated space because the reconstruction operator is nilpotent there.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ScopeError
from .linalg import (
    adjoint,
    as_cmatrix,
    hermitian_sqrt,
    kron,
    operator_norm,
    solve,
)
from .words import GradedBasis, reverse, validate_word


def word_operator(matrices, word):
    """Product X_alpha = X_{i1} ... X_{ik}; the empty word gives I."""
    p = matrices[0].shape[0]
    out = np.eye(p, dtype=complex)
    for i in word:
        out = out @ matrices[i - 1]
    return out


@dataclass
class OperatorTuple:
    """An n-tuple of p x p matrices, the argument of every transform."""

    matrices: tuple

    def __post_init__(self):
        mats = tuple(as_cmatrix(m) for m in self.matrices)
        if not mats:
            raise InputError("operator tuple needs at least one matrix")
        p = mats[0].shape[0]
        for m in mats:
            if m.shape != (p, p):
                raise InputError("operator tuple matrices must be square and equal-sized")
        self.matrices = mats

    @property
    def n(self):
        return len(self.matrices)

    @property
    def dim(self):
        return self.matrices[0].shape[0]

    @functools.cached_property
    def row_norm(self):
        """Norm of the block row [X_1 ... X_n]."""
        return operator_norm(np.hstack(self.matrices))

    def word(self, w):
        return word_operator(self.matrices, w)

    def scale(self, c):
        return OperatorTuple(tuple(c * m for m in self.matrices))


def random_nilpotent_tuple(rng, n, dim, row_norm=None):
    """Strictly upper-triangular random tuple; jointly nilpotent of order <= dim.

    When row_norm is given the block row is rescaled to that norm exactly
    (unless the draw is zero).
    """
    mats = []
    for _ in range(n):
        m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        mats.append(np.triu(m, 1))
    t = OperatorTuple(tuple(mats))
    if row_norm is not None and t.row_norm > 0:
        t = t.scale(row_norm / t.row_norm)
    return t


class FockTrunc:
    """Polynomials of degree <= N in the full Fock space, with the
    compressed creation operators as dim x dim matrices.

    Creation matrices and index maps are cached on first use behind a
    lock, so instances are safe to share across threads.
    """

    def __init__(self, n, N):
        self.basis = GradedBasis(n, N)
        self.n = n
        self.N = N
        self.dim = self.basis.size
        self._lock = threading.Lock()
        self._append_idx = {}
        self._prepend_idx = {}
        self._left = {}
        self._right = {}

    # -- index maps ------------------------------------------------------

    def append_indices(self, word):
        """(src, dst) with e_{basis[src]} -> e_{basis[src] + word}."""
        with self._lock:
            cached = self._append_idx.get(word)
            if cached is None:
                hi = self.basis.degree_slice(self.N - len(word))[1] if len(word) <= self.N else 0
                src = np.arange(hi)
                idx = self.basis.index
                dst = np.fromiter(
                    (idx[self.basis.words[s] + word] for s in range(hi)), dtype=np.intp, count=hi
                )
                cached = (src, dst)
                self._append_idx[word] = cached
        return cached

    def prepend_indices(self, word):
        """(src, dst) with e_{basis[src]} -> e_{word + basis[src]}."""
        with self._lock:
            cached = self._prepend_idx.get(word)
            if cached is None:
                hi = self.basis.degree_slice(self.N - len(word))[1] if len(word) <= self.N else 0
                src = np.arange(hi)
                idx = self.basis.index
                dst = np.fromiter(
                    (idx[word + self.basis.words[s]] for s in range(hi)), dtype=np.intp, count=hi
                )
                cached = (src, dst)
                self._prepend_idx[word] = cached
        return cached

    def _shift_matrix(self, indices):
        src, dst = indices
        m = np.zeros((self.dim, self.dim), dtype=complex)
        m[dst, src] = 1.0
        return m

    # -- creation operators ----------------------------------------------

    def _check_gen(self, i):
        if not 1 <= i <= self.n:
            raise InputError(f"generator {i} outside 1..{self.n}")

    def left_creation(self, i):
        """S_i: e_alpha -> e_{g_i alpha}, truncated at degree N."""
        self._check_gen(i)
        with self._lock:
            m = self._left.get(i)
        if m is None:
            m = self._shift_matrix(self.prepend_indices((i,)))
            with self._lock:
                self._left[i] = m
        return m

    def right_creation(self, i):
        """R_i: e_alpha -> e_{alpha g_i}, truncated at degree N."""
        self._check_gen(i)
        with self._lock:
            m = self._right.get(i)
        if m is None:
            m = self._shift_matrix(self.append_indices((i,)))
            with self._lock:
                self._right[i] = m
        return m

    def s_word(self, word):
        """S_alpha: e_beta -> e_{alpha beta}."""
        validate_word(word, self.n)
        return self._shift_matrix(self.prepend_indices(word))

    def r_word(self, word):
        """R_alpha = R_{i1}...R_{ik}: e_beta -> e_{beta reverse(alpha)}."""
        validate_word(word, self.n)
        return self._shift_matrix(self.append_indices(reverse(word)))

    def append_matrix(self, word):
        """e_beta -> e_{beta word}; equals R_{reverse(word)}."""
        validate_word(word, self.n)
        return self._shift_matrix(self.append_indices(word))

    def degree_projection(self, k):
        """Orthogonal projection onto words of length <= k (0/1 diagonal)."""
        if not 0 <= k <= self.N:
            raise InputError(f"degree {k} outside 0..{self.N}")
        d = np.zeros(self.dim)
        d[: self.basis.degree_slice(k)[1]] = 1.0
        return np.diag(d).astype(complex)


@functools.lru_cache(maxsize=64)
def get_trunc(n, N):
    """Shared FockTrunc instances, so creation-matrix caches are reused."""
    return FockTrunc(n, N)


# -- kernels and transforms ------------------------------------------------


def _check_tuple(ft, X):
    if X.n != ft.n:
        raise InputError(f"tuple has {X.n} operators, Fock space expects {ft.n}")


def _check_strict_ball(X):
    if X.row_norm >= 1.0 - 1e-12:
        raise ScopeError(f"row norm {X.row_norm:.6f} is not inside the open unit ball")


def delta_defect(X):
    """Delta_X = (I - sum X_i X_i*)^(1/2), by Hermitian eigendecomposition."""
    p = X.dim
    g = np.eye(p, dtype=complex)
    for m in X.matrices:
        g = g - m @ adjoint(m)
    return hermitian_sqrt(g)


def reconstruction_operator(ft, X):
    """R_X = sum_i R_i (x) X_i* on P^(N) (x) C^p, Fock-major."""
    _check_tuple(ft, X)
    p = X.dim
    out = np.zeros((ft.dim * p, ft.dim * p), dtype=complex)
    for i, m in enumerate(X.matrices, start=1):
        out += kron(ft.right_creation(i), adjoint(m))
    return out


def berezin_kernel(ft, X):
    """B_X = (I (x) Delta_X)(I - R_X)^(-1), dense."""
    _check_tuple(ft, X)
    _check_strict_ball(X)
    rx = reconstruction_operator(ft, X)
    inv = solve(np.eye(rx.shape[0], dtype=complex) - rx, np.eye(rx.shape[0], dtype=complex))
    return kron(np.eye(ft.dim, dtype=complex), delta_defect(X)) @ inv


def poisson_kernel(ft, X):
    """K_X: C^p -> P^(N) (x) C^p; block at word alpha is Delta_X X_alpha*.

    Direct block construction (the Neumann expansion of B_X on 1 (x) h),
    so no resolvent solve is needed.  The part of the infinite kernel
    beyond degree N has norm at most tail_bound(row_norm, N).
    """
    _check_tuple(ft, X)
    _check_strict_ball(X)
    p = X.dim
    delta = delta_defect(X)
    out = np.zeros((ft.dim * p, p), dtype=complex)
    # walk words in graded order, extending X_alpha* products level by level
    blocks = {(): np.eye(p, dtype=complex)}
    for w in ft.basis.words:
        if w not in blocks:
            head, tail = w[:-1], w[-1]
            blocks[w] = adjoint(X.matrices[tail - 1]) @ blocks[head]
        i = ft.basis.index[w]
        out[i * p : (i + 1) * p] = delta @ blocks[w]
    return out


def poisson_transform(ft, F, X):
    """P_X[F] = K_X* (F (x) I) K_X for a symbol F on P^(N); p x p output."""
    F = as_cmatrix(F)
    if F.shape != (ft.dim, ft.dim):
        raise InputError(f"symbol must be {ft.dim} x {ft.dim}, got {F.shape}")
    K = poisson_kernel(ft, X)
    p = X.dim
    K3 = K.reshape(ft.dim, p, p)
    FK = np.tensordot(F, K3, axes=(1, 0)).reshape(ft.dim * p, p)
    return adjoint(K) @ FK


def poisson_transform_block(ft, U, X, coeff_dim):
    """Extension of the Poisson transform to symbols with matrix
    coefficients: U acts on C^q (x) P^(N) (coefficient-major), and the
    result (I (x) K_X*)(U (x) I)(I (x) K_X) acts on C^q (x) C^p."""
    U = as_cmatrix(U)
    q = coeff_dim
    if U.shape != (q * ft.dim, q * ft.dim):
        raise InputError(f"symbol must be {q * ft.dim} square, got {U.shape}")
    K = poisson_kernel(ft, X)
    p = X.dim
    lifted = kron(np.eye(q, dtype=complex), K)
    return adjoint(lifted) @ kron(U, np.eye(p, dtype=complex)) @ lifted


def poisson_transform_word_symbol(ft, alpha, beta, X, kernel=None):
    """P_X[S_alpha S_beta*] without forming the dim x dim symbol.

    S_alpha S_beta* maps e_{beta sigma} -> e_{alpha sigma}; the transform
    is K_X* (that shift (x) I) K_X, assembled through index maps.  Pass a
    precomputed poisson_kernel(ft, X) to amortize it over many words.
    """
    validate_word(alpha, ft.n)
    validate_word(beta, ft.n)
    K = poisson_kernel(ft, X) if kernel is None else kernel
    p = X.dim
    K3 = K.reshape(ft.dim, p, p)
    FK = np.zeros_like(K3)
    src_b, dst_b = ft.prepend_indices(beta)
    src_a, dst_a = ft.prepend_indices(alpha)
    m = min(len(src_b), len(src_a))  # sigma runs over degrees <= N - max(|alpha|,|beta|)
    FK[dst_a[:m]] = K3[dst_b[:m]]
    return adjoint(K) @ FK.reshape(ft.dim * p, p)


def berezin_transform(ft, mu, F, X):
    """Berezin transform of F at X against a vector-state functional.

    mu must carry a realization: a FockTrunc matching ft and weighted
    vector pairs (w, xi, eta) in P^(N).  The map mu (x) id is applied to
    B_X* (F (x) I) B_X blockwise against the Fock factor.
    """
    if getattr(mu, "realization", None) is None:
        raise InputError("moment functional lacks a vector-state realization")
    rft, pairs = mu.realization
    if (rft.n, rft.N) != (ft.n, ft.N):
        raise InputError("realization lives on a different truncated Fock space")
    F = as_cmatrix(F)
    if F.shape != (ft.dim, ft.dim):
        raise InputError(f"symbol must be {ft.dim} x {ft.dim}, got {F.shape}")
    B = berezin_kernel(ft, X)
    p = X.dim
    G = adjoint(B) @ kron(F, np.eye(p, dtype=complex)) @ B
    out = np.zeros((p, p), dtype=complex)
    eye = np.eye(p, dtype=complex)
    for w, xi, eta in pairs:
        lx = kron(np.asarray(xi, dtype=complex).reshape(-1, 1), eye)
        le = kron(np.asarray(eta, dtype=complex).reshape(-1, 1), eye)
        out += w * (adjoint(le) @ G @ lx)
    return out


# -- probe application paths (no dense kernel) -----------------------------


def apply_reconstruction(ft, X, V):
    """R_X applied to V, V given as a (dim, p) array."""
    out = np.zeros_like(V)
    for i, m in enumerate(X.matrices, start=1):
        src, dst = ft.append_indices((i,))
        out[dst] += V[src] @ np.conj(m)
    return out


def apply_reconstruction_adjoint(ft, X, V):
    out = np.zeros_like(V)
    for i, m in enumerate(X.matrices, start=1):
        src, dst = ft.append_indices((i,))
        out[src] += V[dst] @ m.T
    return out


def apply_resolvent(ft, X, V):
    """(I - R_X)^(-1) V; exact, since R_X is nilpotent of order N + 1."""
    out = V.copy()
    term = V
    for _ in range(ft.N):
        term = apply_reconstruction(ft, X, term)
        if not term.any():
            break
        out += term
    return out


def apply_resolvent_adjoint(ft, X, V):
    out = V.copy()
    term = V
    for _ in range(ft.N):
        term = apply_reconstruction_adjoint(ft, X, term)
        if not term.any():
            break
        out += term
    return out


def apply_pluriharmonic_poisson(ft, X, V):
    """P(R^(N), X) V = ((I-R_X)^(-1) + (I-R_X*)^(-1) - I) V on probes."""
    return apply_resolvent(ft, X, V) + apply_resolvent_adjoint(ft, X, V) - V


def apply_berezin_factor(ft, X, V):
    """B_X* B_X V through Neumann sums and the defect square."""
    g = np.eye(X.dim, dtype=complex)
    for m in X.matrices:
        g = g - m @ adjoint(m)
    W = apply_resolvent(ft, X, V)
    W = W @ g.T
    return apply_resolvent_adjoint(ft, X, W)


# -- dilation and tails -----------------------------------------------------


def isometric_dilation(T, N):
    """Truncated minimal isometric dilation of a row contraction.

    Returns n block lower-triangular matrices on C^p + (P^(N) (x) C^(np)):
    [[T_i, 0], [Delta_i, S_i (x) I]], with the defect embedded at the
    degree-zero slot.  The defect space is kept as all of C^(np); no rank
    reduction is attempted.
    """
    if T.row_norm > 1.0 + 1e-12:
        raise ScopeError(f"row norm {T.row_norm:.6f} exceeds 1; not a row contraction")
    n, p = T.n, T.dim
    ft = get_trunc(n, N)
    C = np.hstack(T.matrices)
    G = np.eye(n * p, dtype=complex) - adjoint(C) @ C
    # row_norm <= 1 + 1e-12 can leave eigenvalues ~ -2e-12; clamp them
    D = hermitian_sqrt(G, clamp=1e-10)
    total = p + ft.dim * n * p
    out = []
    for i in range(1, n + 1):
        V = np.zeros((total, total), dtype=complex)
        V[:p, :p] = T.matrices[i - 1]
        V[p : p + n * p, :p] = D[:, (i - 1) * p : i * p]
        V[p:, p:] = kron(ft.left_creation(i), np.eye(n * p, dtype=complex))
        out.append(V)
    return OperatorTuple(tuple(out))


def tail_bound(r, N):
    """Norm of the degree > N tail of the Poisson kernel column:
    r^(N+1) / sqrt(1 - r^2)."""
    if not 0.0 <= r < 1.0:
        raise ScopeError(f"radius {r} outside [0, 1)")
    return r ** (N + 1) / math.sqrt(1.0 - r * r)
