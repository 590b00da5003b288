"""Degree-truncated free power series in n noncommuting indeterminates.

Coefficients are complex matrices of one fixed shape, stored sparsely by
word (absent means zero).  Every series carries an explicit cutoff; a
binary operation truncates to the smaller cutoff, so nothing ever claims
more precision than its inputs had.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ScopeError
from .fock import get_trunc
from .linalg import adjoint, as_cmatrix, kron, operator_norm
from .words import GradedBasis, validate_word


@dataclass
class FreeSeries:
    n: int
    cutoff: int
    shape: tuple
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.cutoff < 0:
            raise InputError("cutoff must be >= 0")
        self.shape = tuple(self.shape)
        clean = {}
        for w, c in self.coeffs.items():
            w = tuple(w)
            validate_word(w, self.n)
            if len(w) > self.cutoff:
                raise InputError(f"word of length {len(w)} exceeds cutoff {self.cutoff}")
            c = as_cmatrix(c)
            if c.shape != self.shape:
                raise InputError(f"coefficient shape {c.shape} != series shape {self.shape}")
            if c.any():
                clean[w] = c
        self.coeffs = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(n, cutoff, shape):
        return FreeSeries(n, cutoff, shape, {})

    @staticmethod
    def one(n, cutoff, p):
        return FreeSeries(n, cutoff, (p, p), {(): np.eye(p, dtype=complex)})

    # -- basic algebra -----------------------------------------------------

    def coefficient(self, w):
        c = self.coeffs.get(tuple(w))
        return c.copy() if c is not None else np.zeros(self.shape, dtype=complex)

    def is_square(self):
        return self.shape[0] == self.shape[1]

    def constant_term(self):
        return self.coefficient(())

    def without_constant(self):
        c = {w: v for w, v in self.coeffs.items() if w}
        return FreeSeries(self.n, self.cutoff, self.shape, c)

    def add(self, other):
        _match(self, other)
        if self.shape != other.shape:
            raise InputError("shape mismatch in series addition")
        cutoff = min(self.cutoff, other.cutoff)
        out = {}
        for w in set(self.coeffs) | set(other.coeffs):
            if len(w) <= cutoff:
                out[w] = self.coefficient(w) + other.coefficient(w)
        return FreeSeries(self.n, cutoff, self.shape, out)

    def scale(self, c):
        return FreeSeries(
            self.n, self.cutoff, self.shape, {w: c * v for w, v in self.coeffs.items()}
        )

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.add(other.scale(-1.0))

    def max_degree(self):
        return max((len(w) for w in self.coeffs), default=0)

    def degree_slice_gram_norm(self, k):
        """|| sum_{|a|=k} A_a* A_a || (operator norm of the PSD Gram sum)."""
        g = np.zeros((self.shape[1], self.shape[1]), dtype=complex)
        found = False
        for w, c in self.coeffs.items():
            if len(w) == k:
                g += adjoint(c) @ c
                found = True
        return operator_norm(g) if found else 0.0


def _match(f, g):
    if f.n != g.n:
        raise InputError(f"series over {f.n} and {g.n} generators cannot be combined")


def multiply(f, g):
    """Series product; coefficient of a word sums over all its two-part
    factorizations, including empty factors.

    Dense series go through per-degree coefficient blocks: words of
    degree a + b in graded-lex order are exactly the (prefix, suffix)
    product order, so each degree pair is one tensor contraction.
    """
    _match(f, g)
    if f.shape[1] != g.shape[0]:
        raise InputError(f"inner shapes {f.shape} x {g.shape} do not match")
    cutoff = min(f.cutoff, g.cutoff)
    shape = (f.shape[0], g.shape[1])
    basis_size = sum(f.n**k for k in range(cutoff + 1))
    work_blocked = basis_size * shape[0] * shape[1]
    work_pairwise = len(f.coeffs) * len(g.coeffs)
    if work_blocked <= 65536 and work_pairwise > 4 * basis_size:
        return _multiply_blocked(f, g, cutoff, shape)
    out = {}
    for wf, cf in f.coeffs.items():
        if len(wf) > cutoff:
            continue
        for wg, cg in g.coeffs.items():
            if len(wf) + len(wg) > cutoff:
                continue
            w = wf + wg
            prod = cf @ cg
            if w in out:
                out[w] += prod
            else:
                out[w] = prod
    return FreeSeries(f.n, cutoff, shape, out)


def _degree_blocks(f, cutoff):
    """Per-degree dense coefficient stacks [(n^k, p, q)] in lex order."""
    basis = GradedBasis(f.n, cutoff)
    blocks = []
    for k in range(cutoff + 1):
        lo, hi = basis.degree_slice(k)
        arr = np.zeros((hi - lo, *f.shape), dtype=complex)
        blocks.append(arr)
    for w, c in f.coeffs.items():
        if len(w) <= cutoff:
            k = len(w)
            lo, _ = basis.degree_slice(k)
            blocks[k][basis.index[w] - lo] = c
    return basis, blocks


def _multiply_blocked(f, g, cutoff, shape):
    basis, fa = _degree_blocks(f, cutoff)
    _, gb = _degree_blocks(g, cutoff)
    out_blocks = [
        np.zeros((f.n**k, *shape), dtype=complex) for k in range(cutoff + 1)
    ]
    for a in range(cutoff + 1):
        if not fa[a].any():
            continue
        for b in range(cutoff + 1 - a):
            if not gb[b].any():
                continue
            prod = np.einsum("ipq,jqr->ijpr", fa[a], gb[b])
            out_blocks[a + b] += prod.reshape(-1, *shape)
    out = {}
    for k, arr in enumerate(out_blocks):
        lo, _ = basis.degree_slice(k)
        nz = np.nonzero(arr.reshape(arr.shape[0], -1).any(axis=1))[0]
        for i in nz:
            out[basis.words[lo + i]] = arr[i]
    return FreeSeries(f.n, cutoff, shape, out)


def _require_zero_constant(f, what):
    if not f.is_square():
        raise InputError(f"{what} needs square coefficients, got {f.shape}")
    if f.constant_term().any():
        raise InputError(f"{what} needs zero constant term")


def _geometric_blocked(f, alternating):
    """Blocks of sum_{k>=1} (+-1)^(k+1) f^k for a dense small series."""
    basis, fb = _degree_blocks(f, f.cutoff)
    cutoff = f.cutoff
    acc = [np.zeros_like(b) for b in fb]
    power = fb
    sign = 1.0
    for k in range(1, cutoff + 1):
        for d in range(k, cutoff + 1):
            acc[d] += sign * power[d]
        if k == cutoff:
            break
        nxt = [np.zeros_like(b) for b in fb]
        for a in range(k, cutoff + 1):
            if not power[a].any():
                continue
            for b in range(1, cutoff + 1 - a):
                prod = np.einsum("ipq,jqr->ijpr", power[a], fb[b])
                nxt[a + b] += prod.reshape(-1, *f.shape)
        power = nxt
        if alternating:
            sign = -sign
    out = {}
    for k, arr in enumerate(acc):
        lo, _ = basis.degree_slice(k)
        nz = np.nonzero(arr.reshape(arr.shape[0], -1).any(axis=1))[0]
        for i in nz:
            out[basis.words[lo + i]] = arr[i]
    return FreeSeries(f.n, f.cutoff, f.shape, out)


def _geometric_sum(f, alternating):
    basis_size = sum(f.n**k for k in range(f.cutoff + 1))
    if basis_size * f.shape[0] * f.shape[1] <= 65536 and len(f.coeffs) > basis_size // 8:
        return _geometric_blocked(f, alternating)
    acc = FreeSeries.zero(f.n, f.cutoff, f.shape)
    power = FreeSeries.one(f.n, f.cutoff, f.shape[0])
    sign = 1.0
    for _ in range(f.cutoff):
        power = multiply(power, f)
        if not power.coeffs:
            break
        acc = acc.add(power.scale(sign))
        if alternating:
            sign = -sign
    return acc


def neumann_inverse(f):
    """(1 - f)^(-1) = 1 + f + f^2 + ..., truncated at the cutoff."""
    _require_zero_constant(f, "Neumann inverse")
    return FreeSeries.one(f.n, f.cutoff, f.shape[0]).add(_geometric_sum(f, False))


def cayley_forward(f):
    """(1 - f)^(-1) f = f + f^2 + ...; zero constant term in, zero out."""
    _require_zero_constant(f, "Cayley transform")
    return _geometric_sum(f, False)


def cayley_inverse(g):
    """g (1 + g)^(-1) = g - g^2 + g^3 - ...; inverts cayley_forward."""
    _require_zero_constant(g, "inverse Cayley transform")
    return _geometric_sum(g, True)


def cayley_composition_coefficient(f, w):
    """Brute-force Eq-level oracle for the Cayley coefficient at word w:
    sum over all ordered factorizations of w into nonempty pieces of the
    products of the pieces' coefficients."""
    k = len(w)
    if k == 0:
        raise InputError("the Cayley transform has no constant coefficient")
    p = f.shape[0]
    total = np.zeros((p, p), dtype=complex)
    # each subset of the k-1 interior cut points gives one factorization
    for mask in range(1 << (k - 1)):
        cuts = [0] + [i + 1 for i in range(k - 1) if mask >> i & 1] + [k]
        prod = np.eye(p, dtype=complex)
        for a, b in zip(cuts, cuts[1:]):
            prod = prod @ f.coefficient(w[a:b])
        total += prod
    return total


# -- joint spectral radius and evaluation -----------------------------------


@dataclass
class JsrEstimate:
    kmax: int
    value: float
    nilpotent_order: int | None = None


def jsr_estimate(X, kmax):
    """Finite-depth joint spectral radius: ||M_kmax||^(1/(2 kmax)) with
    M_k = sum_i X_i M_{k-1} X_i*.  Reports the first k with M_k = 0 (to a
    scale-relative threshold), in which case the value is 0."""
    if kmax < 1:
        raise InputError("jsr depth must be >= 1")
    p = X.dim
    m = np.eye(p, dtype=complex)
    r = X.row_norm
    for k in range(1, kmax + 1):
        nxt = np.zeros((p, p), dtype=complex)
        for xi in X.matrices:
            nxt += xi @ m @ adjoint(xi)
        m = nxt
        if operator_norm(m) <= 1e-13 * r ** (2 * k):
            return JsrEstimate(kmax=k, value=0.0, nilpotent_order=k)
    return JsrEstimate(kmax=kmax, value=float(operator_norm(m) ** (1.0 / (2 * kmax))))


def radius_estimate(f, kmax):
    """Conservative finite-depth radius of convergence:
    1 / max_{1<=k<=kmax} ||sum_{|a|=k} A_a* A_a||^(1/(2k)).
    Infinite when every tested degree slice vanishes."""
    if not f.is_square():
        raise InputError("radius estimate needs square coefficients")
    if not 1 <= kmax <= f.cutoff:
        raise InputError(f"depth {kmax} outside 1..cutoff={f.cutoff}")
    worst = 0.0
    for k in range(1, kmax + 1):
        c = f.degree_slice_gram_norm(k)
        if c > 0:
            worst = max(worst, c ** (1.0 / (2 * k)))
    return math.inf if worst == 0.0 else 1.0 / worst


@dataclass
class EvalReport:
    value: np.ndarray
    exact: bool
    tail_bound: float
    jsr: JsrEstimate


def eval_report(f, X, jsr_depth=None):
    """Evaluate f at an operator tuple, with scope control.

    Jointly nilpotent arguments are always in scope; the sum is exact
    when the nilpotency order is <= cutoff + 1.  Otherwise the jsr
    estimate must clear the radius estimate with a 0.9 margin, and the
    reported tail bound covers the degrees beyond the cutoff.
    """
    if not f.is_square():
        raise InputError("evaluation needs square coefficients")
    if X.n != f.n:
        raise InputError(f"tuple has {X.n} operators, series expects {f.n}")
    depth = jsr_depth if jsr_depth is not None else max(X.dim, f.cutoff + 1)
    est = jsr_estimate(X, depth)
    nilpotent = est.nilpotent_order is not None
    if not nilpotent:
        rad = radius_estimate(f, f.cutoff) if f.cutoff >= 1 else math.inf
        if not est.value < 0.9 * rad:
            raise ScopeError(
                f"jsr estimate {est.value:.4f} not inside 0.9 x radius estimate {rad:.4f}; "
                "functional calculus out of scope"
            )
    p, q = f.shape[0], X.dim
    out = np.zeros((p * q, p * q), dtype=complex)
    for w, c in f.coeffs.items():
        out += kron(c, X.word(w))
    exact = nilpotent and est.nilpotent_order <= f.cutoff + 1
    tail = 0.0 if exact else _eval_tail(f, X, est)
    return EvalReport(out, exact, tail, est)


def _eval_tail(f, X, est):
    """sum_{k > cutoff} q^k ||M_k||^(1/2) with q the slice-norm growth rate."""
    rad = radius_estimate(f, f.cutoff) if f.cutoff >= 1 else math.inf
    q = 0.0 if math.isinf(rad) else 1.0 / rad
    if q == 0.0:
        return 0.0
    p = X.dim
    m = np.eye(p, dtype=complex)
    for _ in range(f.cutoff):
        m = sum(xi @ m @ adjoint(xi) for xi in X.matrices)
    total = 0.0
    for k in range(f.cutoff + 1, f.cutoff + 200):
        m = sum(xi @ m @ adjoint(xi) for xi in X.matrices)
        term = q**k * math.sqrt(operator_norm(m))
        total += term
        if term <= 1e-17 * (1.0 + total):
            break
    return total


def eval_at(f, X, jsr_depth=None):
    """sum_a A_a (x) X_a (coefficient-major); see eval_report for scope."""
    return eval_report(f, X, jsr_depth).value


def eval_at_creation(f, m):
    """f(S^(m)) = sum_{|a|<=m} A_a (x) S_a^(m) on C^p (x) P^(m)."""
    if not f.is_square():
        raise InputError("evaluation needs square coefficients")
    ft = get_trunc(f.n, m)
    p = f.shape[0]
    out = np.zeros((p * ft.dim, p * ft.dim), dtype=complex)
    for w, c in f.coeffs.items():
        if len(w) <= m:
            out += kron(c, ft.s_word(w))
    return out


def hinf_norm_lower(f, m):
    """||f(S^(m))||; nondecreasing in m, a lower bound for the sup norm."""
    return operator_norm(eval_at_creation(f, m))


# -- truncated Cayley transform on multi-analytic operators -----------------


def _constant_block_norm(Y, ft, p):
    y4 = Y.reshape(p, ft.dim, p, ft.dim)
    return operator_norm(y4[:, 0, :, 0])


def check_multi_analytic(Y, ft, tol=1e-10):
    """Y on C^p (x) P^(m) must commute with every I (x) R_i^(m).

    That commutant is exactly the operators sum_a A_a (x) S_a^(m), the
    truncated analogue of multi-analytic operators in the left world.
    """
    Y = as_cmatrix(Y)
    if Y.shape[0] != Y.shape[1] or Y.shape[0] % ft.dim:
        raise InputError(f"operator of size {Y.shape} does not fit C^p (x) P^({ft.N})")
    p = Y.shape[0] // ft.dim
    scale = 1.0 + np.linalg.norm(Y)
    eye = np.eye(p, dtype=complex)
    for i in range(1, ft.n + 1):
        r = kron(eye, ft.right_creation(i))
        if np.linalg.norm(Y @ r - r @ Y) > tol * scale:
            raise InputError(f"operator does not commute with I (x) R_{i}; not multi-analytic")
    return p


def truncated_cayley(Y, direction, ft, tol=1e-10):
    """Cayley transform of a multi-analytic operator with zero constant
    term on C^p (x) P^(m): forward Y(I-Y)^(-1) = Y + ... + Y^m, inverse
    Y(I+Y)^(-1) = Y - Y^2 + ... +- Y^m.  Finite sums by nilpotency."""
    if direction not in ("forward", "inverse"):
        raise InputError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    p = check_multi_analytic(Y, ft, tol)
    if _constant_block_norm(Y, ft, p) > tol * (1.0 + np.linalg.norm(Y)):
        raise InputError("operator has a nonzero constant term")
    out = np.zeros_like(Y)
    power = np.eye(Y.shape[0], dtype=complex)
    sign = 1.0
    for _ in range(ft.N):
        power = power @ Y
        if not power.any():
            break
        out += sign * power
        if direction == "inverse":
            sign = -sign
    return out


def extract_coeffs(A, ft, coeff_dim):
    """Fourier coefficients of an operator on C^p (x) P^(N).

    Returns (analytic, coanalytic): analytic[a] pairs A against the
    column of e_{g0} and the row of e_a, coanalytic[a] the transposed
    pairing; exact zeros are dropped.
    """
    A = as_cmatrix(A)
    p = coeff_dim
    if A.shape != (p * ft.dim, p * ft.dim):
        raise InputError(f"operator shape {A.shape} does not match C^{p} (x) P^({ft.N})")
    a4 = A.reshape(p, ft.dim, p, ft.dim)
    analytic = {}
    coanalytic = {}
    for w, k in ft.basis.index.items():
        c = a4[:, k, :, 0]
        if c.any():
            analytic[w] = c.copy()
        if k > 0:
            b = a4[:, 0, :, k]
            if b.any():
                coanalytic[w] = b.copy()
    return analytic, coanalytic


def random_series(rng, n, cutoff, shape, scale=1.0, min_degree=0):
    """Dense random series with standard complex Gaussian entries."""
    coeffs = {}
    for w in GradedBasis(n, cutoff).words:
        if len(w) >= min_degree:
            coeffs[w] = scale * (
                rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            )
    return FreeSeries(n, cutoff, shape, coeffs)
