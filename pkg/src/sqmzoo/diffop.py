"""Graded differential operators over (coordinates x fermionic module).

A DiffOp is a finite sum over derivative multi-indices of matrix-valued
coefficient fields acting on a fermion Fock space: sum_alpha F_alpha(x)
d^alpha, normal-ordered with all derivatives to the right.  Operators
are stored with plain partials; the physics convention p_M = -i d_M is
applied when operators are built.  Composition redistributes
derivatives by the Leibniz rule, with coefficient derivatives realised
as exact jet requests at evaluation time rather than finite
differences.  The grading is carried by the finite fermion matrices, so
matrix multiplication implements the graded product with no extra sign
bookkeeping.

Zero-testing is probabilistic: coefficient fields of an analytic
operator vanish identically iff they vanish on any set of nonzero
measure, so seeded random sample points give a sound practical test.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .fields import (EvalContext, Field, ZeroField, fconj_t, fconst, fderiv,
                     fdiag, fexp, fidentity, fmatmul, fpow, frestrict, fscale,
                     fsum)
from .jets import MAX_ORDER


class OpError(ValueError):
    pass


class ReductionError(OpError):
    """A cyclic reduction was requested along a coordinate the operator
    actually depends on."""


# ---------------------------------------------------------------------------
# multi-index helpers


def unit_index(ncoords, pos):
    return tuple(1 if i == pos else 0 for i in range(ncoords))


def _sub_indices(alpha):
    """All gamma with gamma <= alpha componentwise."""
    ranges = [range(a + 1) for a in alpha]
    return itertools.product(*ranges)


def _binom(alpha, gamma):
    w = 1
    for a, g in zip(alpha, gamma):
        w *= math.comb(a, g)
    return w


def _idx_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _idx_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class Exclusion:
    """Points where |expr| < min_abs are rejected by samplers."""

    expr: object
    min_abs: float = 0.1

    def excluded(self, point):
        return abs(self.expr(point)) < self.min_abs


@dataclass(frozen=True)
class SampleSpec:
    """Seeded sample box with optional excluded sets."""

    box: tuple                    # ((lo, hi), ...) per coordinate
    n_points: int = 20
    seed: int = 0
    exclusions: tuple = ()

    def points(self):
        rng = np.random.default_rng(self.seed)
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        out = []
        attempts = 0
        while len(out) < self.n_points:
            attempts += 1
            if attempts > 1000 * self.n_points:
                raise OpError("sample box exhausted by exclusions")
            p = tuple(rng.uniform(lo, hi))
            if any(e.excluded(p) for e in self.exclusions):
                continue
            out.append(p)
        return out


@dataclass(frozen=True)
class Residual:
    """Largest coefficient magnitude seen when testing an operator."""

    max_abs: float
    argmax_point: tuple
    scale: float

    def __str__(self):
        return f"max {self.max_abs:.3e} at {self.argmax_point} (scale {self.scale:.3e})"


# ---------------------------------------------------------------------------
# the operator


class DiffOp:
    """Immutable graded differential operator."""

    __slots__ = ("coords", "rep", "terms")

    def __init__(self, coords, rep, terms):
        self.coords = tuple(coords)
        self.rep = rep
        clean = {}
        for alpha, f in terms.items():
            if isinstance(f, ZeroField):
                continue
            if f.shape != (rep.dim, rep.dim):
                raise OpError(
                    f"coefficient shape {f.shape} != rep dim {rep.dim}")
            if len(alpha) != len(self.coords):
                raise OpError("multi-index length mismatch")
            clean[tuple(alpha)] = f
        self.terms = clean

    # -- construction helpers ------------------------------------------

    @property
    def ncoords(self):
        return len(self.coords)

    @property
    def order(self):
        return max((sum(a) for a in self.terms), default=0)

    def is_structurally_zero(self):
        return not self.terms

    # -- linear structure ------------------------------------------------

    def __add__(self, other):
        _check_compat(self, other)
        acc = defaultdict(list)
        for alpha, f in self.terms.items():
            acc[alpha].append(f)
        for alpha, f in other.terms.items():
            acc[alpha].append(f)
        dim = self.rep.dim
        return DiffOp(self.coords, self.rep, {
            a: fsum(fs, (dim, dim), self.ncoords) for a, fs in acc.items()})

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, c):
        return DiffOp(self.coords, self.rep,
                      {a: fscale(c, f) for a, f in self.terms.items()})

    def __neg__(self):
        return (-1.0) * self

    def __matmul__(self, other):
        return compose(self, other)

    def __repr__(self):
        return f"<DiffOp {len(self.terms)} terms, order {self.order}>"


def _check_compat(A, B):
    if A.coords != B.coords:
        raise OpError(f"coordinate mismatch {A.coords} vs {B.coords}")
    if A.rep is not B.rep and (A.rep.dim != B.rep.dim):
        raise OpError("fermion representation mismatch")


def zero_op(coords, rep):
    return DiffOp(coords, rep, {})


def mult_op(coeff, coords, rep):
    """Multiplication operator by a matrix field (or scalar field)."""
    if coeff.is_scalar and rep.dim > 1:
        coeff = fdiag(coeff, rep.dim)
    return DiffOp(coords, rep, {(0,) * len(coords): coeff})


def partial_op(coords, rep, name_or_pos):
    """Plain d/dx_M."""
    pos = name_or_pos if isinstance(name_or_pos, int) else coords.index(name_or_pos)
    n = len(coords)
    return DiffOp(coords, rep, {unit_index(n, pos): fidentity(rep.dim, n)})


def momentum_op(coords, rep, name_or_pos):
    """p_M = -i d_M."""
    return (-1j) * partial_op(coords, rep, name_or_pos)


# ---------------------------------------------------------------------------
# composition and brackets


def compose(A, B):
    """Operator product A B (apply B first), Leibniz-redistributed."""
    _check_compat(A, B)
    n = A.ncoords
    dim = A.rep.dim
    acc = defaultdict(list)
    for alpha, F in A.terms.items():
        for beta, G in B.terms.items():
            if sum(alpha) + sum(beta) > MAX_ORDER:
                raise OpError(
                    f"composition order {sum(alpha) + sum(beta)} exceeds cap {MAX_ORDER}")
            for gamma in _sub_indices(alpha):
                w = _binom(alpha, gamma)
                dG = fderiv(G, _idx_sub(alpha, gamma))
                if isinstance(dG, ZeroField):
                    continue
                acc[_idx_add(gamma, beta)].append(fscale(w, fmatmul(F, dG)))
    terms = {a: fsum(fs, (dim, dim), n) for a, fs in acc.items()}
    return DiffOp(A.coords, A.rep, terms)


def commutator(A, B):
    return compose(A, B) - compose(B, A)


def anticommutator(A, B):
    return compose(A, B) + compose(B, A)


# ---------------------------------------------------------------------------
# adjoints


def naive_dagger(A):
    """Flat-measure Hermitian conjugate, restored to normal order.

    (F d^alpha)^+ = (-1)^|alpha| d^alpha o F^+, then Leibniz pushes the
    derivatives back to the right.
    """
    n = A.ncoords
    dim = A.rep.dim
    acc = defaultdict(list)
    for alpha, F in A.terms.items():
        sign = (-1.0) ** sum(alpha)
        Fd = fconj_t(F)
        for gamma in _sub_indices(alpha):
            w = _binom(alpha, gamma)
            dF = fderiv(Fd, _idx_sub(alpha, gamma))
            if isinstance(dF, ZeroField):
                continue
            acc[gamma].append(fscale(sign * w, dF))
    terms = {a: fsum(fs, (dim, dim), n) for a, fs in acc.items()}
    return DiffOp(A.coords, A.rep, terms)


def adjoint_with_measure(A, mu):
    """mu^-1 A^+ mu for a positive scalar measure density mu.

    Evaluation raises if the measure fails to be positive at a sample
    point (vanishing or complex measures have no adjoint reading)."""
    if not mu.is_scalar:
        raise OpError("measure density must be a scalar field")
    from .fields import PositiveGuardField
    if not isinstance(mu, PositiveGuardField):
        mu = PositiveGuardField(mu, "measure density")
    left = mult_op(fpow(mu, -1), A.coords, A.rep)
    right = mult_op(mu, A.coords, A.rep)
    return compose(left, compose(naive_dagger(A), right))


# ---------------------------------------------------------------------------
# similarity transformation


def similarity(A, R):
    """Exact conjugation e^R A e^-R.

    Implemented without truncating the Hadamard series: every d_M maps
    to d_M + e^R (d_M e^-R) and every coefficient F to e^R F e^-R, then
    the result is normal-ordered by composition.  R is a scalar field
    (shape (1,1)) or a Fock-matrix field matching the representation.
    """
    n = A.ncoords
    dim = A.rep.dim
    zero = (0,) * n
    if R.shape == (1, 1):
        def conj(F):
            return F
        cs = [fdiag(fscale(-1.0, fderiv(R, unit_index(n, m))), dim)
              for m in range(n)]
    elif R.shape == (dim, dim):
        exp_r = fexp(R)
        exp_mr = fexp(fscale(-1.0, R))

        def conj(F):
            return fmatmul(exp_r, F, exp_mr)

        cs = [fmatmul(exp_r, fderiv(exp_mr, unit_index(n, m)))
              for m in range(n)]
    else:
        raise OpError(f"similarity generator shape {R.shape} unsupported")

    d_ops = []
    for m in range(n):
        terms = {unit_index(n, m): fidentity(dim, n)}
        if not isinstance(cs[m], ZeroField):
            terms[zero] = cs[m]
        d_ops.append(DiffOp(A.coords, A.rep, terms))

    out = zero_op(A.coords, A.rep)
    for alpha, F in A.terms.items():
        term_op = mult_op(conj(F), A.coords, A.rep)
        for m, k in enumerate(alpha):
            for _ in range(k):
                term_op = compose(term_op, d_ops[m])
        out = out + term_op
    return out


# ---------------------------------------------------------------------------
# cyclic reduction


def reduce_cyclic(A, dropped, spec, fixed=None, tol=1e-9):
    """Hamiltonian reduction dropping cyclic coordinates.

    Every coefficient field must be independent of the dropped
    coordinates (the constraint p_dropped = 0 must commute with the
    operator); this is verified by sampling first derivatives in the
    dropped directions.  Terms containing dropped-direction derivatives
    act as zero on the constrained subspace and are removed; surviving
    coefficients are restricted onto the section where the dropped
    coordinates sit at ``fixed`` (default 0).
    """
    dropped_pos = sorted(A.coords.index(d) if isinstance(d, str) else d
                         for d in dropped)
    keep_pos = [i for i in range(A.ncoords) if i not in dropped_pos]
    if fixed is None:
        fixed = [0.0] * A.ncoords

    points = spec.points()
    tracker_scale = 0.0
    worst = 0.0
    for p in points:
        ctx = EvalContext(p)
        for alpha, F in A.terms.items():
            for dpos in dropped_pos:
                dF = fderiv(F, unit_index(A.ncoords, dpos))
                if isinstance(dF, ZeroField):
                    continue
                val = dF.eval_jet(ctx, 0)
                worst = max(worst, float(np.max(np.abs(val))))
        tracker_scale = max(tracker_scale, ctx.max_mag)
    if worst > tol * (1.0 + tracker_scale):
        raise ReductionError(
            f"operator depends on dropped coordinates (residual {worst:.3e})")

    new_coords = [A.coords[i] for i in keep_pos]
    new_terms = {}
    for alpha, F in A.terms.items():
        if any(alpha[d] for d in dropped_pos):
            continue
        new_alpha = tuple(alpha[i] for i in keep_pos)
        new_terms[new_alpha] = frestrict(F, keep_pos, fixed)
    return DiffOp(new_coords, A.rep, new_terms)


# ---------------------------------------------------------------------------
# probabilistic zero test


def rename_coords(A, names):
    """Same operator over relabelled coordinates."""
    if len(names) != A.ncoords:
        raise OpError("coordinate rename length mismatch")
    return DiffOp(tuple(names), A.rep, dict(A.terms))


def is_zero(A, spec, tol=1e-9):
    """Evaluate all coefficients at sampled points; pass iff the largest
    entry magnitude stays below tol * (1 + scale)."""
    if len(spec.box) != A.ncoords:
        raise OpError("sample box does not match operator coordinates")
    max_abs = 0.0
    argmax = None
    scale = 0.0
    points = spec.points()
    if A.is_structurally_zero():
        return True, Residual(0.0, points[0] if points else (), 0.0)
    for p in points:
        ctx = EvalContext(p)
        for alpha, F in A.terms.items():
            val = F.eval_jet(ctx, 0)
            m = float(np.max(np.abs(val)))
            if m > max_abs:
                max_abs = m
                argmax = p
        scale = max(scale, ctx.max_mag)
    return max_abs <= tol * (1.0 + scale), Residual(max_abs, argmax, scale)


def op_equal(A, B, spec, tol=1e-9):
    """Probabilistic equality of two operators."""
    return is_zero(A - B, spec, tol)


# ---------------------------------------------------------------------------
# pretty printing


def _fermion_basis(rep):
    """Complete monomial basis of the Fock endomorphism algebra.

    Complex kind: products psi_S psibar_T over index subsets (ordered
    ascending), 4^d operators.  Hermitian kind: products psi_S, 2^D
    operators.  Color factors are not decomposed.
    """
    if rep.color_dim != 1:
        return None
    names, mats = [], []
    idx = range(rep.n)
    if rep.kind == "complex":
        for s_set in _subsets(idx):
            for t_set in _subsets(idx):
                name = " ".join([f"psi{i + 1}" for i in s_set] +
                                [f"psibar{j + 1}" for j in t_set]) or "1"
                m = np.eye(rep.dim, dtype=np.complex128)
                for i in s_set:
                    m = m @ rep.psi[i]
                for j in t_set:
                    m = m @ rep.psibar[j]
                names.append(name)
                mats.append(m)
    else:
        for s_set in _subsets(idx):
            name = " ".join(f"psi{i + 1}" for i in s_set) or "1"
            m = np.eye(rep.dim, dtype=np.complex128)
            for i in s_set:
                m = m @ rep.psi[i]
            names.append(name)
            mats.append(m)
    basis = np.stack([m.ravel() for m in mats], axis=1)
    return names, basis


def _subsets(idx):
    idx = list(idx)
    for r in range(len(idx) + 1):
        yield from itertools.combinations(idx, r)


_BASIS_CACHE = {}


def describe_matrix(rep, matrix, tol=1e-10):
    """Write a constant Fock matrix as a fermion-monomial combination."""
    key = (rep.kind, rep.n, rep.color_dim)
    if key not in _BASIS_CACHE:
        _BASIS_CACHE[key] = _fermion_basis(rep)
    fb = _BASIS_CACHE[key]
    if fb is None:
        return f"<matrix norm {np.abs(matrix).max():.3g}>"
    names, basis = fb
    coeffs, *_ = np.linalg.lstsq(basis, np.asarray(matrix).ravel(), rcond=None)
    parts = []
    for c, name in zip(coeffs, names):
        if abs(c) < tol:
            continue
        parts.append(f"({_fmt_c(c)}){'' if name == '1' else ' ' + name}")
    return " + ".join(parts) if parts else "0"


def _fmt_c(z):
    z = complex(z)
    if abs(z.imag) < 1e-12:
        return f"{z.real:g}"
    if abs(z.real) < 1e-12:
        return f"{z.imag:g}i"
    return f"{z.real:g}{z.imag:+g}i"


def pretty(A, describe_constants=True):
    """Human-readable normal-ordered text of the operator."""
    from .fields import ConstField

    if not A.terms:
        return "0"
    lines = []
    for alpha in sorted(A.terms, key=lambda a: (sum(a), a)):
        F = A.terms[alpha]
        dtxt = " ".join(f"d_{name}" * 1 for name, k in zip(A.coords, alpha)
                        for _ in range(k))
        if isinstance(F, ConstField) and describe_constants:
            body = describe_matrix(A.rep, F.matrix)
        else:
            body = F.describe()
        lines.append(f"[{body}]" + (f" {dtxt}" if dtxt else ""))
    return "\n+ ".join(lines)
