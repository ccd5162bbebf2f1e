"""Dense complex linear algebra and Laurent-polynomial helpers.

Every operator in the package is an :class:`OperatorMatrix`: a square complex
matrix together with the list of tensor-factor dimensions it acts on.  Factor
0 is always the (possibly fused) auxiliary space, followed by the quantum
sites in order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

ILL_CONDITIONED = 1e8


class EigenDecompositionError(RuntimeError):
    pass


class LaurentFitError(ValueError):
    """Raised when the sample set cannot determine the requested coefficients."""


class LaurentShapeError(LaurentFitError):
    """Held-out samples disagree with the declared Laurent shape."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class OperatorMatrix:
    """Square complex matrix acting on a tensor product of factors ``dims``."""

    __slots__ = ("data", "dims")
    __array_priority__ = 100

    def __init__(self, data, dims: Sequence[int] | None = None):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"operator must be square, got shape {data.shape}")
        if dims is None:
            dims = (data.shape[0],)
        dims = tuple(int(d) for d in dims)
        if math.prod(dims) != data.shape[0]:
            raise ValueError(f"space tag {dims} does not match size {data.shape[0]}")
        if not np.all(np.isfinite(data)):
            raise FloatingPointError("operator has non-finite entries")
        self.data = data
        self.dims = dims

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def space_tag(self) -> tuple[int, ...]:
        return self.dims

    @property
    def shape(self):
        return self.data.shape

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self):
        return f"OperatorMatrix(dims={self.dims})"

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, OperatorMatrix):
            if other.dims != self.dims:
                raise ValueError(f"space tags differ: {self.dims} vs {other.dims}")
            return other.data
        return np.asarray(other)

    def __matmul__(self, other):
        return OperatorMatrix(self.data @ self._coerce(other), self.dims)

    def __rmatmul__(self, other):
        return OperatorMatrix(np.asarray(other) @ self.data, self.dims)

    def __add__(self, other):
        return OperatorMatrix(self.data + self._coerce(other), self.dims)

    __radd__ = __add__

    def __sub__(self, other):
        return OperatorMatrix(self.data - self._coerce(other), self.dims)

    def __rsub__(self, other):
        return OperatorMatrix(self._coerce(other) - self.data, self.dims)

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorMatrix):
            raise TypeError("use @ for operator products")
        return OperatorMatrix(self.data * scalar, self.dims)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return OperatorMatrix(self.data / scalar, self.dims)

    def __neg__(self):
        return OperatorMatrix(-self.data, self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def block(self, i: int, j: int) -> np.ndarray:
        """Block (i, j) with respect to factor 0 (the auxiliary space)."""
        a = self.dims[0]
        rest = self.rows // a
        return self.data.reshape(a, rest, a, rest)[i, :, j, :]


def as_operator(x, dims=None) -> OperatorMatrix:
    if isinstance(x, OperatorMatrix):
        return x
    return OperatorMatrix(x, dims)


def identity(dims: Sequence[int]) -> OperatorMatrix:
    return OperatorMatrix(np.eye(math.prod(dims), dtype=complex), dims)


def kron(a, b) -> OperatorMatrix:
    a, b = as_operator(a), as_operator(b)
    return OperatorMatrix(np.kron(a.data, b.data), a.dims + b.dims)


def kron_all(ops: Iterable) -> OperatorMatrix:
    return as_operator(reduce(kron, ops))


def permute_factors(op: OperatorMatrix, perm: Sequence[int]) -> OperatorMatrix:
    """Reorder tensor factors so that new factor ``i`` is old factor ``perm[i]``."""
    n = len(op.dims)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} factors")
    t = op.data.reshape(op.dims + op.dims)
    t = t.transpose(list(perm) + [n + i for i in perm])
    dims = tuple(op.dims[i] for i in perm)
    return OperatorMatrix(t.reshape(op.rows, op.cols), dims)


def embed(op, positions: Sequence[int], dims: Sequence[int]) -> OperatorMatrix:
    """Place ``op`` (acting on factors ``positions`` in that order) into ``dims``."""
    op = as_operator(op, [dims[i] for i in positions])
    if len(op.dims) != len(positions):
        op = OperatorMatrix(op.data, [dims[i] for i in positions])
    rest = [i for i in range(len(dims)) if i not in positions]
    full = kron(op, identity([dims[i] for i in rest])) if rest else op
    labels = list(positions) + rest
    return permute_factors(full, [labels.index(i) for i in range(len(dims))])


def partial_trace(op: OperatorMatrix, factors: Sequence[int]) -> OperatorMatrix:
    """Trace out the listed tensor factors."""
    keep = [i for i in range(len(op.dims)) if i not in factors]
    moved = permute_factors(op, list(factors) + keep)
    d_out = math.prod(op.dims[i] for i in factors)
    d_in = op.rows // d_out
    t = moved.data.reshape(d_out, d_in, d_out, d_in)
    return OperatorMatrix(np.einsum("iaib->ab", t), [op.dims[i] for i in keep] or [1])


def rel_residual(a, b) -> float:
    """Frobenius distance relative to the larger of the two norms."""
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - b) / scale)


def scalar_part(op) -> tuple[complex, float]:
    """Best scalar c with op ≈ c·id, and the relative deviation from c·id."""
    m = np.asarray(op)
    c = np.trace(m) / m.shape[0]
    return complex(c), rel_residual(m, c * np.eye(m.shape[0]))


@dataclass(frozen=True)
class EigResult:
    values: np.ndarray
    vectors: OperatorMatrix
    cond: float

    @property
    def ill_conditioned(self) -> bool:
        return not np.isfinite(self.cond) or self.cond > ILL_CONDITIONED

    def backward_error(self, a) -> float:
        a = np.asarray(a)
        v = self.vectors.data
        return float(np.linalg.norm(a @ v - v * self.values) / np.linalg.norm(a))


def eig(a) -> EigResult:
    a = as_operator(a)
    try:
        w, v = np.linalg.eig(a.data)
    except np.linalg.LinAlgError as exc:
        raise EigenDecompositionError(str(exc)) from exc
    v = v / np.linalg.norm(v, axis=0)
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(v))
    return EigResult(w, OperatorMatrix(v, a.dims), cond)


@dataclass(frozen=True, eq=False)
class LaurentCurve:
    """Finite Laurent polynomial sum_k coeffs[k - min_deg] * exp(step*k*u)."""

    step: int
    min_deg: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def max_deg(self) -> int:
        return self.min_deg + len(self.coeffs) - 1

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(self.min_deg, self.max_deg + 1)

    def coeff(self, k: int) -> complex:
        if self.min_deg <= k <= self.max_deg:
            return complex(self.coeffs[k - self.min_deg])
        return 0j

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        powers = np.exp(self.step * np.multiply.outer(u, self.degrees))
        return powers @ self.coeffs

    def with_step(self, step: int) -> "LaurentCurve":
        """Same function written with a finer step (must divide the current one)."""
        if self.step % step:
            raise ValueError(f"step {step} does not divide {self.step}")
        r = self.step // step
        out = np.zeros(r * (len(self.coeffs) - 1) + 1, dtype=complex)
        out[::r] = self.coeffs
        return LaurentCurve(step, self.min_deg * r, out)

    def isclose(self, other: "LaurentCurve", rtol: float = 1e-10) -> bool:
        g = math.gcd(self.step, other.step)
        a, b = self.with_step(g), other.with_step(g)
        lo, hi = min(a.min_deg, b.min_deg), max(a.max_deg, b.max_deg)
        ca = np.array([a.coeff(k) for k in range(lo, hi + 1)])
        cb = np.array([b.coeff(k) for k in range(lo, hi + 1)])
        scale = max(np.abs(ca).max(), np.abs(cb).max())
        return bool(scale == 0 or np.abs(ca - cb).max() <= rtol * scale)

    __eq__ = isclose
    __hash__ = None


def sample_points(n: int, step: int, rng: np.random.Generator, xmax: float = 0.2) -> np.ndarray:
    """Spectral points u = x + iy, y spread over one period of exp(step*u)."""
    half = np.pi / step
    y = np.linspace(-half, half, n, endpoint=False) + rng.uniform(0, 2 * half / n, n)
    x = rng.uniform(-xmax, xmax, n)
    return x + 1j * y


def _vandermonde(us, step, degrees):
    return np.exp(step * np.multiply.outer(np.asarray(us, dtype=complex), degrees))


def fit_laurent_coeffs(us, values, step: int, min_deg: int, max_deg: int) -> np.ndarray:
    """Least-squares Laurent coefficients; ``values`` may carry trailing axes."""
    degrees = np.arange(min_deg, max_deg + 1)
    us = np.asarray(us, dtype=complex)
    values = np.asarray(values, dtype=complex)
    if len(us) < len(degrees):
        raise LaurentFitError(f"need at least {len(degrees)} samples, got {len(us)}")
    V = _vandermonde(us, step, degrees)
    scale = np.linalg.norm(V, axis=0)
    flat = values.reshape(len(us), -1)
    sol, _, rank, _ = np.linalg.lstsq(V / scale, flat, rcond=None)
    if rank < len(degrees):
        raise LaurentFitError(f"rank-deficient sample set (rank {rank} < {len(degrees)})")
    return (sol / scale[:, None]).reshape((len(degrees),) + values.shape[1:])


def eval_laurent_coeffs(coeffs, us, step: int, min_deg: int) -> np.ndarray:
    degrees = np.arange(min_deg, min_deg + len(coeffs))
    V = _vandermonde(us, step, degrees)
    c = np.asarray(coeffs)
    return (V @ c.reshape(len(degrees), -1)).reshape((len(us),) + c.shape[1:])


def laurent_fit(samples, step: int, min_deg: int, max_deg: int,
                holdout: int = 1, tol: float = 1e-9) -> tuple[LaurentCurve, float]:
    """Fit scalar samples [(u, value), ...] to a Laurent curve in exp(step*u).

    The last ``holdout`` samples are not used in the solve; the relative error
    there is returned and must stay below ``tol``.
    """
    us = np.array([s[0] for s in samples], dtype=complex)
    vals = np.array([s[1] for s in samples], dtype=complex)
    n_fit = len(us) - holdout
    coeffs = fit_laurent_coeffs(us[:n_fit], vals[:n_fit], step, min_deg, max_deg)
    curve = LaurentCurve(step, min_deg, coeffs)
    res = held_out_residual(curve, us, vals)
    if res > tol:
        raise LaurentShapeError(
            f"samples are not a step-{step} Laurent polynomial of degrees "
            f"{min_deg}..{max_deg} (held-out residual {res:.2e})", res)
    return curve, res


def held_out_residual(curve: LaurentCurve, us, vals) -> float:
    pred = curve(us)
    vals = np.asarray(vals)
    scale = max(np.abs(vals).max(), 1e-300)
    return float(np.abs(pred - vals).max() / scale)


def interpolate_laurent(f, step: int, min_deg: int, max_deg: int, x: float = 0.1) -> np.ndarray:
    """Exact Laurent coefficients of f from equispaced samples over one period.

    Valid when f is a Laurent polynomial in exp(step*u) within the stated
    degrees; the samples sit on the line Re u = x.
    """
    degrees = np.arange(min_deg, max_deg + 1)
    n = len(degrees)
    us = x + 2j * np.pi * np.arange(n) / (step * n)
    vals = np.array([f(u) for u in us])
    return np.array([np.mean(vals * np.exp(-step * k * us)) for k in degrees])


def poly_roots(coeffs) -> np.ndarray:
    """Roots of sum_k coeffs[k] w**k (ascending order, leading term last)."""
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or len(c) < 2:
        raise ValueError("polynomial must have degree >= 1")
    if c[-1] == 0:
        raise ValueError("leading coefficient is zero")
    return np.polynomial.polynomial.polyroots(c)


def poly_from_roots(roots, lead: complex = 1.0) -> np.ndarray:
    return lead * np.polynomial.polynomial.polyfromroots(roots)
