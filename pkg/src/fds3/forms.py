"""Differential forms on a 3-dimensional coordinate box.

Forms are lazy expression trees evaluated on arrays of points of shape
``(N, 3)``.  The coordinates are ``(u, v, r)``: longitude, meridian and
radius on a tubular neighbourhood.  A k-form evaluates to an array of shape
``(N, C(3, k))`` of complex coefficients against the basis ``dx_I`` with
``I`` increasing, in the order given by :data:`BASIS`.

Each node knows its exterior derivative, in closed form where possible.
"""
from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np

DIM = 3
BASIS: dict[int, list[tuple[int, ...]]] = {
    k: list(itertools.combinations(range(DIM), k)) for k in range(DIM + 1)
}
_INDEX = {k: {I: n for n, I in enumerate(BASIS[k])} for k in BASIS}


def ncomp(k: int) -> int:
    return len(BASIS[k])


def _perm_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _wedge_table(k: int, l: int) -> list[tuple[int, int, int, int]]:
    # (index in a, index in b, index in result, sign)
    out = []
    for ia, I in enumerate(BASIS[k]):
        for ib, J in enumerate(BASIS[l]):
            if set(I) & set(J):
                continue
            K = tuple(sorted(I + J))
            out.append((ia, ib, _INDEX[k + l][K], _perm_sign(I + J)))
    return out


WEDGE_TABLES = {
    (k, l): _wedge_table(k, l) for k in range(DIM + 1) for l in range(DIM + 1) if k + l <= DIM
}


def as_points(pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != DIM:
        raise ValueError(f"points must have {DIM} coordinates, got shape {pts.shape}")
    return pts


class Form:
    """Base class for lazily evaluated forms."""

    degree: int = 0

    def evaluate(self, pts) -> np.ndarray:
        raise NotImplementedError

    def d(self) -> "Form":
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False

    def __add__(self, other: "Form") -> "Form":
        return add(self, other)

    def __sub__(self, other: "Form") -> "Form":
        return add(self, scale(-1, other))

    def __neg__(self) -> "Form":
        return scale(-1, self)

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)


class Zero(Form):
    def __init__(self, degree: int):
        self.degree = degree

    def evaluate(self, pts) -> np.ndarray:
        pts = as_points(pts)
        return np.zeros((len(pts), ncomp(self.degree)), dtype=complex)

    def d(self) -> Form:
        return Zero(self.degree + 1) if self.degree < DIM else self

    @property
    def is_zero(self) -> bool:
        return True

    def __repr__(self) -> str:
        return f"Zero({self.degree})"


class Constant(Form):
    degree = 0

    def __init__(self, value: complex):
        self.value = complex(value)

    def evaluate(self, pts) -> np.ndarray:
        pts = as_points(pts)
        return np.full((len(pts), 1), self.value, dtype=complex)

    def d(self) -> Form:
        return Zero(1)

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def __repr__(self) -> str:
        return f"Constant({self.value!r})"


class Function0(Form):
    """A 0-form with a closed-form gradient.

    ``value(X)`` returns shape ``(N,)`` and ``grad(X)`` shape ``(N, 3)``.
    """

    degree = 0

    def __init__(self, value: Callable, grad: Callable, name: str = "function"):
        self._value = value
        self._grad = grad
        self.name = name

    def evaluate(self, pts) -> np.ndarray:
        pts = as_points(pts)
        return np.asarray(self._value(pts), dtype=complex).reshape(len(pts), 1)

    def gradient(self, pts) -> np.ndarray:
        pts = as_points(pts)
        return np.asarray(self._grad(pts), dtype=complex).reshape(len(pts), DIM)

    def d(self) -> Form:
        return Gradient(self)

    def __repr__(self) -> str:
        return f"Function0({self.name})"


class Gradient(Form):
    """``d`` of a :class:`Function0`; closed by construction."""

    degree = 1

    def __init__(self, fn: Function0):
        self.fn = fn

    def evaluate(self, pts) -> np.ndarray:
        return self.fn.gradient(pts)

    def d(self) -> Form:
        return Zero(2)

    def __repr__(self) -> str:
        return f"d({self.fn!r})"


class CoefficientForm(Form):
    """A k-form given by a coefficient callable returning ``(N, C(3,k))``.

    ``derivative`` is an optional callable giving the coefficients of ``d``
    of this form.  Without it, ``closed=True`` makes ``d`` zero and otherwise
    central finite differences are used.
    """

    def __init__(
        self,
        degree: int,
        coeffs: Callable,
        derivative: Callable | None = None,
        closed: bool = False,
        name: str = "form",
    ):
        self.degree = degree
        self._coeffs = coeffs
        self._derivative = derivative
        self.closed = closed
        self.name = name

    def evaluate(self, pts) -> np.ndarray:
        pts = as_points(pts)
        return np.asarray(self._coeffs(pts), dtype=complex).reshape(len(pts), ncomp(self.degree))

    def d(self) -> Form:
        if self.degree == DIM or self.closed:
            return Zero(min(self.degree + 1, DIM))
        if self._derivative is not None:
            return CoefficientForm(self.degree + 1, self._derivative, name=f"d{self.name}")
        return FDDerivative(self)

    def __repr__(self) -> str:
        return f"CoefficientForm({self.degree}, {self.name})"


class FDDerivative(Form):
    """Exterior derivative by central differences with step ``h``."""

    def __init__(self, form: Form, h: float = 1e-5):
        if form.degree >= DIM:
            raise ValueError("cannot differentiate a top-degree form")
        self.form = form
        self.degree = form.degree + 1
        self.h = h

    def evaluate(self, pts) -> np.ndarray:
        pts = as_points(pts)
        k = self.form.degree
        partials = []
        for j in range(DIM):
            step = np.zeros(DIM)
            step[j] = self.h
            partials.append((self.form.evaluate(pts + step) - self.form.evaluate(pts - step)) / (2 * self.h))
        out = np.zeros((len(pts), ncomp(k + 1)), dtype=complex)
        for n, K in enumerate(BASIS[k + 1]):
            for m, j in enumerate(K):
                J = K[:m] + K[m + 1:]
                out[:, n] += (-1) ** m * partials[j][:, _INDEX[k][J]]
        return out

    def d(self) -> Form:
        return FDDerivative(self, self.h)


class Scaled(Form):
    def __init__(self, factor: complex, form: Form):
        self.factor = complex(factor)
        self.form = form
        self.degree = form.degree

    def evaluate(self, pts) -> np.ndarray:
        return self.factor * self.form.evaluate(pts)

    def d(self) -> Form:
        return scale(self.factor, self.form.d())

    def __repr__(self) -> str:
        return f"{self.factor!r}*{self.form!r}"


class Sum(Form):
    def __init__(self, terms: Sequence[Form]):
        degrees = {t.degree for t in terms}
        if len(degrees) != 1:
            raise ValueError(f"cannot add forms of degrees {sorted(degrees)}")
        self.terms = list(terms)
        self.degree = degrees.pop()

    def evaluate(self, pts) -> np.ndarray:
        out = self.terms[0].evaluate(pts)
        for t in self.terms[1:]:
            out = out + t.evaluate(pts)
        return out

    def d(self) -> Form:
        return add(*[t.d() for t in self.terms])

    def __repr__(self) -> str:
        return " + ".join(repr(t) for t in self.terms)


class Wedge(Form):
    def __init__(self, a: Form, b: Form):
        if a.degree + b.degree > DIM:
            raise ValueError("wedge degree exceeds dimension")
        self.a = a
        self.b = b
        self.degree = a.degree + b.degree

    def evaluate(self, pts) -> np.ndarray:
        A = self.a.evaluate(pts)
        B = self.b.evaluate(pts)
        out = np.zeros((A.shape[0], ncomp(self.degree)), dtype=complex)
        for ia, ib, ic, sign in WEDGE_TABLES[(self.a.degree, self.b.degree)]:
            out[:, ic] += sign * A[:, ia] * B[:, ib]
        return out

    def d(self) -> Form:
        sign = -1 if self.a.degree % 2 else 1
        return add(wedge(self.a.d(), self.b), scale(sign, wedge(self.a, self.b.d())))

    def __repr__(self) -> str:
        return f"({self.a!r} ^ {self.b!r})"


class Shifted(Form):
    """Evaluate ``form`` at ``transform(pts)`` where the transform is a translation.

    Used to place a form defined on the universal cover into one chart.
    """

    def __init__(self, form: Form, transform: Callable, label: object = None):
        self.form = form
        self.transform = transform
        self.degree = form.degree
        self.label = label

    def evaluate(self, pts) -> np.ndarray:
        return self.form.evaluate(self.transform(as_points(pts)))

    def d(self) -> Form:
        inner = self.form.d()
        if inner.is_zero:
            return inner
        return Shifted(inner, self.transform, self.label)

    @property
    def is_zero(self) -> bool:
        return self.form.is_zero

    def __repr__(self) -> str:
        return f"{self.form!r}@{self.label}"


def scale(factor: complex, form: Form) -> Form:
    factor = complex(factor)
    if factor == 0 or form.is_zero:
        return Zero(form.degree)
    if factor == 1:
        return form
    if isinstance(form, Scaled):
        return scale(factor * form.factor, form.form)
    return Scaled(factor, form)


def add(*forms: Form) -> Form:
    if not forms:
        raise ValueError("add() needs at least one form")
    degree = forms[0].degree
    terms: list[Form] = []
    for f in forms:
        if f.degree != degree:
            raise ValueError(f"cannot add forms of degrees {degree} and {f.degree}")
        if f.is_zero:
            continue
        terms.extend(f.terms if isinstance(f, Sum) else [f])
    if not terms:
        return Zero(degree)
    if len(terms) == 1:
        return terms[0]
    return Sum(terms)


def wedge(a: Form, b: Form) -> Form:
    if a.degree + b.degree > DIM:
        raise ValueError("wedge degree exceeds dimension")
    if a.is_zero or b.is_zero:
        return Zero(a.degree + b.degree)
    return Wedge(a, b)


def constant_one_form(coeffs: Sequence[complex]) -> CoefficientForm:
    """The constant 1-form ``c_u du + c_v dv + c_r dr``."""
    c = np.asarray(coeffs, dtype=complex)
    return CoefficientForm(1, lambda X: np.broadcast_to(c, (len(X), DIM)), closed=True, name=f"const{tuple(c)}")


def area_form(i: int = 0, j: int = 1) -> CoefficientForm:
    """``dx_i ^ dx_j`` with ``i < j``."""
    k = _INDEX[2][(i, j)]

    def coeffs(X):
        out = np.zeros((len(X), 3), dtype=complex)
        out[:, k] = 1.0
        return out

    return CoefficientForm(2, coeffs, closed=True, name=f"dx{i}^dx{j}")


def component(values: np.ndarray, degree: int, index: tuple[int, ...]) -> np.ndarray:
    """Coefficient of ``dx_index`` (sorted) in an evaluated form."""
    idx = tuple(index)
    sign = _perm_sign(idx)
    return sign * values[:, _INDEX[degree][tuple(sorted(idx))]]
