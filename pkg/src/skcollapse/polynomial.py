"""Tensor-valued polynomials in several complex variables.

A :class:`Polynomial` stores a list of monomial exponents together with one
coefficient array per monomial, so scalar prepotentials, period-matrix
germs and coordinate frames share one evaluator and one exact derivative.
"""

import numpy as np


class Polynomial:
    """Polynomial map ``C^nvars -> C^shape``.

    Parameters
    ----------
    exponents : array_like of int, shape (T, nvars)
    coefficients : array_like of complex, shape (T, *shape)
    """

    def __init__(self, exponents, coefficients, nvars=None):
        exponents = np.asarray(exponents, dtype=np.int64)
        coefficients = np.asarray(coefficients, dtype=complex)
        if exponents.ndim != 2:
            if exponents.size == 0 and nvars is not None:
                exponents = exponents.reshape(0, nvars)
            else:
                raise ValueError("exponents must be a 2-d array")
        if nvars is None:
            nvars = exponents.shape[1]
        if exponents.shape[1] != nvars:
            raise ValueError("exponent width does not match nvars")
        if coefficients.shape[:1] != exponents.shape[:1]:
            raise ValueError("one coefficient per monomial is required")
        if np.any(exponents < 0):
            raise ValueError("negative exponents are not polynomial")
        self.nvars = int(nvars)
        self.shape = coefficients.shape[1:]
        self.exponents, self.coefficients = _merge(exponents, coefficients, self.shape)

    @classmethod
    def from_terms(cls, nvars, terms, shape=()):
        """Build from ``{multi-index: coefficient}``."""
        if not terms:
            return cls.zero(nvars, shape)
        exps = [tuple(int(e) for e in k) for k in terms]
        coefs = [np.broadcast_to(np.asarray(v, dtype=complex), shape) for v in terms.values()]
        return cls(exps, np.array(coefs), nvars)

    @classmethod
    def constant(cls, nvars, value):
        value = np.asarray(value, dtype=complex)
        return cls(np.zeros((1, nvars), dtype=np.int64), value[None], nvars)

    @classmethod
    def zero(cls, nvars, shape=()):
        return cls(np.zeros((0, nvars), dtype=np.int64), np.zeros((0,) + tuple(shape)), nvars)

    @classmethod
    def variables(cls, nvars):
        """The identity map ``t -> t`` as a vector-valued polynomial."""
        return cls(np.eye(nvars, dtype=np.int64), np.eye(nvars), nvars)

    @classmethod
    def stack(cls, polys):
        """Stack same-shape polynomials along a new leading value axis."""
        polys = list(polys)
        nvars = polys[0].nvars
        shape = polys[0].shape
        exps, coefs = [], []
        for k, p in enumerate(polys):
            if p.nvars != nvars or p.shape != shape:
                raise ValueError("stacked polynomials must agree in nvars and shape")
            block = np.zeros((len(p.exponents), len(polys)) + shape, dtype=complex)
            block[:, k] = p.coefficients
            exps.append(p.exponents)
            coefs.append(block)
        if not exps:
            raise ValueError("nothing to stack")
        return cls(np.concatenate(exps), np.concatenate(coefs), nvars)

    @property
    def degree(self):
        if len(self.exponents) == 0:
            return 0
        return int(self.exponents.sum(axis=1).max())

    def __call__(self, point):
        point = np.asarray(point, dtype=complex)
        if point.shape[-1] != self.nvars:
            raise ValueError(f"expected points with {self.nvars} coordinates")
        if len(self.exponents) == 0:
            return np.zeros(point.shape[:-1] + self.shape, dtype=complex)
        mono = np.prod(point[..., None, :] ** self.exponents, axis=-1)
        return np.tensordot(mono, self.coefficients, axes=([-1], [0]))

    def derivative(self, var):
        exps = self.exponents.copy()
        powers = exps[:, var]
        keep = powers > 0
        exps = exps[keep]
        coefs = self.coefficients[keep] * powers[keep].reshape((-1,) + (1,) * len(self.shape))
        exps[:, var] -= 1
        return Polynomial(exps, coefs, self.nvars)

    def jacobian(self):
        """Derivatives appended as a trailing axis of length ``nvars``."""
        parts = [self.derivative(v) for v in range(self.nvars)]
        stacked = Polynomial.stack(parts)
        coefs = np.moveaxis(stacked.coefficients, 1, -1)
        return Polynomial(stacked.exponents, coefs, self.nvars)

    def __add__(self, other):
        if self.nvars != other.nvars or self.shape != other.shape:
            raise ValueError("cannot add polynomials of different type")
        return Polynomial(np.concatenate([self.exponents, other.exponents]),
                          np.concatenate([self.coefficients, other.coefficients]), self.nvars)

    def is_symmetric(self):
        """Exact symmetry test for matrix-valued polynomials."""
        if len(self.shape) != 2 or self.shape[0] != self.shape[1]:
            return False
        return bool(np.array_equal(self.coefficients, np.swapaxes(self.coefficients, 1, 2)))

    def to_terms(self):
        return {tuple(int(x) for x in e): c for e, c in zip(self.exponents, self.coefficients)}

    def __repr__(self):
        return f"Polynomial(nvars={self.nvars}, shape={self.shape}, terms={len(self.exponents)})"


def _merge(exponents, coefficients, shape):
    """Combine repeated monomials and drop zero coefficients."""
    if len(exponents) == 0:
        return exponents.reshape(0, exponents.shape[1]), coefficients.reshape((0,) + shape)
    uniq, inverse = np.unique(exponents, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    merged = np.zeros((len(uniq),) + shape, dtype=complex)
    np.add.at(merged, inverse, coefficients)
    flat = merged.reshape(len(uniq), -1)
    nonzero = np.any(flat != 0, axis=1)
    return uniq[nonzero], merged[nonzero]
