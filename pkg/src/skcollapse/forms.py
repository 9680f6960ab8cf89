"""Exterior-algebra helpers for 2-forms stored as antisymmetric matrices.

A 2-form ``alpha`` on ``R^m`` is stored as the matrix ``M`` with
``alpha(u, v) = u^T M v``, i.e. ``alpha = sum_{a<b} M_ab dx_a ^ dx_b``.
Complex forms use complex matrices.
"""

import itertools

import numpy as np


def wedge_covectors(alpha, beta):
    """Matrix of ``alpha ^ beta`` for row covectors (complex allowed)."""
    alpha = np.asarray(alpha)
    beta = np.asarray(beta)
    return np.outer(alpha, beta) - np.outer(beta, alpha)


def hermitian_to_form(h, frame):
    """Real matrix of ``i sum h_ab c_a ^ conj(c_b)`` for complex covectors ``c = frame``."""
    c = np.asarray(frame)
    m = 1j * (c.T @ h @ np.conj(c) - np.conj(c).T @ h.T @ c)
    return m.real


def pfaffian(a):
    """Pfaffian of an antisymmetric matrix by pivoted skew elimination."""
    a = np.array(a, dtype=complex)
    m = a.shape[0]
    if m % 2:
        return 0.0
    pf = 1.0 + 0j
    for k in range(0, m - 1, 2):
        piv = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if piv != k + 1:
            a[[k + 1, piv], :] = a[[piv, k + 1], :]
            a[:, [k + 1, piv]] = a[:, [piv, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0.0
        pf *= a[k, k + 1]
        if k + 2 < m:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return pf


def top_wedge(forms):
    """Coefficient of ``dx_1 ^ ... ^ dx_m`` in ``forms[0] ^ ... ^ forms[k-1]``, ``m = 2k``.

    Uses polarization of the Pfaffian: the multilinear part of
    ``Pf(sum s_i alpha_i)`` is the wedge product.
    """
    forms = [np.asarray(f) for f in forms]
    k = len(forms)
    if forms[0].shape[0] != 2 * k:
        raise ValueError("need exactly m/2 two-forms for a top-degree product")
    total = 0j
    for size in range(1, k + 1):
        sign = (-1) ** (k - size)
        for subset in itertools.combinations(range(k), size):
            total += sign * pfaffian(sum(forms[i] for i in subset))
    return total


def is_antisymmetric(m, tol=0.0):
    return bool(np.max(np.abs(m + m.T)) <= tol)
