# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled training kernels: BLAS matmuls plus fused elementwise loops.

Semantics mirror assort.kernels.numpy_backend; see that module for the
reference formulas.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, log1p, sqrt, pow
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

CLAMP = 1e-12
cdef double _CLAMP = 1e-12


cdef inline double _sigmoid(double z) nogil:
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef void _x_w1t(double[:, ::1] X, double[:, ::1] W1, double[:, ::1] out) nogil:
    # out (n,H) = X (n,D) @ W1.T; computed as col-major out^T = W1 @ X^T
    cdef int n = X.shape[0], d = X.shape[1], h = W1.shape[0]
    cdef double one = 1.0, zero = 0.0
    dgemm("T", "N", &h, &n, &d, &one, &W1[0, 0], &d, &X[0, 0], &d, &zero, &out[0, 0], &h)


cdef void _at_b(double[:, ::1] A, double[:, ::1] B, double[:, ::1] out) nogil:
    # out (H,D) = A.T (H,n) @ B (n,D) with A (n,H); col-major out^T = B^T @ A
    cdef int n = A.shape[0], h = A.shape[1], d = B.shape[1]
    cdef double one = 1.0, zero = 0.0
    dgemm("N", "T", &d, &h, &n, &one, &B[0, 0], &d, &A[0, 0], &h, &zero, &out[0, 0], &d)


def forward(double[:, ::1] X, double[:, ::1] W1, double[::1] b1, double[::1] W2, double b2):
    """Batch forward pass. Returns (lam, hidden) with shapes (n,), (n, H)."""
    cdef int n = X.shape[0], h = W1.shape[0]
    hidden_arr = np.empty((n, h))
    lam_arr = np.empty(n)
    cdef double[:, ::1] hidden = hidden_arr
    cdef double[::1] lam = lam_arr
    cdef Py_ssize_t i, j
    cdef double z
    with nogil:
        _x_w1t(X, W1, hidden)
        for i in range(n):
            z = b2
            for j in range(h):
                hidden[i, j] += b1[j]
                if hidden[i, j] < 0.0:
                    hidden[i, j] = 0.0
                z += hidden[i, j] * W2[j]
            lam[i] = _sigmoid(z)
    return lam_arr, hidden_arr


def batch_gradients(double[:, ::1] X, double[::1] y, double[::1] sample_weight,
                    double[:, ::1] W1, double[::1] b1, double[::1] W2, double b2):
    """Fused forward/backward. Returns (loss, gW1, gb1, gW2, gb2)."""
    cdef int n = X.shape[0], d = X.shape[1], h = W1.shape[0]
    hidden_arr = np.empty((n, h))
    dh_arr = np.empty((n, h))
    gW1_arr = np.empty((h, d))
    gb1_arr = np.zeros(h)
    gW2_arr = np.zeros(h)
    cdef double[:, ::1] hidden = hidden_arr
    cdef double[:, ::1] dh = dh_arr
    cdef double[:, ::1] gW1 = gW1_arr
    cdef double[::1] gb1 = gb1_arr
    cdef double[::1] gW2 = gW2_arr
    cdef double gb2 = 0.0, loss = 0.0
    cdef Py_ssize_t i, j
    cdef double z, lam, p, delta, dval
    with nogil:
        _x_w1t(X, W1, hidden)
        for i in range(n):
            z = b2
            for j in range(h):
                hidden[i, j] += b1[j]
                if hidden[i, j] < 0.0:
                    hidden[i, j] = 0.0
                z += hidden[i, j] * W2[j]
            lam = _sigmoid(z)

            p = lam
            if p < _CLAMP:
                p = _CLAMP
            elif p > 1.0 - _CLAMP:
                p = 1.0 - _CLAMP
            loss += sample_weight[i] * -(y[i] * log(p) + (1.0 - y[i]) * log1p(-p))

            delta = sample_weight[i] * (lam - y[i]) / n
            gb2 += delta
            for j in range(h):
                gW2[j] += delta * hidden[i, j]
                if hidden[i, j] > 0.0:
                    dval = delta * W2[j]
                    dh[i, j] = dval
                    gb1[j] += dval
                else:
                    dh[i, j] = 0.0
        _at_b(dh, X, gW1)
    return loss / n, gW1_arr, gb1_arr, gW2_arr, gb2


def adam_step(param, grad, m, v, long t, double lr, double beta1, double beta2, double eps):
    """In-place Adam update with bias correction; t is the 1-based step count."""
    cdef double[::1] p = np.ravel(param)
    cdef double[::1] g = np.ravel(grad)
    cdef double[::1] mm = np.ravel(m)
    cdef double[::1] vv = np.ravel(v)
    cdef Py_ssize_t i, size = p.shape[0]
    cdef double c1 = 1.0 - pow(beta1, t), c2 = 1.0 - pow(beta2, t)
    with nogil:
        for i in range(size):
            mm[i] = beta1 * mm[i] + (1.0 - beta1) * g[i]
            vv[i] = beta2 * vv[i] + (1.0 - beta2) * g[i] * g[i]
            p[i] -= lr * (mm[i] / c1) / (sqrt(vv[i] / c2) + eps)
