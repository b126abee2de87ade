# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the univariate regression objective."""


def linreg_loss(double w, double b, double[::1] x, double[::1] y):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double r, acc = 0.0
    for i in range(n):
        r = w * x[i] + b - y[i]
        acc += r * r
    return acc / n


def linreg_loss_grad(double w, double b, double[::1] x, double[::1] y):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double r, loss = 0.0, gw = 0.0, gb = 0.0
    for i in range(n):
        r = w * x[i] + b - y[i]
        loss += r * r
        gw += x[i] * r
        gb += r
    return loss / n, 2.0 * gw / n, 2.0 * gb / n
