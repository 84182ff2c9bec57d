# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np

cdef extern from *:
    int __builtin_popcountl(unsigned long) nogil


cdef void _fwht(double[::1] re, double[::1] im, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t h = 1, i, j
    cdef double a, b
    while h < d:
        i = 0
        while i < d:
            for j in range(i, i + h):
                a = re[j]
                b = re[j + h]
                re[j] = a + b
                re[j + h] = a - b
                a = im[j]
                b = im[j + h]
                im[j] = a + b
                im[j + h] = a - b
            i += 2 * h
        h *= 2


def popcount(a):
    a = np.asarray(a, dtype=np.int64)
    flat = np.ascontiguousarray(a).ravel()
    out = np.empty(flat.shape[0], dtype=np.int64)
    cdef const long long[::1] src = flat
    cdef long long[::1] dst = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = __builtin_popcountl(<unsigned long>src[i])
    return out.reshape(a.shape)


def fwht(v):
    v = np.asarray(v)
    shape = v.shape
    cdef Py_ssize_t d = v.shape[v.ndim - 1]
    flat = np.ascontiguousarray(v, dtype=np.complex128).reshape(-1, d)
    re = np.ascontiguousarray(flat.real)
    im = np.ascontiguousarray(flat.imag)
    cdef double[:, ::1] r = re
    cdef double[:, ::1] m = im
    cdef Py_ssize_t row
    with nogil:
        for row in range(r.shape[0]):
            _fwht(r[row], m[row], d)
    out = re + 1j * im
    if not np.iscomplexobj(v):
        out = out.real
    return out.reshape(shape)


def pauli_block(states, long x0, long x1):
    cdef const double complex[:, ::1] psi = np.ascontiguousarray(states, dtype=np.complex128)
    cdef Py_ssize_t nb = psi.shape[0], d = psi.shape[1]
    out = np.empty((nb, x1 - x0, d), dtype=np.float64)
    cdef double[:, :, ::1] o = out
    re_buf = np.empty(d, dtype=np.float64)
    im_buf = np.empty(d, dtype=np.float64)
    cdef double[::1] re = re_buf
    cdef double[::1] im = im_buf
    cdef Py_ssize_t b, j, z
    cdef long x
    cdef int k
    cdef double complex u, w
    with nogil:
        for b in range(nb):
            for x in range(x0, x1):
                for j in range(d):
                    u = psi[b, j ^ x]
                    w = psi[b, j]
                    re[j] = u.real * w.real + u.imag * w.imag
                    im[j] = u.real * w.imag - u.imag * w.real
                _fwht(re, im, d)
                for z in range(d):
                    k = __builtin_popcountl(<unsigned long>(x & z)) & 3
                    if k == 0:
                        o[b, x - x0, z] = re[z]
                    elif k == 1:
                        o[b, x - x0, z] = -im[z]
                    elif k == 2:
                        o[b, x - x0, z] = -re[z]
                    else:
                        o[b, x - x0, z] = im[z]
    return out
