# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled message kernels; same contracts as ``_fallback``."""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, exp, expm1, fabs, log, log1p

from .nodes import EnumerationCapError

cnp.import_array()


cdef inline double _clip(double x, double c) nogil:
    if x > c:
        return c
    if x < -c:
        return -c
    return x


cdef inline double _logaddexp(double a, double b) nogil:
    if a > b:
        return a + log1p(exp(b - a))
    return b + log1p(exp(a - b))


cdef inline double _phi(double x) nogil:
    # log((e^x + 1) / (e^x - 1)) for x >= 0; an involution on [0, inf]
    if x == 0:
        return INFINITY
    if x == INFINITY:
        return 0.0
    return log1p(2.0 / expm1(x))


def p_messages(const double[::1] y, const cnp.int64_t[::1] node_ptr,
               const double[::1] amp, const double[::1] prior,
               double noise_var, double clamp, int cap):
    cdef Py_ssize_t n_nodes = node_ptr.shape[0] - 1
    cdef Py_ssize_t n_edges = amp.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(n_edges)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, t, j, start, d, q
    cdef long long p, n_pat
    cdef double yi, base, lw, u, num, den, inv_two_var = 0.5 / noise_var
    cdef double[64] pri
    cdef Py_ssize_t[64] oth
    cdef Py_ssize_t n_oth

    if cap > 62:
        raise ValueError("cap above 62 is not supported by the compiled kernel")
    for i in range(n_nodes):
        if node_ptr[i + 1] - node_ptr[i] - 1 > cap:
            raise EnumerationCapError(
                f"{node_ptr[i + 1] - node_ptr[i] - 1} interfering pulses exceed the cap of {cap}")

    with nogil:
        for i in range(n_nodes):
            start = node_ptr[i]
            d = node_ptr[i + 1] - start
            yi = y[i]
            if d == 1:
                out[start] = _clip(2.0 * amp[start] * yi / noise_var, clamp)
                continue
            for j in range(d):
                pri[j] = _clip(prior[start + j], clamp)
            for t in range(d):
                n_oth = 0
                for j in range(d):
                    if j != t:
                        oth[n_oth] = start + j
                        n_oth += 1
                n_pat = (<long long> 1) << n_oth
                num = -1e300
                den = -1e300
                for p in range(n_pat):
                    base = 0.0
                    lw = 0.0
                    for q in range(n_oth):
                        # bit q clear -> symbol +1 (carries the prior weight)
                        if (p >> q) & 1:
                            base -= amp[oth[q]]
                        else:
                            base += amp[oth[q]]
                            lw += pri[oth[q] - start]
                    u = yi - amp[start + t] - base
                    num = _logaddexp(num, lw - u * u * inv_two_var)
                    u = yi + amp[start + t] - base
                    den = _logaddexp(den, lw - u * u * inv_two_var)
                out[start + t] = _clip(num - den, clamp)
    return out_arr


def check_messages(const cnp.int64_t[::1] chk_ptr, const double[::1] v2c, double clamp):
    # sign/magnitude form: the magnitude out of a check is phi(sum of phi(|l|))
    # over the other edges; forward/backward sums avoid "total minus own"
    cdef Py_ssize_t n_chk = chk_ptr.shape[0] - 1
    cdef Py_ssize_t n_edges = v2c.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(n_edges)
    cdef double[::1] out = out_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mag_arr = np.empty(n_edges)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bwd_arr = np.empty(n_edges + 1)
    cdef double[::1] mag = mag_arr
    cdef double[::1] bwd = bwd_arr
    cdef signed char[::1] neg = np.empty(n_edges, dtype=np.int8)
    cdef Py_ssize_t c, i, s, d
    cdef double l, fwd
    cdef int parity, fwd_parity

    with nogil:
        for c in range(n_chk):
            s = chk_ptr[c]
            d = chk_ptr[c + 1] - s
            if d == 0:
                continue
            if d == 1:
                out[s] = clamp
                continue
            parity = 0
            for i in range(d):
                l = _clip(v2c[s + i], clamp)
                neg[s + i] = l < 0
                parity ^= neg[s + i]
                mag[s + i] = _phi(fabs(l))
            bwd[s + d] = 0.0
            for i in range(d - 1, 0, -1):
                bwd[s + i] = bwd[s + i + 1] + mag[s + i]
            fwd = 0.0
            for i in range(d):
                l = _phi(fwd + bwd[s + i + 1])
                out[s + i] = _clip(-l if parity ^ neg[s + i] else l, clamp)
                fwd += mag[s + i]
    return out_arr
