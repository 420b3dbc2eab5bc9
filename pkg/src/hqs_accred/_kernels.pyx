# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled density-matrix kernels; same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def apply_kraus(rho, kraus, qubits, int n):
    cdef const double complex[:, ::1] r = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef const double complex[:, :, ::1] ks = np.ascontiguousarray(kraus, dtype=np.complex128)
    cdef int k = len(qubits)
    cdef Py_ssize_t d = 1 << n
    cdef Py_ssize_t kd = 1 << k
    cdef Py_ssize_t nk = ks.shape[0]
    cdef Py_ssize_t[::1] off = np.zeros(kd, dtype=np.intp)
    cdef Py_ssize_t mask = 0
    cdef Py_ssize_t a, a2, i, c, base, m, bit, src, dst
    cdef double complex acc, kv

    for i in range(k):
        bit = (<Py_ssize_t>1) << (n - 1 - <int>qubits[i])
        mask |= bit
        for a in range(kd):
            if (a >> (k - 1 - i)) & 1:
                off[a] += bit

    out_arr = np.zeros((d, d), dtype=np.complex128)
    tmp_arr = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex[:, ::1] tmp = tmp_arr
    cdef double complex[::1] v = np.zeros(kd, dtype=np.complex128)

    with nogil:
        for m in range(nk):
            # tmp = K rho, whole rows at a time
            tmp[:, :] = 0
            for base in range(d):
                if base & mask:
                    continue
                for a2 in range(kd):
                    dst = base + off[a2]
                    for a in range(kd):
                        kv = ks[m, a2, a]
                        if kv == 0:
                            continue
                        src = base + off[a]
                        for c in range(d):
                            tmp[dst, c] = tmp[dst, c] + kv * r[src, c]
            # out += tmp K^dagger, one row at a time
            for i in range(d):
                for base in range(d):
                    if base & mask:
                        continue
                    for a in range(kd):
                        v[a] = tmp[i, base + off[a]]
                    for a2 in range(kd):
                        acc = 0
                        for a in range(kd):
                            kv = ks[m, a2, a]
                            if kv != 0:
                                acc = acc + v[a] * kv.conjugate()
                        out[i, base + off[a2]] += acc
    return out_arr


def apply_layer(rho, mats, int n):
    out_arr = np.array(rho, dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, ::1] r = out_arr
    cdef const double complex[:, :, ::1] u = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef Py_ssize_t d = 1 << n
    cdef Py_ssize_t q, i, j, c, bit
    cdef double complex x, y, u00, u01, u10, u11, c00, c01, c10, c11

    with nogil:
        for q in range(n):
            bit = (<Py_ssize_t>1) << (n - 1 - q)
            u00 = u[q, 0, 0]
            u01 = u[q, 0, 1]
            u10 = u[q, 1, 0]
            u11 = u[q, 1, 1]
            if u01 == 0 and u10 == 0 and u00 == 1 and u11 == 1:
                continue
            c00 = u00.conjugate()
            c01 = u01.conjugate()
            c10 = u10.conjugate()
            c11 = u11.conjugate()
            for i in range(d):
                if i & bit:
                    continue
                j = i | bit
                for c in range(d):
                    x = r[i, c]
                    y = r[j, c]
                    r[i, c] = u00 * x + u01 * y
                    r[j, c] = u10 * x + u11 * y
            for c in range(d):
                for i in range(d):
                    if i & bit:
                        continue
                    j = i | bit
                    x = r[c, i]
                    y = r[c, j]
                    r[c, i] = x * c00 + y * c01
                    r[c, j] = x * c10 + y * c11
    return out_arr
