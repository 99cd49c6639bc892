# cython: boundscheck=False, wraparound=False, cdivision=True
# Compiled Monte Carlo reduction kernels; semantics match _purekernels.

import numpy as np

cimport numpy as cnp

cnp.import_array()


def spc_replicates(double[::1] shift, double[::1] scale, double[:, ::1] noise):
    cdef Py_ssize_t r, j
    cdef Py_ssize_t reps = noise.shape[0]
    cdef Py_ssize_t k = noise.shape[1]
    cdef double acc, d
    out_arr = np.empty(reps, dtype=np.float64)
    cdef double[::1] out = out_arr
    for r in range(reps):
        acc = 0.0
        for j in range(k):
            d = shift[j] - scale[j] * noise[r, j]
            acc += d * d
        out[r] = acc
    return out_arr


def count_outside(double[::1] dev, double[::1] sd, double tail_sq,
                  double radius_sq, double[:, ::1] noise):
    cdef Py_ssize_t r, j
    cdef Py_ssize_t reps = noise.shape[0]
    cdef Py_ssize_t k = noise.shape[1]
    cdef double acc, d
    cdef long count = 0
    for r in range(reps):
        acc = tail_sq
        for j in range(k):
            d = dev[j] + sd[j] * noise[r, j]
            acc += d * d
        if acc > radius_sq:
            count += 1
    return count
