# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled erasure-recoverability kernel.

See ``rmpolar.kernel.undetermined`` for the contract.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, uint8_t
from libc.string cimport memset

cnp.import_array()

cdef extern from *:
    int __builtin_clzll(unsigned long long) nogil


cdef inline int _top_bit(uint64_t* v, int start_word) noexcept nogil:
    cdef int w
    for w in range(start_word, -1, -1):
        if v[w]:
            return w * 64 + 63 - __builtin_clzll(v[w])
    return -1


def undetermined(const uint64_t[:, ::1] rows, const uint64_t[:, ::1] masks):
    cdef Py_ssize_t R = rows.shape[0]
    cdef Py_ssize_t W = rows.shape[1]
    cdef Py_ssize_t S = masks.shape[0]
    if masks.shape[1] != W:
        raise ValueError("rows and masks have different word counts")
    cdef Py_ssize_t nbits = W * 64
    out_arr = np.zeros((S, R), dtype=np.uint8)
    cdef uint8_t[:, ::1] out = out_arr
    basis_arr = np.zeros((max(nbits, 1), max(W, 1)), dtype=np.uint64)
    have_arr = np.zeros(max(nbits, 1), dtype=np.uint8)
    tmp_arr = np.zeros(max(W, 1), dtype=np.uint64)
    cdef uint64_t[:, ::1] basis = basis_arr
    cdef uint8_t[::1] have = have_arr
    cdef uint64_t[::1] tmp = tmp_arr
    cdef Py_ssize_t s, i, w
    cdef int top
    if W == 0 or R == 0:
        return out_arr
    with nogil:
        for s in range(S):
            memset(&have[0], 0, nbits)
            for i in range(R - 1, -1, -1):
                for w in range(W):
                    tmp[w] = rows[i, w] & masks[s, w]
                top = _top_bit(&tmp[0], W - 1)
                while True:
                    if top < 0:
                        out[s, i] = 1
                        break
                    if have[top]:
                        for w in range(top >> 6, -1, -1):
                            tmp[w] ^= basis[top, w]
                        top = _top_bit(&tmp[0], top >> 6)
                    else:
                        for w in range(W):
                            basis[top, w] = tmp[w]
                        have[top] = 1
                        break
    return out_arr
