# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Same contracts as ``_pykernels``; see there."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, exp, log1p, INFINITY
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef double NEG_INF = -INFINITY
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TWO_M53 = 1.0 / 9007199254740992.0


cdef inline double _logaddexp(double a, double b) nogil:
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a > b:
        return a + log1p(exp(b - a))
    return b + log1p(exp(a - b))


def tree_index(const int64_t[::1] parent):
    cdef Py_ssize_t n = parent.shape[0], i
    cdef int64_t p
    depth_a = np.zeros(n, dtype=np.int64)
    size_a = np.ones(n, dtype=np.int64)
    enter_a = np.zeros(n, dtype=np.int64)
    order_a = np.zeros(n, dtype=np.int64)
    cursor_a = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] depth = depth_a, size = size_a, enter = enter_a
    cdef int64_t[::1] order = order_a, cursor = cursor_a
    with nogil:
        for i in range(1, n):
            depth[i] = depth[parent[i]] + 1
        for i in range(n - 1, 0, -1):
            size[parent[i]] += size[i]
        if n > 0:
            cursor[0] = 1
        for i in range(1, n):
            p = parent[i]
            enter[i] = cursor[p]
            cursor[p] += size[i]
            cursor[i] = enter[i] + 1
            order[enter[i]] = i
    return depth_a, size_a, enter_a, order_a


def chain_pass(const int64_t[::1] parent, const double[::1] lam,
               const double[::1] mu):
    cdef Py_ssize_t n = parent.shape[0], i
    cdef int64_t p
    cdef double ratio
    logw_a = np.zeros(n)
    rho_a = np.ones(n)
    g_a = np.zeros(n)
    cg_a = np.zeros(n)
    cdef double[::1] logw = logw_a, rho = rho_a, g = g_a, cg = cg_a
    with nogil:
        for i in range(1, n):
            logw[i] = logw[parent[i]] + log(lam[i]) - log(mu[i])
        for i in range(n - 1, 0, -1):
            g[i] = rho[i] * rho[i] / mu[i] + cg[i]
            ratio = lam[i] / mu[i]
            p = parent[i]
            rho[p] += ratio * rho[i]
            cg[p] += ratio * g[i]
    return logw_a, rho_a, g_a, cg_a


cdef void _sibling_sums(const int64_t[::1] child_ptr, const int64_t[::1] child_idx,
                        const double[::1] w, double[::1] out) nogil:
    cdef Py_ssize_t p, k, lo, hi
    cdef double acc
    for p in range(child_ptr.shape[0] - 1):
        lo = child_ptr[p]
        hi = child_ptr[p + 1]
        acc = 0.0
        for k in range(lo, hi):
            out[child_idx[k]] = acc
            acc += w[child_idx[k]]
        acc = 0.0
        for k in range(hi - 1, lo - 1, -1):
            out[child_idx[k]] += acc
            acc += w[child_idx[k]]


def complement_pass(const int64_t[::1] parent, const int64_t[::1] child_ptr,
                    const int64_t[::1] child_idx, const double[::1] lam,
                    const double[::1] mu, const double[::1] rho,
                    const double[::1] g, const double[::1] logpi):
    cdef Py_ssize_t n = parent.shape[0], i
    cdef int64_t p
    cdef double ratio, sib, side, path
    lcm_a = np.full(n, NEG_INF)
    lnum_a = np.full(n, NEG_INF)
    wr_a = np.zeros(n)
    wg_a = np.zeros(n)
    sr_a = np.zeros(n)
    sg_a = np.zeros(n)
    cdef double[::1] lcm = lcm_a, lnum = lnum_a
    cdef double[::1] wr = wr_a, wg = wg_a, sr = sr_a, sg = sg_a
    with nogil:
        for i in range(1, n):
            ratio = lam[i] / mu[i]
            wr[i] = ratio * rho[i]
            wg[i] = ratio * g[i]
        _sibling_sums(child_ptr, child_idx, wr, sr)
        _sibling_sums(child_ptr, child_idx, wg, sg)
        for i in range(1, n):
            p = parent[i]
            lcm[i] = _logaddexp(lcm[p], logpi[p] + log1p(sr[i]))
            sib = sg[i]
            if sib > 0.0:
                side = logpi[p] + log(sib)
            else:
                side = NEG_INF
            path = 2.0 * lcm[i] - logpi[i] - log(mu[i])
            lnum[i] = _logaddexp(_logaddexp(lnum[p], side), path)
    return lcm_a, lnum_a


def subtree_sum(const int64_t[::1] parent, const double[::1] values):
    cdef Py_ssize_t n = parent.shape[0], i
    acc_a = np.array(values, dtype=np.float64)
    cdef double[::1] acc = acc_a
    with nogil:
        for i in range(n - 1, 0, -1):
            acc[parent[i]] += acc[i]
    return acc_a


def path_cumsum(const int64_t[::1] parent, const double[::1] values):
    cdef Py_ssize_t n = parent.shape[0], i
    cum_a = np.zeros(n)
    cdef double[::1] cum = cum_a
    with nogil:
        for i in range(1, n):
            cum[i] = cum[parent[i]] + values[i]
    return cum_a


def path_logcumsum(const int64_t[::1] parent, const double[::1] log_values):
    cdef Py_ssize_t n = parent.shape[0], i
    cum_a = np.full(n, NEG_INF)
    cdef double[::1] cum = cum_a
    with nogil:
        for i in range(1, n):
            cum[i] = _logaddexp(cum[parent[i]], log_values[i])
    return cum_a


# --- random streams ---------------------------------------------------------

cdef inline uint64_t _mix(uint64_t x) nogil:
    cdef uint64_t z = x + GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline void _seed(uint64_t seed, uint64_t index, uint64_t* s) nogil:
    cdef uint64_t x = _mix(seed) ^ _mix(index ^ 0xD1B54A32D192ED03ULL)
    cdef uint64_t z
    cdef int k
    for k in range(4):
        x = x + GOLDEN
        z = x
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
        s[k] = z ^ (z >> 31)
    if s[0] == 0 and s[1] == 0 and s[2] == 0 and s[3] == 0:
        s[0] = 1


cdef inline uint64_t _next(uint64_t* s) nogil:
    cdef uint64_t result = _rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


def stream_state(uint64_t seed, uint64_t index):
    cdef uint64_t s[4]
    _seed(seed, index, s)
    return [s[0], s[1], s[2], s[3]]


def uniforms(uint64_t seed, uint64_t index, Py_ssize_t count):
    cdef uint64_t s[4]
    cdef Py_ssize_t k
    _seed(seed, index, s)
    return [(_next(s) >> 11) * TWO_M53 for k in range(count)]


def walk(const int64_t[::1] offsets, const double[::1] cum,
         const int64_t[::1] dest, int64_t source, int64_t target,
         uint64_t seed, Py_ssize_t start, Py_ssize_t stop, int64_t max_steps,
         int mode, int64_t[::1] out):
    cdef uint64_t s[4]
    cdef Py_ssize_t rep
    cdef int64_t x, t, last, j, end
    cdef double u
    cdef bint hit
    with nogil:
        for rep in range(start, stop):
            _seed(seed, <uint64_t>rep, s)
            x = source
            t = 0
            last = 0
            hit = False
            while t < max_steps:
                u = (_next(s) >> 11) * TWO_M53
                j = offsets[x]
                end = offsets[x + 1] - 1
                while j < end and u >= cum[j]:
                    j += 1
                x = dest[j]
                t += 1
                if x == target:
                    hit = True
                    break
                if mode == 1 and x == source:
                    last = t
            if not hit:
                out[rep] = -1
            elif mode == 1:
                out[rep] = t - last
            else:
                out[rep] = t
