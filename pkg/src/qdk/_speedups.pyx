# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in :mod:`qdk._kernels` (64-bit arithmetic)."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport calloc, free, malloc
from libc.stdint cimport int64_t, int32_t


def c4_weighted(Py_ssize_t n, const int64_t[::1] indptr, const int64_t[::1] indices,
                const int64_t[::1] weights):
    cdef int64_t *s1 = <int64_t *> calloc(n + 1, sizeof(int64_t))
    cdef int64_t *s2 = <int64_t *> calloc(n + 1, sizeof(int64_t))
    cdef int64_t *touched = <int64_t *> calloc(n + 1, sizeof(int64_t))
    cdef Py_ssize_t u, p, q, v, w, nt, i
    cdef int64_t wuv, x, total = 0
    if s1 == NULL or s2 == NULL or touched == NULL:
        free(s1); free(s2); free(touched)
        raise MemoryError()
    try:
        for u in range(n):
            nt = 0
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                wuv = weights[p]
                for q in range(indptr[v], indptr[v + 1]):
                    w = indices[q]
                    if w <= u:
                        continue
                    x = wuv * weights[q]
                    if s1[w] == 0:
                        touched[nt] = w
                        nt += 1
                    s1[w] += x
                    s2[w] += x * x
            for i in range(nt):
                w = touched[i]
                total += s1[w] * s1[w] - s2[w]
                s1[w] = 0
                s2[w] = 0
    finally:
        free(s1); free(s2); free(touched)
    return total // 4


cdef inline int _topo(const int32_t[:, ::1] D, Py_ssize_t a, Py_ssize_t b,
                      Py_ssize_t c, Py_ssize_t d) nogil:
    cdef int32_t s1 = D[a, b] + D[c, d]
    cdef int32_t s2 = D[a, c] + D[b, d]
    cdef int32_t s3 = D[a, d] + D[b, c]
    if s1 > s2 and s1 > s3:
        return 0
    if s2 > s1 and s2 > s3:
        return 1
    if s3 > s1 and s3 > s2:
        return 2
    return 3


def quartet_tally(D1, D2):
    cdef const int32_t[:, ::1] A = np.ascontiguousarray(D1, dtype=np.int32)
    cdef const int32_t[:, ::1] B = np.ascontiguousarray(D2, dtype=np.int32)
    cdef Py_ssize_t n = A.shape[0], a, b, c, d
    cdef int64_t differ = 0, resolved = 0, star = 0
    cdef int t1, t2
    with nogil:
        for a in range(n):
            for b in range(a + 1, n):
                for c in range(b + 1, n):
                    for d in range(c + 1, n):
                        t1 = _topo(A, a, b, c, d)
                        t2 = _topo(B, a, b, c, d)
                        if t1 != t2:
                            differ += 1
                        elif t1 == 3:
                            star += 1
                        else:
                            resolved += 1
    return differ, resolved, star


# --- power-of-two decomposition with symbolic colored profiles -------------

from qdk._kernels import DEG4 as _DEG4, PAIR2 as _PAIR2, PROD4 as _PROD4

cdef int _pair2[4][4]
cdef int _prod4[10][10]
cdef int _kidx[625]
cdef int _lexrank[16]
cdef int64_t _fact[5]
cdef int _pow5[4]
_pow5[0] = 1; _pow5[1] = 5; _pow5[2] = 25; _pow5[3] = 125


def _init_tables():
    cdef int i, j
    for i in range(4):
        for j in range(4):
            _pair2[i][j] = _PAIR2[i][j]
    for i in range(10):
        for j in range(10):
            _prod4[i][j] = _PROD4[i][j]
    for i in range(625):
        _kidx[i] = -1
    for i, (a, b, c, d) in enumerate(_DEG4):
        _kidx[a + 5 * b + 25 * c + 125 * d] = i
    order = sorted(range(1, 16), key=lambda m: [t for t in range(4) if m >> t & 1])
    _lexrank[0] = -1
    for i, m in enumerate(order):
        _lexrank[m] = i
    for i, f in enumerate((1, 1, 2, 6, 24)):
        _fact[i] = f


_init_tables()


cdef void _profile(Py_ssize_t n, const int64_t *indptr, const int64_t *indices,
                   const int *col, int64_t *s1, int64_t *s2, int64_t *touched,
                   int64_t *out) nogil:
    # same identity as qdk._kernels.colored_profile
    cdef Py_ssize_t u, p, q, v, w, nt, i, j, k
    cdef int cu, cw, mm
    cdef int64_t a
    for k in range(35):
        out[k] = 0
    for u in range(n):
        nt = 0
        for p in range(indptr[u], indptr[u + 1]):
            cu = col[p]
            if cu == 0:
                continue
            v = indices[p]
            for q in range(indptr[v], indptr[v + 1]):
                w = indices[q]
                cw = col[q]
                if w <= u or cw == 0:
                    continue
                if touched[n + w] == 0:
                    touched[n + w] = 1
                    touched[nt] = w
                    nt += 1
                mm = _pair2[cu - 1][cw - 1]
                s1[w * 10 + mm] += 1
        for i in range(nt):
            w = touched[i]
            touched[n + w] = 0
            for j in range(10):
                a = s1[w * 10 + j]
                if a == 0:
                    continue
                # a path pair with equal monomials needs two distinct middles
                out[_prod4[j][j]] += a * a - a
                for k in range(j + 1, 10):
                    if s1[w * 10 + k]:
                        out[_prod4[j][k]] += 2 * a * s1[w * 10 + k]
            for j in range(10):
                s1[w * 10 + j] = 0
    for k in range(35):
        out[k] //= 4


def c4_power_split(Py_ssize_t n, const int64_t[::1] indptr, const int64_t[::1] indices,
                   const int64_t[::1] eid, const int64_t[::1] mult):
    """Weighted 4-cycle count through power-of-two splitting.

    Mirrors ``qdk.cycles.count_c4_multigraph`` with symbolic profiles.
    Callers guarantee that every term fits in 64 bits. Returns
    ``(total, weight_multisets, groups, profile_calls)``.
    """
    cdef Py_ssize_t m = mult.shape[0], nnz = indices.shape[0]
    cdef int64_t allbits = 0
    cdef Py_ssize_t e, p, i, t
    for e in range(m):
        allbits |= mult[e]
    cdef int pw[64]
    cdef int npw = 0
    for t in range(63):
        if allbits >> t & 1:
            pw[npw] = t
            npw += 1

    cdef int *cls = <int *> calloc(m + 1, sizeof(int))
    cdef int *col = <int *> calloc(nnz + 1, sizeof(int))
    cdef int64_t *s1 = <int64_t *> calloc(10 * n + 10, sizeof(int64_t))
    cdef int64_t *s2 = <int64_t *> calloc(1, sizeof(int64_t))
    cdef int64_t *touched = <int64_t *> calloc(2 * n + 2, sizeof(int64_t))
    cdef int *slot = <int *> malloc(65536 * sizeof(int))
    cdef int64_t *store = <int64_t *> malloc(2000 * 35 * sizeof(int64_t))
    if not (cls and col and s1 and s2 and touched and slot and store):
        free(cls); free(col); free(s1); free(s2); free(touched); free(slot); free(store)
        raise MemoryError()

    total = 0
    cdef int64_t n_w = 0, n_groups = 0, n_calls = 0
    cdef int s, qb[4], w[4], ms[4], dist[4], cnt[4], nd
    cdef int cand[4][15]
    cdef int ncand[4]
    cdef int present[16]
    cdef int cnt_cls[16]
    cdef int nstore, code, mask, lp, x, y, k, i0, i1, i2, i3, j, ok
    cdef int64_t f, multinom, term
    cdef int64_t *prof

    try:
        for s in range(1, 5):
            if s > npw:
                break
            # iterate over s-subsets qb of the present powers
            for t in range(s):
                qb[t] = t
            while True:
                for e in range(m):
                    mask = 0
                    for t in range(s):
                        if mult[e] >> pw[qb[t]] & 1:
                            mask |= 1 << t
                    cls[e] = mask
                for t in range(16):
                    present[t] = 0
                    cnt_cls[t] = 0
                for e in range(m):
                    present[cls[e]] = 1
                    cnt_cls[cls[e]] += 1
                for t in range(65536):
                    slot[t] = -1
                nstore = 0

                for w[0] in range(s):
                    for w[1] in range(w[0], s):
                        for w[2] in range(w[1], s):
                            for w[3] in range(w[2], s):
                                # every power of Q must occur in W
                                ok = 1
                                for t in range(s):
                                    if w[0] != t and w[1] != t and w[2] != t and w[3] != t:
                                        ok = 0
                                if not ok:
                                    continue
                                n_w += 1
                                lp = 0
                                for i in range(4):
                                    lp += pw[qb[w[i]]]
                                    ncand[i] = 0
                                    for mask in range(1, 16):
                                        if present[mask] and mask >> w[i] & 1:
                                            cand[i][ncand[i]] = mask
                                            ncand[i] += 1
                                for i0 in range(ncand[0]):
                                    ms[0] = cand[0][i0]
                                    for i1 in range(ncand[1]):
                                        ms[1] = cand[1][i1]
                                        if w[0] == w[1] and _lexrank[ms[0]] > _lexrank[ms[1]]:
                                            continue
                                        for i2 in range(ncand[2]):
                                            ms[2] = cand[2][i2]
                                            if w[1] == w[2] and _lexrank[ms[1]] > _lexrank[ms[2]]:
                                                continue
                                            for i3 in range(ncand[3]):
                                                ms[3] = cand[3][i3]
                                                if w[2] == w[3] and _lexrank[ms[2]] > _lexrank[ms[3]]:
                                                    continue
                                                # distinct classes sorted by lex rank
                                                nd = 0
                                                for i in range(4):
                                                    ok = 1
                                                    for j in range(nd):
                                                        if dist[j] == ms[i]:
                                                            cnt[j] += 1
                                                            ok = 0
                                                    if ok:
                                                        dist[nd] = ms[i]
                                                        cnt[nd] = 1
                                                        nd += 1
                                                for i in range(1, nd):
                                                    j = i
                                                    while j > 0 and _lexrank[dist[j - 1]] > _lexrank[dist[j]]:
                                                        x = dist[j]; dist[j] = dist[j - 1]; dist[j - 1] = x
                                                        x = cnt[j]; cnt[j] = cnt[j - 1]; cnt[j - 1] = x
                                                        j -= 1
                                                x = 0
                                                for i in range(nd):
                                                    x += cnt_cls[dist[i]]
                                                if x < 4:
                                                    continue
                                                n_groups += 1
                                                code = 0
                                                for i in range(nd):
                                                    code |= dist[i] << (4 * i)
                                                if slot[code] < 0:
                                                    for p in range(nnz):
                                                        mask = cls[eid[p]]
                                                        col[p] = 0
                                                        for i in range(nd):
                                                            if dist[i] == mask:
                                                                col[p] = i + 1
                                                    _profile(n, &indptr[0], &indices[0], col, s1, s2,
                                                             touched, &store[35 * nstore])
                                                    slot[code] = nstore
                                                    nstore += 1
                                                    n_calls += 1
                                                prof = &store[35 * slot[code]]
                                                x = 0
                                                for i in range(nd):
                                                    x += cnt[i] * _pow5[i]
                                                f = prof[_kidx[x]]
                                                if f == 0:
                                                    continue
                                                multinom = 1
                                                for i in range(nd):
                                                    multinom *= _fact[cnt[i]]
                                                    # equal powers on edges of one class are interchangeable
                                                    for t in range(s):
                                                        y = 0
                                                        for k in range(4):
                                                            if ms[k] == dist[i] and w[k] == t:
                                                                y += 1
                                                        multinom //= _fact[y]
                                                term = (f * multinom) << lp
                                                total += term

                # next s-subset in lexicographic order
                t = s - 1
                while t >= 0 and qb[t] == npw - s + t:
                    t -= 1
                if t < 0:
                    break
                qb[t] += 1
                for j in range(t + 1, s):
                    qb[j] = qb[j - 1] + 1
    finally:
        free(cls); free(col); free(s1); free(s2); free(touched); free(slot); free(store)
    return total, n_w, n_groups, n_calls
