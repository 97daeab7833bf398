# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled interval-set kernels; same contract as ``_pykernels``."""

from math import inf

NEG_INF = -inf
POS_INF = inf

cdef object _NEG = -inf
cdef object _POS = inf


cdef inline tuple _t(object o):
    # plain 4-tuple; tuple(o) would hand back tuple subclasses such as Interval unchanged
    return (o[0], o[1], o[2], o[3])


cdef inline bint _nonempty(object lo, bint lc, object hi, bint hc):
    return lo < hi or (lo == hi and lc and hc)


cdef object _iv_intersect(tuple x, tuple y):
    cdef object xlo = x[0], xhi = x[2], ylo = y[0], yhi = y[2]
    cdef bint xlc = x[1], xhc = x[3], ylc = y[1], yhc = y[3]
    cdef object lo, hi
    cdef bint lc, hc
    if xlo > ylo:
        lo = xlo
        lc = xlc
    elif ylo > xlo:
        lo = ylo
        lc = ylc
    else:
        lo = xlo
        lc = xlc and ylc
    if xhi < yhi:
        hi = xhi
        hc = xhc
    elif yhi < xhi:
        hi = yhi
        hc = yhc
    else:
        hi = xhi
        hc = xhc and yhc
    if _nonempty(lo, lc, hi, hc):
        return (lo, lc, hi, hc)
    return None


cdef tuple _iv_add(tuple x, tuple w):
    cdef object lo = x[0] + w[0]
    cdef object hi = x[2] + w[2]
    cdef bint lc = x[1] and w[1] and lo != _NEG
    cdef bint hc = x[3] and w[3] and hi != _POS
    return (lo, lc, hi, hc)


cdef tuple _iv_sub(tuple x, tuple w):
    cdef object lo = x[0] - w[2]
    cdef object hi = x[2] - w[0]
    cdef bint lc = x[1] and w[3] and lo != _NEG
    cdef bint hc = x[3] and w[1] and hi != _POS
    return (lo, lc, hi, hc)


def iv_intersect(x, y):
    return _iv_intersect(_t(x), _t(y))


def iv_add(x, w):
    """Minkowski sum ``{a + b | a in x, b in w}``."""
    return _iv_add(_t(x), _t(w))


def iv_sub(x, w):
    """Minkowski difference ``{a - b | a in x, b in w}``."""
    return _iv_sub(_t(x), _t(w))


cdef object _start_key(tuple iv):
    return (iv[0], not iv[1])


cdef list _coalesce(list ivs):
    cdef list out = []
    cdef Py_ssize_t i, n = len(ivs)
    cdef tuple nxt
    cdef object lo, hi, nlo, nhi
    cdef bint lc, hc, nlc, nhc
    if n == 0:
        return out
    ivs.sort(key=_start_key)
    lo, lc, hi, hc = ivs[0]
    for i in range(1, n):
        nxt = ivs[i]
        nlo = nxt[0]
        nlc = nxt[1]
        nhi = nxt[2]
        nhc = nxt[3]
        if nlo < hi or (nlo == hi and (nlc or hc)):
            if nhi > hi or (nhi == hi and nhc):
                hi = nhi
                hc = nhc
        else:
            out.append((lo, lc, hi, hc))
            lo = nlo
            lc = nlc
            hi = nhi
            hc = nhc
    out.append((lo, lc, hi, hc))
    return out


def coalesce(ivs):
    return _coalesce([_t(iv) for iv in ivs])


def union(a, b):
    if not a:
        return list(b)
    if not b:
        return list(a)
    return _coalesce([_t(iv) for iv in a] + [_t(iv) for iv in b])


def intersect(a, b):
    cdef list out = []
    cdef Py_ssize_t i = 0, j = 0, na = len(a), nb = len(b)
    cdef tuple x, y
    cdef object r
    while i < na and j < nb:
        x = _t(a[i])
        y = _t(b[j])
        r = _iv_intersect(x, y)
        if r is not None:
            out.append(r)
        if x[2] < y[2] or (x[2] == y[2] and not x[3]):
            i += 1
        else:
            j += 1
    return out


cdef Py_ssize_t _find(object a, object lo, bint lc):
    cdef Py_ssize_t k = -1, left = 0, right = len(a), mid
    cdef object mlo
    while left < right:
        mid = (left + right) // 2
        mlo = a[mid][0]
        if mlo < lo or (mlo == lo and (a[mid][1] or not lc)):
            k = mid
            left = mid + 1
        else:
            right = mid
    return k


cdef bint _covers(object a, object x):
    cdef Py_ssize_t k = _find(a, x[0], x[1])
    if k < 0:
        return False
    m = a[k]
    return m[2] > x[2] or (m[2] == x[2] and (m[3] or not x[3]))


def covers(a, x):
    """True iff interval ``x`` is a subset of the union of ``a``."""
    return _covers(a, x)


def contains_point(a, t):
    return _covers(a, (t, True, t, True))


def subset(a, b):
    """True iff every member of ``a`` is covered by ``b``."""
    for x in a:
        if not _covers(b, x):
            return False
    return True


def dilate_add(a, w):
    cdef tuple tw = _t(w)
    return _coalesce([_iv_add(_t(x), tw) for x in a])


def dilate_sub(a, w):
    cdef tuple tw = _t(w)
    return _coalesce([_iv_sub(_t(x), tw) for x in a])


def erode_future(a, w):
    """Points ``t`` with ``t + w`` inside some member of ``a``."""
    cdef object p = w[0], q = w[2], lo, hi
    cdef bint pc = w[1], qc = w[3], lc, hc
    cdef list out = []
    for j in a:
        lo = j[0] - p
        lc = (j[1] or not pc) and lo != _NEG
        if q == _POS:
            if j[2] != _POS:
                continue
            hi = _POS
            hc = False
        else:
            hi = j[2] - q
            hc = (j[3] or not qc) and hi != _POS
        if _nonempty(lo, lc, hi, hc):
            out.append((lo, lc, hi, hc))
    return _coalesce(out)


def erode_past(a, w):
    """Points ``t`` with ``t - w`` inside some member of ``a``."""
    cdef object p = w[0], q = w[2], lo, hi
    cdef bint pc = w[1], qc = w[3], lc, hc
    cdef list out = []
    for j in a:
        if q == _POS:
            if j[0] != _NEG:
                continue
            lo = _NEG
            lc = False
        else:
            lo = j[0] + q
            lc = (j[1] or not qc) and lo != _NEG
        hi = j[2] + p
        hc = (j[3] or not pc) and hi != _POS
        if _nonempty(lo, lc, hi, hc):
            out.append((lo, lc, hi, hc))
    return _coalesce(out)


cdef object _positive_part(tuple w):
    if w[0] > 0:
        return w
    if w[2] == 0:
        return None
    return (w[0], False, w[2], w[3])


def until(a1, a2, w):
    """Points where ``M2 U_w M1`` holds, given the sets ``a1`` of M1 and ``a2`` of M2."""
    cdef tuple tw = _t(w)
    cdef list out = [_t(o) for o in a1] if (tw[0] == 0 and tw[1]) else []
    cdef object wp = _positive_part(tw)
    cdef object jlo, jhi, clipped, r
    cdef tuple cap, floor, x
    cdef list xs = [_t(o) for o in a1]
    cdef Py_ssize_t start = 0, k, n = len(xs)
    if wp is not None:
        for j in a2:
            jlo = j[0]
            jhi = j[2]
            cap = (_NEG, False, jhi, jhi != _POS)
            floor = (jlo, jlo != _NEG, _POS, False)
            while start < n and xs[start][2] < jlo:
                start += 1
            for k in range(start, n):
                x = xs[k]
                if x[0] > jhi:
                    break
                clipped = _iv_intersect(x, cap)
                if clipped is None:
                    continue
                r = _iv_intersect(_iv_sub(clipped, wp), floor)
                if r is not None:
                    out.append(r)
    return _coalesce(out)


def since(a1, a2, w):
    """Points where ``M2 S_w M1`` holds, given the sets ``a1`` of M1 and ``a2`` of M2."""
    cdef tuple tw = _t(w)
    cdef list out = [_t(o) for o in a1] if (tw[0] == 0 and tw[1]) else []
    cdef object wp = _positive_part(tw)
    cdef object jlo, jhi, clipped, r
    cdef tuple cap, floor, x
    cdef list xs = [_t(o) for o in a1]
    cdef Py_ssize_t start = 0, k, n = len(xs)
    if wp is not None:
        for j in a2:
            jlo = j[0]
            jhi = j[2]
            floor = (jlo, jlo != _NEG, _POS, False)
            cap = (_NEG, False, jhi, jhi != _POS)
            while start < n and xs[start][2] < jlo:
                start += 1
            for k in range(start, n):
                x = xs[k]
                if x[0] > jhi:
                    break
                clipped = _iv_intersect(x, floor)
                if clipped is None:
                    continue
                r = _iv_intersect(_iv_add(clipped, wp), cap)
                if r is not None:
                    out.append(r)
    return _coalesce(out)
