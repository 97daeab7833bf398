"""Pure-Python interval-set kernels.

Every function works on plain endpoint tuples ``(lo, lo_closed, hi, hi_closed)``
where finite endpoints are ``Fraction`` and the extremes are ``-inf``/``inf``.
Inputs named ``a``/``b`` are canonical lists (sorted, disjoint, non-mergeable);
outputs are canonical lists as well.

``_ckernels.pyx`` mirrors this module function for function.
"""

from math import inf

NEG_INF = -inf
POS_INF = inf


def _nonempty(lo, lc, hi, hc):
    return lo < hi or (lo == hi and lc and hc)


def iv_intersect(x, y):
    xlo, xlc, xhi, xhc = x
    ylo, ylc, yhi, yhc = y
    if xlo > ylo:
        lo, lc = xlo, xlc
    elif ylo > xlo:
        lo, lc = ylo, ylc
    else:
        lo, lc = xlo, xlc and ylc
    if xhi < yhi:
        hi, hc = xhi, xhc
    elif yhi < xhi:
        hi, hc = yhi, yhc
    else:
        hi, hc = xhi, xhc and yhc
    if _nonempty(lo, lc, hi, hc):
        return (lo, lc, hi, hc)
    return None


def iv_add(x, w):
    """Minkowski sum ``{a + b | a in x, b in w}``."""
    lo = x[0] + w[0]
    hi = x[2] + w[2]
    lc = x[1] and w[1] and lo != NEG_INF
    hc = x[3] and w[3] and hi != POS_INF
    return (lo, lc, hi, hc)


def iv_sub(x, w):
    """Minkowski difference ``{a - b | a in x, b in w}``."""
    lo = x[0] - w[2]
    hi = x[2] - w[0]
    lc = x[1] and w[3] and lo != NEG_INF
    hc = x[3] and w[1] and hi != POS_INF
    return (lo, lc, hi, hc)


def coalesce(ivs):
    if not ivs:
        return []
    ordered = sorted(ivs, key=lambda iv: (iv[0], not iv[1]))
    out = []
    lo, lc, hi, hc = ordered[0]
    for nlo, nlc, nhi, nhc in ordered[1:]:
        if nlo < hi or (nlo == hi and (nlc or hc)):
            if nhi > hi or (nhi == hi and nhc):
                hi, hc = nhi, nhc
        else:
            out.append((lo, lc, hi, hc))
            lo, lc, hi, hc = nlo, nlc, nhi, nhc
    out.append((lo, lc, hi, hc))
    return out


def union(a, b):
    if not a:
        return list(b)
    if not b:
        return list(a)
    return coalesce(list(a) + list(b))


def intersect(a, b):
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        r = iv_intersect(x, y)
        if r is not None:
            out.append(r)
        # advance whichever interval ends first
        if x[2] < y[2] or (x[2] == y[2] and not x[3]):
            i += 1
        else:
            j += 1
    return out


def _find(a, lo, lc):
    # index of the last member whose lower bound starts at or before (lo, lc)
    k = -1
    left, right = 0, len(a)
    while left < right:
        mid = (left + right) // 2
        mlo = a[mid][0]
        if mlo < lo or (mlo == lo and (a[mid][1] or not lc)):
            k = mid
            left = mid + 1
        else:
            right = mid
    return k


def covers(a, x):
    """True iff interval ``x`` is a subset of the union of ``a``."""
    k = _find(a, x[0], x[1])
    if k < 0:
        return False
    ihi, ihc = a[k][2], a[k][3]
    return ihi > x[2] or (ihi == x[2] and (ihc or not x[3]))


def contains_point(a, t):
    return covers(a, (t, True, t, True))


def subset(a, b):
    """True iff every member of ``a`` is covered by ``b``."""
    return all(covers(b, x) for x in a)


def dilate_add(a, w):
    return coalesce([iv_add(x, w) for x in a])


def dilate_sub(a, w):
    return coalesce([iv_sub(x, w) for x in a])


def erode_future(a, w):
    """Points ``t`` with ``t + w`` inside some member of ``a``."""
    p, pc, q, qc = w
    out = []
    for jlo, jlc, jhi, jhc in a:
        lo = jlo - p
        lc = (jlc or not pc) and lo != NEG_INF
        if q == POS_INF:
            if jhi != POS_INF:
                continue
            hi, hc = POS_INF, False
        else:
            hi = jhi - q
            hc = (jhc or not qc) and hi != POS_INF
        if _nonempty(lo, lc, hi, hc):
            out.append((lo, lc, hi, hc))
    return coalesce(out)


def erode_past(a, w):
    """Points ``t`` with ``t - w`` inside some member of ``a``."""
    p, pc, q, qc = w
    out = []
    for jlo, jlc, jhi, jhc in a:
        if q == POS_INF:
            if jlo != NEG_INF:
                continue
            lo, lc = NEG_INF, False
        else:
            lo = jlo + q
            lc = (jlc or not qc) and lo != NEG_INF
        hi = jhi + p
        hc = (jhc or not pc) and hi != POS_INF
        if _nonempty(lo, lc, hi, hc):
            out.append((lo, lc, hi, hc))
    return coalesce(out)


def _positive_part(w):
    p, pc, q, qc = w
    if p > 0:
        return w
    if q == 0:
        return None
    return (p, False, q, qc)


def until(a1, a2, w):
    """Points where ``M2 U_w M1`` holds, given the sets ``a1`` of M1 and ``a2`` of M2."""
    out = list(a1) if (w[0] == 0 and w[1]) else []
    wp = _positive_part(w)
    if wp is not None:
        start = 0
        for jlo, jlc, jhi, jhc in a2:
            cap = (NEG_INF, False, jhi, jhi != POS_INF)
            floor = (jlo, jlo != NEG_INF, POS_INF, False)
            # members of a1 ending before jlo cannot reach into this member
            while start < len(a1) and a1[start][2] < jlo:
                start += 1
            for k in range(start, len(a1)):
                x = a1[k]
                if x[0] > jhi:
                    break
                clipped = iv_intersect(x, cap)
                if clipped is None:
                    continue
                r = iv_intersect(iv_sub(clipped, wp), floor)
                if r is not None:
                    out.append(r)
    return coalesce(out)


def since(a1, a2, w):
    """Points where ``M2 S_w M1`` holds, given the sets ``a1`` of M1 and ``a2`` of M2."""
    out = list(a1) if (w[0] == 0 and w[1]) else []
    wp = _positive_part(w)
    if wp is not None:
        start = 0
        for jlo, jlc, jhi, jhc in a2:
            floor = (jlo, jlo != NEG_INF, POS_INF, False)
            cap = (NEG_INF, False, jhi, jhi != POS_INF)
            while start < len(a1) and a1[start][2] < jlo:
                start += 1
            for k in range(start, len(a1)):
                x = a1[k]
                if x[0] > jhi:
                    break
                clipped = iv_intersect(x, floor)
                if clipped is None:
                    continue
                r = iv_intersect(iv_add(clipped, wp), cap)
                if r is not None:
                    out.append(r)
    return coalesce(out)
