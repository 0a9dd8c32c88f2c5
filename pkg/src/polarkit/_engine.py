"""JIT-compiled decoder cores.

Everything here operates on flat numpy arrays so the same code compiles
for int64 (quantized) and float64 (unbounded) LLR frames. Saturation
bounds are passed as scalars of the frame dtype; the unbounded mode uses
+/-inf so the clips become no-ops.

Array conventions shared by the kernels:
  * depth 0 is the channel side (N values), depth n the decision side,
  * ``llr[d]`` / ``ucap[d]`` rows hold node values laid out by leaf index,
  * bit estimates propagate back up in the codeword domain, so the root
    row of ``ucap`` ends up holding the re-encoded codeword estimate.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def encode_inplace(x):
    """In-place butterfly transform x <- x * F^(kron n) over GF(2)."""
    N = x.shape[0]
    h = 1
    while h < N:
        j = 0
        while j < N:
            for t in range(h):
                x[j + t] ^= x[j + h + t]
            j += 2 * h
        h <<= 1


@njit(cache=True, nogil=True)
def crc_remainder(bits, poly, length):
    """Bit-serial CRC register over the message, index 0 first."""
    reg = np.uint64(0)
    top = np.uint64(1) << np.uint64(length - 1)
    mask = (np.uint64(1) << np.uint64(length)) - np.uint64(1)
    p = np.uint64(poly)
    for i in range(bits.shape[0]):
        msb = np.uint64(1) if reg & top else np.uint64(0)
        reg = (reg << np.uint64(1)) & mask
        if msb != np.uint64(bits[i]):
            reg ^= p
    return reg


# ---------------------------------------------------------------------------
# successive cancellation, single path
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def sc_decode(chan, frozen, n, b, lo, hi, flip_index, u_out, mag_out, x_out):
    """Single-pass SC decode with the first-information-bit skip.

    ``flip_index`` inverts the hard decision at that leaf (-1 disables),
    which is all the retry machinery the flip decoder needs. Decision
    magnitudes are recorded for every visited leaf; ``x_out`` receives the
    re-encoded codeword estimate produced by the final combine.
    """
    N = chan.shape[0]
    llr = np.empty((n + 1, N), dtype=chan.dtype)
    ucap = np.zeros((n + 1, N), dtype=np.uint8)
    state = np.zeros(2 * N, dtype=np.uint8)
    for j in range(N):
        llr[0, j] = chan[j]
        u_out[j] = 0
        mag_out[j] = 0
    depth = 0
    node = 0
    while True:
        if depth == n:
            i = node
            dl = llr[n, i]
            mag_out[i] = -dl if dl < 0 else dl
            if frozen[i]:
                bit = np.uint8(0)
            else:
                bit = np.uint8(1) if dl < 0 else np.uint8(0)
                if i == flip_index:
                    bit ^= np.uint8(1)
            u_out[i] = bit
            ucap[n, i] = bit
            node >>= 1
            depth -= 1
            continue
        w = N >> depth
        base = node * w
        half = w >> 1
        p = (1 << depth) - 1 + node
        st = state[p]
        if st == 0:
            if base + half <= b:
                # left subtree lies before the first information bit:
                # its estimates are all zero, no LLR work needed
                for j in range(base, base + half):
                    ucap[depth + 1, j] = 0
                state[p] = 1
                continue
            for j in range(half):
                a = llr[depth, base + j]
                c = llr[depth, base + half + j]
                m = min(abs(a), abs(c))
                if m > hi:
                    m = hi
                llr[depth + 1, base + j] = -m if (a < 0) != (c < 0) else m
            state[p] = 1
            node = 2 * node
            depth += 1
            continue
        if st == 1:
            for j in range(half):
                a = llr[depth, base + j]
                c = llr[depth, base + half + j]
                r = c - a if ucap[depth + 1, base + j] else c + a
                if r < lo:
                    r = lo
                elif r > hi:
                    r = hi
                llr[depth + 1, base + half + j] = r
            state[p] = 2
            node = 2 * node + 1
            depth += 1
            continue
        # both children done: combine partial sums
        for j in range(half):
            bl = ucap[depth + 1, base + j]
            br = ucap[depth + 1, base + half + j]
            ucap[depth, base + j] = bl ^ br
            ucap[depth, base + half + j] = br
        if depth == 0:
            break
        node >>= 1
        depth -= 1
    for j in range(N):
        x_out[j] = ucap[0, j]


# ---------------------------------------------------------------------------
# list decoding with per-depth copy-on-write storage
# ---------------------------------------------------------------------------
#
# Per path and depth d the pools hold one slot:
#   llr slot, size N >> d:        values of the path's active node,
#   ucap slot, size N >> (d-1):   the [beta_left | beta_right] pair of the
#                                 active node's children (d >= 1).
# Paths reference slots through pointer tables; slots copy on first write
# while shared, which mirrors an eager per-path deep copy observably.


@njit(cache=True, nogil=True, inline="always")
def cow_write(buf, ptr, ref, base, size, nslots, path, depth, preserve):
    """Return the flat offset of a writable slot for (path, depth),
    duplicating a shared slot first. ``preserve`` copies old contents
    into the duplicate (needed for partial writes)."""
    s = ptr[path, depth]
    if ref[depth, s] > 1:
        s2 = -1
        for t in range(nslots):
            if ref[depth, t] == 0:
                s2 = t
                break
        if s2 < 0:
            raise RuntimeError("state pool exhausted")
        ref[depth, s] -= 1
        ref[depth, s2] = 1
        ptr[path, depth] = s2
        off_new = base[depth] + s2 * size[depth]
        if preserve:
            off_old = base[depth] + s * size[depth]
            for j in range(size[depth]):
                buf[off_new + j] = buf[off_old + j]
        return off_new
    return base[depth] + s * size[depth]


@njit(cache=True, nogil=True, inline="always")
def _propagate(l, i, N, n, buf_c, ptr_c, ref_c, base_c, size_c, nslots):
    """Fold completed right-child estimates upward after leaf ``i``."""
    d = n
    node = i
    while (node & 1) == 1 and d >= 2:
        sz = N >> d
        offs = base_c[d] + ptr_c[l, d] * size_c[d]
        offd = cow_write(buf_c, ptr_c, ref_c, base_c, size_c, nslots, l, d - 1, True)
        parent = node >> 1
        pos = (parent & 1) * (N >> (d - 1))
        for j in range(sz):
            bl = buf_c[offs + j]
            br = buf_c[offs + sz + j]
            buf_c[offd + pos + j] = bl ^ br
            buf_c[offd + pos + sz + j] = br
        node = parent
        d -= 1


@njit(cache=True, nogil=True)
def scl_decode(chan, frozen, n, b, L, lo, hi, pm_cap, x_paths, pm_out):
    """List decode; returns the number of surviving paths.

    ``x_paths`` receives each survivor's codeword-domain estimate (the
    u-trajectory is its polar transform, left to the caller). Survivors
    come back in the canonical order of the final pruning step (metric,
    then parent id, then bit value); trailing frozen updates can change
    metrics afterwards, so callers re-sort by ``pm_out`` stably.
    """
    N = chan.shape[0]
    nslots = 2 * L + 2

    size_l = np.empty(n + 1, np.int64)
    base_l = np.empty(n + 1, np.int64)
    size_c = np.empty(n + 1, np.int64)
    base_c = np.empty(n + 1, np.int64)
    tot_l = 0
    tot_c = 0
    for d in range(n + 1):
        size_l[d] = N >> d
        base_l[d] = tot_l
        tot_l += nslots * size_l[d]
        size_c[d] = 0 if d == 0 else N >> (d - 1)
        base_c[d] = tot_c
        tot_c += nslots * size_c[d]

    buf_l = np.empty(tot_l, dtype=chan.dtype)
    buf_c = np.zeros(tot_c, dtype=np.uint8)
    ptr_l = np.zeros((L, n + 1), np.int32)
    ptr_c = np.zeros((L, n + 1), np.int32)
    ref_l = np.zeros((n + 1, nslots), np.int32)
    ref_c = np.zeros((n + 1, nslots), np.int32)

    for j in range(N):
        buf_l[base_l[0] + j] = chan[j]
    ref_l[0, 0] = 1 << 30  # channel row is shared read-only forever
    for d in range(1, n + 1):
        ref_l[d, 0] = 1
        ref_c[d, 0] = 1

    pm = np.zeros(L, dtype=chan.dtype)
    active = 1

    # scratch for fork bookkeeping
    cm = np.empty(2 * L, dtype=chan.dtype)
    cp = np.empty(2 * L, np.int32)
    cb = np.empty(2 * L, np.uint8)
    ptr_tmp_l = np.empty((L, n + 1), np.int32)
    ptr_tmp_c = np.empty((L, n + 1), np.int32)
    pm_tmp = np.empty(L, dtype=chan.dtype)

    # initial descent straight to the first information bit (path 0);
    # every skipped left sibling contributes all-zero estimates
    for d in range(1, n + 1):
        half = size_l[d]
        off_p = base_l[d - 1] + ptr_l[0, d - 1] * size_l[d - 1]
        off = cow_write(buf_l, ptr_l, ref_l, base_l, size_l, nslots, 0, d, False)
        if (b >> (n - d)) & 1:
            offc = cow_write(buf_c, ptr_c, ref_c, base_c, size_c, nslots, 0, d, True)
            for j in range(half):
                buf_c[offc + j] = 0
            for j in range(half):
                r = buf_l[off_p + half + j] + buf_l[off_p + j]
                if r < lo:
                    r = lo
                elif r > hi:
                    r = hi
                buf_l[off + j] = r
        else:
            for j in range(half):
                a = buf_l[off_p + j]
                c = buf_l[off_p + half + j]
                m = min(abs(a), abs(c))
                if m > hi:
                    m = hi
                buf_l[off + j] = -m if (a < 0) != (c < 0) else m

    for i in range(b, N):
        if i > b:
            k = 0
            while (i >> k) & 1 == 0:
                k += 1
            dd = n - k
            if k == 0:
                # odd leaf: single-value g step, the common case
                for l in range(active):
                    off_p = base_l[n - 1] + ptr_l[l, n - 1] * 2
                    offc = base_c[n] + ptr_c[l, n] * 2
                    a = buf_l[off_p]
                    c = buf_l[off_p + 1]
                    r = c - a if buf_c[offc] else c + a
                    if r < lo:
                        r = lo
                    elif r > hi:
                        r = hi
                    off = cow_write(buf_l, ptr_l, ref_l, base_l, size_l, nslots, l, n, False)
                    buf_l[off] = r
            else:
                for l in range(active):
                    half = size_l[dd]
                    off_p = base_l[dd - 1] + ptr_l[l, dd - 1] * size_l[dd - 1]
                    offc = base_c[dd] + ptr_c[l, dd] * size_c[dd]
                    off = cow_write(buf_l, ptr_l, ref_l, base_l, size_l, nslots, l, dd, False)
                    for j in range(half):
                        a = buf_l[off_p + j]
                        c = buf_l[off_p + half + j]
                        r = c - a if buf_c[offc + j] else c + a
                        if r < lo:
                            r = lo
                        elif r > hi:
                            r = hi
                        buf_l[off + j] = r
                    for dz in range(dd + 1, n + 1):
                        h2 = size_l[dz]
                        off_p2 = base_l[dz - 1] + ptr_l[l, dz - 1] * size_l[dz - 1]
                        off2 = cow_write(buf_l, ptr_l, ref_l, base_l, size_l, nslots, l, dz, False)
                        for j in range(h2):
                            a = buf_l[off_p2 + j]
                            c = buf_l[off_p2 + h2 + j]
                            m = min(abs(a), abs(c))
                            if m > hi:
                                m = hi
                            buf_l[off2 + j] = -m if (a < 0) != (c < 0) else m

        if frozen[i]:
            for l in range(active):
                dl = buf_l[base_l[n] + ptr_l[l, n] * size_l[n]]
                if dl < 0:
                    r = pm[l] - dl
                    pm[l] = pm_cap if r > pm_cap else r
                offc = cow_write(buf_c, ptr_c, ref_c, base_c, size_c, nslots, l, n, True)
                buf_c[offc + (i & 1)] = 0
                _propagate(l, i, N, n, buf_c, ptr_c, ref_c, base_c, size_c, nslots)
        else:
            # candidates are ordered by the exact tentative metric and
            # saturate only when stored, so a capped metric cannot mask
            # the sign information of the decision LLR
            nc = 2 * active
            for l in range(active):
                dl = buf_l[base_l[n] + ptr_l[l, n] * size_l[n]]
                mag = -dl if dl < 0 else dl
                bumped = pm[l] + mag
                if dl < 0:
                    m0, m1 = bumped, pm[l]
                else:
                    m0, m1 = pm[l], bumped
                cm[2 * l] = m0
                cp[2 * l] = l
                cb[2 * l] = 0
                cm[2 * l + 1] = m1
                cp[2 * l + 1] = l
                cb[2 * l + 1] = 1
            # insertion sort by (metric, parent, bit)
            for a2 in range(1, nc):
                km = cm[a2]
                kp = cp[a2]
                kb = cb[a2]
                t = a2 - 1
                while t >= 0 and (
                    cm[t] > km or (cm[t] == km and (cp[t] > kp or (cp[t] == kp and cb[t] > kb)))
                ):
                    cm[t + 1] = cm[t]
                    cp[t + 1] = cp[t]
                    cb[t + 1] = cb[t]
                    t -= 1
                cm[t + 1] = km
                cp[t + 1] = kp
                cb[t + 1] = kb
            nsur = nc if nc < L else L

            identity = nsur == active
            if identity:
                for l2 in range(nsur):
                    if cp[l2] != l2:
                        identity = False
                        break
            if identity:
                # survivors keep their slots; only the metrics move
                for l2 in range(nsur):
                    pm[l2] = cm[l2] if cm[l2] < pm_cap else pm_cap
            else:
                for l2 in range(nsur):
                    par = cp[l2]
                    for d in range(n + 1):
                        ptr_tmp_l[l2, d] = ptr_l[par, d]
                        ptr_tmp_c[l2, d] = ptr_c[par, d]
                    pm_tmp[l2] = cm[l2] if cm[l2] < pm_cap else pm_cap
                for l2 in range(active):
                    for d in range(1, n + 1):
                        ref_l[d, ptr_l[l2, d]] -= 1
                        ref_c[d, ptr_c[l2, d]] -= 1
                for l2 in range(nsur):
                    for d in range(n + 1):
                        ptr_l[l2, d] = ptr_tmp_l[l2, d]
                        ptr_c[l2, d] = ptr_tmp_c[l2, d]
                    for d in range(1, n + 1):
                        ref_l[d, ptr_l[l2, d]] += 1
                        ref_c[d, ptr_c[l2, d]] += 1
                    pm[l2] = pm_tmp[l2]
                active = nsur

            for l2 in range(active):
                offc = cow_write(buf_c, ptr_c, ref_c, base_c, size_c, nslots, l2, n, True)
                buf_c[offc + (i & 1)] = cb[l2]
                _propagate(l2, i, N, n, buf_c, ptr_c, ref_c, base_c, size_c, nslots)

    half = N >> 1
    for l in range(active):
        offc = base_c[1] + ptr_c[l, 1] * size_c[1]
        for j in range(half):
            bl = buf_c[offc + j]
            br = buf_c[offc + half + j]
            x_paths[l, j] = bl ^ br
            x_paths[l, half + j] = br
        pm_out[l] = pm[l]
    return active


# ---------------------------------------------------------------------------
# fast simplified successive cancellation over a pruned node tree
# ---------------------------------------------------------------------------

NODE_BRANCH = 0
NODE_RATE0 = 1
NODE_RATE1 = 2
NODE_REP = 3
NODE_SPC = 4


@njit(cache=True, nogil=True)
def fast_ssc_decode(chan, kinds, n, lo, hi, x_out):
    """Execute a pruned decode tree; ``kinds`` indexes heap positions
    2**d - 1 + v. Writes the codeword-domain estimate into ``x_out``."""
    N = chan.shape[0]
    llr = np.empty((n + 1, N), dtype=chan.dtype)
    ucap = np.zeros((n + 1, N), dtype=np.uint8)
    state = np.zeros(2 * N, dtype=np.uint8)
    for j in range(N):
        llr[0, j] = chan[j]
    depth = 0
    node = 0
    while True:
        w = N >> depth
        base = node * w
        p = (1 << depth) - 1 + node
        kind = kinds[p]
        if kind != NODE_BRANCH:
            if kind == NODE_RATE0:
                for j in range(base, base + w):
                    ucap[depth, j] = 0
            elif kind == NODE_RATE1:
                for j in range(base, base + w):
                    ucap[depth, j] = np.uint8(1) if llr[depth, j] < 0 else np.uint8(0)
            elif kind == NODE_REP:
                s = llr[depth, base]
                for j in range(base + 1, base + w):
                    s += llr[depth, j]
                bit = np.uint8(1) if s < 0 else np.uint8(0)
                for j in range(base, base + w):
                    ucap[depth, j] = bit
            else:  # NODE_SPC
                parity = np.uint8(0)
                jmin = base
                best = abs(llr[depth, base])
                for j in range(base, base + w):
                    v = llr[depth, j]
                    bit = np.uint8(1) if v < 0 else np.uint8(0)
                    ucap[depth, j] = bit
                    parity ^= bit
                    mag = -v if v < 0 else v
                    if mag < best:
                        best = mag
                        jmin = j
                if parity:
                    ucap[depth, jmin] ^= np.uint8(1)
            if depth == 0:
                break
            node >>= 1
            depth -= 1
            continue
        half = w >> 1
        st = state[p]
        if st == 0:
            for j in range(half):
                a = llr[depth, base + j]
                c = llr[depth, base + half + j]
                m = min(abs(a), abs(c))
                if m > hi:
                    m = hi
                llr[depth + 1, base + j] = -m if (a < 0) != (c < 0) else m
            state[p] = 1
            node = 2 * node
            depth += 1
        elif st == 1:
            for j in range(half):
                a = llr[depth, base + j]
                c = llr[depth, base + half + j]
                r = c - a if ucap[depth + 1, base + j] else c + a
                if r < lo:
                    r = lo
                elif r > hi:
                    r = hi
                llr[depth + 1, base + half + j] = r
            state[p] = 2
            node = 2 * node + 1
            depth += 1
        else:
            for j in range(half):
                bl = ucap[depth + 1, base + j]
                br = ucap[depth + 1, base + half + j]
                ucap[depth, base + j] = bl ^ br
                ucap[depth, base + half + j] = br
            if depth == 0:
                break
            node >>= 1
            depth -= 1
    for j in range(N):
        x_out[j] = ucap[0, j]
