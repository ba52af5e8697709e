"""numba kernels for cascades, RR-set sampling and greedy max coverage.

Random draws use the keyed SplitMix64 scheme of :mod:`imbench.rng`:
``uniform(key, counter)``. Counters are arc ids for IC coin flips, node ids
for LT thresholds / live-edge choices, and ``ROOT_COUNTER`` for the root
of an RR set. Because every draw is keyed rather than sequential, a
simulation round is a fixed live-edge world regardless of which seeds are
simulated in it.
"""
import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0
ROOT_COUNTER = 1 << 62


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def derive_key(key, index):
    return mix64(key ^ mix64(np.uint64(index) * _GOLDEN + _MIX2))


@njit(cache=True)
def uniform(key, counter):
    x = mix64(key + (np.uint64(counter) + _ONE) * _GOLDEN)
    return np.float64(x >> _S11) * _INV53


# --------------------------------------------------------------------------
# forward cascades


@njit(cache=True)
def _ic_once(out_ptr, out_dst, out_p, seeds, wkey, mark, stamp, queue):
    tail = 0
    for s in seeds:
        if mark[s] != stamp:
            mark[s] = stamp
            queue[tail] = s
            tail += 1
    head = 0
    while head < tail:
        u = queue[head]
        head += 1
        for e in range(out_ptr[u], out_ptr[u + 1]):
            v = out_dst[e]
            if mark[v] == stamp:
                continue
            p = out_p[e]
            if p >= 1.0 or (p > 0.0 and uniform(wkey, e) < p):
                mark[v] = stamp
                queue[tail] = v
                tail += 1
    return tail


@njit(cache=True)
def _lt_once(out_ptr, out_dst, out_p, seeds, wkey, mark, stamp, acc, acc_stamp, queue):
    # threshold semantics: v activates once its active in-weight reaches a
    # threshold drawn uniformly from (0, 1]
    tail = 0
    for s in seeds:
        if mark[s] != stamp:
            mark[s] = stamp
            queue[tail] = s
            tail += 1
    head = 0
    while head < tail:
        u = queue[head]
        head += 1
        for e in range(out_ptr[u], out_ptr[u + 1]):
            v = out_dst[e]
            if mark[v] == stamp:
                continue
            if acc_stamp[v] != stamp:
                acc_stamp[v] = stamp
                acc[v] = 0.0
            acc[v] += out_p[e]
            if acc[v] >= 1.0 - uniform(wkey, v):
                mark[v] = stamp
                queue[tail] = v
                tail += 1
    return tail


@njit(cache=True)
def _live_in_arc(v, in_ptr, in_arc, in_p, wkey):
    """Arc id of v's live in-arc in world ``wkey``, or -1."""
    u = uniform(wkey, v)
    cum = 0.0
    for j in range(in_ptr[v], in_ptr[v + 1]):
        cum += in_p[j]
        if u < cum:
            return in_arc[j]
    return -1


@njit(cache=True)
def _lt_live_once(out_ptr, out_dst, in_ptr, in_arc, in_p, seeds, wkey, mark, stamp,
                  choice, choice_stamp, queue):
    # live-edge semantics: each node keeps at most one in-arc
    tail = 0
    for s in seeds:
        if mark[s] != stamp:
            mark[s] = stamp
            queue[tail] = s
            tail += 1
    head = 0
    while head < tail:
        u = queue[head]
        head += 1
        for e in range(out_ptr[u], out_ptr[u + 1]):
            v = out_dst[e]
            if mark[v] == stamp:
                continue
            if choice_stamp[v] != stamp:
                choice_stamp[v] = stamp
                choice[v] = _live_in_arc(v, in_ptr, in_arc, in_p, wkey)
            if choice[v] == e:
                mark[v] = stamp
                queue[tail] = v
                tail += 1
    return tail


@njit(cache=True, nogil=True)
def cascade_counts(model, live_edge, n, out_ptr, out_dst, out_p, in_ptr, in_arc, in_p,
                   seeds, key, first_round, rounds):
    """Activated-node counts for rounds ``first_round .. first_round+rounds-1``.

    ``model`` is 0 for IC and 1 for LT; ``live_edge`` selects the live-edge
    LT semantics instead of thresholds.
    """
    counts = np.empty(rounds, dtype=np.int64)
    mark = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    acc = np.zeros(n, dtype=np.float64)
    aux = np.zeros(n, dtype=np.int64)
    choice = np.full(n, -1, dtype=np.int64)
    for r in range(rounds):
        stamp = r + 1
        wkey = derive_key(key, first_round + r)
        if model == 0:
            counts[r] = _ic_once(out_ptr, out_dst, out_p, seeds, wkey, mark, stamp, queue)
        elif live_edge:
            counts[r] = _lt_live_once(out_ptr, out_dst, in_ptr, in_arc, in_p, seeds, wkey,
                                      mark, stamp, choice, aux, queue)
        else:
            counts[r] = _lt_once(out_ptr, out_dst, out_p, seeds, wkey, mark, stamp, acc, aux, queue)
    return counts


# --------------------------------------------------------------------------
# reverse-reachable sets


@njit(cache=True)
def _rr_ic(root, in_ptr, in_src, in_arc, in_p, skey, mark, stamp, out, pos):
    mark[root] = stamp
    out[pos] = root
    head = pos
    tail = pos + 1
    while head < tail:
        v = out[head]
        head += 1
        for j in range(in_ptr[v], in_ptr[v + 1]):
            u = in_src[j]
            if mark[u] == stamp:
                continue
            p = in_p[j]
            if p >= 1.0 or (p > 0.0 and uniform(skey, in_arc[j]) < p):
                mark[u] = stamp
                out[tail] = u
                tail += 1
    return tail - pos


@njit(cache=True)
def _rr_lt(root, in_ptr, in_src, in_p, skey, mark, stamp, out, pos):
    mark[root] = stamp
    out[pos] = root
    size = 1
    v = root
    while True:
        u = uniform(skey, v)
        cum = 0.0
        nxt = -1
        for j in range(in_ptr[v], in_ptr[v + 1]):
            cum += in_p[j]
            if u < cum:
                nxt = in_src[j]
                break
        if nxt < 0 or mark[nxt] == stamp:
            break
        mark[nxt] = stamp
        out[pos + size] = nxt
        size += 1
        v = nxt
    return size


@njit(cache=True)
def _rr_one(model, n, in_ptr, in_src, in_arc, in_p, skey, mark, stamp, out, pos):
    root = np.int64(uniform(skey, ROOT_COUNTER) * n)
    if root >= n:
        root = n - 1
    if model == 0:
        return _rr_ic(root, in_ptr, in_src, in_arc, in_p, skey, mark, stamp, out, pos)
    return _rr_lt(root, in_ptr, in_src, in_p, skey, mark, stamp, out, pos)


@njit(cache=True)
def rr_sizes(model, n, in_ptr, in_src, in_arc, in_p, key, start, count):
    sizes = np.empty(count, dtype=np.int64)
    mark = np.zeros(n, dtype=np.int64)
    scratch = np.empty(n, dtype=np.int32)
    for i in range(count):
        skey = derive_key(key, start + i)
        sizes[i] = _rr_one(model, n, in_ptr, in_src, in_arc, in_p, skey, mark, i + 1, scratch, 0)
    return sizes


@njit(cache=True)
def rr_fill(model, n, in_ptr, in_src, in_arc, in_p, key, start, ptr):
    count = len(ptr) - 1
    nodes = np.empty(ptr[count], dtype=np.int32)
    mark = np.zeros(n, dtype=np.int64)
    for i in range(count):
        skey = derive_key(key, start + i)
        _rr_one(model, n, in_ptr, in_src, in_arc, in_p, skey, mark, i + 1, nodes, ptr[i])
    return nodes


# --------------------------------------------------------------------------
# greedy maximum coverage


@njit(cache=True)
def max_coverage(ptr, nodes, inv_ptr, inv, n, k):
    """Greedy cover; ties go to the lowest node id.

    Returns (chosen ids, newly covered count per pick, total covered).
    """
    theta = len(ptr) - 1
    deg = np.empty(n, dtype=np.int64)
    for v in range(n):
        deg[v] = inv_ptr[v + 1] - inv_ptr[v]
    covered = np.zeros(theta, dtype=np.bool_)
    selected = np.zeros(n, dtype=np.bool_)
    chosen = np.empty(k, dtype=np.int64)
    gains = np.empty(k, dtype=np.int64)
    total = 0
    for i in range(k):
        best = -1
        best_val = -1
        for v in range(n):
            if not selected[v] and deg[v] > best_val:
                best = v
                best_val = deg[v]
        chosen[i] = best
        gains[i] = best_val
        selected[best] = True
        total += best_val
        for j in range(inv_ptr[best], inv_ptr[best + 1]):
            s = inv[j]
            if covered[s]:
                continue
            covered[s] = True
            for t in range(ptr[s], ptr[s + 1]):
                deg[nodes[t]] -= 1
    return chosen, gains, total


@njit(cache=True)
def coverage_fraction(ptr, nodes, n, seeds):
    """Fraction of sets hit by ``seeds``."""
    theta = len(ptr) - 1
    if theta == 0:
        return 0.0
    is_seed = np.zeros(n, dtype=np.bool_)
    for s in seeds:
        is_seed[s] = True
    hit = 0
    for i in range(theta):
        for t in range(ptr[i], ptr[i + 1]):
            if is_seed[nodes[t]]:
                hit += 1
                break
    return hit / theta
