"""Pure-Python kernels, used when the compiled extension is unavailable.

Every function here mirrors one in ``_ckernels.pyx`` with the same
signature and bit-identical results (the walker reproduces the same
xoshiro256** streams).  Arrays are numpy; loops run over plain lists.
"""
import math

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TWO_M53 = 1.0 / 9007199254740992.0

NEG_INF = float("-inf")


def _logaddexp(a, b):
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


def tree_index(parent):
    """Depth, subtree size, preorder entry index and preorder node list."""
    par = parent.tolist()
    n = len(par)
    depth = [0] * n
    for i in range(1, n):
        depth[i] = depth[par[i]] + 1
    size = [1] * n
    for i in range(n - 1, 0, -1):
        size[par[i]] += size[i]
    enter = [0] * n
    cursor = [0] * n
    cursor[0] = 1
    order = [0] * n
    for i in range(1, n):
        p = par[i]
        enter[i] = cursor[p]
        cursor[p] += size[i]
        cursor[i] = enter[i] + 1
        order[enter[i]] = i
    return (np.array(depth, dtype=np.int64), np.array(size, dtype=np.int64),
            np.array(enter, dtype=np.int64), np.array(order, dtype=np.int64))


def chain_pass(parent, lam, mu):
    """Log weights, branch ratios rho and the subtree second-moment sums G."""
    par = parent.tolist()
    lam_l = lam.tolist()
    mu_l = mu.tolist()
    n = len(par)
    logw = [0.0] * n
    for i in range(1, n):
        logw[i] = logw[par[i]] + math.log(lam_l[i]) - math.log(mu_l[i])
    rho = [1.0] * n
    child_g = [0.0] * n
    g = [0.0] * n
    for i in range(n - 1, 0, -1):
        g[i] = rho[i] * rho[i] / mu_l[i] + child_g[i]
        ratio = lam_l[i] / mu_l[i]
        p = par[i]
        rho[p] += ratio * rho[i]
        child_g[p] += ratio * g[i]
    return (np.array(logw), np.array(rho), np.array(g), np.array(child_g))


def _sibling_sums(child_ptr, child_idx, weights):
    """out[c] = sum of weights over the siblings of c, from per-parent prefix
    and suffix sums (no cancellation)."""
    ptr = child_ptr.tolist()
    kids = child_idx.tolist()
    w = weights.tolist()
    out = [0.0] * len(w)
    for p in range(len(ptr) - 1):
        lo, hi = ptr[p], ptr[p + 1]
        acc = 0.0
        for k in range(lo, hi):
            out[kids[k]] = acc
            acc += w[kids[k]]
        acc = 0.0
        for k in range(hi - 1, lo - 1, -1):
            out[kids[k]] += acc
            acc += w[kids[k]]
    return out


def complement_pass(parent, child_ptr, child_idx, lam, mu, rho, g, logpi):
    """Log complement masses log pi(I minus B_x) and the log numerator of the
    parent-to-child second moment (side-branch plus path terms)."""
    par = parent.tolist()
    mu_l = mu.tolist()
    lp = logpi.tolist()
    ratio = np.zeros(len(par))
    ratio[1:] = lam[1:] / mu[1:]
    sib_rho = _sibling_sums(child_ptr, child_idx, ratio * rho)
    sib_g = _sibling_sums(child_ptr, child_idx, ratio * g)
    n = len(par)
    lcm = [NEG_INF] * n
    lnum = [NEG_INF] * n
    for i in range(1, n):
        p = par[i]
        lcm[i] = _logaddexp(lcm[p], lp[p] + math.log1p(sib_rho[i]))
        sib = sib_g[i]
        side = lp[p] + math.log(sib) if sib > 0.0 else NEG_INF
        path = 2.0 * lcm[i] - lp[i] - math.log(mu_l[i])
        lnum[i] = _logaddexp(_logaddexp(lnum[p], side), path)
    return np.array(lcm), np.array(lnum)


def subtree_sum(parent, values):
    """acc[x] = sum of values over the branch B_x (leaf-to-root pass)."""
    par = parent.tolist()
    acc = values.tolist()
    for i in range(len(par) - 1, 0, -1):
        acc[par[i]] += acc[i]
    return np.array(acc, dtype=float)


def path_cumsum(parent, values):
    """cum[x] = sum of values over the root path of x (root excluded)."""
    par = parent.tolist()
    v = values.tolist()
    n = len(par)
    cum = [0.0] * n
    for i in range(1, n):
        cum[i] = cum[par[i]] + v[i]
    return np.array(cum)


def path_logcumsum(parent, log_values):
    """Log-domain twin of :func:`path_cumsum`."""
    par = parent.tolist()
    v = log_values.tolist()
    n = len(par)
    cum = [NEG_INF] * n
    for i in range(1, n):
        cum[i] = _logaddexp(cum[par[i]], v[i])
    return np.array(cum)


# --- random streams ---------------------------------------------------------

def _splitmix_next(x):
    x = (x + _GOLDEN) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


def _mix(v):
    return _splitmix_next(v & MASK64)[1]


def stream_state(seed, index):
    """xoshiro256** state for replica ``index`` of master ``seed``."""
    x = _mix(seed) ^ _mix(index ^ 0xD1B54A32D192ED03)
    s = []
    for _ in range(4):
        x, z = _splitmix_next(x)
        s.append(z)
    if not any(s):
        s[0] = 1
    return s


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


def _next(s):
    result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
    t = (s[1] << 17) & MASK64
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


def uniforms(seed, index, count):
    s = stream_state(seed, index)
    return [(_next(s) >> 11) * _TWO_M53 for _ in range(count)]


def walk(offsets, cum, dest, source, target, seed, start, stop, max_steps,
         mode, out):
    """Run replicas ``start..stop-1`` and write step counts into ``out``.

    mode 0: steps until the walk is at ``target`` (t >= 1).
    mode 1: steps since the last visit to ``source`` when ``target`` is hit.
    Truncated replicas are written as -1.
    """
    off = offsets.tolist()
    cm = cum.tolist()
    ds = dest.tolist()
    for rep in range(start, stop):
        s = stream_state(seed, rep)
        x = source
        t = 0
        last = 0
        hit = False
        while t < max_steps:
            u = (_next(s) >> 11) * _TWO_M53
            j = off[x]
            end = off[x + 1] - 1
            while j < end and u >= cm[j]:
                j += 1
            x = ds[j]
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
