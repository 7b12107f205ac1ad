"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The two inner loops that dominate runtime are (a) the O(n^2) pairwise
log|phi(z)-phi(w)| average over offset torus grids and (b) the dynamically
truncated Hauptmodul product evaluated at thousands of q-points, some of
them exponentially close to the unit circle.  Both are compiled with
numba's @njit when available; setting HOLOBOUND_BACKEND=numpy selects the
vectorized fallback (the benchmark subcommand compares the two).

All values travel in log-polar form (log-magnitude, phase) so that maps of
magnitude far beyond 1e300 never overflow.
"""

from __future__ import annotations

import math
import os

import numpy as np

_backend = None


def backend() -> str:
    """Active kernel backend: 'numba' unless HOLOBOUND_BACKEND=numpy (or
    numba is unavailable)."""
    global _backend
    if _backend is None:
        choice = os.environ.get("HOLOBOUND_BACKEND", "numba").strip().lower()
        if choice not in ("numba", "numpy"):
            choice = "numba"
        if choice == "numba":
            try:
                import numba  # noqa: F401
            except ImportError:
                choice = "numpy"
        _backend = choice
    return _backend


def set_backend(name: str | None):
    """Override the backend (None re-reads the environment)."""
    global _backend
    if name is not None and name not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy'")
    _backend = name


# ----------------------------------------------------------- numpy kernels


def _pairwise_mean_numpy(la, pa, lb, pb, block=128):
    """Mean over all pairs (i, j) of log|e^(la_i + i pa_i) - e^(lb_j + i pb_j)|.

    Returns (mean, nonfinite_count); accumulation is blocked over rows in
    fixed order so results are reproducible for a given grid size.
    """
    n1 = la.shape[0]
    ejb = np.exp(1j * pb)
    total = 0.0
    bad = 0
    for start in range(0, n1, block):
        sl = slice(start, min(start + block, n1))
        laa = la[sl][:, None]
        paa = pa[sl][:, None]
        m = np.maximum(laa, lb[None, :])
        diff = np.exp(laa - m) * np.exp(1j * paa) - np.exp(lb[None, :] - m) * ejb[None, :]
        vals = m + np.log(np.abs(diff))
        bad += int(np.count_nonzero(~np.isfinite(vals)))
        total += float(np.add.reduce(np.add.reduce(vals, axis=1), axis=0))
    return total / (n1 * lb.shape[0]), bad


def _hauptmodul_logpolar_numpy(q, tol=1e-16, max_terms=200_000_000):
    """(log|x(q)|, arg x(q)) for x(q) = q prod (1+q^n)^24, elementwise.

    The per-point truncation depth follows from the geometric tail bound
    24|q|^(n+1)/(1-|q|) < tol; points are sorted by required depth and the
    powers q^k are generated in vectorized blocks over the shrinking active
    set, so exponentially-close-to-the-circle points cost vector ops rather
    than a Python loop per term.
    """
    q = np.asarray(q, dtype=np.complex128).ravel()
    aq = np.abs(q)
    if np.any(aq >= 1.0):
        raise ValueError("q-point on or outside the unit circle")
    logabs = np.log(aq)
    phase = np.angle(q)
    logq = np.log(q)  # principal branch; powers via exp(k log q)
    with np.errstate(divide="ignore"):
        n_req = np.log(tol * (1.0 - aq) / 24.0) / np.log(aq)
    n_req = np.minimum(np.ceil(np.maximum(n_req, 1.0)), float(max_terms)).astype(
        np.int64
    )
    order = np.argsort(-n_req)  # deepest first; active set is a prefix
    depth_sorted = n_req[order]
    budget = 1 << 22
    k = 1
    ncount = q.shape[0]
    while ncount > 0 and k <= int(depth_sorted[0]):
        # shrink the active prefix to points still needing terms >= k
        while ncount > 0 and depth_sorted[ncount - 1] < k:
            ncount -= 1
        if ncount == 0:
            break
        kchunk = max(1, budget // ncount)
        kk = np.arange(k, k + kchunk, dtype=np.float64)[:, None]
        idx = order[:ncount]
        p = np.exp(kk * logq[idx][None, :])
        one_p = 1.0 + p
        # points whose depth ends inside this block receive a few extra
        # terms of the convergent tail; harmless and cheaper than masking
        logabs[idx] += 24.0 * np.log(np.abs(one_p)).sum(axis=0)
        phase[idx] += 24.0 * np.angle(one_p).sum(axis=0)
        k += kchunk
    return logabs, phase


# ----------------------------------------------------------- numba kernels

try:
    from numba import njit

    @njit(cache=True, fastmath=False)
    def _pairwise_mean_numba(la, pa, lb, pb):  # pragma: no cover - compiled
        n1 = la.shape[0]
        n2 = lb.shape[0]
        total = 0.0
        bad = 0
        for i in range(n1):
            row = 0.0
            li = la[i]
            ci = math.cos(pa[i])
            si = math.sin(pa[i])
            for j in range(n2):
                m = li if li > lb[j] else lb[j]
                e1 = math.exp(li - m)
                e2 = math.exp(lb[j] - m)
                re = e1 * ci - e2 * math.cos(pb[j])
                im = e1 * si - e2 * math.sin(pb[j])
                r2 = re * re + im * im
                if r2 > 0.0:
                    v = m + 0.5 * math.log(r2)
                else:
                    v = -math.inf
                if not math.isfinite(v):
                    bad += 1
                else:
                    row += v
            total += row
        return total / (n1 * n2), bad

    @njit(cache=True, fastmath=False)
    def _hauptmodul_logpolar_numba(q, tol, max_terms):  # pragma: no cover
        n = q.shape[0]
        logabs = np.empty(n, dtype=np.float64)
        phase = np.empty(n, dtype=np.float64)
        for i in range(n):
            qi = q[i]
            aq = abs(qi)
            la = math.log(aq)
            ph = math.atan2(qi.imag, qi.real)
            p = qi
            k = 1
            while k <= max_terms:
                one_p = 1.0 + p
                la += 24.0 * math.log(abs(one_p))
                ph += 24.0 * math.atan2(one_p.imag, one_p.real)
                p *= qi
                tail = 24.0 * aq ** (k + 1) / (1.0 - aq)
                scale = abs(la)
                if scale < 1.0:
                    scale = 1.0
                if tail < tol * scale:
                    break
                k += 1
            logabs[i] = la
            phase[i] = ph
        return logabs, phase

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def pairwise_log_abs_diff_mean(la, pa, lb, pb):
    """Dispatching wrapper; returns (mean, nonfinite_count)."""
    la = np.ascontiguousarray(la, dtype=np.float64)
    pa = np.ascontiguousarray(pa, dtype=np.float64)
    lb = np.ascontiguousarray(lb, dtype=np.float64)
    pb = np.ascontiguousarray(pb, dtype=np.float64)
    if backend() == "numba" and _HAVE_NUMBA:
        return _pairwise_mean_numba(la, pa, lb, pb)
    return _pairwise_mean_numpy(la, pa, lb, pb)


def _log_delta(tau: complex) -> complex:
    """log Delta(tau) for Delta = q prod (1-q^n)^24, via fundamental-domain
    reduction with Delta(-1/tau) = tau^12 Delta(tau)."""
    acc = 0.0 + 0.0j
    for _ in range(200):
        tau -= round(tau.real)
        if abs(tau) >= 1.0:
            break
        acc -= 12.0 * np.log(complex(tau))
        tau = -1.0 / tau
    qred = np.exp(2j * np.pi * tau)
    series = 0.0 + 0.0j
    p = qred
    for _ in range(64):
        series += 24.0 * np.log(1.0 - p)
        if abs(p) < 1e-18:
            break
        p *= qred
    return acc + 2j * np.pi * tau + series


def _hauptmodul_logpolar_reduced(q):
    """(log|x|, arg x) for x = Delta(2 tau)/Delta(tau); exact for any |q| < 1,
    cost independent of the distance to the unit circle."""
    out_l = np.empty(q.shape, dtype=np.float64)
    out_p = np.empty(q.shape, dtype=np.float64)
    for i, qi in enumerate(q):
        tau = np.log(complex(qi)) / (2j * np.pi)
        val = _log_delta(2.0 * tau) - _log_delta(tau)
        out_l[i] = val.real
        out_p[i] = val.imag
    return out_l, out_p


_REDUCTION_CUTOFF = 0.99


def hauptmodul_logpolar(q, tol=1e-16, max_terms=200_000_000):
    """Dispatching wrapper for the Hauptmodul product in log-polar form.

    Points with |q| above the reduction cutoff are evaluated through the
    modular transformation instead of the raw product, whose term count
    diverges like 1/(1-|q|) there.
    """
    q = np.ascontiguousarray(q, dtype=np.complex128).ravel()
    aq = np.abs(q)
    near = aq > _REDUCTION_CUTOFF
    if not near.any():
        if backend() == "numba" and _HAVE_NUMBA:
            return _hauptmodul_logpolar_numba(q, tol, max_terms)
        return _hauptmodul_logpolar_numpy(q, tol, max_terms)
    la = np.empty(q.shape, dtype=np.float64)
    ph = np.empty(q.shape, dtype=np.float64)
    far = ~near
    if far.any():
        if backend() == "numba" and _HAVE_NUMBA:
            lf, pf = _hauptmodul_logpolar_numba(q[far], tol, max_terms)
        else:
            lf, pf = _hauptmodul_logpolar_numpy(q[far], tol, max_terms)
        la[far] = lf
        ph[far] = pf
    ln, pn = _hauptmodul_logpolar_reduced(q[near])
    la[near] = ln
    ph[near] = pn
    return la, ph
