"""Hot loops for the collapsed Gibbs sweeps.

Compiled with numba when it is importable; otherwise the pure-numpy twins run.
Both paths consume pre-drawn uniforms and perform the same arithmetic in the
same order, so a fixed seed yields bit-identical chains either way.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


@njit(cache=True, nogil=True)
def _sweep_jit(tokens, doc_ix, z, n_dk, n_kw, n_k, eta, eta_sums, alpha, uniforms):
    k_total = n_k.shape[0]
    cum = np.empty(k_total)
    for t in range(tokens.shape[0]):
        w = tokens[t]
        d = doc_ix[t]
        k_old = z[t]
        n_dk[d, k_old] -= 1
        n_kw[k_old, w] -= 1
        n_k[k_old] -= 1
        total = 0.0
        for k in range(k_total):
            p = (n_dk[d, k] + alpha) * (n_kw[k, w] + eta[k, w]) / (n_k[k] + eta_sums[k])
            total += p
            cum[k] = total
        u = uniforms[t] * total
        k_new = 0
        while k_new < k_total - 1 and cum[k_new] < u:
            k_new += 1
        z[t] = k_new
        n_dk[d, k_new] += 1
        n_kw[k_new, w] += 1
        n_k[k_new] += 1


def _sweep_py(tokens, doc_ix, z, n_dk, n_kw, n_k, eta, eta_sums, alpha, uniforms):
    k_total = n_k.shape[0]
    for t in range(tokens.shape[0]):
        w = tokens[t]
        d = doc_ix[t]
        k_old = z[t]
        n_dk[d, k_old] -= 1
        n_kw[k_old, w] -= 1
        n_k[k_old] -= 1
        p = (n_dk[d] + alpha) * (n_kw[:, w] + eta[:, w]) / (n_k + eta_sums)
        cum = np.cumsum(p)
        k_new = min(int(np.searchsorted(cum, uniforms[t] * cum[-1], side="right")),
                    k_total - 1)
        z[t] = k_new
        n_dk[d, k_new] += 1
        n_kw[k_new, w] += 1
        n_k[k_new] += 1


@njit(cache=True, nogil=True)
def _sweep_doc_snapshot_jit(tokens, z, ndk_row, kw_snap, k_snap, delta_kw, delta_k,
                            eta, eta_sums, alpha, uniforms):
    k_total = k_snap.shape[0]
    cum = np.empty(k_total)
    for t in range(tokens.shape[0]):
        w = tokens[t]
        k_old = z[t]
        ndk_row[k_old] -= 1
        delta_kw[k_old, w] -= 1
        delta_k[k_old] -= 1
        total = 0.0
        for k in range(k_total):
            p = ((ndk_row[k] + alpha)
                 * (kw_snap[k, w] + delta_kw[k, w] + eta[k, w])
                 / (k_snap[k] + delta_k[k] + eta_sums[k]))
            total += p
            cum[k] = total
        u = uniforms[t] * total
        k_new = 0
        while k_new < k_total - 1 and cum[k_new] < u:
            k_new += 1
        z[t] = k_new
        ndk_row[k_new] += 1
        delta_kw[k_new, w] += 1
        delta_k[k_new] += 1


def _sweep_doc_snapshot_py(tokens, z, ndk_row, kw_snap, k_snap, delta_kw, delta_k,
                           eta, eta_sums, alpha, uniforms):
    k_total = k_snap.shape[0]
    for t in range(tokens.shape[0]):
        w = tokens[t]
        k_old = z[t]
        ndk_row[k_old] -= 1
        delta_kw[k_old, w] -= 1
        delta_k[k_old] -= 1
        p = ((ndk_row + alpha)
             * (kw_snap[:, w] + delta_kw[:, w] + eta[:, w])
             / (k_snap + delta_k + eta_sums))
        cum = np.cumsum(p)
        k_new = min(int(np.searchsorted(cum, uniforms[t] * cum[-1], side="right")),
                    k_total - 1)
        z[t] = k_new
        ndk_row[k_new] += 1
        delta_kw[k_new, w] += 1
        delta_k[k_new] += 1


sweep_tokens = _sweep_jit if HAVE_NUMBA else _sweep_py
sweep_doc_snapshot = _sweep_doc_snapshot_jit if HAVE_NUMBA else _sweep_doc_snapshot_py
