"""Numpy/scipy versions of the compiled kernels.

Same signatures and same consumption of the caller's uniforms as the Cython
module, so both backends produce identical configurations.
"""
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


def _neighbour_sum(spins):
    padded = np.pad(spins.astype(np.int16), 1)
    return padded[:-2, 1:-1] + padded[2:, 1:-1] + padded[1:-1, :-2] + padded[1:-1, 2:]


def heat_bath_sweeps(spins, frozen, accept, uniforms):
    H, W = spins.shape
    accept = np.asarray(accept, dtype=np.float64)
    if accept.shape != (9,):
        raise ValueError("accept table must have 9 entries")
    if uniforms.shape[1:] != (H, W):
        raise ValueError("uniforms shape does not match spins")
    parity = np.add.outer(np.arange(H), np.arange(W)) & 1
    free = ~frozen.astype(bool)
    masks = [(parity == c) & free for c in (0, 1)]
    for u in uniforms:
        for mask in masks:
            h = _neighbour_sum(spins)
            new = np.where(u < accept[h + 4], 1, -1).astype(np.int8)
            spins[mask] = new[mask]


def _components(H, W, right, down):
    N = H * W
    idx = np.arange(N).reshape(H, W)
    rows = np.concatenate([idx[:, :-1][right], idx[:-1, :][down]])
    cols = np.concatenate([idx[:, 1:][right], idx[1:, :][down]])
    graph = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(N, N))
    ncomp, labels = connected_components(graph, directed=False)
    return ncomp, labels


def _canonical(ncomp, labels):
    first = np.full(ncomp, labels.size, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(labels.size))
    rank = np.empty(ncomp, dtype=np.intc)
    rank[np.argsort(first, kind="stable")] = np.arange(ncomp, dtype=np.intc)
    return rank[labels], np.sort(first)


def sw_sweeps(spins, frozen, p_bond, uniforms):
    H, W = spins.shape
    if uniforms.shape[1:] != (3, H, W):
        raise ValueError("uniforms must have shape (n, 3, H, W)")
    frozen_flat = frozen.astype(bool).ravel()
    for u in uniforms:
        right = (spins[:, :-1] == spins[:, 1:]) & (u[0, :, :-1] < p_bond)
        down = (spins[:-1, :] == spins[1:, :]) & (u[1, :-1, :] < p_bond)
        ncomp, labels = _components(H, W, right, down)
        labels, reps = _canonical(ncomp, labels)
        pinned = np.bincount(labels, weights=frozen_flat, minlength=ncomp) > 0
        flip = ~pinned & (u[2].ravel()[reps] < 0.5)
        sign = np.where(flip[labels], -1, 1).astype(np.int8).reshape(H, W)
        spins *= sign


def label_grid(right, down):
    H, W = right.shape[0], right.shape[1] + 1
    if down.shape != (H - 1, W):
        raise ValueError("bond arrays have inconsistent shapes")
    ncomp, labels = _components(H, W, right.astype(bool), down.astype(bool))
    labels, _ = _canonical(ncomp, labels)
    return labels.astype(np.intc)
