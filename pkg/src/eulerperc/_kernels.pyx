# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: heat-bath sweeps, Swendsen-Wang sweeps, grid labeling.

Every routine consumes uniforms drawn by the caller, so the numpy fallback in
``_kernels_py`` reproduces the same output bit for bit.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _find(int[::1] parent, Py_ssize_t x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef inline void _union(int[::1] parent, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    # smaller root wins, so every root is the minimum index of its cluster
    a = _find(parent, a)
    b = _find(parent, b)
    if a < b:
        parent[b] = <int>a
    elif b < a:
        parent[a] = <int>b


def heat_bath_sweeps(signed char[:, ::1] spins, unsigned char[:, ::1] frozen,
                     double[::1] accept, double[:, :, ::1] uniforms):
    """Run ``uniforms.shape[0]`` checkerboard-ordered heat-bath sweeps in place.

    ``accept[h + 4]`` is P(spin = +1) given neighbour sum ``h``; neighbours
    outside the array count as 0.
    """
    cdef Py_ssize_t H = spins.shape[0], W = spins.shape[1]
    cdef Py_ssize_t n = uniforms.shape[0]
    cdef Py_ssize_t s, i, j, color
    cdef int h
    if accept.shape[0] != 9:
        raise ValueError("accept table must have 9 entries")
    if uniforms.shape[1] != H or uniforms.shape[2] != W:
        raise ValueError("uniforms shape does not match spins")
    with nogil:
        for s in range(n):
            for color in range(2):
                for i in range(H):
                    for j in range((color + i) & 1, W, 2):
                        if frozen[i, j]:
                            continue
                        h = 0
                        if i > 0:
                            h += spins[i - 1, j]
                        if i + 1 < H:
                            h += spins[i + 1, j]
                        if j > 0:
                            h += spins[i, j - 1]
                        if j + 1 < W:
                            h += spins[i, j + 1]
                        if uniforms[s, i, j] < accept[h + 4]:
                            spins[i, j] = 1
                        else:
                            spins[i, j] = -1


def sw_sweeps(signed char[:, ::1] spins, unsigned char[:, ::1] frozen,
              double p_bond, double[:, :, :, ::1] uniforms):
    """Run ``uniforms.shape[0]`` Swendsen-Wang sweeps in place.

    ``uniforms[s, 0]`` / ``uniforms[s, 1]`` decide right / down bonds,
    ``uniforms[s, 2]`` is read at each cluster's minimum site to decide its flip.
    Clusters holding a frozen site never flip.
    """
    cdef Py_ssize_t H = spins.shape[0], W = spins.shape[1]
    cdef Py_ssize_t N = H * W
    cdef Py_ssize_t n = uniforms.shape[0]
    cdef Py_ssize_t s, i, j, idx, r
    if uniforms.shape[1] != 3 or uniforms.shape[2] != H or uniforms.shape[3] != W:
        raise ValueError("uniforms must have shape (n, 3, H, W)")
    parent_arr = np.empty(N, dtype=np.intc)
    pinned_arr = np.empty(N, dtype=np.uint8)
    flip_arr = np.empty(N, dtype=np.uint8)
    cdef int[::1] parent = parent_arr
    cdef unsigned char[::1] pinned = pinned_arr
    cdef unsigned char[::1] flip = flip_arr
    with nogil:
        for s in range(n):
            for idx in range(N):
                parent[idx] = <int>idx
                pinned[idx] = 0
            for i in range(H):
                for j in range(W):
                    idx = i * W + j
                    if j + 1 < W and spins[i, j] == spins[i, j + 1] \
                            and uniforms[s, 0, i, j] < p_bond:
                        _union(parent, idx, idx + 1)
                    if i + 1 < H and spins[i, j] == spins[i + 1, j] \
                            and uniforms[s, 1, i, j] < p_bond:
                        _union(parent, idx, idx + W)
            for idx in range(N):
                r = _find(parent, idx)
                if frozen[idx // W, idx % W]:
                    pinned[r] = 1
            for idx in range(N):
                if parent[idx] == idx:
                    flip[idx] = (not pinned[idx]) and uniforms[s, 2, idx // W, idx % W] < 0.5
            for idx in range(N):
                r = _find(parent, idx)
                if flip[r]:
                    spins[idx // W, idx % W] = -spins[idx // W, idx % W]


def label_grid(unsigned char[:, ::1] right, unsigned char[:, ::1] down):
    """Label sites of an H x W grid joined by open bonds.

    ``right`` has shape (H, W-1), ``down`` shape (H-1, W).  Labels are
    consecutive integers ordered by each cluster's smallest site index.
    """
    cdef Py_ssize_t H = right.shape[0], W = right.shape[1] + 1
    if down.shape[0] != H - 1 or down.shape[1] != W:
        raise ValueError("bond arrays have inconsistent shapes")
    cdef Py_ssize_t N = H * W
    cdef Py_ssize_t i, j, idx, r
    cdef int count = 0
    parent_arr = np.empty(N, dtype=np.intc)
    labels_arr = np.empty(N, dtype=np.intc)
    cdef int[::1] parent = parent_arr
    cdef int[::1] labels = labels_arr
    with nogil:
        for idx in range(N):
            parent[idx] = <int>idx
        for i in range(H):
            for j in range(W):
                idx = i * W + j
                if j + 1 < W and right[i, j]:
                    _union(parent, idx, idx + 1)
                if i + 1 < H and down[i, j]:
                    _union(parent, idx, idx + W)
        for idx in range(N):
            r = _find(parent, idx)
            if r == idx:
                labels[idx] = count
                count += 1
            else:
                labels[idx] = labels[r]
    return labels_arr
