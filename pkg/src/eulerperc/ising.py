"""Ising model on the dual sites of a box: exact tables and Markov-chain samplers."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import kernels
from .lattice import BoxGeometry, build_box

BETA_C = 0.5 * math.log(1 + math.sqrt(2))
MAX_EXACT_SITES = 20


@dataclass
class SpinConfig:
    """Spins in {-1, +1} on the (m, m) dual array of ``geometry``."""

    geometry: BoxGeometry
    spins: np.ndarray
    frozen: np.ndarray = field(default=None)

    def __post_init__(self):
        m = self.geometry.m
        self.spins = np.ascontiguousarray(self.spins, dtype=np.int8)
        if self.spins.shape != (m, m):
            raise ValueError(f"spins must have shape {(m, m)}, got {self.spins.shape}")
        if not np.all(np.abs(self.spins) == 1):
            raise ValueError("spins must be -1 or +1")
        if self.frozen is None:
            self.frozen = np.zeros((m, m), dtype=bool)
        self.frozen = np.asarray(self.frozen, dtype=bool)

    def copy(self) -> SpinConfig:
        return SpinConfig(self.geometry, self.spins.copy(), self.frozen.copy())

    def to_ascii(self) -> str:
        """One line per dual row, top row first."""
        return "\n".join("".join("+" if s > 0 else "-" for s in row) for row in self.spins[::-1])

    @classmethod
    def from_ascii(cls, text: str, geometry: BoxGeometry | None = None) -> SpinConfig:
        rows = [line.strip() for line in text.strip().splitlines()]
        if geometry is None:
            geometry = build_box((len(rows) - 2) // 2)
        arr = np.array([[1 if ch == "+" else -1 for ch in row] for row in rows[::-1]], dtype=np.int8)
        return cls(geometry, arr)


@dataclass
class IsingParams:
    """Inverse temperature and boundary condition.

    ``boundary`` is "plus", "minus", "free" or an (m, m) array of spins whose
    frozen entries are used.  ``frozen`` overrides the default frozen set
    (the outer ring, or nothing for a free boundary).
    """

    beta: float
    boundary: object = "plus"
    frozen: np.ndarray | None = None

    def __post_init__(self):
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")


def beta_of_p(p: float) -> float:
    if not 0 < p < 1:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    return 0.5 * math.log((1 - p) / p)


def p_of_beta(beta: float) -> float:
    return 1.0 / (1.0 + math.exp(2 * beta))


def boundary_config(geometry: BoxGeometry, params: IsingParams) -> SpinConfig:
    """Initial configuration: boundary values everywhere, frozen set marked."""
    m = geometry.m
    b = params.boundary
    if isinstance(b, str):
        if b not in ("plus", "minus", "free"):
            raise ValueError(f"unknown boundary {b!r}")
        spins = np.full((m, m), -1 if b == "minus" else 1, dtype=np.int8)
    else:
        spins = np.array(b, dtype=np.int8, copy=True)
    if params.frozen is not None:
        frozen = np.asarray(params.frozen, dtype=bool)
    elif isinstance(b, str) and b == "free":
        frozen = np.zeros((m, m), dtype=bool)
    else:
        frozen = ~geometry.interior_mask()
    return SpinConfig(geometry, spins, frozen)


def _grid_edges(m: int) -> np.ndarray:
    idx = np.arange(m * m).reshape(m, m)
    right = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    down = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    return np.concatenate([right, down])


def hamiltonian(config: SpinConfig, interior) -> int:
    """Minus the sum of s_x s_y over dual-grid edges meeting ``interior``.

    ``interior`` is an iterable of (row, col) positions or an (m, m) mask.
    """
    m = config.geometry.m
    mask = _as_mask(interior, m)
    s = config.spins.ravel().astype(np.int64)
    edges = _grid_edges(m)
    flat = mask.ravel()
    touching = flat[edges[:, 0]] | flat[edges[:, 1]]
    e = edges[touching]
    return int(-np.sum(s[e[:, 0]] * s[e[:, 1]]))


def _as_mask(interior, m: int) -> np.ndarray:
    if isinstance(interior, np.ndarray) and interior.dtype == bool:
        if interior.shape != (m, m):
            raise ValueError("interior mask has the wrong shape")
        return interior
    mask = np.zeros((m, m), dtype=bool)
    for r, c in interior:
        if not (0 <= r < m and 0 <= c < m):
            raise ValueError(f"site {(r, c)} has no spin in this box")
        mask[r, c] = True
    return mask


@dataclass
class LocalDistribution:
    """Exact Gibbs probabilities over the interior sites (ordered as ``sites``)."""

    sites: list[tuple[int, int]]
    configs: np.ndarray  # (2^k, k) spins
    probs: np.ndarray

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(v) for v in c): float(p) for c, p in zip(self.configs, self.probs)}

    def site_marginals(self) -> np.ndarray:
        """P(spin = +1) for each interior site."""
        return ((self.configs > 0) * self.probs[:, None]).sum(axis=0)


def exact_local_distribution(geometry: BoxGeometry, params: IsingParams, interior) -> LocalDistribution:
    """Enumerate the Gibbs distribution on ``interior`` given the other spins."""
    m = geometry.m
    mask = _as_mask(interior, m)
    sites = [tuple(int(v) for v in rc) for rc in np.argwhere(mask)]
    k = len(sites)
    if k > MAX_EXACT_SITES:
        raise ValueError(f"interior has {k} sites; exhaustive enumeration is limited to {MAX_EXACT_SITES}")
    outside = boundary_config(geometry, params).spins.astype(np.int64).ravel()
    pos = {r * m + c: i for i, (r, c) in enumerate(sites)}
    edges = _grid_edges(m)
    inner_pairs, field_sites, field_vals = [], [], []
    for a, b in edges:
        ia, ib = pos.get(int(a)), pos.get(int(b))
        if ia is not None and ib is not None:
            inner_pairs.append((ia, ib))
        elif ia is not None:
            field_sites.append(ia)
            field_vals.append(outside[b])
        elif ib is not None:
            field_sites.append(ib)
            field_vals.append(outside[a])
    configs = np.array(list(itertools.product((-1, 1), repeat=k)), dtype=np.int64).reshape(-1, k)
    energy = np.zeros(len(configs), dtype=np.int64)
    for i, j in inner_pairs:
        energy -= configs[:, i] * configs[:, j]
    for i, v in zip(field_sites, field_vals):
        energy -= configs[:, i] * v
    logw = -params.beta * energy.astype(np.float64)
    w = np.exp(logw - logw.max())
    probs = w / math.fsum(w)
    return LocalDistribution(sites, configs.astype(np.int8), probs)


def checkerboard_sign(m: int) -> np.ndarray:
    return np.where(np.add.outer(np.arange(m), np.arange(m)) % 2 == 0, 1, -1).astype(np.int8)


def checkerboard_transform(config: SpinConfig) -> SpinConfig:
    sign = checkerboard_sign(config.geometry.m)
    return SpinConfig(config.geometry, config.spins * sign, config.frozen.copy())


def heat_bath_table(beta: float) -> np.ndarray:
    h = np.arange(-4, 5, dtype=np.float64)
    return 1.0 / (1.0 + np.exp(-2.0 * beta * h))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def glauber_sweep(config: SpinConfig, beta: float, seed=None) -> SpinConfig:
    """One heat-bath sweep (even sublattice, then odd); frozen spins untouched."""
    rng = _rng(seed)
    out = config.copy()
    m = out.geometry.m
    u = rng.random((1, m, m))
    kernels.heat_bath_sweeps(out.spins, out.frozen.view(np.uint8), heat_bath_table(beta), u)
    return out


def sw_sweep(config: SpinConfig, beta: float, seed=None) -> SpinConfig:
    """One Swendsen-Wang sweep for beta >= 0; clusters touching frozen spins stay put."""
    if beta < 0:
        raise ValueError("Swendsen-Wang needs beta >= 0")
    rng = _rng(seed)
    out = config.copy()
    m = out.geometry.m
    u = rng.random((1, 3, m, m))
    kernels.sw_sweeps(out.spins, out.frozen.view(np.uint8), 1.0 - math.exp(-2.0 * beta), u)
    return out


def default_burnin(L: int, beta: float, method: str = "glauber") -> int:
    if method == "sw":
        return max(100, 2 * L)
    return 2000 * L if abs(abs(beta) - BETA_C) < 0.05 else 200 * L


def run_chain(spins: np.ndarray, frozen: np.ndarray, beta: float, n_sweeps: int,
              rng: np.random.Generator, method: str = "glauber", block: int = 256) -> None:
    """Advance a spin array in place by ``n_sweeps`` sweeps of the chosen kernel."""
    m0, m1 = spins.shape
    fro = frozen.view(np.uint8) if frozen.dtype == bool else frozen
    if method == "glauber":
        table = heat_bath_table(beta)
        while n_sweeps > 0:
            k = min(block, n_sweeps)
            kernels.heat_bath_sweeps(spins, fro, table, rng.random((k, m0, m1)))
            n_sweeps -= k
    elif method == "sw":
        if beta < 0:
            raise ValueError("Swendsen-Wang needs beta >= 0")
        p_bond = 1.0 - math.exp(-2.0 * beta)
        while n_sweeps > 0:
            k = min(max(1, block // 4), n_sweeps)
            kernels.sw_sweeps(spins, fro, p_bond, rng.random((k, 3, m0, m1)))
            n_sweeps -= k
    else:
        raise ValueError(f"unknown method {method!r}")


def iter_gibbs(geometry: BoxGeometry, params: IsingParams, n_burnin: int, n_samples: int,
               thinning: int = 1, seed=0, method: str = "glauber") -> Iterator[np.ndarray]:
    """Yield spin arrays from one chain.

    For beta < 0 the chain runs at |beta| with the given boundary and each
    yielded array is the checkerboard image, so its boundary is the image of
    the requested one.  The yielded array is a fresh copy.
    """
    if n_burnin < 1:
        raise ValueError("at least one burn-in sweep is required")
    if thinning < 1:
        raise ValueError("thinning must be positive")
    rng = _rng(seed)
    start = boundary_config(geometry, params)
    spins, frozen = start.spins, start.frozen.view(np.uint8)
    beta = abs(params.beta)
    sign = checkerboard_sign(geometry.m) if params.beta < 0 else None
    run_chain(spins, frozen, beta, n_burnin, rng, method)
    for _ in range(n_samples):
        run_chain(spins, frozen, beta, thinning, rng, method)
        yield spins * sign if sign is not None else spins.copy()


def sample_gibbs(L: int, params: IsingParams, n_burnin: int | None = None, n_samples: int = 1,
                 thinning: int = 1, seed=0, method: str = "glauber") -> list[SpinConfig]:
    geometry = build_box(L)
    if n_burnin is None:
        n_burnin = default_burnin(L, params.beta, method)
    frozen = boundary_config(geometry, params).frozen
    return [
        SpinConfig(geometry, s, frozen.copy())
        for s in iter_gibbs(geometry, params, n_burnin, n_samples, thinning, seed, method)
    ]
