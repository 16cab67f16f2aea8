"""
Link networks, the normalized channel, and SINR algebra.

A physical instance (:class:`LinkNetwork`) holds watt-level quantities.
Every algorithm in the package runs on the normalized form
(:class:`NormalizedChannel`), where ``q = p / pbar`` and link ``k`` meets
its SINR target exactly when ``[A q - c]_k >= 0``.

Indices are 0-based everywhere in code; JSON and CLI output use 1-based
link ids.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "InvalidInstanceError",
    "LinkNetwork",
    "NormalizedChannel",
    "SolverSolution",
    "db_to_linear",
    "dbm_to_watts",
    "build_normalized",
    "sinr",
    "excess",
    "restrict",
    "network_from_dict",
    "network_to_dict",
    "load_network",
    "save_network",
]


class InvalidInstanceError(ValueError):
    """Raised when an instance violates its invariants."""


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LinkNetwork:
    """K transmitter/receiver pairs sharing one band.

    Parameters
    ----------
    G : (K, K) array
        ``G[k, j]`` is the power gain from transmitter ``j`` to receiver ``k``.
    eta : (K,) array
        Receiver noise power in watts.
    gamma : (K,) array
        SINR targets as linear ratios.
    pbar : (K,) array
        Per-link power budgets in watts.
    """

    G: np.ndarray
    eta: np.ndarray
    gamma: np.ndarray
    pbar: np.ndarray

    def __post_init__(self):
        G = _frozen(self.G)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 1:
            raise InvalidInstanceError(f"G must be a non-empty square matrix, got shape {G.shape}")
        K = G.shape[0]
        vecs = {}
        for name in ("eta", "gamma", "pbar"):
            v = _frozen(np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (K,)))
            if not np.all(np.isfinite(v)) or np.any(v <= 0):
                raise InvalidInstanceError(f"{name} must be finite and strictly positive")
            vecs[name] = v
        if not np.all(np.isfinite(G)) or np.any(G < 0):
            raise InvalidInstanceError("gains must be finite and non-negative")
        if np.any(np.diag(G) <= 0):
            raise InvalidInstanceError("direct gains g_kk must be strictly positive")
        object.__setattr__(self, "G", G)
        for name, v in vecs.items():
            object.__setattr__(self, name, v)

    @property
    def K(self) -> int:
        return self.G.shape[0]

    def subnetwork(self, links: Sequence[int]) -> "LinkNetwork":
        idx = np.asarray(links, dtype=int)
        return LinkNetwork(self.G[np.ix_(idx, idx)], self.eta[idx], self.gamma[idx], self.pbar[idx])


@dataclass(frozen=True)
class NormalizedChannel:
    """Normalized channel ``(A, c)`` plus the budgets needed by objectives.

    ``A`` has a unit diagonal and non-positive off-diagonal entries, ``c`` is
    the normalized noise. ``link_ids`` are the original (0-based) indices of
    the links this channel describes.
    """

    A: np.ndarray
    c: np.ndarray
    pbar: np.ndarray
    link_ids: tuple = field(default=None)

    def __post_init__(self):
        A = _frozen(self.A)
        K = A.shape[0]
        c = _frozen(self.c)
        pbar = _frozen(self.pbar)
        if A.shape != (K, K) or c.shape != (K,) or pbar.shape != (K,):
            raise InvalidInstanceError("inconsistent channel dimensions")
        ids = tuple(range(K)) if self.link_ids is None else tuple(int(i) for i in self.link_ids)
        if len(ids) != K:
            raise InvalidInstanceError("link_ids length does not match channel size")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "pbar", pbar)
        object.__setattr__(self, "link_ids", ids)

    @property
    def K(self) -> int:
        return self.A.shape[0]

    @property
    def B(self) -> np.ndarray:
        """The non-negative matrix ``I - A``."""
        return np.eye(self.K) - self.A


@dataclass
class SolverSolution:
    """Output of the l1 (LP) and lp (barrier) power-control subproblems.

    ``q_e`` is the excess vector ``c - A q`` and ``s = 1 - q`` the budget
    slack. ``newton_steps`` holds LP iterations for the LP route.
    """

    q: np.ndarray
    q_e: np.ndarray
    s: np.ndarray
    objective: float
    kkt_residual: float
    barrier_stages: int = 0
    newton_steps: int = 0
    converged: bool = True
    status: str = "OPTIMAL"
    stage_history: list = field(default_factory=list)
    lp_solution: object = None


def build_normalized(net: LinkNetwork) -> NormalizedChannel:
    G = net.G
    gkk = np.diag(G)
    # a_kj = -gamma_k g_kj pbar_j / (g_kk pbar_k)
    scale = net.gamma / (gkk * net.pbar)
    with np.errstate(over="ignore", invalid="ignore"):
        A = -(scale[:, None] * G * net.pbar[None, :])
        np.fill_diagonal(A, 1.0)
        c = net.gamma * net.eta / (gkk * net.pbar)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c))):
        raise InvalidInstanceError("normalization overflowed; gains or budgets are too extreme")
    if np.any(c <= 0):
        raise InvalidInstanceError("normalized noise underflowed to zero")
    return NormalizedChannel(A, c, net.pbar, tuple(range(net.K)))


def sinr(net: LinkNetwork, p) -> np.ndarray:
    """SINR at each receiver for watt-level powers ``p``, treating interference as noise."""
    p = np.asarray(p, dtype=float)
    received = net.G * p[None, :]
    signal = np.diag(received)
    interference = received.sum(axis=1) - signal
    return signal / (net.eta + interference)


def excess(chan: NormalizedChannel, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (chan.K,):
        raise ValueError(f"expected a length-{chan.K} power vector, got shape {q.shape}")
    return chan.c - chan.A @ q


def restrict(chan: NormalizedChannel, links) -> NormalizedChannel:
    """Principal restriction of ``chan`` to the original link ids in ``links``.

    Valid because ``a_kj`` and ``c_k`` only depend on links ``k`` and ``j``.
    """
    links = [int(i) for i in links]
    if not links:
        raise ValueError("cannot restrict a channel to an empty link set (all links removed)")
    pos = {lid: i for i, lid in enumerate(chan.link_ids)}
    try:
        idx = np.array([pos[lid] for lid in links], dtype=int)
    except KeyError as exc:
        raise ValueError(f"link {exc.args[0]} is not part of this channel") from None
    return NormalizedChannel(chan.A[np.ix_(idx, idx)], chan.c[idx], chan.pbar[idx], tuple(links))


# -- JSON ---------------------------------------------------------------------

def network_from_dict(doc: dict) -> LinkNetwork:
    """Build a network from its JSON document.

    Required: ``K``, ``G`` (nested rows or a flat row-major list),
    ``pbar_watts``, one of ``eta_watts``/``eta_dbm`` and one of
    ``gamma_linear``/``gamma_db``. Scalars broadcast to all links.
    """
    try:
        K = int(doc["K"])
        G = np.asarray(doc["G"], dtype=float).reshape(K, K)
        if "eta_watts" in doc:
            eta = np.asarray(doc["eta_watts"], dtype=float)
        else:
            eta = dbm_to_watts(doc["eta_dbm"])
        if "gamma_linear" in doc:
            gamma = np.asarray(doc["gamma_linear"], dtype=float)
        else:
            gamma = db_to_linear(doc["gamma_db"])
        pbar = np.asarray(doc["pbar_watts"], dtype=float)
    except KeyError as exc:
        raise InvalidInstanceError(f"missing field {exc.args[0]!r}") from None
    except ValueError as exc:
        raise InvalidInstanceError(str(exc)) from None
    return LinkNetwork(G, eta, gamma, pbar)


def network_to_dict(net: LinkNetwork) -> dict:
    return {
        "K": net.K,
        "G": net.G.tolist(),
        "eta_watts": net.eta.tolist(),
        "gamma_linear": net.gamma.tolist(),
        "pbar_watts": net.pbar.tolist(),
    }


def load_network(path) -> LinkNetwork:
    with open(path) as fh:
        return network_from_dict(json.load(fh))


def save_network(net: LinkNetwork, path) -> None:
    with open(path, "w") as fh:
        json.dump(network_to_dict(net), fh, indent=2)
        fh.write("\n")
