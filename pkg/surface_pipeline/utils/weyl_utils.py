"""Weyl group moves on the lattice of a blowup of the plane in r points.

Classes are coefficient vectors over (L, E_1, ..., E_r). The Weyl group is
generated by the permutations of the E_i and the Cremona reflection in
L - E_1 - E_2 - E_3; all of them are isometries fixing the canonical class.
"""
import logging
from typing import Sequence, Tuple

import numpy as np

from utils.errors import NotContractible

logger = logging.getLogger("WeylUtils")


def plane_gram(r: int) -> np.ndarray:
    return np.diag([1] + [-1] * r).astype(np.int64)


def reflection(alpha: Sequence[int], gram: np.ndarray) -> np.ndarray:
    """Matrix of x -> x + (x.alpha) alpha for a root alpha (alpha^2 = -2)."""
    a = np.array(alpha, dtype=np.int64).reshape(-1, 1)
    return np.eye(len(alpha), dtype=np.int64) + a @ (a.T @ gram)


def permutation(order: Sequence[int]) -> np.ndarray:
    """Matrix sending coordinate E_{order[i]} to position E_i (L stays first)."""
    n = len(order) + 1
    P = np.zeros((n, n), dtype=np.int64)
    P[0, 0] = 1
    for i, j in enumerate(order):
        P[i + 1, j + 1] = 1
    return P


def cremona_root(r: int) -> Tuple[int, ...]:
    return (1, -1, -1, -1) + (0,) * (r - 3)


def move_to_last_exceptional(coeffs: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """Weyl element W (and its inverse) with W(coeffs) = E_r.

    `coeffs` must be a (-1)-class; the Cremona step needs r >= 3 whenever the
    class has positive degree.
    """
    r = len(coeffs) - 1
    gram = plane_gram(r)
    W = np.eye(r + 1, dtype=np.int64)
    W_inv = np.eye(r + 1, dtype=np.int64)
    current = np.array(coeffs, dtype=np.int64)

    while current[0] > 0:
        if r < 3:
            raise NotContractible(f"class {tuple(coeffs)} needs a Cremona move on fewer than 3 points")
        # 1. sort multiplicities (m_i = -c_i) in decreasing order
        order = sorted(range(r), key=lambda i: (current[i + 1], i))
        P = permutation(order)
        # 2. Cremona reflection in L - E_1 - E_2 - E_3
        R = reflection(cremona_root(r), gram)
        step = R @ P
        moved = step @ current
        if moved[0] >= current[0]:
            raise NotContractible(f"Cremona step does not lower the degree of {tuple(coeffs)}")
        current = moved
        W = step @ W
        W_inv = W_inv @ P.T @ R

    hits = [i for i in range(1, r + 1) if current[i] == 1]
    if len(hits) != 1 or int(np.abs(current).sum()) != 1:
        raise NotContractible(f"class {tuple(coeffs)} does not reduce to an exceptional coordinate")

    # 3. swap the surviving E_j into the last slot
    j = hits[0]
    order = list(range(r))
    order[j - 1], order[r - 1] = order[r - 1], order[j - 1]
    P = permutation(order)
    W = P @ W
    W_inv = W_inv @ P.T

    logger.debug(f"🔎 Weyl move of {tuple(coeffs)} to E_{r}: {W.tolist()}")
    return W, W_inv
