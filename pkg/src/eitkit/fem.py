"""Piecewise-linear finite elements for the conductivity equation.

Solves ``div(sigma grad u) = 0`` on the unit disc with prescribed
Neumann flux ``sigma du/dnu = g`` on the circle, where ``g`` has zero
mean.  The solution is grounded by the zero-mean-trace condition
``integral of u over the boundary = 0``, enforced with a Lagrange
multiplier, which keeps the saddle system nonsingular without picking
an arbitrary node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from eitkit.mesh import TriMesh

# 3-point Gauss rule on [0, 1]
_GAUSS_X = np.array([0.5 - np.sqrt(0.15), 0.5, 0.5 + np.sqrt(0.15)])
_GAUSS_W = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


@dataclass
class PotentialSolution:
    """Nodal potential for one applied current pattern.

    ``u`` holds values at every mesh node; the boundary trace is read
    off at ``mesh.boundary_nodes`` and has zero (length-weighted) mean.
    """

    mesh: TriMesh
    u: np.ndarray

    def boundary_trace(self) -> np.ndarray:
        """Potential at the boundary nodes, in boundary order."""
        return self.u[self.mesh.boundary_nodes]


def _stiffness(mesh: TriMesh, sigma: np.ndarray) -> sp.csc_matrix:
    p = mesh.nodes[mesh.tris]  # (T, 3, 2)
    # edge vectors opposite each vertex
    e = p[:, [2, 0, 1], :] - p[:, [1, 2, 0], :]  # (T, 3, 2)
    area2 = e[:, 0, 0] * e[:, 1, 1] - e[:, 0, 1] * e[:, 1, 0]  # = 2A
    # grad(phi_i) = rot90(e_i) / (2A); K_ij = sigma * A * grad_i . grad_j
    coef = sigma / (2.0 * area2)  # sigma / (4A) * ... * (1/A legs folded in)
    vals = np.einsum("tid,tjd->tij", e, e) * coef[:, None, None]
    rows = np.repeat(mesh.tris, 3, axis=1).ravel()
    cols = np.tile(mesh.tris, (1, 3)).ravel()
    K = sp.coo_matrix(
        (vals.ravel(), (rows, cols)), shape=(mesh.n_nodes, mesh.n_nodes)
    )
    return K.tocsc()


def _boundary_edges(mesh: TriMesh) -> tuple[np.ndarray, np.ndarray]:
    """Boundary edges as consecutive node pairs, with chord lengths."""
    b = mesh.boundary_nodes
    pairs = np.stack([b, np.roll(b, -1)], axis=1)
    d = mesh.nodes[pairs[:, 1]] - mesh.nodes[pairs[:, 0]]
    return pairs, np.hypot(d[:, 0], d[:, 1])


def _trace_weights(mesh: TriMesh) -> np.ndarray:
    """Length-lumped boundary mass: w_i = integral of hat_i over the boundary."""
    pairs, lengths = _boundary_edges(mesh)
    w = np.zeros(mesh.n_nodes)
    np.add.at(w, pairs[:, 0], 0.5 * lengths)
    np.add.at(w, pairs[:, 1], 0.5 * lengths)
    return w[mesh.boundary_nodes]


def flux_load(mesh: TriMesh, flux: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Assemble b_i = integral of flux * hat_i over the boundary (3-pt Gauss)."""
    pairs, lengths = _boundary_edges(mesh)
    p0 = mesh.nodes[pairs[:, 0]]
    p1 = mesh.nodes[pairs[:, 1]]
    b = np.zeros(mesh.n_nodes)
    for x, wq in zip(_GAUSS_X, _GAUSS_W):
        q = (1.0 - x) * p0 + x * p1
        theta = np.arctan2(q[:, 1], q[:, 0])
        g = flux(theta) * lengths * wq
        np.add.at(b, pairs[:, 0], (1.0 - x) * g)
        np.add.at(b, pairs[:, 1], x * g)
    return b


class NeumannSolver:
    """Factorized solver reused across current patterns on one phantom.

    Parameters
    ----------
    mesh : TriMesh
    sigma : float or (T,) array
        Conductivity per triangle.
    """

    def __init__(self, mesh: TriMesh, sigma) -> None:
        self.mesh = mesh
        sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (mesh.n_tris,))
        if np.any(sigma <= 0):
            raise ValueError("conductivity must be positive")
        self.sigma = sigma
        K = _stiffness(mesh, sigma)
        c = np.zeros(mesh.n_nodes)
        c[mesh.boundary_nodes] = _trace_weights(mesh)
        n = mesh.n_nodes
        # saddle system [[K, c], [c^T, 0]]: grounds u without fixing a node
        kkt = sp.bmat(
            [[K, c[:, None]], [c[None, :], None]], format="csc"
        )
        self._lu = spla.splu(kkt)
        self._n = n

    def solve(self, flux: Callable[[np.ndarray], np.ndarray]) -> PotentialSolution:
        """Solve for one boundary flux ``g(theta)`` (must have zero mean)."""
        b = flux_load(self.mesh, flux)
        rhs = np.concatenate([b, [0.0]])
        sol = self._lu.solve(rhs)
        return PotentialSolution(self.mesh, sol[: self._n])

    def solve_many(self, loads: np.ndarray) -> np.ndarray:
        """Solve for several pre-assembled load vectors, shape (V, m)."""
        rhs = np.vstack([loads, np.zeros((1, loads.shape[1]))])
        sol = self._lu.solve(rhs)
        return sol[: self._n]


def solve_neumann(mesh: TriMesh, sigma, flux) -> PotentialSolution:
    """One-shot solve of the conductivity equation with Neumann data.

    Parameters
    ----------
    mesh : TriMesh
    sigma : float or (T,) array
        Per-triangle conductivity, strictly positive.
    flux : callable
        Boundary current density as a function of the boundary angle;
        vectorized over an array of angles.  Must integrate to zero.
    """
    return NeumannSolver(mesh, sigma).solve(flux)
