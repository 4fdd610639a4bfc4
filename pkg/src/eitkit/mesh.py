"""Triangular meshes of the unit disc.

The disc is meshed by uniform refinement of a four-triangle base mesh.
Each refinement splits every triangle into four at the edge midpoints;
midpoints of boundary edges are pushed back onto the unit circle, so
boundary nodes stay exactly equiangular at every level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class TriMesh:
    """Conforming triangulation of the unit disc.

    Attributes
    ----------
    nodes : (V, 2) float64 array
        Node coordinates.
    tris : (T, 3) int32 array
        Node indices per triangle, counterclockwise.
    boundary_nodes : (B,) int array
        Indices of nodes on the unit circle, ordered counterclockwise
        starting from the node nearest angle 0.
    """

    nodes: np.ndarray
    tris: np.ndarray
    boundary_nodes: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_tris(self) -> int:
        return self.tris.shape[0]

    def areas(self) -> np.ndarray:
        """Signed triangle areas (positive for counterclockwise)."""
        p = self.nodes[self.tris]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def centroids(self) -> np.ndarray:
        """Triangle centroids, shape (T, 2)."""
        return self.nodes[self.tris].mean(axis=1)

    def boundary_angles(self) -> np.ndarray:
        """Angles of the boundary nodes in [0, 2*pi), in stored order."""
        p = self.nodes[self.boundary_nodes]
        return np.mod(np.arctan2(p[:, 1], p[:, 0]), 2.0 * np.pi)


def _base_mesh() -> TriMesh:
    nodes = np.array(
        [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
    )
    tris = np.array(
        [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]], dtype=np.int32
    )
    return TriMesh(nodes, tris, np.array([1, 2, 3, 4]))


def _boundary_edge_set(mesh: TriMesh) -> set[tuple[int, int]]:
    # edges referenced by exactly one triangle
    count: dict[tuple[int, int], int] = {}
    for tri in mesh.tris:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (min(a, b), max(a, b))
            count[key] = count.get(key, 0) + 1
    return {e for e, c in count.items() if c == 1}


def refine(mesh: TriMesh) -> TriMesh:
    """Uniformly refine: every triangle splits into four.

    Midpoints of boundary edges are projected radially onto the unit
    circle, which bisects the boundary arc exactly, so an equiangular
    boundary stays equiangular.
    """
    boundary_edges = _boundary_edge_set(mesh)
    nodes = [mesh.nodes]
    midpoint_of: dict[tuple[int, int], int] = {}
    next_id = mesh.n_nodes
    new_coords = []

    def midpoint(a: int, b: int) -> int:
        nonlocal next_id
        key = (min(a, b), max(a, b))
        idx = midpoint_of.get(key)
        if idx is None:
            p = 0.5 * (mesh.nodes[a] + mesh.nodes[b])
            if key in boundary_edges:
                p = p / np.hypot(p[0], p[1])
            new_coords.append(p)
            idx = next_id
            midpoint_of[key] = idx
            next_id += 1
        return idx

    new_tris = np.empty((4 * mesh.n_tris, 3), dtype=np.int32)
    for i, (a, b, c) in enumerate(mesh.tris):
        ab = midpoint(a, b)
        bc = midpoint(b, c)
        ca = midpoint(c, a)
        new_tris[4 * i] = (a, ab, ca)
        new_tris[4 * i + 1] = (ab, b, bc)
        new_tris[4 * i + 2] = (ca, bc, c)
        new_tris[4 * i + 3] = (ab, bc, ca)

    nodes.append(np.array(new_coords))
    all_nodes = np.vstack(nodes)

    # boundary nodes of the refined mesh: old ones plus projected midpoints
    bset = set(mesh.boundary_nodes.tolist())
    for (a, b), m in midpoint_of.items():
        if (a, b) in boundary_edges:
            bset.add(m)
    bidx = np.fromiter(bset, dtype=np.int64)
    ang = np.mod(np.arctan2(all_nodes[bidx, 1], all_nodes[bidx, 0]), 2 * np.pi)
    # start from the node nearest angle 0 (wrap angles ~2*pi down to 0)
    ang = np.where(ang > 2 * np.pi - 1e-9, ang - 2 * np.pi, ang)
    bidx = bidx[np.argsort(ang)]

    return TriMesh(all_nodes, new_tris, bidx)


def disc_mesh(refinements: int = 6) -> TriMesh:
    """Mesh of the unit disc with ``4 * 4**refinements`` triangles.

    Parameters
    ----------
    refinements : int
        Number of uniform refinement passes applied to the
        four-triangle base mesh.  Level 6 gives 16384 triangles with
        256 equally spaced boundary nodes.
    """
    if refinements < 0:
        raise ValueError("refinements must be >= 0")
    mesh = _base_mesh()
    for _ in range(refinements):
        mesh = refine(mesh)
    return mesh


def level_for_tris(n_tris: int) -> int:
    """Smallest refinement level with at least ``n_tris`` triangles."""
    level = 0
    while 4 * 4**level < n_tris:
        level += 1
    return level
