"""
Global degree-of-freedom numbering of the C^{m-1}-conforming space.

Local tensor index (j_1, ..., j_d) of an element belongs, per direction, to
    LOW   when j < m        (derivative j at the left end),
    HIGH  when m <= j < 2m  (derivative j - m at the right end),
    FREE  when j >= 2m      (bubble j),
and so to the element entity with that signature. Its DofKey is the entity
plus, per direction, the derivative order (pinned directions) or the bubble
index (free directions). The side is implied by the entity coordinate, so
both elements at an interface produce identical keys.

Global ids: entities in mesh order (dimension, then coordinates), then the
per-direction index tuple in lexicographic order.
"""

from dataclasses import dataclass, replace
from typing import Dict, List, Tuple

import numpy as np

from src.core.exceptions import DiscretizationError
from src.core.logging.logger_factory import get_logger
from src.core.spectral.basis1d import Basis1D
from src.core.spectral.mesh import FREE, HIGH, LOW, BoxMesh
from src.core.spectral.tensor import element_bases, evaluate_points

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class DofMap:
    """
    element_dofs[e, flat] is the global id of local function `flat`
    (C-order flat index of (j_1, ..., j_d)) on element e.
    dof_entity / dof_index give the DofKey of each global id.
    """

    m: int
    N: int
    d: int
    total: int
    element_dofs: np.ndarray
    dof_entity: np.ndarray
    dof_index: np.ndarray
    constrained: np.ndarray

    @property
    def n_local(self) -> int:
        return (self.N + 1) ** self.d

    @property
    def n_free(self) -> int:
        return int(self.total - np.count_nonzero(self.constrained))

    @property
    def free_dofs(self) -> np.ndarray:
        return np.flatnonzero(~self.constrained)

    @property
    def free_index(self) -> np.ndarray:
        """Global id -> position among free dofs, -1 for constrained dofs."""
        index = np.full(self.total, -1, dtype=np.int64)
        free = self.free_dofs
        index[free] = np.arange(free.size)
        return index

    def expand(self, free_values: np.ndarray) -> np.ndarray:
        """Full coefficient vector with zeros on constrained dofs."""
        full = np.zeros(self.total, dtype=np.result_type(free_values, float))
        full[self.free_dofs] = free_values
        return full

    def local_coefficients(self, coeffs: np.ndarray, e: int) -> np.ndarray:
        return coeffs[self.element_dofs[e]].reshape((self.N + 1,) * self.d)


def _direction_state(j: int, m: int) -> Tuple[int, int, int]:
    """(signature, index value, rank within the entity slot)."""
    if j < m:
        return LOW, j, j
    if j < 2 * m:
        return HIGH, j - m, j - m
    return FREE, j, j - 2 * m


def build_dofmap(mesh: BoxMesh, m: int, N: int) -> DofMap:
    if m < 1:
        raise DiscretizationError("smoothness order must be >= 1", m=m)
    if N < 2 * m:
        raise DiscretizationError("dof map needs N >= 2m", m=m, N=N)
    d = mesh.d
    n_bubble = N - 2 * m + 1

    offsets = np.zeros(len(mesh.entities) + 1, dtype=np.int64)
    for ent in mesh.entities:
        offsets[ent.id + 1] = m ** (d - ent.dim) * n_bubble ** ent.dim
    offsets = np.cumsum(offsets)
    total = int(offsets[-1])

    states = [_direction_state(j, m) for j in range(N + 1)]
    local_shape = (N + 1,) * d
    n_local = (N + 1) ** d

    element_dofs = np.empty((mesh.n_elements, n_local), dtype=np.int64)
    dof_entity = np.full(total, -1, dtype=np.int64)
    dof_index = np.zeros((total, d), dtype=np.int64)

    for e in range(mesh.n_elements):
        for flat in range(n_local):
            local = np.unravel_index(flat, local_shape)
            sig = tuple(states[j][0] for j in local)
            eid = int(mesh.adjacency[(e,) + sig])
            rank = 0
            for j in local:
                radix = n_bubble if states[j][0] == FREE else m
                rank = rank * radix + states[j][2]
            gid = int(offsets[eid] + rank)
            element_dofs[e, flat] = gid
            dof_entity[gid] = eid
            dof_index[gid] = [states[j][1] for j in local]

    if np.any(dof_entity < 0):
        raise DiscretizationError("dof numbering left unmapped ids", total=total)

    logger.debug(f"Built dof map: m={m}, N={N}, elements={mesh.n_elements}, total={total}")
    return DofMap(
        m=m,
        N=N,
        d=d,
        total=total,
        element_dofs=element_dofs,
        dof_entity=dof_entity,
        dof_index=dof_index,
        constrained=np.zeros(total, dtype=bool),
    )


def clamp_boundary(dm: DofMap, mesh: BoxMesh) -> DofMap:
    """Constrain every dof attached to an entity on the domain boundary."""
    on_boundary = np.array([ent.boundary for ent in mesh.entities], dtype=bool)
    constrained = on_boundary[dm.dof_entity]
    return replace(dm, constrained=constrained)


def dof_report(dm: DofMap, mesh: BoxMesh) -> List[Dict[str, object]]:
    """One row per global id: its DofKey and whether the boundary clamps it."""
    rows = []
    for gid in range(dm.total):
        ent = mesh.entities[int(dm.dof_entity[gid])]
        rows.append(
            {
                "entity_dim": ent.dim,
                "entity_id": ent.id,
                "index": " ".join(str(i) for i in dm.dof_index[gid]),
                "global_id": gid,
                "constrained": int(dm.constrained[gid]),
            }
        )
    return rows


def _face_points(face_key, rng: np.random.Generator, count: int) -> np.ndarray:
    cols = []
    for lo, hi in face_key:
        if lo == hi:
            cols.append(np.full(count, float(lo)))
        else:
            cols.append(rng.uniform(float(lo), float(hi), count))
    return np.stack(cols, axis=1)


def conformity_check(
    dm: DofMap,
    mesh: BoxMesh,
    basis: Basis1D,
    trials: int = 20,
    points_per_face: int = 8,
    seed: int = 0,
) -> float:
    """
    Largest jump of any derivative with per-direction order < m across an
    interior face, over random global coefficient vectors.
    """
    rng = np.random.default_rng(seed)
    alphas = [alpha for alpha in np.ndindex(*([dm.m] * dm.d))]
    faces = mesh.interior_faces()
    if not faces:
        return 0.0

    bases = [element_bases(mesh.element_box(e), basis) for e in range(mesh.n_elements)]
    jump = 0.0
    for _ in range(trials):
        coeffs = rng.uniform(-1.0, 1.0, dm.total)
        for face in faces:
            e1, e2 = face.elements
            points = _face_points(face.key, rng, points_per_face)
            c1 = dm.local_coefficients(coeffs, e1)
            c2 = dm.local_coefficients(coeffs, e2)
            for alpha in alphas:
                v1 = evaluate_points(c1, bases[e1], points, alpha)
                v2 = evaluate_points(c2, bases[e2], points, alpha)
                jump = max(jump, float(np.max(np.abs(v1 - v2))))
    return jump
