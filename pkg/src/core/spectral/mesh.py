"""
Rectangular meshes of unions of boxes with full entity enumeration.

Every element is a box; its 3^d entities (vertices, edges, faces, the cell
itself) are addressed by a signature giving, per direction, LOW, HIGH or
FREE. Entities are identified by exact Fraction coordinates, so two elements
share an entity exactly when their keys coincide.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import DiscretizationError, MeshError
from src.core.logging.logger_factory import get_logger
from src.core.validation.validators.domain_validator import DomainValidator, ExactBox, to_exact

logger = get_logger(__name__)

LOW, HIGH, FREE = 0, 1, 2

FloatBox = Tuple[Tuple[float, float], ...]
EntityKey = Tuple[Tuple[Fraction, Fraction], ...]


@dataclass(frozen=True)
class BoxDomain:
    """Union of axis-aligned boxes; see DomainValidator for the invariants."""

    boxes: Tuple[ExactBox, ...]

    @classmethod
    def from_boxes(cls, boxes: Sequence) -> "BoxDomain":
        result = DomainValidator().validate(boxes)
        if not result.is_valid:
            raise MeshError(f"invalid domain: {result.summary()}")
        return cls(boxes=result.value)

    @property
    def d(self) -> int:
        return len(self.boxes[0])

    def as_floats(self) -> Tuple[FloatBox, ...]:
        return tuple(tuple((float(lo), float(hi)) for lo, hi in box) for box in self.boxes)

    def translated(self, offset: Sequence[float]) -> "BoxDomain":
        shift = [to_exact(o) for o in offset]
        return BoxDomain(
            boxes=tuple(tuple((lo + s, hi + s) for (lo, hi), s in zip(box, shift)) for box in self.boxes)
        )

    def scaled(self, factor: float) -> "BoxDomain":
        s = to_exact(factor)
        if s <= 0:
            raise MeshError("scale factor must be positive", factor=factor)
        return BoxDomain(boxes=tuple(tuple((lo * s, hi * s) for lo, hi in box) for box in self.boxes))


@dataclass(frozen=True)
class MeshEntity:
    id: int
    dim: int
    key: EntityKey
    elements: Tuple[int, ...]
    boundary: bool

    @property
    def geometry(self) -> FloatBox:
        return tuple((float(lo), float(hi)) for lo, hi in self.key)


@dataclass(frozen=True, eq=False)
class BoxMesh:
    """
    elements: exact element boxes in build order
    entities: all entities sorted by (dimension, coordinates)
    adjacency: int array of shape (n_elements,) + (3,) * d; adjacency[e][sig]
        is the id of the entity of element e with signature sig
    """

    d: int
    level: int
    elements: Tuple[ExactBox, ...]
    entities: Tuple[MeshEntity, ...]
    adjacency: np.ndarray

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def h(self) -> float:
        return element_diameter(self)

    def element_box(self, e: int) -> FloatBox:
        return tuple((float(lo), float(hi)) for lo, hi in self.elements[e])

    def entities_of_dim(self, q: int) -> List[MeshEntity]:
        return [ent for ent in self.entities if ent.dim == q]

    def interior_faces(self) -> List[MeshEntity]:
        return [ent for ent in self.entities_of_dim(self.d - 1) if not ent.boundary]

    def counts(self) -> Dict[int, Tuple[int, int]]:
        """q -> (total, interior) entity counts."""
        out = {}
        for q in range(self.d + 1):
            ents = self.entities_of_dim(q)
            out[q] = (len(ents), sum(1 for e in ents if not e.boundary))
        return out

    def shared_face(self, e1: int, e2: int) -> Optional[FloatBox]:
        """Geometry of the (d-1)-face shared by two distinct elements."""
        if e1 == e2:
            return None
        common = set(self.adjacency[e1].ravel()) & set(self.adjacency[e2].ravel())
        for eid in sorted(common):
            ent = self.entities[eid]
            if ent.dim == self.d - 1:
                return ent.geometry
        return None


def entity_key(element: ExactBox, signature: Sequence[int]) -> EntityKey:
    key = []
    for (lo, hi), s in zip(element, signature):
        if s == LOW:
            key.append((lo, lo))
        elif s == HIGH:
            key.append((hi, hi))
        else:
            key.append((lo, hi))
    return tuple(key)


def _key_dim(key: EntityKey) -> int:
    return sum(1 for lo, hi in key if lo != hi)


def _sub_keys(key: EntityKey) -> Iterable[EntityKey]:
    """All entities in the closure of the entity `key`, itself included."""
    choices = [[(lo, lo), (hi, hi), (lo, hi)] if lo != hi else [(lo, hi)] for lo, hi in key]
    return product(*choices)


def _refine(box: ExactBox, level: int) -> List[ExactBox]:
    parts = 2 ** level
    per_direction = [
        [(lo + (hi - lo) * Fraction(i, parts), lo + (hi - lo) * Fraction(i + 1, parts)) for i in range(parts)]
        for lo, hi in box
    ]
    return [tuple(sub) for sub in product(*per_direction)]


def build_mesh(dom: BoxDomain, level: int = 0) -> BoxMesh:
    if level < 0:
        raise DiscretizationError("refinement level must be >= 0", level=level)
    d = dom.d
    elements: List[ExactBox] = []
    for box in dom.boxes:
        elements.extend(_refine(box, level))

    signatures = list(product((LOW, HIGH, FREE), repeat=d))
    incidence: Dict[EntityKey, List[int]] = {}
    for e, element in enumerate(elements):
        for sig in signatures:
            incidence.setdefault(entity_key(element, sig), []).append(e)

    keys = sorted(incidence, key=lambda k: (_key_dim(k), k))
    ids = {key: i for i, key in enumerate(keys)}

    boundary = set()
    for key in keys:
        if _key_dim(key) == d - 1 and len(incidence[key]) == 1:
            boundary.update(_sub_keys(key))

    entities = tuple(
        MeshEntity(
            id=ids[key],
            dim=_key_dim(key),
            key=key,
            elements=tuple(incidence[key]),
            boundary=key in boundary,
        )
        for key in keys
    )

    adjacency = np.empty((len(elements),) + (3,) * d, dtype=np.int64)
    for e, element in enumerate(elements):
        for sig in signatures:
            adjacency[(e,) + sig] = ids[entity_key(element, sig)]

    mesh = BoxMesh(d=d, level=level, elements=tuple(elements), entities=entities, adjacency=adjacency)
    logger.debug(f"Built mesh: d={d}, level={level}, elements={len(elements)}, entities={len(entities)}")
    return mesh


def element_diameter(mesh: BoxMesh) -> float:
    """Largest element diagonal."""
    if not mesh.elements:
        raise MeshError("mesh has no elements")
    return max(
        math.sqrt(sum(float(hi - lo) ** 2 for lo, hi in element)) for element in mesh.elements
    )


def mesh_summary(mesh: BoxMesh) -> List[Dict[str, object]]:
    """Rows for the mesh report: one per entity dimension."""
    rows = []
    for q, (total, interior) in mesh.counts().items():
        rows.append({"dim": q, "total": total, "interior": interior, "boundary": total - interior})
    return rows
