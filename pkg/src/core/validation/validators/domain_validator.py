"""
Validator for unions of axis-aligned boxes.

Coordinates are normalized to exact fractions so that contact tests are
exact; two boxes may only meet in a full common face, edge or vertex.
"""

from collections import deque
from fractions import Fraction
from itertools import combinations
from typing import Any, List, Sequence, Tuple

from .base_validator import BaseValidator, ValidationResult

ExactBox = Tuple[Tuple[Fraction, Fraction], ...]


def to_exact(value: Any) -> Fraction:
    """Exact lattice coordinate; decimal literals map to their decimal value."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(repr(float(value)))


def box_contact(a: ExactBox, b: ExactBox):
    """Intersection of two closed boxes, or None when they are apart."""
    meet = []
    for (lo1, hi1), (lo2, hi2) in zip(a, b):
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        if lo > hi:
            return None
        meet.append((lo, hi))
    return tuple(meet)


class DomainValidator(BaseValidator):
    """
    Checks:
    - every box has the same dimension d in {1, 2, 3} and positive extent
    - interiors are pairwise disjoint
    - contacts are conforming (full shared face / edge / vertex)
    - the union is connected through (d-1)-faces
    """

    MAX_DIM = 3

    def validate(self, value: Sequence, **kwargs) -> ValidationResult:
        if not value:
            return self._create_error_result(value, ["domain needs at least one box"])

        try:
            boxes = self.normalize(value)
        except (TypeError, ValueError) as e:
            return self._create_error_result(
                value,
                [f"boxes must be lists of [lo, hi] pairs: {e}"],
                suggestions=["example: boxes = [[[0, 1], [0, 1]]]"],
            )

        errors: List[str] = []
        dims = {len(box) for box in boxes}
        if len(dims) != 1:
            return self._create_error_result(value, [f"boxes have mixed dimensions {sorted(dims)}"])
        d = dims.pop()
        if not 1 <= d <= self.MAX_DIM:
            return self._create_error_result(value, [f"dimension must be 1, 2 or 3, got {d}"])

        for i, box in enumerate(boxes):
            for k, (lo, hi) in enumerate(box):
                if not lo < hi:
                    errors.append(f"box {i} has non-positive extent in direction {k}")
        if errors:
            return self._create_error_result(value, errors)

        face_pairs = []
        for i, j in combinations(range(len(boxes)), 2):
            meet = box_contact(boxes[i], boxes[j])
            if meet is None:
                continue
            degenerate = [k for k, (lo, hi) in enumerate(meet) if lo == hi]
            if not degenerate:
                errors.append(f"boxes {i} and {j} overlap")
                continue
            full = all(
                meet[k] == boxes[i][k] == boxes[j][k]
                for k in range(d) if k not in degenerate
            )
            if not full:
                errors.append(f"boxes {i} and {j} are not face-conforming")
                continue
            if len(degenerate) == 1:
                face_pairs.append((i, j))
        if errors:
            return self._create_error_result(
                value,
                errors,
                suggestions=["split boxes so that neighbours share whole faces"],
            )

        if not self._face_connected(len(boxes), face_pairs):
            return self._create_error_result(value, ["boxes are not connected through shared faces"])

        return self._create_success_result(
            value,
            normalized_value=boxes,
            metadata={"dim": d, "boxes": len(boxes), "shared_faces": len(face_pairs)},
        )

    def normalize(self, value: Sequence, **kwargs) -> Tuple[ExactBox, ...]:
        boxes = []
        for box in value:
            intervals = []
            for pair in box:
                lo, hi = pair
                intervals.append((to_exact(lo), to_exact(hi)))
            boxes.append(tuple(intervals))
        return tuple(boxes)

    @staticmethod
    def _face_connected(count: int, pairs) -> bool:
        neighbours = {i: [] for i in range(count)}
        for i, j in pairs:
            neighbours[i].append(j)
            neighbours[j].append(i)
        seen = {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in neighbours[i]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return len(seen) == count
