"""
Validator for the discretization parameters (m, N, level, d).
"""

from typing import Any, Dict

from .base_validator import BaseValidator, ValidationResult

MAX_DEGREE = 64
MAX_LEVEL = 8


class DiscretizationValidator(BaseValidator):
    """
    value is a dict with keys m, N, level, d and optionally problem.
    problem="transmission" additionally pins m = 2 and d in {2, 3}.
    """

    def validate(self, value: Dict[str, Any], **kwargs) -> ValidationResult:
        try:
            params = self.normalize(value)
        except (KeyError, TypeError, ValueError) as e:
            return self._create_error_result(value, [f"discretization parameters incomplete: {e}"])

        m, N, level, d = params["m"], params["N"], params["level"], params["d"]
        errors, warnings, suggestions = [], [], []

        if m < 1:
            errors.append(f"m must be >= 1, got {m}")
        if N < 2 * m:
            errors.append(f"N must be >= 2m = {2 * m}, got {N}")
            suggestions.append(f"use N >= {2 * m}")
        if N > MAX_DEGREE:
            errors.append(f"N = {N} exceeds the supported maximum {MAX_DEGREE}")
        if not 0 <= level <= MAX_LEVEL:
            errors.append(f"level must lie in [0, {MAX_LEVEL}], got {level}")
        if not 1 <= d <= 3:
            errors.append(f"dimension must be 1, 2 or 3, got {d}")

        if params.get("problem") == "transmission":
            if m != 2:
                errors.append("the transmission problem needs m = 2")
            if d not in (2, 3):
                errors.append(f"the transmission problem needs d = 2 or 3, got {d}")

        elements = 2 ** (d * level)
        local = (N + 1) ** d
        if elements * local > 5_000_000:
            warnings.append(f"{elements} elements of {local} local functions each; expect long assembly times")

        if errors:
            return self._create_error_result(value, errors, suggestions=suggestions)
        return self._create_success_result(
            value, params, warnings=warnings, metadata={"local_functions": local, "elements_per_box": elements}
        )

    def normalize(self, value: Dict[str, Any], **kwargs) -> Dict[str, Any]:
        out = {key: int(value[key]) for key in ("m", "N", "d")}
        out["level"] = int(value.get("level", 0))
        if "problem" in value:
            out["problem"] = str(value["problem"])
        return out
