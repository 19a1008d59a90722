"""
Validator for the refraction index n(x) on a point sweep.

The weak form divides by n - 1, so n - 1 must stay away from zero and keep
one sign over the whole domain.
"""

from typing import Any

import numpy as np

from .base_validator import BaseValidator, ValidationResult

MIN_CONTRAST = 1e-8


class CoefficientValidator(BaseValidator):
    def __init__(self, min_contrast: float = MIN_CONTRAST):
        self.min_contrast = min_contrast

    def validate(self, value: Any, **kwargs) -> ValidationResult:
        """
        Args:
            value: Coefficient with a value(points) evaluator
            points: array (P, d) of sample points (required keyword)
        """
        points = kwargs.get("points")
        if points is None or len(points) == 0:
            return self._create_error_result(value, ["no sample points given for the coefficient sweep"])

        try:
            contrast = np.asarray(value.value(points), dtype=float) - 1.0
        except Exception as e:
            return self._create_error_result(value, [f"coefficient evaluation failed: {e}"])

        if not np.all(np.isfinite(contrast)):
            return self._create_error_result(value, ["coefficient is not finite on the domain"])

        smallest = float(np.min(np.abs(contrast)))
        metadata = {"min_contrast": smallest, "min": float(np.min(contrast)), "max": float(np.max(contrast))}
        errors = []
        if smallest < self.min_contrast:
            worst = int(np.argmin(np.abs(contrast)))
            errors.append(
                f"|n - 1| = {smallest:.3e} < {self.min_contrast:.0e} at x = {np.asarray(points)[worst].tolist()}"
            )
        elif np.min(contrast) < 0 < np.max(contrast):
            errors.append("n - 1 changes sign on the domain")
        if errors:
            return self._create_error_result(
                value,
                errors,
                suggestions=["choose n with n > 1 everywhere or 0 < n < 1 everywhere"],
                metadata=metadata,
            )
        return self._create_success_result(value, metadata=metadata)

    def normalize(self, value: Any, **kwargs) -> Any:
        return value
