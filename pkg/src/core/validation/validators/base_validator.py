"""
Abstract base class for input validators.

Validators never raise on bad input; they return a ValidationResult and the
caller decides which SpectralError to raise from it.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List


@dataclass
class ValidationResult:
    """
    Standardized validation outcome.

    Attributes:
        is_valid: True if validation passed
        value: Normalized value
        original_value: Value as provided
        errors: Problems that make the value unusable
        warnings: Problems that do not block the run
        suggestions: Hints for fixing the input
        metadata: Validator-specific extras (counts, bounds, ...)
    """
    is_valid: bool
    value: Any = None
    original_value: Any = None
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    suggestions: List[str] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def summary(self) -> str:
        """Errors joined for an exception message."""
        return "; ".join(self.errors)


class BaseValidator(ABC):
    """
    Common interface: validate and normalize.
    """

    @abstractmethod
    def validate(self, value: Any, **kwargs) -> ValidationResult:
        """
        Validate an input value.

        Args:
            value: Value to validate
            **kwargs: Validator-specific parameters

        Returns:
            ValidationResult with the outcome
        """

    @abstractmethod
    def normalize(self, value: Any, **kwargs) -> Any:
        """Return the canonical form of a value."""

    def _create_error_result(
        self,
        value: Any,
        errors: List[str],
        suggestions: List[str] = None,
        metadata: Dict[str, Any] = None,
    ) -> ValidationResult:
        return ValidationResult(
            is_valid=False,
            value=None,
            original_value=value,
            errors=errors,
            suggestions=suggestions or [],
            metadata=metadata or {},
        )

    def _create_success_result(
        self,
        original_value: Any,
        normalized_value: Any = None,
        warnings: List[str] = None,
        metadata: Dict[str, Any] = None,
    ) -> ValidationResult:
        return ValidationResult(
            is_valid=True,
            value=normalized_value if normalized_value is not None else original_value,
            original_value=original_value,
            warnings=warnings or [],
            metadata=metadata or {},
        )
