"""
Input validation for run parameters.

Validators return ValidationResult objects; the kernel turns failed results
into the matching SpectralError.
"""

from .validators.base_validator import BaseValidator, ValidationResult
from .validators.coefficient_validator import CoefficientValidator
from .validators.discretization_validator import DiscretizationValidator
from .validators.domain_validator import DomainValidator

__all__ = [
    'BaseValidator',
    'ValidationResult',
    'CoefficientValidator',
    'DiscretizationValidator',
    'DomainValidator'
]
