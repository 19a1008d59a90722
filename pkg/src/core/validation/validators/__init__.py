"""
Input validators for domains, coefficients and discretization parameters.
"""

from .base_validator import BaseValidator, ValidationResult
from .coefficient_validator import CoefficientValidator
from .discretization_validator import DiscretizationValidator
from .domain_validator import DomainValidator

__all__ = [
    'BaseValidator',
    'ValidationResult',
    'CoefficientValidator',
    'DiscretizationValidator',
    'DomainValidator'
]
