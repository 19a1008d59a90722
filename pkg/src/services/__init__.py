"""
Services module for run orchestration.
"""

from .inspection_service import InspectionService
from .interpolation_service import InterpolationService
from .transmission_service import TransmissionService

__all__ = [
    'InspectionService',
    'InterpolationService',
    'TransmissionService'
]
