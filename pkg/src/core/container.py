"""
Service Container for dependency injection and singleton management.

This module provides a centralized way to manage service instances, sharing
one Settings object between them and facilitating testing through
dependency injection.
"""

from typing import Dict, Any, Optional
import threading

from src.core.config import get_settings
from src.services.inspection_service import InspectionService
from src.services.interpolation_service import InterpolationService
from src.services.transmission_service import TransmissionService


class ServiceContainer:
    """
    Singleton service container for managing application dependencies.

    Provides lazy initialization and retrieval of service instances with a
    thread-safe singleton pattern.
    """

    _instance: Optional['ServiceContainer'] = None
    _lock = threading.Lock()

    def __new__(cls) -> 'ServiceContainer':
        """Ensure singleton pattern with thread safety."""
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        """Initialize container (only once due to singleton pattern)."""
        if not getattr(self, '_initialized', False):
            self._services: Dict[str, Any] = {}
            self._initialized = True

    def initialize_services(self) -> None:
        """
        Initialize all services with the shared settings.

        Services are independent of each other; they only share Settings.
        """
        settings = get_settings()

        if 'transmission_service' not in self._services:
            self._services['transmission_service'] = TransmissionService(settings=settings)

        if 'interpolation_service' not in self._services:
            self._services['interpolation_service'] = InterpolationService(settings=settings)

        if 'inspection_service' not in self._services:
            self._services['inspection_service'] = InspectionService(settings=settings)

    def get_service(self, service_name: str) -> Any:
        """
        Get a service instance by name.

        Args:
            service_name: Name of the service to retrieve

        Returns:
            Service instance

        Raises:
            KeyError: If service is not registered
        """
        if service_name not in self._services:
            self.initialize_services()

        if service_name not in self._services:
            raise KeyError(f"Service '{service_name}' not found in container")

        return self._services[service_name]

    def register_service(self, service_name: str, service_instance: Any) -> None:
        """Register a service instance manually (tests, custom settings)."""
        self._services[service_name] = service_instance

    def clear_services(self) -> None:
        """Clear all registered services."""
        self._services.clear()

    def is_initialized(self, service_name: str) -> bool:
        return service_name in self._services


def get_transmission_service() -> TransmissionService:
    """Get the singleton TransmissionService instance."""
    return ServiceContainer().get_service('transmission_service')


def get_interpolation_service() -> InterpolationService:
    """Get the singleton InterpolationService instance."""
    return ServiceContainer().get_service('interpolation_service')


def get_inspection_service() -> InspectionService:
    """Get the singleton InspectionService instance."""
    return ServiceContainer().get_service('inspection_service')
