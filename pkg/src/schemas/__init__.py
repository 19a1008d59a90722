"""
Run configuration schemas.
"""

from .run_config import RunConfig, emit_config, load_config, parse_config

__all__ = ['RunConfig', 'emit_config', 'load_config', 'parse_config']
