"""Utilities Module"""
from .helpers import (
    config_digest, ensure_directory, flatten_dict, format_number,
    load_json, save_json, setup_logging
)

__all__ = [
    "config_digest", "ensure_directory", "flatten_dict", "format_number",
    "load_json", "save_json", "setup_logging"
]
