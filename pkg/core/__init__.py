"""Core utilities used by the application (logging, config, etc.)."""
