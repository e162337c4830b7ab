"""Forward models and parameter extraction for flux-tunable nanobridge SQUID resonators."""

__version__ = "0.1.0"
