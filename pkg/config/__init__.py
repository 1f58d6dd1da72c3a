"""Settings, run-config loading and validation."""
