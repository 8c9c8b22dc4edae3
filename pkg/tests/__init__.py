"""capg-lab test suite."""
