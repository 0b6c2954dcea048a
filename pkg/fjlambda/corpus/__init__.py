"""Example ``.fjl`` programs shipped with the package."""
