"""GKZ and Picard-Fuchs operators of the Hesse pencil, their solutions and checks."""

__version__ = "0.1.0"
