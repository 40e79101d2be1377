"""vdpkit: exact certificates for the hypersurface family X_n = {p_n = 0}."""

__version__ = "0.1.0"
