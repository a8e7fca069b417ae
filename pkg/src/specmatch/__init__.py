"""Class-aware spectral distribution matching."""
