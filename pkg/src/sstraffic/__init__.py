"""Self-similar traffic synthesis, Hurst estimation and multiplexing experiments."""
