"""Strong quasiconvexity defects and modulus estimation."""
