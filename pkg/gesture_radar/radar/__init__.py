"""Numeric gesture-radar modules: Golay codec, framing, simulation, slopes, tracking and detection."""
