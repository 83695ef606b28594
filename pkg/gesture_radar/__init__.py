"""60 GHz gesture radar: slider tracking and two-finger detection from 802.11ad channel estimates."""

__version__ = "0.1.0"
