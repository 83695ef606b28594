import os
import sys

# Add current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from gesture_radar.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
