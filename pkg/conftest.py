import sys
from pathlib import Path

# tests import the packages the same way main.py does
sys.path.insert(0, str(Path(__file__).parent))
