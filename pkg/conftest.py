import sys
from pathlib import Path

# Prefer the local sources so the suite runs from a fresh checkout.
_src = str(Path(__file__).resolve().parent / "src")
if _src not in sys.path:
    sys.path.insert(0, _src)
