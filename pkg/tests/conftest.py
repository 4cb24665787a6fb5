import sys
from pathlib import Path

# make the suite runnable from a bare checkout
_root = Path(__file__).resolve().parent.parent
for entry in (str(_root / "src"), str(_root / "tests")):
    if entry not in sys.path:
        sys.path.insert(0, entry)
