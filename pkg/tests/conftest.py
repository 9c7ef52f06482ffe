import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from uller.interpretation import interpretation_from_dict, load_interpretation

FIXTURE_DIR = Path(__file__).parent.parent / "src" / "uller" / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def dice_interp():
    return load_interpretation(str(FIXTURE_DIR / "dice.json"))


@pytest.fixture(scope="session")
def dice_interp_exact():
    return load_interpretation(str(FIXTURE_DIR / "dice.json"), exact=True)


@pytest.fixture()
def binary_param_interp():
    """One nullary parameterised function over a two-element codomain."""
    return interpretation_from_dict(
        {
            "domains": {"out": ["a", "b"]},
            "functions": {
                "f": {"args": [], "codomain": "out", "kind": "parameterised", "rows": {"[]": [0.3, -0.2]}}
            },
        }
    )
