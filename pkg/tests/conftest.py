import pytest

from nonvanish.rpoly import MollifierSpec, preset_spec


@pytest.fixture(scope="session")
def paper_spec() -> MollifierSpec:
    return preset_spec("paper")


@pytest.fixture(scope="session")
def quarter_spec() -> MollifierSpec:
    # headline profiles at theta1 = theta2 = 1/4 (inside the proven range
    # boundary, used for empirical runs)
    return MollifierSpec.make("1/4", "1/4", ["21/20", "-1/20"], ["9/10"])
