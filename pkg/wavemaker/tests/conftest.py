import pytest

from app.schemas.model_schemas import Equation, ModelCoefficients
from app.schemas.solution_schemas import OracleGrid


@pytest.fixture
def kdv():
    return ModelCoefficients.kdv()


@pytest.fixture
def bbm():
    return ModelCoefficients.bbm()


@pytest.fixture
def small_bbm_grid():
    # half-line grid; a Richardson pair builds in well under a second
    return OracleGrid(equation=Equation.BBM, x_max=30.0, nx=300)


@pytest.fixture
def small_kdv_grid():
    return OracleGrid(equation=Equation.KDV, x_max=30.0, nx=300)
