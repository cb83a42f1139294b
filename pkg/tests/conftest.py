import pytest

from timecourse.graph import from_scm
from timecourse.scm import NoiseSpec, Scm, StructuralEquation, TargetSpec, Variable

#: Fixed unfavorable credit applicant used across recourse tests. Score is
#: 2*41.5 + 3*(-100) - 0.5 - 2 = -219.5, well below the threshold but
#: reachable within the default +-5 sigma-hat intervention bounds.
DEMO_INSTANCE = {
    "G": 1.0,
    "A": 0.0,
    "E": 1.5,
    "J": 7.0,
    "L": 0.5,
    "D": 2.0,
    "I": 41.5,
    "S": -100.0,
}

CHAIN_TIMES = {"X->M": 4.0, "M->Z": 1.0}


def make_chain_scm() -> Scm:
    """X -> M -> Z with betas 2 and 3; target reads Z."""
    return Scm(
        variables=(
            Variable("X", StructuralEquation((), {}, 0.0), NoiseSpec.normal(0.0, 1.0)),
            Variable("M", StructuralEquation(("X",), {"X": 2.0}, 0.0),
                     NoiseSpec.normal(0.0, 1.0)),
            Variable("Z", StructuralEquation(("M",), {"M": 3.0}, 0.0),
                     NoiseSpec.normal(0.0, 1.0)),
        ),
        target=TargetSpec({"Z": 1.0}, 0.5),
    )


def make_two_node_scm() -> Scm:
    """Two independent roots; only X feeds the score."""
    return Scm(
        variables=(
            Variable("W", StructuralEquation((), {}, 0.0), NoiseSpec.normal(0.0, 1.0)),
            Variable("X", StructuralEquation((), {}, 0.0), NoiseSpec.normal(0.0, 1.0)),
        ),
        target=TargetSpec({"X": 1.0}, 0.5),
    )


@pytest.fixture()
def chain_scm() -> Scm:
    return make_chain_scm()


@pytest.fixture()
def chain_dag(chain_scm):
    return from_scm(chain_scm, CHAIN_TIMES)


@pytest.fixture()
def two_node_scm() -> Scm:
    return make_two_node_scm()


@pytest.fixture()
def demo_instance() -> dict:
    return dict(DEMO_INSTANCE)
