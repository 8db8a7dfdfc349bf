import pytest

from causaltext.fixtures import (FIVE_VAR_HYPOTHESIS, FIVE_VAR_PREMISE,
                                 JUNK_FOOD_HYPOTHESIS, JUNK_FOOD_PREMISE,
                                 THREE_VAR_HYPOTHESIS, THREE_VAR_PREMISE,
                                 five_var_doc, junk_food_doc, three_var_doc)

# expected step matrices for the bundled five-variable worked example
FIVE_VAR_STEP_3 = {
    "A": {"A": 0, "B": 1, "C": 1, "D": 1, "E": 1},
    "B": {"A": 1, "B": 0, "C": 1, "D": 1, "E": 1},
    "C": {"A": 1, "B": 1, "C": 0, "D": 1, "E": 1},
    "D": {"A": 1, "B": 1, "C": 1, "D": 0, "E": 1},
    "E": {"A": 1, "B": 1, "C": 1, "D": 1, "E": 0},
}
FIVE_VAR_STEP_4 = {
    "A": {"A": 0, "B": 0, "C": 1, "D": 1, "E": 1},
    "B": {"A": 0, "B": 0, "C": 0, "D": 1, "E": 1},
    "C": {"A": 1, "B": 0, "C": 0, "D": 1, "E": 1},
    "D": {"A": 1, "B": 1, "C": 1, "D": 0, "E": 1},
    "E": {"A": 1, "B": 1, "C": 1, "D": 1, "E": 0},
}
FIVE_VAR_STEP_5 = {
    "A": {"A": 0, "B": 0, "C": 1, "D": 1, "E": 1},
    "B": {"A": 0, "B": 0, "C": 0, "D": 1, "E": 1},
    "C": {"A": 1, "B": 0, "C": 0, "D": 1, "E": 0},
    "D": {"A": 1, "B": 1, "C": 1, "D": 0, "E": 1},
    "E": {"A": 1, "B": 1, "C": 0, "D": 1, "E": 0},
}
FIVE_VAR_STEP_6 = {
    "A": [["C", "D"], ["C", "E"], ["D", "E"]],
    "B": [["D", "E"]],
    "C": [["A", "D"]],
    "D": [["A", "B"], ["A", "C"], ["A", "E"], ["B", "C"], ["B", "E"], ["C", "E"]],
    "E": [["A", "B"], ["A", "D"], ["B", "D"]],
}
FIVE_VAR_STEP_7 = {
    "D": [["A", "B"], ["B", "C"]],
    "E": [["A", "B"]],
}
FIVE_VAR_STEP_8 = {
    "A": {"A": 0, "B": 0, "C": 1, "D": 1, "E": 1},
    "B": {"A": 0, "B": 0, "C": 0, "D": 1, "E": 1},
    "C": {"A": 1, "B": 0, "C": 0, "D": 1, "E": 0},
    "D": {"A": 0, "B": 0, "C": 0, "D": 0, "E": 1},
    "E": {"A": 0, "B": 0, "C": 0, "D": 1, "E": 0},
}

# expected step outputs of the junk-food story
JUNK_FOOD_STEP_3 = {
    "A": {"A": 0, "B": 1, "C": 1},
    "B": {"A": 1, "B": 0, "C": 1},
    "C": {"A": 1, "B": 1, "C": 0},
}
JUNK_FOOD_STEP_4 = {
    "A": {"A": 0, "B": 0, "C": 1},
    "B": {"A": 0, "B": 0, "C": 1},
    "C": {"A": 1, "B": 1, "C": 0},
}
JUNK_FOOD_STEP_6 = {"C": [["A", "B"]]}
JUNK_FOOD_STEP_8 = {
    "A": {"A": 0, "B": 0, "C": 1},
    "B": {"A": 0, "B": 0, "C": 1},
    "C": {"A": 0, "B": 0, "C": 0},
}


@pytest.fixture(scope="session")
def five_var():
    return five_var_doc()


@pytest.fixture(scope="session")
def junk_food():
    return junk_food_doc()


@pytest.fixture(scope="session")
def three_var():
    return three_var_doc()
