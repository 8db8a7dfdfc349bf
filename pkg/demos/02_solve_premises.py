"""Solving verbalized premises: text in, per-step matrices and a verdict out.

Run with:  python demos/02_solve_premises.py
"""

import json

from causaltext import solve_text
from causaltext.fixtures import (FIVE_VAR_HYPOTHESIS, FIVE_VAR_PREMISE,
                                 JUNK_FOOD_HYPOTHESIS, JUNK_FOOD_PREMISE,
                                 SMBH_HYPOTHESIS, smbh_doc)
from causaltext.pipeline import solve_doc


def show(title, report):
    print(f"\n=== {title}")
    print("variables:", report["step_1"]["names"])
    print("relations:", json.dumps(report["step_2"]))
    for key in ("step_3", "step_4", "step_5", "step_8"):
        print(f"{key}: {json.dumps(report[key])}")
    print("candidates:", json.dumps(report["step_6"]),
          "-> kept:", json.dumps(report["step_7"]))
    final = report["step_9"]
    print("answer:", final["answer"], " witness:", json.dumps(final["witness"]))


# A three-variable premise whose single collider makes the claim decidable.
premise = ("Suppose that there is a closed system of 3 variables, A, B and C. "
           "All statistical relations among these 3 variables are as follows: "
           "A correlates with C. B correlates with C. "
           "However, A is independent of B.")
show("three variables", solve_text(premise, "A directly affects C.").report())

# The five-variable worked example: two collider hubs emerge, one edge stays
# undirected, and the common-effect claim is certified with two witnesses.
show("five variables",
     solve_text(FIVE_VAR_PREMISE, FIVE_VAR_HYPOTHESIS).report())

# The same three-variable system told as an everyday story. Long names bind
# to labels through the alias header, so the algebra is unchanged.
show("natural story",
     solve_text(JUNK_FOOD_PREMISE, JUNK_FOOD_HYPOTHESIS).report())

# The black-hole coevolution study ships pre-parsed: its prose uses
# relational verbs outside the template grammar.
show("black-hole study", solve_doc(smbh_doc(), SMBH_HYPOTHESIS).report())
