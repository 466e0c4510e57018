"""Shared builders for the test suite."""

import numpy as np

from ergmsize import terms as T
from ergmsize.network import AttributeTable, Network

SEX = ["F", "M"]
RACE = ["B", "H", "O", "W"]


def random_attrs(n, rng, integer_ages=True):
    age = rng.integers(18, 60, n).astype(float) if integer_ages else rng.uniform(18, 60, n)
    return AttributeTable(n, {"sex": rng.integers(0, 2, n), "race": rng.integers(0, 4, n)},
                          {"sex": list(SEX), "race": list(RACE)}, {"age": age})


def random_network(n, p, rng):
    iu = np.triu_indices(n, 1)
    hit = rng.random(iu[0].size) < p
    return Network(n, zip(iu[0][hit].tolist(), iu[1][hit].tolist()))


def term_pool():
    """One instance of every term kind, with a spread of parameters."""
    return [
        T.edges(),
        T.activity("sex", "F"), T.activity("race", "O"),
        T.within("race", "W"), T.within("sex", "M"),
        T.between("race", "B", "H"), T.between("sex", "F", "M"),
        T.same("race"), T.same("sex"),
        T.numeric_activity("age"), T.numeric_activity("age", "scaled"),
        T.numeric_activity("age", "sqrt_scaled"), T.numeric_activity("age", "sqrt"),
        T.numeric_difference("age"), T.numeric_difference("age", "scaled", 1),
        T.numeric_difference("age", "sqrt", 1), T.numeric_difference("age", "sqrt", 2),
        T.numeric_difference("age", "scaled", 2), T.numeric_difference("age", power=2),
        T.ordered_asymmetry("sex", "M", "F", "age"), T.ordered_asymmetry("race", "W", "B", "age"),
        T.degree(0), T.degree(1), T.degree(2), T.degree(1, "sex", "F"), T.degree(3, "race", "H"),
    ]
