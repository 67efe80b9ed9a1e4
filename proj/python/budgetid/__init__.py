"""Python front end for the budgetid C++ core."""

from ._budgetid import (
    BanditInstance,
    BudgetIdError,
    DifficultyResult,
    Family,
    TaskSpec,
    Weights,
    bernoulli_two_arm_bound,
    bernoulli_two_arm_limits,
    correct_answer,
    estimate_error,
    gaussian_bai_bound,
    grid_oracle,
    h_delta,
    kl,
    oracle_difficulty,
    positivity_bound,
    sp_rate,
)

__all__ = [
    "BanditInstance",
    "BudgetIdError",
    "DifficultyResult",
    "Family",
    "TaskSpec",
    "Weights",
    "bernoulli_two_arm_bound",
    "bernoulli_two_arm_limits",
    "correct_answer",
    "estimate_error",
    "gaussian_bai_bound",
    "grid_oracle",
    "h_delta",
    "kl",
    "oracle_difficulty",
    "positivity_bound",
    "sp_rate",
]
