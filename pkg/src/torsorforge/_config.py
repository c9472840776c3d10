import os

DEFAULT_BUDGET = 10**7
BUDGET_ENV = "TORSORFORGE_BUDGET"


def resolve_budget(budget: int | None) -> int:
    """Explicit argument wins, then the environment variable, then the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV)
    if env:
        return int(env)
    return DEFAULT_BUDGET
