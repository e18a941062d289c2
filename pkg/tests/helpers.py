import math

# Filled by test_acceptance.py; printed once at the end of the run.
ACCEPTANCE = {}


def rel(a, b):
    return abs(a - b) / abs(b)


def log_rel(la, lb):
    """Relative difference of exp(la) and exp(lb) without forming either."""
    return abs(math.expm1(la - lb))
