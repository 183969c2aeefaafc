"""Reference rational functions of (x1, y1) with known numerator and denominator.

Used by the test-suite and by ``reconstruct`` demos; each entry is
separately regular, so the pipeline must recover P / Q up to a common
factor in y1.
"""

from typing import Dict, List

GOLDEN_ORACLES: List[Dict[str, str]] = [
    {
        "name": "sum",
        "expr": "x1 + y1",
        "numerator": "x1 + y1",
        "denominator": "1",
    },
    {
        "name": "product_over_quadratic",
        "expr": "x1*y1/(1 + x1^2)",
        "numerator": "x1*y1",
        "denominator": "x1^2 + 1",
    },
    {
        "name": "sum_over_norm",
        "expr": "(x1 + y1)/(1 + x1^2 + y1^2)",
        "numerator": "x1 + y1",
        "denominator": "x1^2 + y1^2 + 1",
    },
    {
        "name": "quadratic_over_y",
        "expr": "(x1^2 - y1)/(2 + y1^2)",
        "numerator": "x1^2 - y1",
        "denominator": "y1^2 + 2",
    },
]


def golden(name: str) -> Dict[str, str]:
    for entry in GOLDEN_ORACLES:
        if entry["name"] == name:
            return entry
    raise KeyError(name)
