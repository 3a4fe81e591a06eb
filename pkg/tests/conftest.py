import math

import numpy as np
import pytest

from impulsive_rd import HyperRect, Masked


def fk_corpus(h=1 / 64):
    """The five shapes used for Faber-Krahn checks: (name, domain, grid spacing)."""
    l_shape = Masked.from_predicate(
        lambda x, y: (x > 0) & (x < 2) & (y > 0) & (y < 2) & ~((x >= 1) & (y >= 1)),
        (0, 0), (2, 2), h,
    )
    disk = Masked.from_predicate(lambda x, y: x**2 + y**2 < 1, (-1 - h, -1 - h), (1 + h, 1 + h), h)
    ellipse = Masked.from_predicate(
        lambda x, y: x**2 + (y / 0.5) ** 2 < 1, (-1 - h, -0.5 - h), (1 + h, 0.5 + h), h
    )
    return [
        ("square", HyperRect((1.0, 1.0)), h),
        ("rect 2x0.5", HyperRect((2.0, 0.5)), h),
        ("L-shape", l_shape, None),
        ("disk", disk, None),
        ("ellipse", ellipse, None),
    ]


@pytest.fixture(scope="session")
def corpus():
    return fk_corpus()


J01 = 2.404825557695773


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
