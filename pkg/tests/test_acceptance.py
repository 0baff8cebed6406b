"""Acceptance criteria C1-C10, one test each, at the tolerances they state.

C1+ and C4+ are supplementary: they check the corrected variance and
pair-class expressions on the same grids as C1 and C4.
"""

import pytest

from gendescent import reproduce

from .conftest import ACCEPTANCE_LINES


def check(result):
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, line


def test_c1_variance_formula():
    check(reproduce.criterion_1())


def test_c1_corrected_variance_formula():
    check(reproduce.criterion_1_corrected())


def test_c2_d1_variance():
    check(reproduce.criterion_2())


def test_c3_oracle_equivalence():
    check(reproduce.criterion_3(workers=2))


def test_c4_pair_class_formulas():
    check(reproduce.criterion_4())


def test_c4_corrected_pair_class_counts():
    check(reproduce.criterion_4_corrected())


def test_c5_degree_bound():
    check(reproduce.criterion_5())


def test_c6_unimodality():
    check(reproduce.criterion_6())


def test_c7_janson_condition():
    check(reproduce.criterion_7())


def test_c8_normality_fixed_d():
    check(reproduce.criterion_8())


def test_c9_normality_growing_d():
    check(reproduce.criterion_9())


def test_c10_determinism():
    check(reproduce.criterion_10())
