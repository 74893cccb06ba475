import pytest
import time

import numpy as np

from glyphread.model.attention import attention_backward
from glyphread.model.recognizer import GROUPS
from glyphread.training.gradcheck import GradcheckReport, GroupCheck, gradient_check, relative_error
from test_utils import random_image, toy_model


def test_relative_error_floor():
    assert relative_error(np.array([0.0]), np.array([0.0]))[0] == 0.0
    assert relative_error(np.array([1e-9]), np.array([0.0]))[0] == pytest.approx(1e-4)
    assert relative_error(np.array([1.0]), np.array([3.0]))[0] == pytest.approx(0.5)


@pytest.mark.parametrize("attention", [True, False])
def test_toy_model_passes_full_check(attention):
    model = toy_model(seed=1, attention=attention)
    start = time.perf_counter()
    report = gradient_check(model, random_image(2), "ab")
    assert time.perf_counter() - start < 60
    assert report.passed, report.lines()
    checked = {g.group for g in report.groups}
    assert checked == set(GROUPS)
    assert all(g.max_rel_error < 1e-4 for g in report.groups)


def test_sampled_check_counts_coordinates():
    model = toy_model(seed=3)
    report = gradient_check(model, random_image(4), "a", samples_per_group=5)
    assert report.passed
    expected = {}
    for name, value in model.params.items():
        group = name.split(".", 1)[0]
        expected[group] = expected.get(group, 0) + min(5, value.size)
    assert {g.group: g.checked for g in report.groups} == expected


def test_corrupted_attention_gradient_is_caught(mocker):
    def corrupted(cache, grad_z, params):
        grads, grad_x, grad_h = attention_backward(cache, grad_z, params)
        grads["attention.w_a"] = grads["attention.w_a"] * 1.5 + 1e-3
        return grads, grad_x, grad_h

    mocker.patch("glyphread.model.recognizer.attention_backward", side_effect=corrupted)
    report = gradient_check(toy_model(seed=5), random_image(6), "ab", samples_per_group=8)
    assert not report.passed
    assert "attention" in report.failed_groups()
    assert "output" not in report.failed_groups()


def test_report_lines():
    report = GradcheckReport(1e-4, 1e-5, [GroupCheck("encoder", 1e-7, 10, True), GroupCheck("init", 0.1, 4, False)])
    assert not report.passed
    assert report.failed_groups() == ["init"]
    assert report.lines()[1].endswith("FAIL")
    assert GradcheckReport.from_json(report.to_json()) == report


def test_impossible_tolerance_reports_failures():
    report = gradient_check(toy_model(seed=2), random_image(3), "ab", tol=1e-12, samples_per_group=4)
    assert not report.passed
    assert report.failed_groups()
    assert len(report.groups) == len(GROUPS)
