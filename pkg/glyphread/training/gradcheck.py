"""
Compare the analytic gradients of the recognizer against central finite
differences of its loss, one parameter group at a time.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from dataclasses_json import dataclass_json
from loguru import logger

from glyphread.model.recognizer import Recognizer, group_parameters
from glyphread.model.tensor import Tensor, finite_diff_grad


@dataclass_json
@dataclass
class GroupCheck:
    group: str
    max_rel_error: float
    checked: int
    passed: bool


@dataclass_json
@dataclass
class GradcheckReport:
    tol: float
    eps: float
    groups: List[GroupCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.groups)

    def failed_groups(self) -> List[str]:
        return [g.group for g in self.groups if not g.passed]

    def lines(self) -> List[str]:
        return [
            f"{g.group}\t{g.max_rel_error:.3e}\t{g.checked}\t{'ok' if g.passed else 'FAIL'}"
            for g in self.groups
        ]


def relative_error(analytic: Tensor, numeric: Tensor, floor: float = 1e-5) -> Tensor:
    return np.abs(analytic - numeric) / np.maximum(np.abs(analytic) + np.abs(numeric), floor)


def _numeric_at(f, x: Tensor, index, eps: float) -> float:
    original = x[index]
    x[index] = original + eps
    f_plus = f(x)
    x[index] = original - eps
    f_minus = f(x)
    x[index] = original
    return (f_plus - f_minus) / (2 * eps)


def gradient_check(
    model: Recognizer,
    image: Tensor,
    target: str,
    eps: float = 1e-5,
    tol: float = 1e-4,
    samples_per_group: Optional[int] = None,
    seed: int = 0,
) -> GradcheckReport:
    """
    Every coordinate is checked unless ``samples_per_group`` limits each group
    to that many randomly chosen coordinates.
    """
    _, analytic = model.forward_backward(image, target)
    rng = np.random.default_rng(seed)
    report = GradcheckReport(tol, eps)

    def loss(_: Tensor) -> float:
        return model.loss(image, target)

    for group, names in group_parameters(list(model.params)).items():
        worst = 0.0
        checked = 0
        for name in names:
            x = model.params[name]
            if samples_per_group is None:
                numeric = finite_diff_grad(loss, x, eps)
                errors = relative_error(analytic[name], numeric)
                checked += x.size
            else:
                count = min(samples_per_group, x.size)
                flat = rng.choice(x.size, size=count, replace=False)
                indices = [np.unravel_index(i, x.shape) for i in flat]
                numeric = np.array([_numeric_at(loss, x, index, eps) for index in indices])
                errors = relative_error(np.array([analytic[name][index] for index in indices]), numeric)
                checked += count
            if errors.size:
                worst = max(worst, float(errors.max()))
        passed = worst < tol
        if not passed:
            logger.warning(
                "gradient check failed for {group}: max relative error {error:.3e}",
                group=group, error=worst,
            )
        report.groups.append(GroupCheck(group, worst, checked, passed))
    return report
