import numpy as np

from lsro_core.errors import LabError, LabErrorCode, invalid, shape_error
from lsro_core.rng import stage_rng


def test_error_string_carries_stage():
    err = LabError(LabErrorCode.STAGE_FAILED, "boom", stage="train")
    assert str(err) == "[train] boom"
    assert not err.is_config_error
    assert err.to_error_dict() == {"code": "STAGE_FAILED", "message": "boom", "details": {}, "stage": "train"}


def test_helpers_build_coded_errors():
    assert invalid("bad", x=1).details_safe == {"x": 1}
    err = shape_error("matmul", (2, 3), (4, 5))
    assert err.code is LabErrorCode.SHAPE_MISMATCH
    assert err.details_safe["shapes"] == [[2, 3], [4, 5]]


def test_stage_rng_is_reproducible_and_tag_separated():
    a = stage_rng(7, "train").random(5)
    b = stage_rng(7, "train").random(5)
    c = stage_rng(7, "gan").random(5)
    d = stage_rng(8, "train").random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
