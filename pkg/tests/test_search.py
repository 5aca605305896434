import pytest

from loyaltygame._search import golden_section_max


def test_interior_maximum():
    assert golden_section_max(lambda x: -(x - 1.3) ** 2, 0, 5) == pytest.approx(1.3, abs=1e-7)


def test_boundary_maxima_exact():
    assert golden_section_max(lambda x: x, 0, 2) == 2.0
    assert golden_section_max(lambda x: -x, 0, 2) == 0.0


def test_flat_function_prefers_bound():
    assert golden_section_max(lambda x: 1.0, 0, 2) in (0.0, 2.0)


def test_empty_interval():
    with pytest.raises(ValueError):
        golden_section_max(lambda x: x, 1, 0)
