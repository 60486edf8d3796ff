"""
Runtime settings: defaults, environment overrides and validation.
"""
import pytest

from app.settings import get_settings, reset_settings, use_settings


def test_defaults() -> None:
    """
    Without environment overrides the documented defaults apply.
    """
    s = get_settings()
    assert (s.max_degree, s.zpower, s.stabilization_window) == (40, 8, 5)
    assert s.stats is False


def test_environment_overrides(monkeypatch) -> None:
    """
    WEYLFIBER_* variables are read on the next load.
    """
    monkeypatch.setenv("WEYLFIBER_MAX_DEGREE", "12")
    monkeypatch.setenv("WEYLFIBER_STATS", "yes")
    reset_settings()
    s = get_settings()
    assert s.max_degree == 12
    assert s.stats is True


def test_non_integer_is_refused(monkeypatch) -> None:
    """
    A non-numeric bound fails loudly.
    """
    monkeypatch.setenv("WEYLFIBER_ZPOWER", "many")
    reset_settings()
    with pytest.raises(ValueError):
        get_settings()


def test_window_cannot_exceed_degree() -> None:
    """
    The stabilization window must fit in the degree range.
    """
    with pytest.raises(ValueError):
        get_settings().with_overrides(max_degree=2, stabilization_window=4)


def test_overrides_ignore_none_and_install() -> None:
    """
    None leaves a field untouched; use_settings installs the copy.
    """
    base = get_settings()
    s = base.with_overrides(zpower=3, max_degree=None)
    assert (s.zpower, s.max_degree) == (3, base.max_degree)
    use_settings(s)
    assert get_settings().zpower == 3
