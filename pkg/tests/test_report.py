from __future__ import annotations

import numpy as np
import pytest

from artinflat.report import Report, as_bool, format_value, parse_reports, render


def test_format_values():
    assert format_value(True) == "true" and format_value(None) == "none"
    assert format_value([1, [2, 3]]) == "[1, [2, 3]]"
    assert format_value(np.array([0, 1])) == "[0, 1]"


def test_roundtrip_and_duplicates():
    r = Report("x").add("a", 1).add("b", False)
    with pytest.raises(KeyError):
        r.add("a", 2)
    text = render([r, Report("y").add("c", "v = w")])
    back = parse_reports(text)
    assert [b.to_text() for b in back] == [r.to_text(), Report("y").add("c", "v = w").to_text()]
    assert as_bool(back[0]["b"]) is False
    with pytest.raises(ValueError):
        parse_reports("a = 1\n")
