import json
import math
from fractions import Fraction

import pytest

from coneindex.fredholm import fredholm_index
from coneindex.serialize import (
    dumps,
    gamma_report,
    index_report,
    load_msi,
    msi_from_dict,
    spectrum_from_dict,
    spectrum_to_dict,
    to_plain,
)
from coneindex.spectra import clifford_torus_spectrum


def test_dumps_is_canonical():
    text = dumps({"b": 0.1, "a": [Fraction(3), Fraction(1, 2)], "c": True, "d": None})
    assert text.index('"a"') < text.index('"b"')
    assert "0.10000000000000001" in text
    assert json.loads(text) == {"a": [3, 0.5], "b": 0.1, "c": True, "d": None}


@pytest.mark.parametrize("x,text", [(1.0, "1.0"), (-2.5, "-2.5"), (math.inf, "Infinity"),
                                    (1e300, "1.0000000000000001e+300")])
def test_float_format(x, text):
    assert dumps(x).strip() == text


def test_to_plain_complex_and_fraction():
    assert to_plain([1 + 2j, Fraction(4, 2), Fraction(1, 4)]) == [[1.0, 2.0], 2, 0.25]


def test_spectrum_round_trip():
    spec = clifford_torus_spectrum(10)
    back = spectrum_from_dict(json.loads(dumps(spectrum_to_dict(spec))))
    assert back == spec


@pytest.mark.parametrize("bad", [
    {"n": 3, "N": 4, "cutoff": 1, "eigenvalues": [], "extra": 1},
    {"n": 3, "N": 4, "eigenvalues": []},
    {"n": 3, "N": 4, "cutoff": 1, "eigenvalues": [[1, 2, 3]]},
])
def test_spectrum_rejects(bad):
    with pytest.raises(ValueError):
        spectrum_from_dict(bad)


def test_msi_from_catalog_and_path(tmp_path):
    spec_file = tmp_path / "clifford.json"
    spec_file.write_text(dumps(spectrum_to_dict(clifford_torus_spectrum(10))))
    model = {"N": 4, "n": 3, "tau": 0.5,
             "cones": ["clifford.json", {"catalog": "clifford", "cutoff": 10, "link_area": 19.7}]}
    path = tmp_path / "model.json"
    path.write_text(json.dumps(model))
    msi = load_msi(path)
    assert msi.Q == 2 and msi.tau == 0.5
    rep = fredholm_index(msi, msi.tau)
    assert index_report(rep)["index"] == -10
    assert gamma_report(msi.cones[0].indicial)["gamma_minus"] == 0


@pytest.mark.parametrize("model", [
    {"N": 4, "n": 3, "cones": [], "weight": 1},
    {"N": 4, "n": 3, "cones": [{"catalog": "sphere"}]},
    {"N": 4, "n": 3, "cones": [{"catalog": "clifford", "colour": 1}]},
    {"N": 4, "n": 3, "cones": [7]},
])
def test_msi_rejects(model):
    with pytest.raises(ValueError):
        msi_from_dict(model)
