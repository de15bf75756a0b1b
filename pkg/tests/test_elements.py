import pytest

from compasskit.elements import ELEMENT_TABLE, element_info
from compasskit.errors import UnknownElement


def test_bondi_radii():
    assert element_info("C").vdw_radius == 1.70
    assert element_info("N").vdw_radius == 1.55
    assert element_info("O").vdw_radius == 1.52
    assert element_info("S").vdw_radius == 1.80
    assert element_info("H").vdw_radius == 1.20


def test_metal_flags():
    assert element_info("Zn").is_metal
    assert element_info("Mg").is_metal
    assert not element_info("C").is_metal


def test_unknown_element():
    with pytest.raises(UnknownElement):
        element_info("Xx")


def test_symbol_normalization():
    assert element_info("CL").symbol == "Cl"
    assert element_info(" zn ").symbol == "Zn"


def test_radius_ordering_consistent():
    for info in ELEMENT_TABLE.values():
        assert info.vdw_radius > info.covalent_radius > 0, info.symbol
