"""Element property table: van der Waals and covalent radii, metal flags.

vdW radii follow the Bondi set; metals missing from Bondi use the Batsanov
values. Covalent radii are the Cordero single-bond set. These constants back
every d0 = r_m + r_n sum in the scoring kernels and the clash thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownElement

METAL_SYMBOLS = frozenset(
    {"Zn", "Cu", "Fe", "Mg", "Mn", "Ca", "Na", "K", "Ni", "Co"}
)


@dataclass(frozen=True)
class ElementInfo:
    symbol: str
    vdw_radius: float       # Angstrom
    covalent_radius: float  # Angstrom
    is_metal: bool
    pauling_en: float       # electronegativity, used by charge assignment


def _e(symbol, vdw, cov, en, metal=False):
    return ElementInfo(symbol, vdw, cov, metal, en)


ELEMENT_TABLE: dict[str, ElementInfo] = {
    info.symbol: info
    for info in [
        _e("H", 1.20, 0.31, 2.20),
        _e("C", 1.70, 0.76, 2.55),
        _e("N", 1.55, 0.71, 3.04),
        _e("O", 1.52, 0.66, 3.44),
        _e("S", 1.80, 1.05, 2.58),
        _e("P", 1.80, 1.07, 2.19),
        _e("F", 1.47, 0.57, 3.98),
        _e("Cl", 1.75, 1.02, 3.16),
        _e("Br", 1.85, 1.20, 2.96),
        _e("I", 1.98, 1.39, 2.66),
        _e("B", 1.92, 0.84, 2.04),
        _e("Se", 1.90, 1.20, 2.55),
        _e("Zn", 1.39, 1.22, 1.65, metal=True),
        _e("Cu", 1.40, 1.32, 1.90, metal=True),
        _e("Fe", 2.05, 1.32, 1.83, metal=True),
        _e("Mg", 1.73, 1.41, 1.31, metal=True),
        _e("Mn", 2.05, 1.39, 1.55, metal=True),
        _e("Ca", 2.31, 1.76, 1.00, metal=True),
        _e("Na", 2.27, 1.66, 0.93, metal=True),
        _e("K", 2.75, 2.03, 0.82, metal=True),
        _e("Ni", 1.63, 1.24, 1.91, metal=True),
        _e("Co", 2.00, 1.26, 1.88, metal=True),
    ]
}


def element_info(symbol: str) -> ElementInfo:
    """Look up element constants; raises UnknownElement for symbols off-table."""
    key = normalize_symbol(symbol)
    try:
        return ELEMENT_TABLE[key]
    except KeyError:
        raise UnknownElement(f"element {symbol!r} not in table") from None


def normalize_symbol(symbol: str) -> str:
    """Map raw text ('CL', ' zn') to table capitalization ('Cl', 'Zn')."""
    return symbol.strip().capitalize()


def is_known_element(symbol: str) -> bool:
    return normalize_symbol(symbol) in ELEMENT_TABLE
