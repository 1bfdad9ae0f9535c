"""Code 128 subset B encoder.

A symbol is StartB + data symbols + checksum + Stop. Each pattern lists
alternating bar/space widths in modules, starting with a bar; every symbol
spans 11 modules except Stop, which spans 13.
"""

from __future__ import annotations

from dataclasses import dataclass

from shiplabel_qi.core.errors import EmptyText, UnsupportedChar

# Patterns indexed by symbol value 0-106
PATTERNS: tuple[str, ...] = (
    "212222", "222122", "222221", "121223", "121322", "131222", "122213", "122312",
    "132212", "221213", "221312", "231212", "112232", "122132", "122231", "113222",
    "123122", "123221", "223211", "221132", "221231", "213212", "223112", "312131",
    "311222", "321122", "321221", "312212", "322112", "322211", "212123", "212321",
    "232121", "111323", "131123", "131321", "112313", "132113", "132311", "211313",
    "231113", "231311", "112133", "112331", "132131", "113123", "113321", "133121",
    "313121", "211331", "231131", "213113", "213311", "213131", "311123", "311321",
    "331121", "312113", "312311", "332111", "314111", "221411", "431111", "111224",
    "111422", "121124", "121421", "141122", "141221", "112214", "112412", "122114",
    "122411", "142112", "142211", "241211", "221114", "413111", "241112", "134111",
    "111242", "121142", "121241", "114212", "124112", "124211", "411212", "421112",
    "421211", "212141", "214121", "412121", "111143", "111341", "131141", "114113",
    "114311", "411113", "411311", "113141", "114131", "311141", "411131", "211412",
    "211214", "211232", "2331112",
)

START_A = 103
START_B = 104
START_C = 105
STOP = 106
CHECKSUM_MODULUS = 103

# Subset B covers ASCII 32-127, symbol value = ord(c) - 32
SUBSET_B_FIRST = 32
SUBSET_B_LAST = 127

QUIET_ZONE_MODULES = 10


def symbol_values(text: str) -> list[int]:
    """Subset B data symbol values for text."""
    if not text:
        raise EmptyText("Code 128 text must not be empty")
    values = []
    for ch in text:
        code = ord(ch)
        if not SUBSET_B_FIRST <= code <= SUBSET_B_LAST:
            raise UnsupportedChar(f"Character {ch!r} is outside Code 128 subset B")
        values.append(code - SUBSET_B_FIRST)
    return values


def checksum(values: list[int], start: int = START_B) -> int:
    """Mod-103 position-weighted checksum over data symbol values."""
    total = start + sum(i * v for i, v in enumerate(values, start=1))
    return total % CHECKSUM_MODULUS


@dataclass(frozen=True)
class Code128Symbol:
    """An encoded barcode: symbol values and the flattened module widths."""
    text: str
    symbols: tuple[int, ...]  # start, data..., checksum, stop

    @property
    def checksum_value(self) -> int:
        return self.symbols[-2]

    @property
    def data_values(self) -> tuple[int, ...]:
        return self.symbols[1:-2]

    @property
    def module_widths(self) -> list[int]:
        """Alternating bar/space widths, starting and ending with a bar."""
        widths: list[int] = []
        for value in self.symbols:
            widths.extend(int(d) for d in PATTERNS[value])
        return widths

    @property
    def total_modules(self) -> int:
        return sum(self.module_widths)

    def module_bits(self, quiet_zone: int = QUIET_ZONE_MODULES) -> list[bool]:
        """One entry per module, True for bar, with quiet zones on both sides."""
        bits = [False] * quiet_zone
        bar = True
        for width in self.module_widths:
            bits.extend([bar] * width)
            bar = not bar
        bits.extend([False] * quiet_zone)
        return bits


def encode(text: str) -> Code128Symbol:
    """Encode text in subset B."""
    values = symbol_values(text)
    check = checksum(values)
    return Code128Symbol(text=text, symbols=(START_B, *values, check, STOP))


def encode_code128(text: str) -> list[int]:
    """Module widths (bars and spaces) of the subset B encoding of text."""
    return encode(text).module_widths


def decode_widths(widths: list[int]) -> list[int]:
    """
    Split module widths back into symbol values.

    Used to verify encodings; raises ValueError on an unknown pattern.
    """
    lookup = {pattern: value for value, pattern in enumerate(PATTERNS)}
    values = []
    i = 0
    while i < len(widths):
        size = 7 if i + 7 == len(widths) else 6
        key = "".join(str(w) for w in widths[i:i + size])
        if key not in lookup:
            raise ValueError(f"Unknown Code 128 pattern {key!r} at element {i}")
        values.append(lookup[key])
        i += size
    return values
