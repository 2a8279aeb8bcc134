"""
Text helpers for coarsemod.

This module provides the small parsers and formatters shared by the group,
ring and loader layers: generator words, group-ring terms and coefficients.
"""

import re
from typing import List, Tuple

_TOKEN_RE = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(?:\^\(?(-?\d+)\)?)?")
_SEPARATORS_RE = re.compile(r"[\s\*·\.]+")
_COEFF_RE = re.compile(r"^(\d+(?:/\d+)?)\s*\*?\s*(.*)$")
IDENTITY_WORDS = {"", "e", "1"}


def tokenize_word(text: str) -> List[Tuple[str, int]]:
    """Split a word like ``a*b^-1 c^3`` into (symbol, exponent) pairs."""
    stripped = text.strip()
    if stripped in IDENTITY_WORDS:
        return []
    tokens: List[Tuple[str, int]] = []
    position = 0
    while position < len(stripped):
        sep = _SEPARATORS_RE.match(stripped, position)
        if sep:
            position = sep.end()
            continue
        match = _TOKEN_RE.match(stripped, position)
        if not match:
            raise ValueError(f"cannot parse word '{text}' at position {position}")
        symbol, exponent = match.group(1), match.group(2)
        tokens.append((symbol, int(exponent) if exponent is not None else 1))
        position = match.end()
    return tokens


def format_word(syllables: List[Tuple[str, int]]) -> str:
    if not syllables:
        return "e"
    parts = []
    for symbol, exponent in syllables:
        parts.append(symbol if exponent == 1 else f"{symbol}^{exponent}")
    return "*".join(parts)


def split_terms(text: str) -> List[Tuple[int, str]]:
    """Split a group-ring expression into signed terms.

    A ``+`` or ``-`` directly after ``^`` (or ``^(``) belongs to an exponent.
    """
    terms: List[Tuple[int, str]] = []
    sign = 1
    current: List[str] = []
    previous = ""
    for char in text.strip():
        if char in "+-" and previous not in ("^", "("):
            body = "".join(current).strip()
            if body:
                terms.append((sign, body))
                sign = 1
            if char == "-":
                sign = -sign
            current = []
        else:
            current.append(char)
        if not char.isspace():
            previous = char
    body = "".join(current).strip()
    if body:
        terms.append((sign, body))
    return terms


def split_coefficient(term: str) -> Tuple[str, str]:
    """Return (coefficient text, word text) for one unsigned term."""
    match = _COEFF_RE.match(term)
    if match:
        return match.group(1), match.group(2).strip()
    return "1", term.strip()
