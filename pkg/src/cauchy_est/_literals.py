"""Parsing and formatting of the 'a+bi' complex literal grammar.

The accepted grammar is ``[-]a[.b][+|-]c[.d]i`` with no whitespace: both the
real and imaginary parts are mandatory (``0+1i``, ``10-0.5i``), so literals
survive shell quoting unambiguously.
"""

from __future__ import annotations

import re

from .errors import DomainError

_COMPLEX_RE = re.compile(r"^([+-]?\d+(?:\.\d+)?)([+-]\d+(?:\.\d+)?)i$")


def parse_complex_literal(text: str) -> complex:
    m = _COMPLEX_RE.match(text.strip())
    if m is None:
        raise DomainError(
            f"malformed complex literal {text!r} (expected a+bi, e.g. 0+1i)"
        )
    return complex(float(m.group(1)), float(m.group(2)))


def format_complex_literal(z: complex) -> str:
    """Render a+bi with repr precision (for headers and labels)."""
    im = float(z.imag)
    sign = "+" if im >= 0 else "-"
    return f"{repr(float(z.real))}{sign}{repr(abs(im))}i"
