"""Two-qudit generalized Pauli words over a prime field.

A word ``(m, n, k, l)`` stands for ``X^m Z^n (x) X^k Z^l`` with all exponents
in F_p. Words are phase-free: products add exponents and drop the scalar.
"""

from __future__ import annotations

import re
from typing import Iterator, NamedTuple


class Prime(int):
    """An integer validated to be prime on construction."""

    def __new__(cls, value: int) -> "Prime":
        if isinstance(value, Prime):
            return value
        if isinstance(value, bool) or int(value) != value:
            raise ValueError(f"{value!r} is not an integer")
        value = int(value)
        if value < 2 or any(value % q == 0 for q in range(2, int(value**0.5) + 1)):
            raise ValueError(f"{value} is not prime")
        return super().__new__(cls, value)


class PauliWord(NamedTuple):
    m: int
    n: int
    k: int
    l: int  # noqa: E741

    def is_identity(self) -> bool:
        return not any(self)


IDENTITY = PauliWord(0, 0, 0, 0)


def word(m: int, n: int, k: int, l: int, p: int) -> PauliWord:  # noqa: E741
    """Build a word with exponents reduced mod p."""
    return PauliWord(m % p, n % p, k % p, l % p)


def symplectic_form(u: PauliWord, v: PauliWord, p: int) -> int:
    """Commutation exponent s with ``U V = w^s V U``, w = exp(2 pi i / p).

    With the ``X^m Z^n`` ordering per factor, ``Z X = w X Z`` gives
    s = (n m' - n' m) + (l k' - l' k) mod p.
    """
    return (u.n * v.m - v.n * u.m + u.l * v.k - v.l * u.k) % p


def commute(u: PauliWord, v: PauliWord, p: int) -> bool:
    return symplectic_form(u, v, p) == 0


def compose(u: PauliWord, v: PauliWord, p: int) -> PauliWord:
    return PauliWord((u.m + v.m) % p, (u.n + v.n) % p, (u.k + v.k) % p, (u.l + v.l) % p)


def power(u: PauliWord, a: int, p: int) -> PauliWord:
    return PauliWord((a * u.m) % p, (a * u.n) % p, (a * u.k) % p, (a * u.l) % p)


def independent(u: PauliWord, v: PauliWord, p: int) -> bool:
    """True iff no powers of u and v coincide, i.e. the exponent vectors are
    linearly independent over F_p."""
    if u.is_identity() or v.is_identity():
        raise ValueError("independence is undefined for the identity word")
    # v is dependent on u iff v = a*u for some a; the 2x2 minors all vanish then.
    return any((u[i] * v[j] - u[j] * v[i]) % p for i in range(4) for j in range(i + 1, 4))


def all_words(p: int, include_identity: bool = False) -> Iterator[PauliWord]:
    """Words in lexicographic order of (m, n, k, l)."""
    for idx in range(0 if include_identity else 1, p**4):
        yield word_from_index(idx, p)


def word_index(w: PauliWord, p: int) -> int:
    return ((w.m * p + w.n) * p + w.k) * p + w.l


def word_from_index(idx: int, p: int) -> PauliWord:
    idx, l = divmod(idx, p)  # noqa: E741
    idx, k = divmod(idx, p)
    m, n = divmod(idx, p)
    return PauliWord(m, n, k, l)


def inverse_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, -1, p)


_FACTOR = re.compile(r"^\s*(?:X\^(\d+))?\s*(?:Z\^(\d+))?\s*$")


def format_word(w: PauliWord) -> str:
    """Render as ``"X^m Z^n | X^k Z^l"``."""
    return f"X^{w.m} Z^{w.n} | X^{w.k} Z^{w.l}"


def parse_word(text: str, p: int) -> PauliWord:
    """Parse the textual form produced by :func:`format_word`.

    Omitted factors count as exponent 0, so ``"Z^1 | X^2"`` is accepted.
    """
    parts = text.split("|")
    if len(parts) != 2:
        raise ValueError(f"expected two tensor factors in {text!r}")
    exps = []
    for part in parts:
        if part.strip() in ("", "I"):
            exps.extend((0, 0))
            continue
        match = _FACTOR.match(part)
        if match is None:
            raise ValueError(f"cannot parse factor {part!r}")
        exps.extend(int(g) if g else 0 for g in match.groups())
    return word(*exps, p)
