"""Exact ground fields: the rationals and odd prime fields.

Elements are plain Python values: :class:`fractions.Fraction` over Q and
``int`` residues in ``[0, p)`` over F_p.  All arithmetic in the package goes
through :meth:`FieldSpec.norm` after ring operations, so the same code path
serves both fields.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

import gmpy2

RATIONALS = "rationals"
PRIME_FIELD = "prime_field"

ScalarLike = Union[int, Fraction, str]


@lru_cache(maxsize=None)
def _is_prime(p: int) -> bool:
    return bool(gmpy2.is_prime(p))


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == RATIONALS:
            if self.p is not None:
                raise ValueError("the rational field takes no modulus")
        elif self.kind == PRIME_FIELD:
            if self.p is None or self.p < 3 or not _is_prime(self.p):
                raise ValueError(f"modulus must be an odd prime, got {self.p!r}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def parse(cls, text: str | int) -> "FieldSpec":
        """``"Q"`` or ``"QQ"`` for the rationals, a prime (``"5"``) for F_p."""
        s = str(text).strip()
        if s.upper() in ("Q", "QQ", "RATIONALS"):
            return QQ
        if s.upper().startswith("F"):
            s = s[1:]
        try:
            return GF(int(s))
        except ValueError:
            raise ValueError(f"cannot parse field {text!r}") from None

    @property
    def is_rational(self) -> bool:
        return self.kind == RATIONALS

    @property
    def is_finite(self) -> bool:
        return self.kind == PRIME_FIELD

    @property
    def characteristic(self) -> int:
        return 0 if self.is_rational else self.p

    @property
    def zero(self):
        return Fraction(0) if self.is_rational else 0

    @property
    def one(self):
        return Fraction(1) if self.is_rational else 1

    def __str__(self) -> str:
        return "Q" if self.is_rational else f"F{self.p}"

    # -- element arithmetic ---------------------------------------------------

    def __call__(self, x: ScalarLike):
        """Coerce ``x`` into a canonical field element."""
        if isinstance(x, str):
            return self.parse_scalar(x)
        if self.is_rational:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in F_{self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def norm(self, x):
        """Reduce the result of ring operations on elements."""
        return x if self.is_rational else x % self.p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational:
            return 1 / Fraction(a)
        return pow(int(a), -1, self.p)

    def div(self, a, b):
        if self.is_rational:
            return Fraction(a) / b
        return a * self.inv(b) % self.p

    def elements(self) -> Iterator[int]:
        if not self.is_finite:
            raise ValueError("the rationals are not enumerable here")
        return iter(range(self.p))

    def random_element(self, rng: random.Random, height: int = 100):
        """Uniform over F_p, or a uniform integer in ``[-height, height]``."""
        if self.is_finite:
            return rng.randrange(self.p)
        return Fraction(rng.randint(-height, height))

    def lift(self, a) -> int:
        """Symmetric integer representative of a residue (identity on integers)."""
        if self.is_rational:
            if Fraction(a).denominator != 1:
                raise ValueError(f"{a} is not an integer")
            return int(a)
        a = int(a) % self.p
        return a - self.p if a > self.p // 2 else a

    # -- serialization --------------------------------------------------------

    def format_scalar(self, a) -> str:
        if self.is_rational:
            a = Fraction(a)
            return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        return f"{int(a) % self.p} mod {self.p}"

    def parse_scalar(self, text: str):
        s = text.strip()
        if " mod " in s:
            value, modulus = s.split(" mod ")
            if self.is_rational or int(modulus) != self.p:
                raise ValueError(f"scalar {text!r} does not belong to {self}")
            return int(value) % self.p
        return self(Fraction(s))

    def to_json(self) -> dict:
        return {"kind": self.kind} if self.is_rational else {"kind": self.kind, "p": self.p}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        return cls(data["kind"], data.get("p"))


QQ = FieldSpec(RATIONALS)


@lru_cache(maxsize=None)
def GF(p: int) -> FieldSpec:
    return FieldSpec(PRIME_FIELD, p)
