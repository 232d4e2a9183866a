#!/usr/bin/env python3
"""
Integral elements a + b*omega of a class-number-one quadratic field and
the norm polynomial |N(alpha_0 + x*alpha_1)|

omega is sqrt(d), or (1 + sqrt(d))/2 when d = 1 mod 4.
"""

from dataclasses import dataclass
from typing import NamedTuple, Tuple

from sympy.ntheory.primetest import is_square

from smoothforge.errors import DomainError
from smoothforge.quad_ideals.fields import QuadField


def half_integral(field: QuadField) -> bool:
    return field.d % 4 == 1


@dataclass(frozen=True)
class QuadElement:
    field: QuadField
    a: int
    b: int

    def __post_init__(self):
        if not isinstance(self.field, QuadField):
            raise DomainError("quadratic elements need a quadratic field")
        if not self.field.class_number_one:
            raise DomainError(f"{self.field.name} is not in the class-number-one list")

    @property
    def coords(self) -> Tuple[int, int]:
        return (self.a, self.b)

    @property
    def norm(self) -> int:
        a, b, d = self.a, self.b, self.field.d
        if half_integral(self.field):
            return a * a + a * b + b * b * (1 - d) // 4
        return a * a - d * b * b

    @property
    def trace(self) -> int:
        return 2 * self.a + self.b if half_integral(self.field) else 2 * self.a

    def multiplication_matrix(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        """Matrix of multiplication by this element on the basis {1, omega}"""
        a, b, d = self.a, self.b, self.field.d
        if half_integral(self.field):
            return ((a, b * (d - 1) // 4), (b, a + b))
        return ((a, b * d), (b, a))

    def __add__(self, other: "QuadElement") -> "QuadElement":
        return QuadElement(self.field, self.a + other.a, self.b + other.b)

    def scale(self, k: int) -> "QuadElement":
        return QuadElement(self.field, k * self.a, k * self.b)

    def as_text(self) -> str:
        return f"{self.a},{self.b}"

    @classmethod
    def parse(cls, field: QuadField, text: str) -> "QuadElement":
        """'a,b' coordinates"""
        try:
            a_text, b_text = text.split(",")
            return cls(field, int(a_text), int(b_text))
        except ValueError as exc:
            raise DomainError(f"expected an element as 'a,b', got {text!r}") from exc


class NormForm(NamedTuple):
    """N(alpha_0 + x alpha_1) = A x^2 + B x + C"""

    A: int
    B: int
    C: int

    def __call__(self, x: int) -> int:
        return self.A * x * x + self.B * x + self.C

    @property
    def discriminant(self) -> int:
        return self.B * self.B - 4 * self.A * self.C


def independent(alpha0: QuadElement, alpha1: QuadElement) -> bool:
    """Coordinate vectors not proportional"""
    return alpha0.a * alpha1.b - alpha0.b * alpha1.a != 0


def norm_form(alpha0: QuadElement, alpha1: QuadElement) -> NormForm:
    if alpha0.field != alpha1.field:
        raise DomainError("elements from different fields")
    A = alpha1.norm
    C = alpha0.norm
    return NormForm(A, (alpha0 + alpha1).norm - A - C, C)


def norm_poly(alpha0: QuadElement, alpha1: QuadElement, x: int) -> int:
    """|N(alpha_0 + x alpha_1)|"""
    if not independent(alpha0, alpha1):
        raise DomainError(f"alpha0=({alpha0.as_text()}) and alpha1=({alpha1.as_text()}) are dependent")
    return abs(norm_form(alpha0, alpha1)(x))


def _square(n: int) -> bool:
    return n >= 0 and bool(is_square(n))


def is_irreducible(form: NormForm) -> bool:
    """A quadratic with a non-square discriminant has no rational root"""
    return form.A != 0 and not _square(form.discriminant)


def generates_field(element: QuadElement) -> bool:
    """Q(element) = K: the minimal polynomial x^2 - Tr x + N has a non-square discriminant"""
    return not _square(element.trace ** 2 - 4 * element.norm)
