"""Exact coefficient fields: the rationals, prime fields and finite extensions.

Elements are plain Python values.  ``Fraction`` for the rationals, ``int`` in
``range(p)`` for prime fields, and for ``GF(p^k)`` an ``int`` in ``range(p**k)``
whose base-``p`` digits are the coefficients of a polynomial in the generator
(least significant digit first).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence


class FieldError(ValueError):
    pass


class Field:
    char: int = 0
    size: int | None = None
    zero: object = 0
    one: object = 1

    def is_finite(self) -> bool:
        return self.size is not None

    def is_zero(self, a) -> bool:
        return a == self.zero

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result, base = self.one, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sum(self, values):
        total = self.zero
        for v in values:
            total = self.add(total, v)
        return total

    def __repr__(self) -> str:
        return self.name


class RationalField(Field):
    name = "Q"
    char = 0
    size = None
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return a / b

    def from_int(self, n: int):
        return Fraction(n)

    def coerce(self, v):
        return Fraction(v)

    def pth_root(self, a):
        raise FieldError("p-th roots are not defined in characteristic 0")

    def elements(self) -> Iterator:
        raise FieldError("the rationals are not enumerable here")

    def fmt(self, a) -> str:
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def spec(self) -> dict:
        return {"char": "0"}

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")


class PrimeField(Field):
    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.size = p
        self.zero = 0
        self.one = 1
        self.name = f"GF({p})"

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def from_int(self, n: int):
        return n % self.p

    def coerce(self, v):
        if isinstance(v, Fraction):
            return self.div(v.numerator % self.p, v.denominator % self.p)
        return int(v) % self.p

    def pth_root(self, a):
        return a

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def fmt(self, a) -> str:
        return str(a)

    def spec(self) -> dict:
        return {"char": str(self.p)}

    def __eq__(self, other):
        return isinstance(other, PrimeField) and not isinstance(other, ExtensionField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


# polynomial helpers over GF(p) on coefficient lists, lowest degree first

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        factor = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def _polymulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _polymod(out, m, p)


def _digits(n: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        n, d = divmod(n, p)
        out.append(d)
    return out


def _undigits(c: Sequence[int], p: int) -> int:
    n = 0
    for d in reversed(list(c)):
        n = n * p + d
    return n


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Trial division of a polynomial over GF(p) by every monic polynomial of half its degree or less."""
    f = _trim([c % p for c in coeffs])
    deg = len(f) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for n in range(p ** d):
            g = _digits(n, p, d) + [1]
            if not _polymod(f, g, p):
                return False
    return True


@lru_cache(maxsize=None)
def default_modulus(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree k over GF(p)."""
    for n in range(p ** k):
        cand = _digits(n, p, k) + [1]
        if cand[0] and is_irreducible(cand, p):
            return tuple(cand)
    raise FieldError(f"no irreducible of degree {k} over GF({p})")


class ExtensionField(PrimeField):
    """GF(p^k) as GF(p)[a]/(m(a)) with log and exp tables."""

    MAX_SIZE = 1 << 16

    def __init__(self, p: int, k: int, modulus: Sequence[int] | None = None, gen_name: str = "a"):
        super().__init__(p)
        if k < 2:
            raise FieldError("use PrimeField for degree 1")
        if p ** k > self.MAX_SIZE:
            raise FieldError(f"GF({p}^{k}) is larger than supported")
        modulus = tuple(default_modulus(p, k) if modulus is None else [c % p for c in modulus])
        if len(modulus) != k + 1 or not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is not irreducible of degree {k} over GF({p})")
        inv = pow(modulus[-1], p - 2, p)
        self.modulus = tuple(c * inv % p for c in modulus)
        self.k = k
        self.size = p ** k
        self.gen_name = gen_name
        self.name = f"GF({p}^{k})"
        self._build_tables()

    def _build_tables(self):
        p, q, m = self.p, self.size, list(self.modulus)
        for cand in range(2, q):
            base = _digits(cand, p, self.k)
            exp, cur = [], [1]
            seen_one = False
            for _ in range(q - 1):
                exp.append(_undigits(cur + [0] * (self.k - len(cur)), p))
                cur = _polymulmod(cur, base, m, p) or []
                if _trim(list(cur)) == [1] and len(exp) < q - 1:
                    seen_one = True
                    break
            if not seen_one:
                self._exp = exp
                self._log = {v: i for i, v in enumerate(exp)}
                self.primitive = cand
                return
        raise FieldError("no primitive element found")

    def add(self, a, b):
        p = self.p
        out, place = 0, 1
        while a or b:
            a, da = divmod(a, p)
            b, db = divmod(b, p)
            out += ((da + db) % p) * place
            place *= p
        return out

    def neg(self, a):
        p = self.p
        out, place = 0, 1
        while a:
            a, d = divmod(a, p)
            out += ((-d) % p) * place
            place *= p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.size - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(-self._log[a]) % (self.size - 1)]

    def pow(self, a, n: int):
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if n == 0 else 0
        return self._exp[(self._log[a] * n) % (self.size - 1)]

    def from_int(self, n: int):
        return n % self.p

    def coerce(self, v):
        if isinstance(v, Fraction):
            return self.div(v.numerator % self.p, v.denominator % self.p)
        return int(v) % self.p

    def gen(self):
        return self.p if self.k > 1 else 0

    def pth_root(self, a):
        # Frobenius is a bijection, its inverse is a -> a^(q/p)
        return self.pow(a, self.size // self.p)

    def elements(self) -> Iterator[int]:
        return iter(range(self.size))

    def fmt(self, a) -> str:
        digits = _digits(a, self.p, self.k)
        parts = []
        for i in range(self.k - 1, -1, -1):
            c = digits[i]
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = self.gen_name if i == 1 else f"{self.gen_name}^{i}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        if not parts:
            return "0"
        return "(" + " + ".join(parts) + ")" if len(parts) > 1 else parts[0]

    def modulus_text(self) -> str:
        terms = []
        for i in range(self.k, -1, -1):
            c = self.modulus[i]
            if not c:
                continue
            mono = "1" if i == 0 else (self.gen_name if i == 1 else f"{self.gen_name}^{i}")
            terms.append(mono if c == 1 and i else (str(c) if i == 0 else f"{c}*{mono}"))
        return " + ".join(terms)

    def spec(self) -> dict:
        return {"char": f"{self.p}^{self.k}", "irreducible": self.modulus_text()}

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and other.p == self.p and other.modulus == self.modulus

    def __hash__(self):
        return hash(("GF", self.p, self.modulus))


QQ = RationalField()


def make_field(p: int = 0, k: int = 1, modulus: Sequence[int] | None = None, gen_name: str = "a") -> Field:
    if p == 0:
        return QQ
    if k == 1:
        return PrimeField(p)
    return ExtensionField(p, k, modulus, gen_name)


def prime_subfield_degree(field: Field) -> int:
    return getattr(field, "k", 1) if field.char else 0


def roots_in(field: Field, coeffs_low_first: Sequence, target: Field) -> list:
    """Roots in ``target`` (finite) of a polynomial whose coefficients already live in ``target``."""
    out = []
    for t in target.elements():
        acc = target.zero
        for c in reversed(list(coeffs_low_first)):
            acc = target.add(target.mul(acc, t), c)
        if acc == target.zero:
            out.append(t)
    return out


def extension(field: Field, degree: int) -> tuple[Field, Callable]:
    """A finite field of ``degree`` times the size of ``field`` and an embedding of ``field`` into it."""
    if not field.char:
        raise FieldError("extensions of the rationals are not supported")
    if degree < 2:
        return field, (lambda a: a)
    p, k = field.char, prime_subfield_degree(field)
    big = ExtensionField(p, k * degree, gen_name=getattr(field, "gen_name", "a"))
    if k == 1:
        return big, (lambda a: a)
    # find an image of the old generator: a root of the old modulus in the big field
    modulus = [big.from_int(c) for c in field.modulus]
    rho = roots_in(big, modulus, big)[0]
    powers = [big.pow(rho, i) for i in range(k)]

    def embed(a):
        acc = big.zero
        for d, pw in zip(_digits(a, p, k), powers):
            if d:
                acc = big.add(acc, big.mul(big.from_int(d), pw))
        return acc

    return big, embed


def parse_modulus(text: str, p: int, gen_name: str = "a") -> tuple[int, ...]:
    """Coefficients (lowest first) of a polynomial in the generator, e.g. 'a^2 + a + 1'."""
    import re
    coeffs: dict[int, int] = {}
    for raw in text.replace("-", "+-").split("+"):
        term = raw.replace(" ", "")
        if not term:
            continue
        m = re.fullmatch(rf"(-?\d*)\*?({re.escape(gen_name)}(?:\^(\d+))?)?", term)
        if not m or (not m.group(1) and not m.group(2)) or m.group(1) == "-" and not m.group(2):
            raise FieldError(f"cannot read modulus term {raw.strip()!r}")
        c = m.group(1)
        c = -1 if c == "-" else (int(c) if c else 1)
        e = 0 if not m.group(2) else int(m.group(3) or 1)
        coeffs[e] = (coeffs.get(e, 0) + c) % p
    deg = max(coeffs)
    return tuple(coeffs.get(i, 0) for i in range(deg + 1))


def field_from_spec(spec: dict) -> Field:
    """Inverse of ``Field.spec``: char '0', 'p' or 'p^k' with an optional irreducible."""
    char = str(spec.get("char", "0")).strip()
    if "^" in char:
        p_text, k_text = char.split("^", 1)
        p, k = int(p_text), int(k_text)
    else:
        p, k = int(char), 1
    if p and any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise FieldError(f"characteristic {p} is not prime")
    if p == 1 or p < 0:
        raise FieldError(f"characteristic {p} is not prime")
    modulus = spec.get("irreducible")
    if modulus and not p:
        raise FieldError("an irreducible polynomial needs a positive characteristic")
    if modulus:
        mod = parse_modulus(modulus, p)
        if "^" not in char:
            k = len(mod) - 1  # degree read off the polynomial
        if len(mod) != k + 1:
            raise FieldError(f"irreducible has degree {len(mod) - 1}, expected {k}")
        if k > 1:
            return ExtensionField(p, k, mod)
    return make_field(p, k)
