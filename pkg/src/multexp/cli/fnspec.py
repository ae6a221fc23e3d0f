"""Parser for multiplicative-function spec strings.

Grammar::

    spec  := atom ('*' atom)*
    atom  := "one" | "moebius" | "liouville"
           | "kronecker:" int
           | "char:" q ":" index
           | "twist:" real
           | "pretend:" d ":" p0 [":" seed]
           | "randompm" [":" seed]

No whitespace is allowed inside a spec. An omitted seed is filled from the
default seed, so the canonical form always carries it.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .._util import seeded_signs
from ..arith.characters import character_cap, characters_mod, fundamental_discriminant_error, kronecker_character
from ..arith.multfn import ArchimedeanTwist, MultFnSpec, standard_fn
from ..arith.sieve import FactorSieve
from ..errors import DomainError, ResourceError

_INT = re.compile(rb"[+-]?[0-9]+")
_REAL = re.compile(rb"[+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_NAME = re.compile(rb"[a-z]+")

# keyword -> (argument kinds, number of trailing optional seed slots)
_ATOMS = {
    "one": ((), 0),
    "moebius": ((), 0),
    "liouville": ((), 0),
    "kronecker": (("int",), 0),
    "char": (("int", "int"), 0),
    "twist": (("real",), 0),
    "pretend": (("int", "int", "seed"), 1),
    "randompm": (("seed",), 1),
}


class FnSpecError(DomainError):
    """Syntax or semantic error in a function spec, with the byte offset."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        pointer = f"\n  {text}\n  {' ' * offset}^" if text and "\n" not in text else ""
        super().__init__(f"at byte {offset}: {message}{pointer}")


@dataclass(frozen=True)
class Atom:
    kind: str
    args: tuple = ()
    offset: int = 0

    def canonical(self) -> str:
        if not self.args:
            return self.kind
        parts = [repr(float(a)) if isinstance(a, float) else str(int(a)) for a in self.args]
        return ":".join([self.kind, *parts])


@dataclass(frozen=True)
class FnSpecAst:
    atoms: tuple[Atom, ...]

    def canonical(self) -> str:
        return "*".join(a.canonical() for a in self.atoms)

    __str__ = canonical


def parse(text: str, default_seed: int = 0) -> FnSpecAst:
    """Parse into atoms; raises FnSpecError carrying the byte offset of the problem."""
    if not isinstance(text, str):
        raise FnSpecError("spec must be a string", 0)
    try:
        raw = text.encode("utf-8")
    except UnicodeEncodeError as exc:
        raise FnSpecError("spec is not encodable as UTF-8", exc.start, "") from None
    pos = 0
    atoms = []
    while True:
        m = _NAME.match(raw, pos)
        if not m:
            raise FnSpecError(f"expected one of {', '.join(_ATOMS)}", pos, text)
        name = m.group().decode()
        if name not in _ATOMS:
            raise FnSpecError(f"unknown atom {name!r}", pos, text)
        start = pos
        pos = m.end()
        kinds, n_optional = _ATOMS[name]
        args = []
        for i, kind in enumerate(kinds):
            optional = i >= len(kinds) - n_optional
            if pos >= len(raw) or raw[pos : pos + 1] != b":":
                if optional:
                    args.append(int(default_seed))
                    continue
                raise FnSpecError(f"{name} expects {len(kinds)} ':'-separated argument(s)", pos, text)
            pos += 1
            pat = _REAL if kind == "real" else _INT
            am = pat.match(raw, pos)
            if not am:
                raise FnSpecError(f"expected {'a real number' if kind == 'real' else 'an integer'}", pos, text)
            tok = am.group().decode()
            if kind == "real":
                val = float(tok)
                if not math.isfinite(val):
                    raise FnSpecError("twist must be finite", pos, text)
            else:
                val = int(tok)
                if kind == "seed" and not 0 <= val < 1 << 64:
                    raise FnSpecError("seed must lie in [0, 2^64)", pos, text)
            args.append(val)
            pos = am.end()
        atoms.append(Atom(name, tuple(args), start))
        if pos == len(raw):
            break
        if raw[pos : pos + 1] != b"*":
            raise FnSpecError("expected '*' or end of spec", pos, text)
        pos += 1
        if pos == len(raw):
            raise FnSpecError("dangling '*'", pos, text)
    return FnSpecAst(tuple(atoms))


def canonical(text: str, default_seed: int = 0) -> str:
    return parse(text, default_seed).canonical()


def validate(ast: FnSpecAst, text: str = "") -> None:
    """Semantic checks that need no sieve (run before any allocation)."""
    for a in ast.atoms:
        if a.kind in ("kronecker", "pretend"):
            err = fundamental_discriminant_error(a.args[0])
            if err:
                raise FnSpecError(err, a.offset, text)
        if a.kind == "pretend" and a.args[1] < 2:
            raise FnSpecError(f"pretend threshold p0 must be >= 2, got {a.args[1]}", a.offset, text)
        if a.kind == "char":
            q, idx = a.args
            if q < 1:
                raise FnSpecError(f"character modulus must be >= 1, got {q}", a.offset, text)
            if q > character_cap():
                raise ResourceError(f"at byte {a.offset}: modulus q={q} exceeds the character cap {character_cap()}")
            n = len(characters_mod(q))
            if not 0 <= idx < n:
                raise FnSpecError(f"character index {idx} out of range: there are {n} characters mod {q}",
                                  a.offset, text)


def _atom_fn(a: Atom, sieve: FactorSieve, limit: int) -> MultFnSpec:
    if a.kind in ("one", "moebius", "liouville"):
        return standard_fn(a.kind, sieve, limit)
    name = a.canonical()
    if a.kind == "kronecker":
        chi = kronecker_character(a.args[0])
        return MultFnSpec.from_prime_values(sieve, lambda p: chi(p), name, limit)
    if a.kind == "char":
        chi = characters_mod(a.args[0])[a.args[1]]
        return MultFnSpec.from_prime_values(sieve, lambda p: chi(p), name, limit)
    if a.kind == "twist":
        f = ArchimedeanTwist(a.args[0]).as_multfn(sieve, limit)
        f.name = name
        return f
    if a.kind == "randompm":
        seed = a.args[0]
        return MultFnSpec.from_prime_values(sieve, lambda p: seeded_signs(seed, p), name, limit)
    if a.kind == "pretend":
        d, p0, seed = a.args
        chi = kronecker_character(d)
        return MultFnSpec.from_prime_values(
            sieve, lambda p: np.where(p >= p0, np.real(chi(p)), seeded_signs(seed, p)), name, limit)
    raise DomainError(f"unhandled atom {a.kind}")


def build(ast: FnSpecAst, sieve: FactorSieve, limit: int | None = None) -> MultFnSpec:
    limit = sieve.limit if limit is None else int(limit)
    f = None
    for a in ast.atoms:
        g = _atom_fn(a, sieve, limit)
        f = g if f is None else f * g
    f.name = ast.canonical()
    return f


def parse_fn_spec(text: str, sieve: FactorSieve, limit: int | None = None, default_seed: int = 0) -> MultFnSpec:
    """Parse, validate and evaluate a spec string on the prime powers of ``sieve``."""
    ast = parse(text, default_seed)
    validate(ast, text)
    return build(ast, sieve, limit)
