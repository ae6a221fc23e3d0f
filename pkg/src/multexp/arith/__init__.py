from .characters import (
    DirichletCharacter,
    c_chi,
    c_chi_many,
    c_chi_table,
    characters_mod,
    euler_phi,
    fundamental_discriminants,
    gauss_sum,
    is_fundamental_discriminant,
    kronecker_character,
    kronecker_symbol,
    moebius,
    primitive_characters,
)
from .multfn import ArchimedeanTwist, MultFnSpec, eval_mult_fn, standard_fn
from .sieve import FactorSieve, build_factor_sieve

__all__ = [
    "ArchimedeanTwist", "DirichletCharacter", "FactorSieve", "MultFnSpec", "build_factor_sieve", "c_chi", "c_chi_many",
    "c_chi_table", "characters_mod", "euler_phi", "eval_mult_fn", "fundamental_discriminants",
    "gauss_sum", "is_fundamental_discriminant", "kronecker_character", "kronecker_symbol", "moebius",
    "primitive_characters", "standard_fn",
]
