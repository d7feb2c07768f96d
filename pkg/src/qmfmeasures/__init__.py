"""Cuntz-algebra representations from quadrature-mirror filters and the
measures they induce on N-adic intervals."""

from .cuntz import (
    Monomial,
    Word,
    all_words,
    alpha_on_monomial,
    apply_S,
    apply_S_star,
    apply_word,
    apply_word_star,
    m_word,
    monomial_apply,
    projection,
)
from .filterbank import (
    FilterSystem,
    ValidationReport,
    builtin,
    cantor3,
    daubechies4,
    haar,
    high_pass_from_low,
    permutative_shift,
    validate,
)
from .laurent import LaurentPoly, add, conj_reflect, dilate, eval_at, inner, mul
from .measures import (
    EigenData,
    MeasureTable,
    ProductSpec,
    check_covariance,
    check_product,
    check_state_invariance,
    cyclic_span_dim,
    eigen_detect,
    measure_table,
    mu_basis,
    mu_operator,
    mu_spectral,
    product_measure,
    tv_distance,
)
from .nadic import Cylinder, IfsSystem, NadicInterval, base_ifs, cantor_ifs, interval, sigma_map

__version__ = "0.1.0"
