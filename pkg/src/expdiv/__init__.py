"""Exponential divisor functions: exact pointwise evaluation, the
convolution decomposition into a generalized divisor count times a sparse
factor, exact summatory functions by two independent methods, Euler-product
main-term constants with tail bounds, and residual analysis of secondary
terms."""

from .arith import (
    PrimeTable,
    binomial,
    build_prime_table,
    euler_phi,
    factorize,
    iroot,
    mobius,
    primes_upto,
    tau_k,
    trial_factorize,
)
from .asymptotics import (
    EulerProductResult,
    FactorizationReport,
    FitResult,
    ResidualRow,
    ResidualTable,
    empirical_exponent,
    error_exponent_divisor_pow,
    error_exponent_general,
    error_exponent_phi_pow,
    error_exponent_tau_k,
    error_exponent_tau_pow,
    euler_constant,
    fit_log_poly,
    k3_secondary_constants,
    residual_table,
    secondary_constant_wu,
    verify_factorization,
    zeta_deriv,
    zeta_real,
)
from .divisors import (
    ExpDivisorList,
    exp_divisors,
    is_exp_divisor,
    phi_e,
    pow_r,
    tau_e,
    tau_k_e,
)
from .errors import (
    BoundViolationError,
    CapacityError,
    DegenerateDataError,
    DivergenceError,
    HypothesisError,
    PrecisionError,
)
from .expfn import (
    ExponentFn,
    GrowthReport,
    TheoremProfile,
    check_growth_bound,
    check_hypothesis,
    convolve,
    convolve_at_exponent,
    d_fn,
    derive_v,
    evaluate,
    mobius_fn,
    mu_ell,
    mu_ell_fn,
    mu_ell_h,
    mu_ell_h_fn,
    phi_e_fn,
    profile_for,
    tau_e_fn,
    tau_k_e_fn,
    unit_fn,
)
from .summatory import (
    FullNumberList,
    SummatoryResult,
    d_count,
    d_count_table,
    d_pointwise,
    d_pointwise_table,
    enumerate_full,
    pointwise_values,
    summatory_convolution,
    summatory_convolution_table,
    summatory_sieve,
    summatory_sieve_at,
)

__version__ = "0.1.0"
