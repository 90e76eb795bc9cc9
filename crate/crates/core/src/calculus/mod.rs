//! Coefficient generation and reference evaluators for tempered fractional operators.

pub mod oracle;
pub mod quadrature;
pub mod weights;

pub use oracle::{
    exact_power_derivative, exact_power_normalized, quadrature_oracle, tempered_integral,
    tempered_monomial, tempered_rl_derivative,
};
pub use weights::{
    expansion_coefficients, grunwald_weights, quasi_compact_coefficients, tempered_weights,
    w2_closed_form, w3_closed_form, weight_sum_limit, ExpansionCoefficients, GrunwaldWeights, QuasiCompactCoefficients,
    WeightTable,
};
