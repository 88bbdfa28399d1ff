//! Real Gamma and Mittag-Leffler functions.

mod gamma;
mod mittag_leffler;

pub use gamma::{gamma_real, is_nonpositive_integer, ln_gamma, reciprocal_gamma};
pub use mittag_leffler::{
    decay_constant, expansion_coefficient, laplace_inversion, ml_asymptotic, ml_contour, ml_eval,
    ml_remainder, ml_route, ml_series, mittag_leffler, series_radius, MLParams, MLValue, Method,
    Route, ASYMPTOTIC_SCALE_LIMIT, SERIES_SCALE_LIMIT,
};
