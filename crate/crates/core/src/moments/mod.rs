//! Moment statistics: exact Haar moments of a₁, Monte Carlo moments of a_i,
//! reference U(1) identities, and numerical moments from point counts.

mod cyclotomic;
mod exact;
mod montecarlo;
mod report;

pub use cyclotomic::CyclotomicInt;
pub use exact::{
    coset_average_moments, exact_moment, group_exact_moments, reference_u1_moments, trace_laurent, ExactMoments,
    TraceLaurent, U1Variant, MAX_ORDER,
};
pub use montecarlo::{
    charpoly_coeffs, eigenvalues, elementary_symmetric, mc_moments, mc_sample, pairwise_sum, sample_moments,
    sample_rng, McEstimate, NumericGroup, UNITARY_TOL,
};
pub use report::{curve_moments, fmt_f, CurveMoments, MomentReport, MomentTable, TableRow};
