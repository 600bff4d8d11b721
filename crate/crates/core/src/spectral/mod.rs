//! Eigenstructure of real matrices in the ordering used by the sign-regularity
//! theorems, and numerical verification of their spectral consequences.

mod compound;
mod eigen;
mod matching;
mod verify;

pub use compound::{
    adjugate_spectrum_residuals, compound_spectrum_error, eigenvector_minors, quarter_turns,
    real_basis_minors, verify_compound_perron,
};
pub use eigen::{
    default_residual_tol, eigen, rank, real_basis, EigenKind, SpectralData, MODULUS_TIE_TOL,
    PAIR_TOL, REAL_TOL, UNRELIABLE_CONDITION,
};
pub use matching::{combine, random_matching, MatchingCoefficients};
pub use verify::{
    verify_cor2, verify_cor3, verify_ssr_spectrum, verify_thm2, verify_thm3, VerifyOptions,
};
