//! Explicit weights and supersolutions: product weights on the half-space
//! and the differential-inequality route on cones and balls.

mod domain;
mod ftt;

pub use domain::{
    ball_inequality_scan, cone_weak_superharmonicity, diff_ineq_field, eta, random_ball_bumps,
    supersolution_identity_check, BallBump, BallScanReport, BallSpec, DeltaEvaluator, DeltaJet,
    FieldMethod, IdentityReport, InequalityFieldSample, SuperharmonicityReport, FD_STEP,
};
pub use ftt::{
    ftt_classify, ftt_derive, ftt_integrability_check, ftt_potential, ftt_psi, ftt_residual_check,
    integrability_with_shift, FttClass, FttResidual, FttSpec, IntegrabilityReport,
    IntegrabilityVerdict, AXIS_COLLAR,
};
