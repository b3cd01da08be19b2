//! Heat kernels, Riesz transforms and drift-limit experiments for the Grushin
//! operator G = −Δ_{x′} − |x′|²Δ_{x″} on ℝ^{n+m} and its drifted versions
//! G_a = G − 2a·∇_{x′}.

pub mod error;
pub mod euclid;
pub mod geometry;
pub mod grid;
pub mod group;
pub mod heat;
pub mod lab;
pub mod mehler;
pub mod quad;
pub mod riesz;
pub mod space;
mod spectral;

pub use error::{Error, Result};
pub use euclid::{drift_limit, euclid_drift_riesz, scaled_conjugated_riesz, DriftLimitConfig, DriftLimitReport};
pub use geometry::{
    ball_volume_lebesgue_ref, ball_volume_mu_asymptotic, ball_volume_mu_mc, grushin_distance, VolumeEstimate,
};
pub use grid::{Grid, SampledFunction};
pub use group::{group_inv, group_mul, sigma_apply, transference_apply, GroupElement, GroupKernel};
pub use heat::{
    apply_heat_semigroup, grushin_apply, heat_kernel, heat_kernel_derivative, heat_kernel_drift, HeatKernelValue,
    QuadratureSpec, TSub,
};
pub use lab::{
    gaussian_bound_fit, gaussian_bound_samples, lp_norm, norm_sweep, weak11_blowup_experiment, weak_quasinorm,
    weak_quasinorm_levels, BlowupReport, Family, FamilySpec, GaussianFit, GaussianSample, NormReport, RefinementLevel,
};
pub use mehler::{mehler_derivative_prefactor, mehler_kernel, DerivativePrefactor, MehlerCoeffs};
pub use riesz::{
    apply_riesz, b_eps_delta, regularized_riesz_kernel, riesz_kernel, riesz_kernel_value, scalar_multiplier_gap, shifted_riesz_kernel,
    RegularizationParams, RieszKernelRequest, RieszKernelValue, RieszOperator,
};
pub use space::{dilate, rotate, rotate_matrix, Dimensions, Drift, GrushinMultiIndex, GrushinPoint, Orthogonal};
