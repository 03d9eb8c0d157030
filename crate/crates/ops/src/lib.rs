//! Fourier multipliers, the fractional Laplacian and the Hilbert transform.

pub mod multiplier;
pub mod singular;
pub mod spectral;

pub use multiplier::{Multiplier, MultiplierSpec};
pub use singular::{
    extension_constant, frac_laplacian_at, frac_laplacian_constant, frac_laplacian_singular,
    Estimate, QuadratureConfig,
};
pub use spectral::{
    apply_multiplier, apply_symbol, derivative, fft_nd, hilbert_transform, negative_frequency_mass,
    verify_halfline_identities, HalflineResiduals, SpectralConfig,
};
