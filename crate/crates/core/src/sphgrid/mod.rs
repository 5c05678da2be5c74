//! Quadrature grids and spherical-harmonic transforms on `S²`, and
//! one-dimensional zonal integration on `S^{n−1}`.

pub mod coeffs;
pub mod grid;
pub mod harmonics;
pub mod io;
pub mod quadrature;
pub mod transform;
pub mod zonal;

pub use coeffs::HarmonicCoeffs;
pub use grid::{Grid, GridFunction};
pub use harmonics::{lm_count, lm_index, sph_harm, sph_harm_all};
pub use transform::{sht_forward, sht_forward_to, sht_inverse, surface_gradient_grid, synthesize_at};
pub use zonal::{funk_hecke, funk_hecke_singular, riesz_eigenvalues_direct, sphere_area, zonal_integral, zonal_integral_singular};
