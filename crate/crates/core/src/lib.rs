//! Numerical toolkit for conformal geometry on the sphere `S^{n-1}`.
//!
//! The crate covers the projective action of `SO₀(1,n)` and its conformal
//! factor, the spherical principal series `π_λ`, the Laplacian / Yamabe /
//! GJMS-type operators `Δ_k` and the Knapp–Stein kernels `|x−y|^{−ρ+α}`
//! together with their meromorphic continuation, and the invariant
//! trilinear forms `𝒦_α` and `𝒯_k` on `S²`.
//!
//! Conventions used throughout:
//!
//! * the base point is `𝟏 = (1, 0, …, 0)`;
//! * on `S²` spherical coordinates use `x₁` as the polar axis:
//!   `x = (cos θ, sin θ cos φ, sin θ sin φ)`;
//! * spherical harmonics are complex, orthonormal for the surface measure,
//!   with the Condon–Shortley phase;
//! * `ρ = (n−1)/2`.

pub mod error;
pub mod lorentz;
pub mod mero;
pub mod reps;
pub mod special;
pub mod spectral_ops;
pub mod sphgrid;
pub mod trilinear;

pub use error::{Error, Result};
pub use lorentz::{ConformalMap, Dimension, SpherePoint};
pub use num_complex::Complex64;
