use num_complex::Complex64;
use serde::Serialize;

use crate::lorentz::Dimension;

/// `𝛂 = (α₁, α₂, α₃)` together with `𝛌 = (λ₁, λ₂, λ₃)`, linked by
/// `α₁ = −λ₁+λ₂+λ₃`, `α₂ = λ₁−λ₂+λ₃`, `α₃ = λ₁+λ₂−λ₃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParameterTriple {
    pub alpha: [Complex64; 3],
    pub lambda: [Complex64; 3],
}

impl ParameterTriple {
    pub fn from_alpha(alpha: [Complex64; 3]) -> Self {
        let [a1, a2, a3] = alpha;
        let lambda = [(a2 + a3) * 0.5, (a3 + a1) * 0.5, (a1 + a2) * 0.5];
        ParameterTriple { alpha, lambda }
    }

    pub fn from_lambda(lambda: [Complex64; 3]) -> Self {
        let [l1, l2, l3] = lambda;
        let alpha = [-l1 + l2 + l3, l1 - l2 + l3, l1 + l2 - l3];
        ParameterTriple { alpha, lambda }
    }

    pub fn from_real_alpha(a: [f64; 3]) -> Self {
        Self::from_alpha(a.map(|v| Complex64::new(v, 0.0)))
    }

    /// Kernel exponents `s_j = −ρ + α_j`.
    pub fn exponents(&self, dim: Dimension) -> [Complex64; 3] {
        self.alpha.map(|a| a - dim.rho())
    }

    pub fn alpha_sum(&self) -> Complex64 {
        self.alpha.iter().sum()
    }

    /// `Re α_j > −ρ + margin` and `Re Σα > −ρ + margin`.
    pub fn in_convergence_region(&self, dim: Dimension, margin: f64) -> bool {
        let floor = -dim.rho() + margin;
        self.alpha.iter().all(|a| a.re > floor) && self.alpha_sum().re > floor
    }

    /// Parameters with the slots `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut alpha = self.alpha;
        alpha.swap(i, j);
        Self::from_alpha(alpha)
    }
}

/// `𝛂` from `𝛌`.
pub fn alpha_from_lambda(lambda: [Complex64; 3]) -> ParameterTriple {
    ParameterTriple::from_lambda(lambda)
}

/// `𝛌` from `𝛂`.
pub fn lambda_from_alpha(alpha: [Complex64; 3]) -> ParameterTriple {
    ParameterTriple::from_alpha(alpha)
}
