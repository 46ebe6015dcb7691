//! Sharp constants and extremizers for the weighted inequality
//!
//! ```text
//! ∫₀¹ |u| ρ dx ≤ Λ(k, ρ) · ‖u⁽ᵏ⁾‖_{L²(0,1)},   u ∈ H₀ᵏ(0, 1).
//! ```
//!
//! The extremizer has a fixed sign, so it solves the linear clamped problem
//! `(-1)ᵏ u⁽²ᵏ⁾ = μ ρ`, normalized by `∫ u ρ = 1`, with `μ = Λ⁻²`. The
//! [`solver`] builds it from the weight's moments through a k×k
//! Vandermonde-type system, exactly in rational arithmetic whenever the weight
//! allows. The [`oracle`] module re-derives the constant by independent routes.

pub mod numcore;
pub mod oracle;
pub mod solver;
pub mod weight;
