//! Shared fixtures for the criterion benches.

use hdet_core::Params;

/// The (m, λ, γ) × β grid used by the verification-facing benches.
pub fn sweep_params() -> Vec<Params> {
    let mut out = Vec::new();
    for m in [1, 2, 3] {
        for lambda in ["1", "1.5", "2"] {
            for gamma in [0, 1, 2] {
                for beta in ["0", "0.2", "0.5", "0.9"] {
                    out.push(Params::parse(m, lambda, gamma, beta).unwrap());
                }
            }
        }
    }
    out
}

/// The base-family parameter point used by the single-evaluation benches.
pub fn base_params() -> Params {
    Params::parse(1, "1", 0, "0.5").unwrap()
}
