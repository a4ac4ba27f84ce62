#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

use fracsusy::Scalar;

pub const DEFAULT_SEED: u64 = 0x5eed_f5a5;

/// `FRACSUSY_SEED` if set, else a fixed default.
pub fn seed() -> u64 {
    std::env::var("FRACSUSY_SEED")
        .ok()
        .and_then(|s| {
            let s = s.trim();
            match s.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16).ok(),
                None => s.parse().ok(),
            }
        })
        .unwrap_or(DEFAULT_SEED)
}

/// Rank of the complex image of an exact matrix, counting singular values
/// above `1e-8 · max(1, σ_max)`.
pub fn numeric_rank(rows: &[Vec<Scalar>], cols: usize) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    let m = DMatrix::<Complex64>::from_fn(rows.len(), cols, |i, j| rows[i][j].to_complex());
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(1.0_f64, f64::max);
    sv.iter().filter(|&&s| s > 1e-8 * top).count()
}
