//! Seeded random configurations for property checks and benchmarks.
//! Every sampler draws small rationals and rejects parameter poles.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classical::{ClassicalCase, FamilyData};
use crate::exactnum::{rat, Rational};
use crate::heunpoly::truncated_config;
use crate::su11::Su11Config;
use crate::tridiag::TridiagConfig;

pub use rand::SeedableRng;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Hypergeometric,
    Laguerre,
    Hermite,
}

impl CaseKind {
    pub const ALL: [CaseKind; 3] = [CaseKind::Hypergeometric, CaseKind::Laguerre, CaseKind::Hermite];
}

/// `p/q` with `q ∈ 1..=max_den` and `p/q ∈ [lo, hi]`.
pub fn rational_in(rng: &mut SampleRng, lo: i64, hi: i64, max_den: i64) -> Rational {
    let q = rng.random_range(1..=max_den);
    let p = rng.random_range(lo * q..=hi * q);
    rat(p, q)
}

/// A classical case free of recurrence poles for `n ≤ n_max`.
pub fn random_case(rng: &mut SampleRng, kind: CaseKind, n_max: usize) -> ClassicalCase {
    loop {
        let case = match kind {
            CaseKind::Hypergeometric => {
                let w1 = rational_in(rng, 0, 6, 5) - rat(9, 10);
                let w2 = rational_in(rng, 0, 6, 5) - rat(9, 10);
                ClassicalCase::from_omegas(&w1, &w2)
            }
            CaseKind::Laguerre => ClassicalCase::Laguerre { a: rational_in(rng, -4, 4, 5) },
            CaseKind::Hermite => ClassicalCase::Hermite,
        };
        if FamilyData::new(case.clone()).check_range(n_max + 1).is_ok() {
            return case;
        }
    }
}

/// Normalized `(τ₁, τ₃, τ₄)` on a random pole-free case.
pub fn random_config(rng: &mut SampleRng, kind: CaseKind, n_max: usize) -> TridiagConfig {
    let case = random_case(rng, kind, n_max);
    let tau1 = rational_in(rng, -3, 3, 6);
    let tau3 = rational_in(rng, -10, 10, 6);
    let tau4 = rational_in(rng, -3, 3, 6);
    TridiagConfig::from_tau1(case, tau1, tau3, tau4)
}

/// A configuration truncating at degree `n`.
pub fn random_truncated(rng: &mut SampleRng, kind: CaseKind, n: usize) -> TridiagConfig {
    let case = random_case(rng, kind, n);
    let tau1 = rational_in(rng, -2, 2, 4);
    let tau4 = rational_in(rng, -2, 2, 4);
    truncated_config(case, tau1, tau4, n)
}

/// Wilson data `(ω₁, ω₂, μ₁, μ₂)` giving pole-free `Aₙ, Cₙ` for `n ≤ 16`.
pub fn random_wilson_data(rng: &mut SampleRng) -> (Rational, Rational, Rational, Rational) {
    let w1 = rational_in(rng, 0, 4, 4);
    let w2 = rational_in(rng, 0, 4, 4);
    let mu1 = rational_in(rng, -3, 3, 4);
    let mu2 = rational_in(rng, -3, 3, 4);
    (w1, w2, mu1, mu2)
}

pub fn random_su11(rng: &mut SampleRng, max_n: usize) -> Su11Config {
    let n = rng.random_range(0..=max_n);
    Su11Config::new(
        rational_in(rng, 0, 3, 4),
        rational_in(rng, 0, 3, 4),
        rational_in(rng, 0, 3, 4),
        n,
        rational_in(rng, -2, 2, 5),
    )
}

/// A `β ∈ (-2, 2) \ {0, 1}`.
pub fn random_generic_beta(rng: &mut SampleRng) -> Rational {
    loop {
        let q = rng.random_range(2..=9);
        let p = rng.random_range(-2 * q + 1..2 * q);
        let beta = rat(p, q);
        if !beta.is_zero() && beta != rat(1, 1) {
            return beta;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_samples_repeat() {
        let a = random_config(&mut rng(3), CaseKind::Hypergeometric, 25);
        let b = random_config(&mut rng(3), CaseKind::Hypergeometric, 25);
        assert_eq!(a, b);
        assert!(a.validate().is_ok());
    }

    #[test]
    fn truncated_samples_truncate() {
        let mut r = rng(11);
        for kind in CaseKind::ALL {
            let cfg = random_truncated(&mut r, kind, 4);
            assert!(cfg.xi(5).is_zero());
        }
    }
}
