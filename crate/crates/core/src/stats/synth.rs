//! Seeded synthetic study data.
//!
//! Every participant gets a latent engagement factor `z ~ N(0, 1)`. The
//! engagement score is a rounded linear function of `z`; the other
//! variables mix `z` with independent noise so that enjoyment and accuracy
//! rise with engagement while completion time and collisions fall.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::StudyRecord;
use crate::{Error, Result};

const ENJOYMENT_MEAN: f64 = 20.7;
const ENGAGEMENT_MEAN: f64 = 18.9;
const TIME_MEAN: f64 = 213.4;
const COLLISION_RATE: f64 = 2.3;
const ACCURACY_MEAN: f64 = 0.75;

/// Generates `n` records from `seed`. The same `(n, seed)` always yields
/// the same records.
pub fn synthesize_study(n: usize, seed: u64) -> Result<Vec<StudyRecord>> {
    if n == 0 {
        return Err(Error::invalid("synthetic study needs at least one participant"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = move || -> f64 { StandardNormal.sample(&mut rng) };
    let mut counts = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c011);

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let z = normal();
        let mix = |rho: f64, e: f64| rho * z + (1.0 - rho * rho).sqrt() * e;
        let engagement = score(ENGAGEMENT_MEAN + 3.0 * z);
        let enjoyment = score(ENJOYMENT_MEAN + 2.4 * mix(0.85, normal()));
        let time_s = (TIME_MEAN + 30.0 * mix(-0.8, normal())).max(30.0);
        let accuracy = (ACCURACY_MEAN + 0.08 * mix(0.85, normal())).clamp(0.0, 1.0);
        let rate = COLLISION_RATE * (-0.9 * z).exp();
        let collisions = Poisson::new(rate).expect("positive finite rate").sample(&mut counts) as u32;
        out.push(StudyRecord {
            participant: format!("s{:03}", i + 1),
            enjoyment,
            engagement,
            time_s: round_to(time_s, 1),
            collisions,
            accuracy: round_to(accuracy, 3),
        });
    }
    Ok(out)
}

fn score(v: f64) -> u8 {
    v.round().clamp(5.0, 25.0) as u8
}

fn round_to(v: f64, digits: i32) -> f64 {
    let k = 10f64.powi(digits);
    (v * k).round() / k
}
