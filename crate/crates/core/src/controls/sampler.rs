use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::SamplingError;
use crate::feature::{FeatureVector, FEATURE_COUNT};
use crate::scalar::FloatScalar;

use super::stats::StandardizationStats;
use super::validity::{is_valid, validate};

pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

/// `z^-1(z(reference) + sigma * eps)` with `eps ~ N(0, I)`, before any rounding.
pub fn perturb_raw<T, R>(
    reference: &FeatureVector<T>,
    sigma: T,
    stats: &StandardizationStats<T>,
    rng: &mut R,
) -> FeatureVector<T>
where
    T: FloatScalar,
    StandardNormal: Distribution<T>,
    R: Rng + ?Sized,
{
    stats.destandardize_raw(&perturbed_z(reference, sigma, stats, rng))
}

fn perturbed_z<T, R>(
    reference: &FeatureVector<T>,
    sigma: T,
    stats: &StandardizationStats<T>,
    rng: &mut R,
) -> [T; FEATURE_COUNT]
where
    T: FloatScalar,
    StandardNormal: Distribution<T>,
    R: Rng + ?Sized,
{
    let mut z = stats.standardize(reference);
    for zi in z.iter_mut() {
        let eps: T = StandardNormal.sample(rng);
        *zi = *zi + sigma * eps;
    }
    z
}

/// Rejection-samples a valid full control vector around `reference`.
///
/// Count features are rounded before the validity check. `sigma == 0`
/// returns the reference untouched without consuming randomness.
pub fn sample_control_vector<T, R>(
    reference: &FeatureVector<T>,
    sigma: T,
    stats: &StandardizationStats<T>,
    rng: &mut R,
    max_attempts: usize,
) -> Result<FeatureVector<T>, SamplingError>
where
    T: FloatScalar,
    StandardNormal: Distribution<T>,
    R: Rng + ?Sized,
{
    let report = validate(reference);
    if !report.valid {
        return Err(SamplingError::InvalidReference(report.violation_ids()));
    }
    if !(sigma >= T::zero()) || !sigma.is_finite() {
        return Err(SamplingError::NegativeSigma(
            sigma.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if sigma == T::zero() {
        return Ok(*reference);
    }
    for _ in 0..max_attempts {
        let candidate = stats.destandardize(&perturbed_z(reference, sigma, stats, rng));
        if is_valid(&candidate) {
            return Ok(candidate);
        }
    }
    Err(SamplingError::Exhausted(max_attempts))
}

/// Sum over features of `|z(a) - z(b)|`.
pub fn standardized_l1<T: FloatScalar>(
    a: &FeatureVector<T>,
    b: &FeatureVector<T>,
    stats: &StandardizationStats<T>,
) -> T {
    let za = stats.standardize(a);
    let zb = stats.standardize(b);
    za.iter().zip(zb.iter()).map(|(x, y)| (*x - *y).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::Feature;
    use crate::lingfeat::extract_features;
    use crate::rng::stream_rng;

    fn fixture() -> (Vec<FeatureVector<f64>>, StandardizationStats<f64>) {
        let texts = [
            "The quick brown fox jumps over the lazy dog.",
            "Write a short poem about the sea. Keep it calm and simple.",
            "Dogs bark. Cats sleep all day in the warm sun, and birds sing happy songs.",
            "Explain how a computer stores data in memory using simple words for a child.",
            "Rain fell.",
            "The dog chased the other dog. The cat ran and ran, and big dogs like big cats.",
            "The government announced a new policy to improve public health and education across the country this year.",
        ];
        let vs: Vec<_> = texts.iter().map(|t| extract_features(t).unwrap()).collect();
        let stats = StandardizationStats::fit(&vs, "fixture").unwrap();
        (vs, stats)
    }

    #[test]
    fn zero_sigma_returns_reference() {
        let (vs, stats) = fixture();
        let mut rng = stream_rng(9, 0);
        for v in &vs {
            assert_eq!(
                sample_control_vector(v, 0.0, &stats, &mut rng, 10).unwrap(),
                *v
            );
        }
    }

    #[test]
    fn samples_are_valid_and_integral() {
        let (vs, stats) = fixture();
        let mut rng = stream_rng(10, 0);
        for v in &vs {
            for _ in 0..200 {
                let s =
                    sample_control_vector(v, 0.3, &stats, &mut rng, DEFAULT_MAX_ATTEMPTS).unwrap();
                assert!(validate(&s).valid);
                for f in Feature::COUNTS {
                    assert_eq!(s[f], s[f].round());
                }
            }
        }
    }

    #[test]
    fn invalid_reference_is_refused() {
        let (vs, stats) = fixture();
        let mut bad = vs[0];
        bad[Feature::Fkre] = 200.0;
        let mut rng = stream_rng(1, 1);
        assert!(matches!(
            sample_control_vector(&bad, 0.1, &stats, &mut rng, 10),
            Err(SamplingError::InvalidReference(ids)) if ids == vec!["fkre <= 121.22"]
        ));
        assert!(matches!(
            sample_control_vector(&vs[0], -0.1, &stats, &mut rng, 10),
            Err(SamplingError::NegativeSigma(_))
        ));
    }

    #[test]
    fn exhaustion_is_an_error() {
        let (vs, stats) = fixture();
        // "Rain fell." sits at the fkre ceiling; a huge sigma almost always
        // breaks some rule, and one attempt is not enough.
        let mut rng = stream_rng(4, 0);
        let mut exhausted = 0;
        for _ in 0..50 {
            if let Err(e) = sample_control_vector(&vs[4], 50.0, &stats, &mut rng, 1) {
                assert_eq!(e, SamplingError::Exhausted(1));
                exhausted += 1;
            }
        }
        assert!(exhausted > 0);
    }

    #[test]
    fn unit_shift_in_standard_space() {
        let (vs, stats) = fixture();
        let d = standardized_l1(&vs[0], &vs[0], &stats);
        assert_eq!(d, 0.0);
        let mut moved = vs[0];
        moved[Feature::TWord] += stats.get(Feature::TWord).std;
        assert!((standardized_l1(&vs[0], &moved, &stats) - 1.0).abs() < 1e-12);
    }
}
