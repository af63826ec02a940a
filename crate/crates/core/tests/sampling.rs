use lingctl_core::controls::{perturb_raw, sample_control_vector, StandardizationStats};
use lingctl_core::lingfeat::extract_features;
use lingctl_core::rng::stream_rng;
use lingctl_core::{Feature, Features, Stats32};

const TEXTS: &[&str] = &[
    "The quick brown fox jumps over the lazy dog.",
    "Write a short poem about the sea. Keep it calm and simple.",
    "Dogs bark. Cats sleep all day in the warm sun, and birds sing happy songs.",
    "The dog chased the other dog. The cat ran and ran, and big dogs like big cats.",
    "Explain how a computer stores data in memory using simple words for a child.",
    "The government announced a new policy to improve public health and education across the country this year.",
];

fn fixture() -> (Vec<Features>, StandardizationStats<f64>) {
    let vs: Vec<Features> = TEXTS.iter().map(|t| extract_features(t).unwrap()).collect();
    let stats = StandardizationStats::fit(&vs, "fixture").unwrap();
    (vs, stats)
}

#[test]
fn perturbation_scale_matches_sigma_times_std() {
    let (vs, stats) = fixture();
    let sigma = 0.1;
    let n = 10_000;
    let mut rng = stream_rng(21, 0);
    let reference = &vs[2];
    let draws: Vec<Features> = (0..n)
        .map(|_| perturb_raw(reference, sigma, &stats, &mut rng))
        .collect();
    for f in Feature::ALL {
        let xs: Vec<f64> = draws.iter().map(|d| d[f]).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        let want = sigma * stats.get(f).std;
        assert!((sd / want - 1.0).abs() < 0.05, "{f}: sd {sd} vs {want}");
    }
}

#[test]
fn single_precision_sampling() {
    let vs: Vec<_> = TEXTS
        .iter()
        .map(|t| extract_features(t).unwrap().map(|x| x as f32))
        .collect();
    let stats = Stats32::fit(&vs, "f32").unwrap();
    let mut rng = stream_rng(3, 0);
    for v in &vs {
        let s = sample_control_vector(v, 0.2f32, &stats, &mut rng, 10_000).unwrap();
        assert!(lingctl_core::controls::is_valid(&s));
        assert!(Feature::COUNTS.iter().all(|&f| s[f].fract() == 0.0));
    }
}
