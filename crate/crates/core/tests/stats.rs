use coopgrow::network::{GrowthMechanism, Network};
use coopgrow::stats::{exponential_tail_check, powerlaw_exponent, DegreeHistogram};
use coopgrow::{Error, SimRng};
use rand::{Rng, SeedableRng};

/// Power-law degrees by inverse CDF of the continuous law on
/// `x >= k_min - 1/2`, rounded to the nearest integer.
fn discrete_powerlaw(gamma: f64, k_min: usize, samples: usize, seed: u64) -> Vec<usize> {
    let x_min = k_min as f64 - 0.5;
    let mut rng = SimRng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let u: f64 = rng.random();
            (x_min * (1.0 - u).powf(-1.0 / (gamma - 1.0)) + 0.5).floor() as usize
        })
        .collect()
}

fn geometric(p: f64, offset: usize, samples: usize, seed: u64) -> Vec<usize> {
    let mut rng = SimRng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let u: f64 = rng.random();
            offset + ((1.0 - u).ln() / (1.0 - p).ln()).floor() as usize
        })
        .collect()
}

#[test]
fn recovers_gamma_three() {
    let h = DegreeHistogram::from_degrees(discrete_powerlaw(3.0, 4, 100_000, 2));
    let fit = powerlaw_exponent(&h, 4).unwrap();
    assert_eq!(fit.tail_samples, 100_000);
    assert!((2.95..=3.05).contains(&fit.gamma), "gamma = {}", fit.gamma);
}

/// Large-sample limit of the estimator for the rounded law, from the exact
/// probabilities `S(k - 1/2) - S(k + 1/2)`.
fn limiting_estimate(gamma: f64, k_min: usize) -> f64 {
    let x_min = k_min as f64 - 0.5;
    let survival = |x: f64| (x / x_min).powf(1.0 - gamma);
    let mean_log: f64 = (k_min..2_000_000)
        .map(|k| {
            let k = k as f64;
            (survival(k - 0.5) - survival(k + 0.5)) * (k / x_min).ln()
        })
        .sum();
    1.0 + 1.0 / mean_log
}

#[test]
fn estimator_converges_to_its_limiting_value() {
    let limit = limiting_estimate(3.0, 4);
    assert!((limit - 2.955).abs() < 0.001, "limit {limit}");
    let fits: Vec<f64> = (100..120)
        .map(|seed| {
            let h = DegreeHistogram::from_degrees(discrete_powerlaw(3.0, 4, 100_000, seed));
            powerlaw_exponent(&h, 4).unwrap().gamma
        })
        .collect();
    let mean = fits.iter().sum::<f64>() / fits.len() as f64;
    // Per-sample standard error is about 0.0063; the mean of 20 is 0.0014.
    assert!((mean - limit).abs() < 0.0045, "mean {mean} vs {limit}");
}

#[test]
fn recovers_a_range_of_exponents() {
    for (i, gamma) in [2.2, 2.9, 3.5].into_iter().enumerate() {
        let h = DegreeHistogram::from_degrees(discrete_powerlaw(gamma, 10, 50_000, 10 + i as u64));
        let fit = powerlaw_exponent(&h, 10).unwrap();
        assert!(
            (fit.gamma - gamma).abs() < 3.0 * fit.std_error,
            "gamma {gamma}: estimate {} +- {}",
            fit.gamma,
            fit.std_error
        );
    }
}

#[test]
fn geometric_tail_is_straight_on_semilog_axes() {
    let h = DegreeHistogram::from_degrees(geometric(0.2, 4, 100_000, 3));
    let fit = exponential_tail_check(&h, 4).unwrap();
    assert!(fit.r_squared > 0.99, "R^2 = {}", fit.r_squared);
    assert!(
        (fit.decay_rate - -(0.8f64.ln())).abs() < 0.02,
        "rate {}",
        fit.decay_rate
    );
}

#[test]
fn power_law_is_less_exponential_than_geometric() {
    let pl = DegreeHistogram::from_degrees(discrete_powerlaw(3.0, 4, 100_000, 4));
    let geo = DegreeHistogram::from_degrees(geometric(0.2, 4, 100_000, 5));
    let a = exponential_tail_check(&pl, 4).unwrap();
    let b = exponential_tail_check(&geo, 4).unwrap();
    assert!(a.r_squared < b.r_squared);
    assert!(a.r_squared < 0.9, "power law R^2 = {}", a.r_squared);
}

#[test]
fn small_tails_and_single_degree_tails_are_rejected() {
    let h = DegreeHistogram::from_degrees(vec![5usize; 99]);
    assert!(matches!(
        powerlaw_exponent(&h, 4),
        Err(Error::InsufficientTailSamples {
            found: 99,
            needed: 100,
            k_min: 4
        })
    ));
    let h = DegreeHistogram::from_degrees(vec![5usize; 500]);
    assert!(matches!(
        powerlaw_exponent(&h, 4),
        Err(Error::Degenerate(_))
    ));
    assert!(powerlaw_exponent(&h, 0).is_err());
}

#[test]
fn grown_networks_have_the_expected_degree_statistics() {
    let mut rng = SimRng::seed_from_u64(99);
    let pa = Network::grow(GrowthMechanism::PreferentialAttachment, 4, 30_000, &mut rng).unwrap();
    let ra = Network::grow(GrowthMechanism::RandomAttachment, 4, 30_000, &mut rng).unwrap();
    for net in [&pa, &ra] {
        assert!((net.mean_degree() - 8.0).abs() < 0.8);
    }
    let pa_fit = powerlaw_exponent(&DegreeHistogram::from_network(&pa), 8).unwrap();
    assert!(
        (2.5..=3.3).contains(&pa_fit.gamma),
        "gamma = {}",
        pa_fit.gamma
    );
    let ra_fit = exponential_tail_check(&DegreeHistogram::from_network(&ra), 8).unwrap();
    assert!(ra_fit.r_squared > 0.95, "R^2 = {}", ra_fit.r_squared);
}

#[test]
fn small_networks_keep_mean_degree_near_twice_links() {
    let mut rng = SimRng::seed_from_u64(1);
    for links in [1, 2, 4, 8] {
        for mech in [
            GrowthMechanism::PreferentialAttachment,
            GrowthMechanism::RandomAttachment,
        ] {
            let net = Network::grow(mech, links, 100 * links, &mut rng).unwrap();
            let target = 2.0 * links as f64;
            assert!((net.mean_degree() - target).abs() <= 0.1 * target);
        }
    }
}
