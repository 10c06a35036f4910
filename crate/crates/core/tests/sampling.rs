//! Distributional checks of the samplers.

use btl_bounds::model::{
    sample_home_outcome, sample_latent, sample_outcome, ComparisonBudget, HomeBudget, SkillVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

const ALPHA: f64 = 1e-3;

/// Pearson chi-square goodness of fit of counts against Binomial(n, p), with
/// adjacent low-expectation cells pooled.
fn binomial_chi_square(counts: &[u64], n: u64, p: f64) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let pmf = Binomial::new(p, n).unwrap();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (x, &c) in counts.iter().enumerate() {
        obs += c as f64;
        exp += total as f64 * pmf.pmf(x as u64);
        if exp >= 5.0 {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += obs;
        last.1 += exp;
    }
    let stat = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let crit = ChiSquared::new((cells.len() - 1) as f64)
        .unwrap()
        .inverse_cdf(1.0 - ALPHA);
    (stat, crit)
}

#[test]
fn win_counts_are_binomial() {
    for (n, lambda, p, seed) in [(5u64, [1.0, 1.0], 0.5, 1u64), (10, [3.0, 1.0], 0.75, 2)] {
        let mut budget = ComparisonBudget::zeros(2);
        budget.set(0, 1, n);
        let s = SkillVector::new(lambda.to_vec()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0u64; n as usize + 1];
        for _ in 0..100_000 {
            let w = sample_outcome(&s, &budget, &mut rng).unwrap();
            counts[w.get(0, 1) as usize] += 1;
        }
        let (stat, crit) = binomial_chi_square(&counts, n, p);
        assert!(stat < crit, "n={n} p={p}: chi2 {stat} >= {crit}");
    }
}

#[test]
fn neutral_venue_matches_basic_model() {
    let mut hb = HomeBudget::zeros(2);
    hb.set(0, 1, 3);
    hb.set(1, 0, 4);
    let s = SkillVector::new(vec![2.0, 1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut counts = vec![0u64; 8];
    for _ in 0..100_000 {
        let w = sample_home_outcome(&s, &hb, 1.0, &mut rng).unwrap();
        counts[w.aggregated_wins(&hb)[0][1] as usize] += 1;
    }
    let (stat, crit) = binomial_chi_square(&counts, 7, 2.0 / 3.0);
    assert!(stat < crit, "chi2 {stat} >= {crit}");
}

fn ks_statistic(mut x: Vec<f64>, mut y: Vec<f64>) -> f64 {
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / x.len() as f64 - j as f64 / y.len() as f64).abs());
    }
    d
}

#[test]
fn latent_time_is_sum_of_first_arrivals() {
    let (n, li, lj) = (8u64, 1.5, 0.5);
    let mut budget = ComparisonBudget::zeros(2);
    budget.set(0, 1, n);
    let s = SkillVector::new(vec![li, lj]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = 20_000;
    let direct: Vec<f64> = (0..m)
        .map(|_| sample_latent(&s, &budget, &mut rng).unwrap().get(0, 1))
        .collect();
    let (ei, ej) = (Exp::new(li).unwrap(), Exp::new(lj).unwrap());
    let raced: Vec<f64> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let (ti, tj): (f64, f64) = (ei.sample(&mut rng), ej.sample(&mut rng));
                    ti.min(tj)
                })
                .sum()
        })
        .collect();
    let d = ks_statistic(direct, raced);
    let crit = (-(ALPHA / 2.0).ln() / 2.0).sqrt() * (2.0 / m as f64).sqrt();
    assert!(d < crit, "KS {d} >= {crit}");
}

#[test]
fn latent_moments() {
    let (n, li, lj) = (6u64, 0.7, 2.3);
    let mut budget = ComparisonBudget::zeros(3);
    budget.set(0, 2, n);
    let s = SkillVector::new(vec![li, 1.0, lj]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = 100_000;
    let draws: Vec<f64> = (0..m)
        .map(|_| sample_latent(&s, &budget, &mut rng).unwrap().get(2, 0))
        .collect();
    let mean = draws.iter().sum::<f64>() / m as f64;
    let var = draws.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let rate = li + lj;
    let (mu, sigma2) = (n as f64 / rate, n as f64 / rate.powi(2));
    let mean_se = (sigma2 / m as f64).sqrt();
    // Gamma excess kurtosis is 6/n.
    let var_se = (sigma2.powi(2) * (2.0 + 6.0 / n as f64) / m as f64).sqrt();
    assert!((mean - mu).abs() < 3.0 * mean_se, "mean {mean} vs {mu}");
    assert!((var - sigma2).abs() < 3.0 * var_se, "var {var} vs {sigma2}");
}

#[test]
fn unit_venue_effect_rate() {
    let mut hb = HomeBudget::zeros(2);
    hb.set(1, 0, 400_000);
    let s = SkillVector::new(vec![1.0, 1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let theta = 3.0;
    let w = sample_home_outcome(&s, &hb, theta, &mut rng).unwrap();
    let rate = w.get(1, 0) as f64 / 4e5;
    let se = (0.75f64 * 0.25 / 4e5).sqrt();
    assert!((rate - 0.75).abs() < 4.0 * se, "home rate {rate}");
    assert_eq!(w.get(0, 1), 0);
}
