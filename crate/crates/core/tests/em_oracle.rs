//! Posterior and EM checks against independently written densities.

use btl_bounds::em::{em_fit_default, posterior_params, EmConfig};
use btl_bounds::model::{
    log_gamma_density, log_joint, sample_latent, sample_outcome, sample_skills, ComparisonBudget,
    ComparisonOutcome, LatentTimes, PriorHyperParams, SkillVector,
};
use btl_bounds::special::log_gamma;
use btl_bounds::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ln_choose(n: u64, k: u64) -> f64 {
    let f = |x: u64| log_gamma(x as f64 + 1.0).unwrap();
    f(n) - f(k) - f(n - k)
}

/// log p(λ, W, Z): prior, then per pair C(n,w) λ_i^w_ij λ_j^w_ji ζ^(n-1)/Γ(n) e^{-(λ_i+λ_j)ζ}.
fn log_complete_joint(
    prior: &PriorHyperParams,
    budget: &ComparisonBudget,
    w: &ComparisonOutcome,
    z: &LatentTimes,
    lambda: &[f64],
) -> f64 {
    let mut s = 0.0;
    for i in 0..prior.k() {
        let (a, b) = (prior.a()[i], prior.b()[i]);
        s += a * b.ln() - log_gamma(a).unwrap() + (a - 1.0) * lambda[i].ln() - b * lambda[i];
    }
    for (i, j, n) in budget.edges() {
        let zeta = z.get(i, j);
        s += ln_choose(n, w.get(i, j))
            + w.get(i, j) as f64 * lambda[i].ln()
            + w.get(j, i) as f64 * lambda[j].ln()
            + (n as f64 - 1.0) * zeta.ln()
            - log_gamma(n as f64).unwrap()
            - (lambda[i] + lambda[j]) * zeta;
    }
    s
}

/// log p(W, Z) with the skills integrated out.
fn log_evidence(
    prior: &PriorHyperParams,
    budget: &ComparisonBudget,
    w: &ComparisonOutcome,
    z: &LatentTimes,
) -> f64 {
    let mut s = 0.0;
    for (i, j, n) in budget.edges() {
        s += ln_choose(n, w.get(i, j)) + (n as f64 - 1.0) * z.get(i, j).ln()
            - log_gamma(n as f64).unwrap();
    }
    for i in 0..prior.k() {
        let (a, b) = (prior.a()[i], prior.b()[i]);
        let (a_post, b_post) = (a + w.win_count(i) as f64, b + z.row_sum(i));
        s += a * b.ln() - log_gamma(a).unwrap() + log_gamma(a_post).unwrap() - a_post * b_post.ln();
    }
    s
}

#[test]
fn posterior_is_joint_over_evidence() {
    let prior = PriorHyperParams::new(vec![2.0, 3.5, 1.5, 4.0], vec![1.0, 0.5, 2.0, 1.5]).unwrap();
    let budget = ComparisonBudget::from_rows(&[
        vec![0, 5, 0, 2],
        vec![5, 0, 3, 0],
        vec![0, 3, 0, 9],
        vec![2, 0, 9, 0],
    ])
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let truth = sample_skills(&prior, &mut rng);
    let w = sample_outcome(&truth, &budget, &mut rng).unwrap();
    let z = sample_latent(&truth, &budget, &mut rng).unwrap();
    let post = posterior_params(&prior, &w, &z).unwrap();
    let evidence = log_evidence(&prior, &budget, &w, &z);
    for _ in 0..10 {
        let lambda: Vec<f64> = (0..4).map(|_| rng.random_range(0.05..5.0)).collect();
        let lhs: f64 = post
            .iter()
            .zip(&lambda)
            .map(|(g, &l)| log_gamma_density(l, g.shape, g.rate).unwrap())
            .sum();
        let rhs = log_complete_joint(&prior, &budget, &w, &z, &lambda) - evidence;
        assert!(
            (lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0),
            "at {lambda:?}: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn flat_prior_with_shutout_has_no_interior_mode() {
    // a = (1, 1), item 0 wins every game: a_1 + w_1 - 1 = 0, so no mode exists.
    let n = 6;
    let prior = PriorHyperParams::uniform(2, 1.0, 1.0).unwrap();
    let mut budget = ComparisonBudget::zeros(2);
    budget.set(0, 1, n);
    let w = ComparisonOutcome::from_rows(&[vec![0, n], vec![0, 0]], &budget).unwrap();
    let err = em_fit_default(&prior, &w, &budget, &EmConfig::default()).unwrap_err();
    assert!(matches!(err, Error::ShapeTooSmall { .. }), "{err:?}");
    let mut last = f64::NEG_INFINITY;
    for e in 0..30 {
        let s = SkillVector::new(vec![1.0, 2f64.powi(-e)]).unwrap();
        let lp = log_joint(&prior, &budget, &w, &s).unwrap();
        assert!(lp > last, "log posterior must rise as λ_2 shrinks");
        last = lp;
    }
}
