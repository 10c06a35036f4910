//! Bayesian BTL model: priors, comparison budgets, outcomes, latent times and
//! exact samplers for the basic and home-field variants.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::log_gamma;

fn invalid(what: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid {
        what,
        reason: reason.into(),
    }
}

/// Per-item Gamma(shape a_i, rate b_i) prior on the skills.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorHyperParams {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PriorHyperParams {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        if a.len() < 2 {
            return Err(invalid("prior", "at least two items are required"));
        }
        if let Some(x) = a.iter().chain(&b).find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(invalid(
                "prior",
                format!("hyperparameter {x} is not positive and finite"),
            ));
        }
        Ok(Self { a, b })
    }

    /// Identical shape and rate for all `k` items.
    pub fn uniform(k: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a; k], vec![b; k])
    }

    /// Uniform shape `a` with the normalising rate `b = a k - 1`.
    pub fn normalized(k: usize, a: f64) -> Result<Self> {
        Self::uniform(k, a, a * k as f64 - 1.0)
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Returns the common rate if all rates are equal.
    pub fn common_rate(&self) -> Result<f64> {
        let b0 = self.b[0];
        match self.b.iter().position(|&x| x != b0) {
            None => Ok(b0),
            Some(j) => Err(Error::UnequalRates {
                i: 0,
                j,
                bi: b0,
                bj: self.b[j],
            }),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            a: perm.iter().map(|&p| self.a[p]).collect(),
            b: perm.iter().map(|&p| self.b[p]).collect(),
        }
    }
}

fn check_square(k: usize, rows: &[Vec<u64>]) -> Result<()> {
    if rows.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: rows.len(),
        });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: r.len(),
        });
    }
    Ok(())
}

/// Symmetric comparison counts n_ij with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComparisonBudget {
    k: usize,
    n: Vec<u64>,
}

impl ComparisonBudget {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            n: vec![0; k * k],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let k = rows.len();
        check_square(k, rows)?;
        for i in 0..k {
            if rows[i][i] != 0 {
                return Err(invalid(
                    "budget",
                    format!("diagonal entry n_{i}{i} is nonzero"),
                ));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(invalid("budget", format!("n_{i}{j} != n_{j}{i}")));
                }
            }
        }
        Ok(Self {
            k,
            n: rows.concat(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.n[i * self.k + j]
    }

    /// Set n_ij = n_ji = `value`.
    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        assert!(i != j, "diagonal of a comparison budget is fixed at zero");
        self.n[i * self.k + j] = value;
        self.n[j * self.k + i] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: u64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + value);
    }

    /// Total number of comparisons Σ_{i<j} n_ij.
    pub fn total(&self) -> u64 {
        self.n.iter().sum::<u64>() / 2
    }

    /// Node load n_i = ½ Σ_j n_ij.
    pub fn node_load(&self, i: usize) -> f64 {
        self.row_sum(i) as f64 / 2.0
    }

    pub fn node_loads(&self) -> Vec<f64> {
        (0..self.k).map(|i| self.node_load(i)).collect()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.n[i * self.k..(i + 1) * self.k].iter().sum()
    }

    /// Pairs `(i, j, n_ij)` with `i < j` and `n_ij > 0`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.k).flat_map(move |i| {
            (i + 1..self.k).filter_map(move |j| {
                let v = self.get(i, j);
                (v > 0).then_some((i, j, v))
            })
        })
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.n.chunks(self.k).map(<[u64]>::to_vec).collect()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                out.n[i * self.k + j] = self.get(perm[i], perm[j]);
            }
        }
        out
    }
}

/// Home-field comparison counts: n^h_ij games with i at home. May be asymmetric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomeBudget {
    k: usize,
    nh: Vec<u64>,
}

impl HomeBudget {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            nh: vec![0; k * k],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let k = rows.len();
        check_square(k, rows)?;
        if (0..k).any(|i| rows[i][i] != 0) {
            return Err(invalid("home budget", "diagonal must be zero"));
        }
        Ok(Self {
            k,
            nh: rows.concat(),
        })
    }

    /// Split every n_ij of a basic budget into home games: `home` games with
    /// the lower index at home and the rest with the higher index at home.
    pub fn split(budget: &ComparisonBudget, home: impl Fn(u64) -> u64) -> Self {
        let mut out = Self::zeros(budget.k());
        for (i, j, n) in budget.edges() {
            let h = home(n).min(n);
            out.set(i, j, h);
            out.set(j, i, n - h);
        }
        out
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.nh[i * self.k + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        assert!(i != j, "diagonal of a home budget is fixed at zero");
        self.nh[i * self.k + j] = value;
    }

    /// Induced symmetric budget n_ij = n^h_ij + n^h_ji.
    pub fn induced(&self) -> ComparisonBudget {
        let mut out = ComparisonBudget::zeros(self.k);
        for i in 0..self.k {
            for j in i + 1..self.k {
                out.set(i, j, self.get(i, j) + self.get(j, i));
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.k).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Strictly positive skill parameters λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillVector(Vec<f64>);

impl SkillVector {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if let Some(x) = lambda.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(invalid("skills", format!("{x} is not positive and finite")));
        }
        Ok(Self(lambda))
    }

    /// Prior mean a_i / b_i.
    pub fn prior_mean(prior: &PriorHyperParams) -> Self {
        Self(
            prior
                .a()
                .iter()
                .zip(prior.b())
                .map(|(a, b)| a / b)
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Win counts w_ij (times i beat j).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonOutcome {
    k: usize,
    w: Vec<u64>,
}

impl ComparisonOutcome {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            w: vec![0; k * k],
        }
    }

    /// Build from a full win matrix and check it against `budget`.
    pub fn from_rows(rows: &[Vec<u64>], budget: &ComparisonBudget) -> Result<Self> {
        let k = budget.k();
        check_square(k, rows)?;
        for i in 0..k {
            for j in 0..k {
                let ok = if i == j {
                    rows[i][j] == 0
                } else {
                    rows[i][j] + rows[j][i] == budget.get(i, j)
                };
                if !ok {
                    return Err(invalid(
                        "outcome",
                        format!("w_{i}{j} inconsistent with budget"),
                    ));
                }
            }
        }
        Ok(Self {
            k,
            w: rows.concat(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.w[i * self.k + j]
    }

    /// w_i = Σ_j w_ij.
    pub fn win_count(&self, i: usize) -> u64 {
        self.w[i * self.k..(i + 1) * self.k].iter().sum()
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.w.chunks(self.k).map(<[u64]>::to_vec).collect()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                out.w[i * self.k + j] = self.get(perm[i], perm[j]);
            }
        }
        out
    }
}

/// Symmetric latent times ζ_ij, zero where n_ij = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentTimes {
    k: usize,
    z: Vec<f64>,
}

impl LatentTimes {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            z: vec![0.0; k * k],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.z[i * self.k + j] = value;
        self.z[j * self.k + i] = value;
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.z[i * self.k + j]
    }

    /// z_i = Σ_j ζ_ij.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.z[i * self.k..(i + 1) * self.k].iter().sum()
    }
}

/// Home-field advantage: a point value or a finite discrete law over (0, ∞).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Theta {
    Point(f64),
    Discrete(Vec<(f64, f64)>),
}

impl Theta {
    pub fn validate(&self) -> Result<()> {
        match self {
            Theta::Point(t) if *t > 0.0 && t.is_finite() => Ok(()),
            Theta::Point(t) => Err(invalid("theta", format!("{t} is not positive and finite"))),
            Theta::Discrete(atoms) => {
                if atoms.is_empty() {
                    return Err(invalid("theta", "empty distribution"));
                }
                if atoms
                    .iter()
                    .any(|&(t, p)| !(t > 0.0 && t.is_finite()) || !(p >= 0.0))
                {
                    return Err(invalid(
                        "theta",
                        "atoms must be positive with nonnegative mass",
                    ));
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(invalid("theta", format!("masses sum to {total}, not 1")));
                }
                Ok(())
            }
        }
    }

    /// Support points with their probabilities.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            Theta::Point(t) => vec![(*t, 1.0)],
            Theta::Discrete(atoms) => atoms.clone(),
        }
    }
}

/// Home-field wins w^h_ij: games won by i while at home against j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomeOutcome {
    k: usize,
    wh: Vec<u64>,
}

impl HomeOutcome {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.wh[i * self.k + j]
    }

    /// Total wins of i over j regardless of venue: w^h_ij + (n^h_ji - w^h_ji).
    pub fn aggregated_wins(&self, budget: &HomeBudget) -> Vec<Vec<u64>> {
        (0..self.k)
            .map(|i| {
                (0..self.k)
                    .map(|j| {
                        if i == j {
                            0
                        } else {
                            self.get(i, j) + budget.get(j, i) - self.get(j, i)
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Draw λ_i ~ Gamma(a_i, b_i) independently.
pub fn sample_skills<R: Rng + ?Sized>(prior: &PriorHyperParams, rng: &mut R) -> SkillVector {
    let lambda = prior
        .a()
        .iter()
        .zip(prior.b())
        .map(|(&a, &b)| {
            let g = Gamma::new(a, 1.0).expect("validated shape");
            g.sample(rng) / b
        })
        .collect();
    SkillVector(lambda)
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 {
        return 0;
    }
    Binomial::new(n, p.clamp(0.0, 1.0))
        .expect("probability clamped to [0, 1]")
        .sample(rng)
}

/// Draw w_ij ~ Binomial(n_ij, λ_i/(λ_i+λ_j)) for i < j and set w_ji = n_ij - w_ij.
pub fn sample_outcome<R: Rng + ?Sized>(
    skills: &SkillVector,
    budget: &ComparisonBudget,
    rng: &mut R,
) -> Result<ComparisonOutcome> {
    let k = budget.k();
    if skills.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: skills.len(),
        });
    }
    let l = skills.as_slice();
    let mut out = ComparisonOutcome::zeros(k);
    for (i, j, n) in budget.edges() {
        let w = binomial(n, l[i] / (l[i] + l[j]), rng);
        out.w[i * k + j] = w;
        out.w[j * k + i] = n - w;
    }
    Ok(out)
}

/// Draw ζ_ij ~ Gamma(n_ij, λ_i+λ_j) for every compared pair.
pub fn sample_latent<R: Rng + ?Sized>(
    skills: &SkillVector,
    budget: &ComparisonBudget,
    rng: &mut R,
) -> Result<LatentTimes> {
    let k = budget.k();
    if skills.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: skills.len(),
        });
    }
    let l = skills.as_slice();
    let mut out = LatentTimes::zeros(k);
    for (i, j, n) in budget.edges() {
        let g = Gamma::new(n as f64, 1.0).expect("positive shape");
        out.set(i, j, g.sample(rng) / (l[i] + l[j]));
    }
    Ok(out)
}

/// Draw w^h_ij ~ Binomial(n^h_ij, θλ_i/(θλ_i+λ_j)) for every ordered pair.
pub fn sample_home_outcome<R: Rng + ?Sized>(
    skills: &SkillVector,
    budget: &HomeBudget,
    theta: f64,
    rng: &mut R,
) -> Result<HomeOutcome> {
    Theta::Point(theta).validate()?;
    let k = budget.k();
    if skills.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: skills.len(),
        });
    }
    let l = skills.as_slice();
    let mut wh = vec![0; k * k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                let q = theta * l[i] / (theta * l[i] + l[j]);
                wh[i * k + j] = binomial(budget.get(i, j), q, rng);
            }
        }
    }
    Ok(HomeOutcome { k, wh })
}

/// Log density of Gamma(shape, rate) at x.
pub fn log_gamma_density(x: f64, shape: f64, rate: f64) -> Result<f64> {
    Ok(shape * rate.ln() - log_gamma(shape)? + (shape - 1.0) * x.ln() - rate * x)
}

fn log_binomial_coefficient(n: u64, k: u64) -> Result<f64> {
    let (n, k) = (n as f64, k as f64);
    Ok(log_gamma(n + 1.0)? - log_gamma(k + 1.0)? - log_gamma(n - k + 1.0)?)
}

/// Joint log density log p(λ, W): binomial likelihood times the Gamma prior.
pub fn log_joint(
    prior: &PriorHyperParams,
    budget: &ComparisonBudget,
    outcome: &ComparisonOutcome,
    skills: &SkillVector,
) -> Result<f64> {
    let l = skills.as_slice();
    let mut total = 0.0;
    for (i, j, n) in budget.edges() {
        let (wij, wji) = (outcome.get(i, j) as f64, outcome.get(j, i) as f64);
        let s = l[i] + l[j];
        total += log_binomial_coefficient(n, outcome.get(i, j))?;
        total += wij * (l[i] / s).ln() + wji * (l[j] / s).ln();
    }
    for (i, &x) in l.iter().enumerate() {
        total += log_gamma_density(x, prior.a()[i], prior.b()[i])?;
    }
    Ok(total)
}
