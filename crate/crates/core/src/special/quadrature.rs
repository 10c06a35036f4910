//! Globally adaptive Gauss–Kronrod (7/15 point) quadrature.

use crate::error::{Error, Result};

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::Invalid {
                what: "quadrature spec",
                reason: format!("{self:?}: tolerances must be positive and subdivisions >= 1"),
            });
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrate `f` over `[lo, hi]`, returning the estimate and its error bound.
///
/// The interval with the largest error estimate is bisected until the total
/// error satisfies `max(abs_tol, rel_tol * |estimate|)`.
pub fn integrate_with_error<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    spec.validate()?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Invalid {
            what: "integration limits",
            reason: format!("[{lo}, {hi}] must be finite"),
        });
    }
    if lo == hi {
        return Ok((0.0, 0.0));
    }
    let mut segments = vec![kronrod15(&f, lo, hi)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::ToleranceNotMet {
                estimate: value,
                error,
            });
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok((value, error));
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(Error::ToleranceNotMet {
                estimate: value,
                error,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        segments.push(kronrod15(&f, seg.lo, mid));
        segments.push(kronrod15(&f, mid, seg.hi));
    }
}

/// Integrate `f` over `[lo, hi]` to the tolerances in `spec`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_error(f, lo, hi, spec).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma::log_beta;

    #[test]
    fn constants_and_polynomials() {
        let spec = QuadratureSpec::default();
        assert!((integrate(|_| 1.0, 0.0, 1.0, &spec).unwrap() - 1.0).abs() < 1e-15);
        assert!((integrate(|x| x * x, 0.0, 1.0, &spec).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(integrate(|x| x, 2.0, 2.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn beta_density_normalizes() {
        let spec = QuadratureSpec::default();
        let lb = log_beta(5.0, 5.0).unwrap();
        let dens = |x: f64| (4.0 * x.ln() + 4.0 * (1.0 - x).ln() - lb).exp();
        assert!((integrate(dens, 0.0, 1.0, &spec).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn monomial_beta_integrals() {
        let spec = QuadratureSpec::default();
        for p in 0..=6 {
            for q in 0..=6 {
                let f = |x: f64| x.powi(p) * (1.0 - x).powi(q);
                let got = integrate(f, 0.0, 1.0, &spec).unwrap();
                let expect = log_beta(p as f64 + 1.0, q as f64 + 1.0).unwrap().exp();
                assert!((got - expect).abs() <= 1e-9, "p={p} q={q}");
            }
        }
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let spec = QuadratureSpec {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_subdivisions: 500,
        };
        let got = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &spec).unwrap();
        assert!((got - 2.0).abs() < 1e-8);
    }

    #[test]
    fn reports_failure_with_estimate() {
        let spec = QuadratureSpec {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_subdivisions: 3,
        };
        match integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 1.0, &spec) {
            Err(Error::ToleranceNotMet { estimate, error }) => {
                assert!(estimate.is_finite() && error > 0.0);
            }
            other => panic!("expected tolerance failure, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec {
            abs_tol: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(integrate(|x| x, 0.0, 1.0, &spec).is_err());
    }
}
