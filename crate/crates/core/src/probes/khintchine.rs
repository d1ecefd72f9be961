//! Best constant of the scalar Khintchine inequality and a Monte Carlo check
//! of the inequality for Rademacher sums.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use super::report::{ProbeReport, Provenance};
use crate::error::{domain, Result};
use crate::noise::RngStream;

/// `K_{2,ρ} = 2^{1/2} π^{−1/(2ρ)} Γ((ρ+1)/2)^{1/ρ}`, the `L^ρ` norm of a
/// standard Gaussian, for `ρ ≥ 2`.
pub fn khintchine_constant(rho: f64) -> Result<f64> {
    if rho.is_nan() || rho < 2.0 {
        return Err(domain(format!("Khintchine exponent must be >= 2, got {rho}")));
    }
    let log = 0.5 * std::f64::consts::LN_2 - std::f64::consts::PI.ln() / (2.0 * rho)
        + ln_gamma(0.5 * (rho + 1.0)) / rho;
    Ok(log.exp())
}

pub const MIN_SAMPLES: usize = 10_000;

/// For each exponent and coefficient vector, estimates
/// `(E|Σ ε_i a_i|^ρ)^{1/ρ}` with Rademacher signs and checks it against
/// `K_{2,ρ} ‖a‖₂ (1 + 3·relative standard error)`.
pub fn khintchine_empirical_check(
    rhos: &[f64],
    coefficients: &[Vec<f64>],
    samples: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if samples < MIN_SAMPLES {
        return Err(domain(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let mut report = ProbeReport::new("khintchine");
    report.input("rho", rhos).input("samples", samples).input("seed", seed);
    report.input("coefficient_dims", coefficients.iter().map(Vec::len).collect::<Vec<_>>());

    // closed-form anchors
    report.check_close("K(2)", khintchine_constant(2.0)?, 1.0, 1e-12, Provenance::ClosedForm);
    report.check_close(
        "K(4) vs (E g^4)^(1/4)",
        khintchine_constant(4.0)?,
        3f64.powf(0.25),
        1e-10,
        Provenance::ClosedForm,
    );

    for (ci, a) in coefficients.iter().enumerate() {
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (ri, &rho) in rhos.iter().enumerate() {
            let k = khintchine_constant(rho)?;
            let mut rng = RngStream::new(seed, ((ci as u64) << 16) | ri as u64);
            let (mut sum, mut sum2) = (0.0, 0.0);
            for _ in 0..samples {
                let s: f64 = a.iter().map(|&x| if rng.random::<bool>() { x } else { -x }).sum();
                let v = s.abs().powf(rho);
                sum += v;
                sum2 += v * v;
            }
            let n = samples as f64;
            let moment = sum / n;
            let se = ((sum2 / n - moment * moment).max(0.0) / n).sqrt();
            let root = moment.powf(rho.recip());
            let rel_se = if moment > 0.0 { se / (rho * moment) } else { 0.0 };
            let bound = k * norm * (1.0 + 3.0 * rel_se);
            report.check_at_most(
                &format!("a#{ci} rho={rho}: moment root <= K*|a|"),
                root,
                bound,
                Provenance::Bound,
            );
            report.plot.push([rho, root / (k * norm)]);
        }
    }
    report.plot_columns = ["rho".into(), "moment_root_over_bound".into()];
    Ok(report)
}

#[cfg(test)]
mod tests {
    use statrs::function::gamma::gamma;

    use super::*;

    #[test]
    fn constant_at_two_is_one() {
        assert!((khintchine_constant(2.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_at_four_is_gaussian_fourth_moment_root() {
        let k4 = khintchine_constant(4.0).unwrap();
        let direct = 2f64.sqrt() * std::f64::consts::PI.powf(-1.0 / 8.0) * gamma(2.5).powf(0.25);
        assert!((k4 - direct).abs() < 1e-12);
        assert!((k4 - 3f64.powf(0.25)).abs() < 1e-10);
    }

    #[test]
    fn even_moments_match_double_factorials() {
        // E g^{2j} = (2j−1)!!
        for (rho, df) in [(6.0, 15.0), (8.0, 105.0), (10.0, 945.0)] {
            let k: f64 = khintchine_constant(rho).unwrap();
            assert!((k.powf(rho) - df).abs() < 1e-9 * df);
        }
    }

    #[test]
    fn below_two_is_domain_error() {
        assert!(khintchine_constant(1.5).is_err());
        assert!(khintchine_constant(f64::NAN).is_err());
    }

    #[test]
    fn monotone_and_sqrt_bounded() {
        let mut prev = khintchine_constant(2.0).unwrap();
        let mut rho = 2.0;
        while rho <= 256.0 {
            let k = khintchine_constant(rho).unwrap();
            assert!(k >= prev - 1e-15);
            assert!(k / rho.sqrt() <= 1.0);
            prev = k;
            rho += 0.25;
        }
    }

    #[test]
    fn trivial_coefficient_vectors() {
        let r = khintchine_empirical_check(
            &[2.0, 4.0],
            &[vec![1.0], vec![1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]],
            MIN_SAMPLES,
            1,
        )
        .unwrap();
        assert!(r.passed(), "{r:#?}");
        // single coefficient: |S| = 1 exactly
        let single = r.check("a#0 rho=4: moment root <= K*|a|").unwrap();
        assert_eq!(single.measured, 1.0);
    }

    #[test]
    fn too_few_samples_rejected() {
        assert!(khintchine_empirical_check(&[2.0], &[vec![1.0]], 10, 0).is_err());
    }
}
