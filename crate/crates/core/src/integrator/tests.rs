use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::diagnostics::mass;
use crate::error::Error;
use crate::initial::InitialData;
use crate::noise::{NoiseIncrement, NoiseSampler, NoiseSpec, RngStream};
use crate::probes::oracle::oracle_step;
use crate::spectral::{Field, Grid, GridSpec, Representation};

fn grid(dim: usize, n: usize, l: f64) -> Grid {
    Grid::new(GridSpec::new(dim, n, l).unwrap()).unwrap()
}

fn random_field(g: &Grid, seed: u64, amp: f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..g.len())
        .map(|_| Complex64::new(rng.random_range(-amp..amp), rng.random_range(-amp..amp)))
        .collect();
    Field::from_values(g, v, Representation::Physical).unwrap()
}

#[test]
fn nonlinear_phase_identities() {
    let g = grid(1, 16, 4.0);
    let cfg = SolverConfig::new(0.1);
    let u = random_field(&g, 1, 1.0);
    assert_eq!(nonlinear_phase_step(&u, 0.1, 0.0, &cfg), u);

    let c = Complex64::new(0.6, -0.8);
    let constant = Field::from_fn(&g, |_| c);
    let out = nonlinear_phase_step(&constant, 0.1, 1.0, &cfg);
    let expected = c * Complex64::from_polar(1.0, -c.norm_sqr() * 0.1);
    assert!(out.values().iter().all(|z| (z - expected).norm() < 1e-15));

    let out = nonlinear_phase_step(&u, 0.3, 0.7, &cfg.clone().with_power(7.0));
    for (a, b) in out.values().iter().zip(u.values()) {
        assert!((a.norm() - b.norm()).abs() <= 1e-15);
    }
}

#[test]
fn noise_phase_identities() {
    let g = grid(2, 8, 4.0);
    let u = random_field(&g, 2, 1.0);
    assert_eq!(noise_phase_step(&u, &Field::zeros(&g)).unwrap(), u);

    let sampler = NoiseSampler::new(&NoiseSpec::gaussian(1.0, 2.0), &g).unwrap();
    let inc = sampler.sample(0.1, &mut RngStream::new(0, 0)).unwrap();
    let out = noise_phase_step(&u, inc.field()).unwrap();
    assert!((mass(&out) - mass(&u)).abs() <= 1e-14 * mass(&u));

    let mut bad = inc.field().clone();
    bad.values_mut()[3].im = 1e-6;
    assert!(matches!(noise_phase_step(&u, &bad), Err(Error::Contract(_))));
    assert!(noise_phase_step(&u, &inc.field().spectral()).is_err());
}

#[test]
fn noise_phase_mean_matches_ito_damping() {
    // E e^{−iΔW} = e^{−Var/2} = e^{−F_φ dt/2} for Gaussian ΔW
    let l = 2.0;
    let g = grid(1, 8, l);
    let (eps, dt) = (1.5, 0.05);
    let spec = NoiseSpec::gaussian(1.0, eps).with_k_max(0);
    let sampler = NoiseSampler::new(&spec, &g).unwrap();
    let f = sampler.correction_field().values()[0].re;
    assert!((f - eps * eps / l).abs() < 1e-14);

    let u0 = Complex64::new(0.3, 0.4);
    let u = Field::from_fn(&g, |_| u0);
    let mut rng = RngStream::new(8, 0);
    let n = 100_000;
    let (mut sum, mut sum2) = (Complex64::default(), 0.0);
    for _ in 0..n {
        let inc = sampler.sample(dt, &mut rng).unwrap();
        let v = noise_phase_step(&u, inc.field()).unwrap().values()[0];
        sum += v;
        sum2 += v.norm_sqr();
    }
    let mean = sum / n as f64;
    let expected = u0 * (-f * dt / 2.0).exp();
    let se = ((sum2 / n as f64 - mean.norm_sqr()) / n as f64).sqrt();
    assert!((mean - expected).norm() < 4.0 * se, "{mean} vs {expected} (se {se})");
}

#[test]
fn linear_only_step_is_exact_free_flow() {
    let g = grid(2, 16, 6.0);
    let u = random_field(&g, 3, 1.0);
    for splitting in [Splitting::Strang, Splitting::Lie] {
        let cfg = SolverConfig::new(0.02).with_nonlinearity(Nonlinearity::Off).with_splitting(splitting);
        let integ = Integrator::new(&g, cfg, &NoiseSpec::none(), CutoffSpec::default()).unwrap();
        let mut s = integ.initial_state(&u).unwrap();
        integ.step(&mut s, &mut RngStream::new(0, 0)).unwrap();
        assert!(s.field().max_abs_diff(&u.free_propagate(0.02)) < 1e-12);
        assert!((s.t() - 0.02).abs() < 1e-18);
    }
}

#[test]
fn mass_drift_per_step_is_roundoff() {
    let g = grid(1, 64, 10.0);
    let cfg = SolverConfig::new(0.01).with_power(5.0);
    let integ = Integrator::new(&g, cfg, &NoiseSpec::gaussian(2.0, 0.7), CutoffSpec::default()).unwrap();
    let mut s = integ.initial_state(&random_field(&g, 4, 1.0)).unwrap();
    let mut rng = RngStream::new(1, 1);
    for _ in 0..50 {
        let before = mass(s.field());
        integ.step(&mut s, &mut rng).unwrap();
        assert!((mass(s.field()) - before).abs() <= 1e-13 * before);
    }
}

#[test]
fn strang_local_error_is_third_order() {
    let g = grid(1, 32, 12.0);
    let cfg = SolverConfig::new(1.0);
    let u = InitialData::gaussian(0.8, 1.5).build(&g).unwrap();
    let zero = Field::zeros(&g);
    let errors: Vec<f64> = [0.08, 0.04, 0.02]
        .iter()
        .map(|&dt| {
            let c = SolverConfig { dt, ..cfg.clone() };
            let integ = Integrator::new(&g, c.clone(), &NoiseSpec::none(), CutoffSpec::default()).unwrap();
            let mut s = integ.initial_state(&u).unwrap();
            integ.step(&mut s, &mut RngStream::new(0, 0)).unwrap();
            let reference = oracle_step(&u, dt, &zero, 1.0, &c).unwrap();
            s.field().max_abs_diff(&reference)
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 2.7, "local order {order} from {errors:?}");
    }
}

#[test]
fn immediate_crossing_when_radius_below_initial_norm() {
    let g = grid(1, 32, 10.0);
    let u = InitialData::gaussian(1.0, 1.0).build(&g).unwrap();
    let r = 0.5 * u.h1_norm();
    let cfg = SolverConfig::new(1e-3).with_truncation(r);
    let integ = Integrator::new(&g, cfg, &NoiseSpec::gaussian(1.0, 0.5), CutoffSpec::default()).unwrap();
    let mut s = integ.initial_state(&u).unwrap();
    let out = integ.evolve(&mut s, &mut RngStream::new(0, 0), 1.0, &mut ()).unwrap();
    assert!(out.hit);
    assert_eq!(out.tau, Some(0.0));
    assert_eq!(out.steps, 0);
    assert_eq!(out.stop, StopReason::Crossing);
}

#[test]
fn defocusing_small_data_never_crosses_huge_radius() {
    let g = grid(1, 64, 20.0);
    let u = InitialData::gaussian(0.5, 1.0).build(&g).unwrap();
    let cfg = SolverConfig::new(1e-3).with_nonlinearity(Nonlinearity::Defocusing).with_radius(1e6);
    let integ = Integrator::new(&g, cfg, &NoiseSpec::none(), CutoffSpec::default()).unwrap();
    let mut s = integ.initial_state(&u).unwrap();
    let out = integ.evolve(&mut s, &mut RngStream::new(0, 0), 1.0, &mut ()).unwrap();
    assert!(!out.hit && !out.resolution_flag);
    assert_eq!(out.steps, 1000);
    assert_eq!(out.stop, StopReason::Horizon);
    assert!((out.final_t - 1.0).abs() < 1e-12);
    assert!(out.sup_h1 < 2.0 * u.h1_norm());
}

#[test]
fn step_budget_is_a_distinct_error() {
    let g = grid(1, 16, 10.0);
    let mut cfg = SolverConfig::new(1e-3);
    cfg.max_steps = 10;
    let integ = Integrator::new(&g, cfg, &NoiseSpec::none(), CutoffSpec::default()).unwrap();
    let mut s = integ.initial_state(&Field::zeros(&g)).unwrap();
    let err = integ.evolve(&mut s, &mut RngStream::new(0, 0), 1.0, &mut ()).unwrap_err();
    assert!(matches!(err, Error::Budget(_)));
}

#[test]
fn step_counts() {
    assert_eq!(steps_for(1.0, 1e-3), 1000);
    assert_eq!(steps_for(0.1, 0.03), 4);
    assert_eq!(steps_for(0.3, 0.1), 3);
}

struct Snapshots {
    fields: Vec<Field>,
    keep_going: bool,
}

impl Observer for Snapshots {
    fn on_start(&mut self, state: &TrajectoryState, _theta: f64) {
        self.fields.push(state.field().clone());
    }

    fn on_step(&mut self, state: &TrajectoryState, _info: &StepInfo) -> Control {
        self.fields.push(state.field().clone());
        Control::Continue
    }

    fn continue_after_crossing(&self) -> bool {
        self.keep_going
    }
}

fn focusing_setup() -> (Grid, Field, NoiseSpec) {
    let g = grid(1, 64, 16.0);
    let u = InitialData::gaussian(1.2, 1.0).build(&g).unwrap();
    (g, u, NoiseSpec::gaussian(2.0, 1.0))
}

#[test]
fn coupled_radii_agree_until_first_crossing() {
    let (g, u, noise) = focusing_setup();
    let r = 1.3 * u.h1_norm();
    let run = |radius: f64| {
        let cfg = SolverConfig::new(1e-3).with_power(5.0).with_truncation(radius);
        let integ = Integrator::new(&g, cfg, &noise, CutoffSpec::default()).unwrap();
        let mut s = integ.initial_state(&u).unwrap();
        let mut obs = Snapshots { fields: vec![], keep_going: false };
        let out = integ.evolve(&mut s, &mut RngStream::new(42, 7), 2.0, &mut obs).unwrap();
        (out, obs.fields)
    };
    let (small, f_small) = run(r);
    let (large, f_large) = run(2.0 * r);
    let tau = small.tau.expect("crossing of the smaller radius");
    assert!(large.tau.is_none_or(|t2| t2 >= tau));
    let upto = f_small.len();
    assert!(f_large.len() >= upto);
    for (a, b) in f_small.iter().zip(&f_large).take(upto) {
        assert!(a.max_abs_diff(b) <= 1e-12);
    }
}

#[test]
fn saturated_cutoff_matches_untruncated_run() {
    let (g, u, noise) = focusing_setup();
    let r = 1e3;
    let make = |truncation: bool| {
        let mut cfg = SolverConfig::new(1e-3).with_radius(r);
        cfg.truncation = truncation;
        Integrator::new(&g, cfg, &noise, CutoffSpec::default()).unwrap()
    };
    let mut a = make(true).initial_state(&u).unwrap();
    let mut b = make(false).initial_state(&u).unwrap();
    let oa = make(true).evolve(&mut a, &mut RngStream::new(3, 3), 0.2, &mut ()).unwrap();
    let ob = make(false).evolve(&mut b, &mut RngStream::new(3, 3), 0.2, &mut ()).unwrap();
    assert!(!oa.hit && oa.x1 < r);
    assert!(a.field().max_abs_diff(b.field()) <= 1e-12);
    assert_eq!(oa, ob);
}

#[test]
fn continuing_past_crossing_switches_off_nonlinearity() {
    let (g, u, noise) = focusing_setup();
    let r = 1.1 * u.h1_norm();
    let cfg = SolverConfig::new(1e-3).with_power(5.0).with_truncation(r);
    let integ = Integrator::new(&g, cfg, &noise, CutoffSpec::default()).unwrap();
    let mut s = integ.initial_state(&u).unwrap();
    let mut obs = Snapshots { fields: vec![], keep_going: true };
    let out = integ.evolve(&mut s, &mut RngStream::new(1, 0), 0.5, &mut obs).unwrap();
    assert!(out.hit);
    assert_eq!(out.stop, StopReason::Horizon);
    assert!(out.tau.unwrap() < out.final_t);
}

#[test]
fn recorded_path_reproduces_sampled_run() {
    let (g, u, noise) = focusing_setup();
    let cfg = SolverConfig::new(1e-3);
    let integ = Integrator::new(&g, cfg, &noise, CutoffSpec::default()).unwrap();
    let mut rng = RngStream::new(5, 5);
    let path: Vec<NoiseIncrement> =
        (0..100).map(|_| integ.sampler().sample(1e-3, &mut rng).unwrap()).collect();
    let mut a = integ.initial_state(&u).unwrap();
    let mut b = integ.initial_state(&u).unwrap();
    integ.evolve(&mut a, &mut RngStream::new(5, 5), 0.1, &mut ()).unwrap();
    integ.evolve_on_path(&mut b, &path, &mut ()).unwrap();
    assert_eq!(a.field(), b.field());
}

#[test]
fn mismatched_increment_step_is_rejected() {
    let (g, u, noise) = focusing_setup();
    let integ = Integrator::new(&g, SolverConfig::new(1e-3), &noise, CutoffSpec::default()).unwrap();
    let mut s = integ.initial_state(&u).unwrap();
    let inc = integ.sampler().sample(2e-3, &mut RngStream::new(0, 0)).unwrap();
    assert!(integ.step_with_increment(&mut s, &inc).is_err());
}

#[test]
fn running_x1_matches_offline_recomputation() {
    let (g, u, noise) = focusing_setup();
    let dt = 1e-3;
    let integ = Integrator::new(&g, SolverConfig::new(dt), &noise, CutoffSpec::default()).unwrap();
    let mut s = integ.initial_state(&u).unwrap();
    let mut obs = Snapshots { fields: vec![], keep_going: true };
    integ.evolve(&mut s, &mut RngStream::new(9, 9), 0.2, &mut obs).unwrap();
    let h1: Vec<f64> = obs.fields.iter().map(Field::h1_norm).collect();
    let w8: Vec<f64> =
        obs.fields.iter().map(|f| f.sobolev_w1p_norm(STRICHARTZ_EXPONENT).unwrap().powi(8)).collect();
    let sup = h1.iter().cloned().fold(0.0, f64::max);
    let int: f64 = w8.windows(2).map(|w| 0.5 * dt * (w[0] + w[1])).sum();
    assert!((s.sup_h1() - sup).abs() <= 1e-10 * sup);
    assert!((s.int_w8() - int).abs() <= 1e-10 * int);
    assert!((s.x1() - (sup + int.powf(0.125))).abs() <= 1e-10 * s.x1());
}
