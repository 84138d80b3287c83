//! Numerical mobility checks: closure configurations by damped least
//! squares, and tracing of the one-dimensional configuration curve by
//! pseudo-arclength continuation.
//!
//! A mobile linkage has a Jacobian of rank 5 along its curve; the ratio of
//! the two smallest singular values ("rank gap") is the dimension test.

use std::io::{self, Write};

use nalgebra::{Matrix6, SMatrix, SVector, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linkage::{wrap_angle, Closure, ConfigurationPoint, LinkageParams};
use crate::tpoly::TPoly;

pub const SEED_RESIDUAL: f64 = 1e-11;
pub const START_RESIDUAL: f64 = 1e-9;
pub const RANK_GAP: f64 = 1e6;
pub const DEFAULT_STEP: f64 = 0.05;
pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_ATTEMPTS: usize = 200;

const LM_ITERATIONS: usize = 300;
const NEWTON_ITERATIONS: usize = 12;
const CORRECTOR_RESIDUAL: f64 = 1e-12;
const ACCEPT_RESIDUAL: f64 = 1e-10;
const MAX_HALVINGS: usize = 14;
/// Minimum cosine between consecutive tangents; a sharper turn means the
/// corrector jumped branches.
const TANGENT_ALIGNMENT: f64 = 0.8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobilityError {
    #[error("start is not a closure configuration (residual {0:e})")]
    NotOnCurve(f64),
    #[error("start is isolated or singular (rank gap {0:e})")]
    Isolated(f64),
}

/// Singular values of the closure Jacobian, descending.
pub fn rank_profile(p: &LinkageParams<f64>, cfg: &ConfigurationPoint) -> [f64; 6] {
    singular_values(&p.closure_jacobian(cfg))
}

fn singular_values(j: &Matrix6<f64>) -> [f64; 6] {
    let mut sv: Vec<f64> = j.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    std::array::from_fn(|k| sv[k])
}

/// `sigma_5 / sigma_6`; infinite when only `sigma_6` vanishes, zero when
/// `sigma_5` does too.
pub fn rank_gap(sv: &[f64; 6]) -> f64 {
    if sv[4] == 0.0 {
        0.0
    } else if sv[5] == 0.0 {
        f64::INFINITY
    } else {
        sv[4] / sv[5]
    }
}

/// Unit right singular vector of the smallest singular value.
fn null_direction(j: &Matrix6<f64>) -> Vector6<f64> {
    let svd = j.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("six singular values");
    v_t.row(k).transpose().normalize()
}

fn lm_solve(closure: &Closure, start: Vector6<f64>) -> Option<Vector6<f64>> {
    let residual = |x: &Vector6<f64>| closure.residual(&ConfigurationPoint::from_vector(x));
    let mut x = start;
    let mut r = residual(&x);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..LM_ITERATIONS {
        if r.amax() < 1e-14 {
            break;
        }
        let j = closure.jacobian(&ConfigurationPoint::from_vector(&x));
        let jt = j.transpose();
        let a = jt * j + Matrix6::identity() * lambda;
        let Some(delta) = a.lu().solve(&(-(jt * r))) else {
            lambda *= 4.0;
            continue;
        };
        let trial = x + delta;
        let r_trial = residual(&trial);
        let c_trial = r_trial.norm_squared();
        if c_trial < cost {
            x = trial;
            r = r_trial;
            cost = c_trial;
            lambda = (lambda / 3.0).max(1e-12);
        } else {
            lambda *= 4.0;
            if lambda > 1e10 {
                break;
            }
        }
    }
    // minimum-norm Gauss-Newton polish onto the solution set
    for _ in 0..8 {
        let j = closure.jacobian(&ConfigurationPoint::from_vector(&x));
        let svd = j.svd(true, true);
        let eps = 1e-9 * svd.singular_values.max();
        let Ok(delta) = svd.solve(&(-r), eps) else { break };
        let trial = x + delta;
        let r_trial = residual(&trial);
        if r_trial.amax() >= r.amax() {
            break;
        }
        x = trial;
        r = r_trial;
    }
    (r.amax() < SEED_RESIDUAL).then_some(x)
}

/// A closure configuration on a curve (rank gap above [`RANK_GAP`]) from
/// random starts, or `None` when every attempt fails.
pub fn find_seed(p: &LinkageParams<f64>, attempts: usize, seed: u64) -> Option<ConfigurationPoint> {
    let closure = p.closure();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts.max(1) {
        let start = Vector6::from_fn(|_, _| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let Some(x) = lm_solve(&closure, start) else { continue };
        let cfg = ConfigurationPoint::from_vector(&x).wrapped();
        let gap = rank_gap(&singular_values(&closure.jacobian(&cfg)));
        if closure.residual(&cfg).amax() < SEED_RESIDUAL && gap > RANK_GAP {
            return Some(cfg);
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOptions {
    pub steps: usize,
    pub step_size: f64,
    /// Start along the negated initial tangent.
    pub reverse: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { steps: DEFAULT_STEPS, step_size: DEFAULT_STEP, reverse: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    Closed,
    StepLimit,
    CorrectorFailure { after_points: usize, detail: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigCurve {
    /// Wrapped into `(-pi, pi]`, in tracing order; the start comes first.
    pub points: Vec<ConfigurationPoint>,
    pub residuals: Vec<f64>,
    pub rank_gaps: Vec<f64>,
    /// Oriented unit tangents, one per point.
    pub tangents: Vec<[f64; 6]>,
    pub closed: bool,
    pub termination: Termination,
}

impl ConfigCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_rank_gap(&self) -> f64 {
        self.rank_gaps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |theta_i - theta_j|` with the difference wrapped into `(-pi, pi]`.
    pub fn max_angle_difference(&self, i: usize, j: usize) -> f64 {
        self.points
            .iter()
            .map(|c| wrap_angle(c.theta[i - 1] - c.theta[j - 1]).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `theta_1..theta_6, t_1..t_6, residual, rank_gap`.
    /// Floats use the shortest round-trip form; infinite `t` prints `inf`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header: Vec<String> = (1..=6).map(|k| format!("theta_{k}")).collect();
        header.extend((1..=6).map(|k| format!("t_{k}")));
        header.extend(["residual".to_string(), "rank_gap".to_string()]);
        writeln!(out, "{}", header.join(","))?;
        for ((cfg, res), gap) in self.points.iter().zip(&self.residuals).zip(&self.rank_gaps) {
            let mut row: Vec<String> = cfg.theta.iter().map(|v| format!("{v:?}")).collect();
            row.extend(cfg.t().iter().map(|v| format!("{v:?}")));
            row.push(format!("{res:?}"));
            row.push(format!("{gap:?}"));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Distance between configurations with each angle difference wrapped.
pub fn wrapped_distance(a: &ConfigurationPoint, b: &ConfigurationPoint) -> f64 {
    (0..6).map(|k| wrap_angle(a.theta[k] - b.theta[k]).powi(2)).sum::<f64>().sqrt()
}

struct Corrected {
    x: Vector6<f64>,
    residual: f64,
}

/// Newton on `[residual(y); tau . (y - x) - h] = 0`, solved in the least
/// squares sense since the system is 7 x 6.
fn correct(closure: &Closure, x: &Vector6<f64>, tau: &Vector6<f64>, h: f64) -> Result<Corrected, String> {
    let mut y = x + tau * h;
    for _ in 0..NEWTON_ITERATIONS {
        let cfg = ConfigurationPoint::from_vector(&y);
        let r = closure.residual(&cfg);
        let arc = tau.dot(&(y - x)) - h;
        if r.amax() < CORRECTOR_RESIDUAL && arc.abs() < CORRECTOR_RESIDUAL * h.max(1.0) {
            break;
        }
        let j = closure.jacobian(&cfg);
        let mut a = SMatrix::<f64, 7, 6>::zeros();
        a.fixed_view_mut::<6, 6>(0, 0).copy_from(&j);
        a.fixed_view_mut::<1, 6>(6, 0).copy_from(&tau.transpose());
        let mut f = SVector::<f64, 7>::zeros();
        f.fixed_rows_mut::<6>(0).copy_from(&r);
        f[6] = arc;
        let delta = a.svd(true, true).solve(&(-f), 1e-14).map_err(|e| e.to_string())?;
        y += delta;
        if !y.iter().all(|v| v.is_finite()) {
            return Err("corrector diverged".into());
        }
        if delta.amax() < 1e-13 {
            break;
        }
    }
    let residual = closure.residual(&ConfigurationPoint::from_vector(&y)).amax();
    if residual < ACCEPT_RESIDUAL {
        Ok(Corrected { x: y, residual })
    } else {
        Err(format!("corrector stalled at residual {residual:e}"))
    }
}

pub fn trace(p: &LinkageParams<f64>, start: &ConfigurationPoint, steps: usize, step_size: f64) -> Result<ConfigCurve, MobilityError> {
    trace_with(p, start, &TraceOptions { steps, step_size, reverse: false })
}

pub fn trace_with(p: &LinkageParams<f64>, start: &ConfigurationPoint, opts: &TraceOptions) -> Result<ConfigCurve, MobilityError> {
    let closure = p.closure();
    let start = start.wrapped();
    let r0 = closure.residual(&start).amax();
    if !(r0 < START_RESIDUAL) {
        return Err(MobilityError::NotOnCurve(r0));
    }
    let j0 = closure.jacobian(&start);
    let gap0 = rank_gap(&singular_values(&j0));
    if !(gap0 > RANK_GAP) {
        return Err(MobilityError::Isolated(gap0));
    }
    // deterministic orientation: largest tangent component positive
    let mut tau = null_direction(&j0);
    if tau[tau.iamax()] < 0.0 {
        tau = -tau;
    }
    if opts.reverse {
        tau = -tau;
    }
    let tau_start = tau;

    let mut curve = ConfigCurve {
        points: vec![start],
        residuals: vec![r0],
        rank_gaps: vec![gap0],
        tangents: vec![std::array::from_fn(|k| tau[k])],
        closed: false,
        termination: Termination::StepLimit,
    };
    let mut x = start.as_vector();
    let mut h = opts.step_size;
    let mut arc = 0.0;
    while curve.points.len() < opts.steps {
        let mut halvings = 0;
        let (y, residual, j_new) = loop {
            let attempt = correct(&closure, &x, &tau, h).and_then(|c| {
                if (c.x - x).norm() > 2.0 * h {
                    return Err("corrector left the step bound".into());
                }
                Ok(c)
            });
            match attempt {
                Ok(c) => {
                    let j = closure.jacobian(&ConfigurationPoint::from_vector(&c.x));
                    let t_new = null_direction(&j);
                    if t_new.dot(&tau).abs() >= TANGENT_ALIGNMENT {
                        break (c.x, c.residual, j);
                    }
                    if halvings == MAX_HALVINGS {
                        curve.termination = Termination::CorrectorFailure {
                            after_points: curve.points.len(),
                            detail: "tangent turned sharply".into(),
                        };
                        return Ok(curve);
                    }
                }
                Err(detail) => {
                    if halvings == MAX_HALVINGS {
                        curve.termination = Termination::CorrectorFailure { after_points: curve.points.len(), detail };
                        return Ok(curve);
                    }
                }
            }
            halvings += 1;
            h /= 2.0;
        };
        let mut t_new = null_direction(&j_new);
        if t_new.dot(&tau) < 0.0 {
            t_new = -t_new;
        }
        arc += (y - x).norm();
        let cfg = ConfigurationPoint::from_vector(&y).wrapped();
        if arc > 4.0 * opts.step_size
            && wrapped_distance(&cfg, &start) < opts.step_size
            && t_new.dot(&tau_start) > TANGENT_ALIGNMENT
        {
            curve.closed = true;
            curve.termination = Termination::Closed;
            return Ok(curve);
        }
        curve.points.push(cfg);
        curve.residuals.push(residual);
        curve.rank_gaps.push(rank_gap(&singular_values(&j_new)));
        curve.tangents.push(std::array::from_fn(|k| t_new[k]));
        x = cfg.as_vector();
        tau = t_new;
        if halvings == 0 {
            h = (h * 1.5).min(opts.step_size);
        }
    }
    Ok(curve)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolynomialMaximum {
    pub polynomial: String,
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveReport {
    pub points: usize,
    pub max_residual: Option<f64>,
    /// Evaluated in the bounded angle chart, see [`TPoly::eval_angles`].
    pub polynomials: Vec<PolynomialMaximum>,
}

pub fn verify_curve(p: &LinkageParams<f64>, curve: &ConfigCurve, polys: &[TPoly]) -> CurveReport {
    if curve.is_empty() {
        return CurveReport { points: 0, max_residual: None, polynomials: Vec::new() };
    }
    let closure = p.closure();
    let max_residual = curve.points.iter().map(|c| closure.residual(c).amax()).fold(0.0, f64::max);
    let polynomials = polys
        .iter()
        .map(|poly| PolynomialMaximum {
            polynomial: poly.to_string(),
            max_abs: curve.points.iter().map(|c| poly.eval_angles(c).abs()).fold(0.0, f64::max),
        })
        .collect();
    CurveReport { points: curve.len(), max_residual: Some(max_residual), polynomials }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin_instance, Builtin};
    use crate::tpoly::bricard_curve;

    fn bricard() -> LinkageParams<f64> {
        builtin_instance(Builtin::BricardExample).to_field()
    }

    #[test]
    fn bricard_seed_and_rank() {
        let p = bricard();
        let cfg = find_seed(&p, 50, 1).expect("bricard moves");
        assert!(p.closure_residual(&cfg).amax() < SEED_RESIDUAL);
        let sv = rank_profile(&p, &cfg);
        assert!(sv[5] / sv[0] < 1e-10 && sv[4] / sv[0] > 1e-4, "{sv:?}");
        let random = ConfigurationPoint::new([0.1, 0.7, -1.3, 2.2, -0.4, 1.0]);
        let sv = rank_profile(&p, &random);
        assert!(sv[5] / sv[0] > 1e-4, "{sv:?}");
    }

    #[test]
    fn bricard_trace_closes() {
        let p = bricard();
        let cfg = find_seed(&p, 50, 1).unwrap();
        let curve = trace(&p, &cfg, DEFAULT_STEPS, DEFAULT_STEP).unwrap();
        assert!(curve.closed, "{:?} after {}", curve.termination, curve.len());
        assert!(curve.max_residual() < 1e-9);
        assert!(curve.min_rank_gap() > RANK_GAP);
        for w in curve.tangents.windows(2) {
            let dot: f64 = (0..6).map(|k| w[0][k] * w[1][k]).sum();
            assert!(dot > 0.0);
        }
        let report = verify_curve(&p, &curve, &bricard_curve());
        for m in &report.polynomials {
            assert!(m.max_abs < 1e-7, "{m:?}");
        }
    }

    #[test]
    fn trace_rejects_bad_starts() {
        let p = bricard();
        let off = ConfigurationPoint::new([0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        assert!(matches!(trace(&p, &off, 10, 0.05), Err(MobilityError::NotOnCurve(_))));
        let empty = ConfigCurve {
            points: vec![],
            residuals: vec![],
            rank_gaps: vec![],
            tangents: vec![],
            closed: false,
            termination: Termination::StepLimit,
        };
        assert_eq!(verify_curve(&p, &empty, &bricard_curve()).max_residual, None);
    }

    #[test]
    fn csv_layout() {
        let p = bricard();
        let cfg = find_seed(&p, 50, 1).unwrap();
        let curve = trace(&p, &cfg, 3, 0.05).unwrap();
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("theta_1,"));
        assert!(lines[0].ends_with("t_6,residual,rank_gap"));
        assert_eq!(lines[1].split(',').count(), 14);
        let zero = ConfigurationPoint::new([0.0; 6]);
        assert_eq!(format!("{:?}", zero.t()[0]), "inf");
    }
}
