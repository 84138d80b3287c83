//! Denavit-Hartenberg model of a closed 6R loop.
//!
//! Joints are numbered `1..=6` in the public API and indices wrap cyclically,
//! so `b(7) == b(1)`. Each joint carries a normal distance `d`, an offset `s`
//! and the cotangent `w = cot(phi/2)` of its twist angle; the cosine `c`, the
//! sine, the Bennett ratio `b = d / sin(phi)` and `f = c * b` are derived.
//!
//! Closure is evaluated in the angle chart: joint `k` contributes the factor
//! `cos(theta_k/2) - sin(theta_k/2) i`, which is projectively the same as
//! `t_k - i` with `t_k = cot(theta_k/2)` but has no pole at `theta_k = 0`.

use std::f64::consts::PI;

use nalgebra::{Matrix6, Vector6};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::dualquat::DualQuaternion;
use crate::scalar::Scalar;
use crate::surd::{Surd, SurdError};

pub const JOINTS: usize = 6;

/// Step of the central finite-difference Jacobian.
pub const FD_STEP: f64 = 1e-7;

/// Closure-product coordinates that form the residual: `i, j, k, ei, ej, ek`.
/// The `e` coordinate is omitted because it vanishes whenever the others do.
pub const RESIDUAL_COORDS: [usize; 6] = [1, 2, 3, 5, 6, 7];

#[derive(Debug, Error)]
pub enum LinkageError {
    #[error("joint {joint}: parallel adjacent axes unsupported (twist angle is 0 or pi)")]
    ParallelAxes { joint: usize },
    #[error("field {field:?} must hold 6 values, found {found}")]
    WrongLength { field: &'static str, found: usize },
    #[error("exactly one of \"w\" and \"phi_degrees\" must be present")]
    TwistSpec,
    #[error("field {field:?}, joint {joint}: {source}")]
    Value { field: &'static str, joint: usize, source: SurdError },
    #[error("field {field:?}, joint {joint}: expected a number or a string token")]
    ValueType { field: &'static str, joint: usize },
    #[error("field \"phi_degrees\", joint {joint}: twist angles must be rational numbers of degrees")]
    IrrationalDegrees { joint: usize },
    #[error("twist angles in degrees cannot be represented exactly; use a float scalar field")]
    NeedsFloat,
    #[error("parameters use more than one square-root radicand")]
    MixedRadicands,
    #[error("malformed parameter file: {0}")]
    Json(#[from] serde_json::Error),
}

/// On-disk parameter file. Values are JSON numbers or string tokens in the
/// value grammar understood by [`Surd`]'s `FromStr`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamDocument {
    pub d: Vec<Value>,
    pub s: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_degrees: Option<Vec<Value>>,
}

/// How the twist angles were given.
#[derive(Clone, Debug, PartialEq)]
pub enum Twist {
    Cot([Surd; 6]),
    Degrees([BigRational; 6]),
}

/// A parsed parameter file whose values are still exact.
#[derive(Clone, Debug, PartialEq)]
pub struct RawParams {
    pub d: [Surd; 6],
    pub s: [Surd; 6],
    pub twist: Twist,
}

fn parse_token(field: &'static str, joint: usize, v: &Value) -> Result<Surd, LinkageError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(LinkageError::ValueType { field, joint }),
    };
    text.parse().map_err(|source| LinkageError::Value { field, joint, source })
}

fn parse_six(field: &'static str, values: &[Value]) -> Result<[Surd; 6], LinkageError> {
    if values.len() != JOINTS {
        return Err(LinkageError::WrongLength { field, found: values.len() });
    }
    let parsed = values
        .iter()
        .enumerate()
        .map(|(k, v)| parse_token(field, k + 1, v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(parsed.try_into().expect("length checked"))
}

impl RawParams {
    pub fn from_json(text: &str) -> Result<Self, LinkageError> {
        let doc: ParamDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &ParamDocument) -> Result<Self, LinkageError> {
        let d = parse_six("d", &doc.d)?;
        let s = parse_six("s", &doc.s)?;
        let twist = match (&doc.w, &doc.phi_degrees) {
            (Some(w), None) => Twist::Cot(parse_six("w", w)?),
            (None, Some(phi)) => {
                let phi = parse_six("phi_degrees", phi)?;
                let mut degrees = Vec::with_capacity(JOINTS);
                for (k, v) in phi.iter().enumerate() {
                    let r = v.as_rational().ok_or(LinkageError::IrrationalDegrees { joint: k + 1 })?;
                    degrees.push(r.clone());
                }
                Twist::Degrees(degrees.try_into().expect("six values"))
            }
            _ => return Err(LinkageError::TwistSpec),
        };
        Ok(Self { d, s, twist })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.twist, Twist::Cot(_))
    }

    pub fn to_params<S: Scalar>(&self) -> Result<LinkageParams<S>, LinkageError> {
        let mut all: Vec<&Surd> = self.d.iter().chain(self.s.iter()).collect();
        if let Twist::Cot(w) = &self.twist {
            all.extend(w.iter());
        }
        if all.iter().any(|a| all.iter().any(|b| !a.compatible(b))) {
            return Err(LinkageError::MixedRadicands);
        }
        let d = self.d.clone().map(|v| S::from_surd(&v));
        let s = self.s.clone().map(|v| S::from_surd(&v));
        let w = match &self.twist {
            Twist::Cot(w) => w.clone().map(|v| S::from_surd(&v)),
            Twist::Degrees(deg) => {
                let mut w = Vec::with_capacity(JOINTS);
                for (k, phi) in deg.iter().enumerate() {
                    if is_straight_angle(phi) {
                        return Err(LinkageError::ParallelAxes { joint: k + 1 });
                    }
                    w.push(S::cot_half_degrees(phi).ok_or(LinkageError::NeedsFloat)?);
                }
                w.try_into().expect("six values")
            }
        };
        LinkageParams::from_dsw(d, s, w)
    }
}

/// Parses a parameter file straight into the requested scalar field.
pub fn parse_params<S: Scalar>(json: &str) -> Result<LinkageParams<S>, LinkageError> {
    RawParams::from_json(json)?.to_params()
}

/// The 18 invariant parameters of a closed 6R loop plus derived quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkageParams<S> {
    d: [S; 6],
    s: [S; 6],
    w: [S; 6],
    c: [S; 6],
    sin: [S; 6],
    b: [S; 6],
    f: [S; 6],
}

fn at<S>(arr: &[S; 6], joint: usize) -> &S {
    assert!(joint >= 1, "joints are numbered from 1");
    &arr[(joint - 1) % JOINTS]
}

impl<S: Scalar> LinkageParams<S> {
    /// Builds parameters from normal distances, offsets and twist cotangents.
    pub fn from_dsw(d: [S; 6], s: [S; 6], w: [S; 6]) -> Result<Self, LinkageError> {
        if let Some(k) = w.iter().position(|v| v.is_zero()) {
            return Err(LinkageError::ParallelAxes { joint: k + 1 });
        }
        let one = S::one();
        let c: [S; 6] = std::array::from_fn(|k| {
            let w2 = w[k].square();
            (w2.clone() - one.clone()) / (w2 + one.clone())
        });
        let sin: [S; 6] = std::array::from_fn(|k| {
            S::from_i64(2) * w[k].clone() / (w[k].square() + one.clone())
        });
        let b: [S; 6] = std::array::from_fn(|k| d[k].clone() / sin[k].clone());
        let f: [S; 6] = std::array::from_fn(|k| c[k].clone() * b[k].clone());
        Ok(Self { d, s, w, c, sin, b, f })
    }

    /// Builds parameters from Bennett ratios instead of normal distances.
    pub fn from_bsw(b: [S; 6], s: [S; 6], w: [S; 6]) -> Result<Self, LinkageError> {
        let d = std::array::from_fn(|k| {
            let w2 = w[k].square();
            b[k].clone() * S::from_i64(2) * w[k].clone() / (w2 + S::one())
        });
        Self::from_dsw(d, s, w)
    }

    pub fn d_all(&self) -> &[S; 6] {
        &self.d
    }
    pub fn s_all(&self) -> &[S; 6] {
        &self.s
    }
    pub fn w_all(&self) -> &[S; 6] {
        &self.w
    }
    pub fn c_all(&self) -> &[S; 6] {
        &self.c
    }
    pub fn b_all(&self) -> &[S; 6] {
        &self.b
    }
    pub fn f_all(&self) -> &[S; 6] {
        &self.f
    }

    pub fn d(&self, joint: usize) -> &S {
        at(&self.d, joint)
    }
    pub fn s(&self, joint: usize) -> &S {
        at(&self.s, joint)
    }
    pub fn w(&self, joint: usize) -> &S {
        at(&self.w, joint)
    }
    pub fn c(&self, joint: usize) -> &S {
        at(&self.c, joint)
    }
    pub fn sin(&self, joint: usize) -> &S {
        at(&self.sin, joint)
    }
    pub fn b(&self, joint: usize) -> &S {
        at(&self.b, joint)
    }
    pub fn f(&self, joint: usize) -> &S {
        at(&self.f, joint)
    }

    /// Renumbers joints so that joint `1 + k` becomes joint `1`.
    pub fn shifted(&self, k: usize) -> Self {
        let rot = |arr: &[S; 6]| -> [S; 6] { std::array::from_fn(|j| arr[(j + k) % JOINTS].clone()) };
        Self {
            d: rot(&self.d),
            s: rot(&self.s),
            w: rot(&self.w),
            c: rot(&self.c),
            sin: rot(&self.sin),
            b: rot(&self.b),
            f: rot(&self.f),
        }
    }

    /// Largest magnitude among the lengths `b` and `s`, at least one.
    pub fn length_scale(&self) -> f64 {
        self.b.iter().chain(self.s.iter()).map(Scalar::magnitude).fold(1.0, f64::max)
    }

    /// The transfer element `g_i = (1 - s_i/2 ei)(w_i - k)(1 - d_i/2 ek)`.
    pub fn build_g(&self, joint: usize) -> JointTransfer<S> {
        let mut offset = DualQuaternion::one();
        offset = offset - DualQuaternion::unit(5).scale(&self.s(joint).half());
        let twist = DualQuaternion::scalar(self.w(joint).clone()) - DualQuaternion::unit(3);
        let mut normal = DualQuaternion::one();
        normal = normal - DualQuaternion::unit(7).scale(&self.d(joint).half());
        let g = &(&offset * &twist) * &normal;
        JointTransfer { g, index: (joint - 1) % JOINTS + 1, normalized: false }
    }

    /// [`build_g`](Self::build_g) divided by `sqrt(w_i^2 + 1)`, giving a unit
    /// primal part. `None` when the square root is not in the field.
    pub fn build_g_normalized(&self, joint: usize) -> Option<JointTransfer<S>> {
        let norm = (self.w(joint).square() + S::one()).sqrt()?;
        let raw = self.build_g(joint);
        Some(JointTransfer { g: raw.g.scale(&(S::one() / norm)), index: raw.index, normalized: true })
    }

    /// `(t_1 - i) g_1 (t_2 - i) g_2 ... (t_6 - i) g_6` with unnormalized
    /// factors; usable in exact fields.
    pub fn closure_product_t(&self, t: &[S; 6]) -> DualQuaternion<S> {
        let mut acc = DualQuaternion::one();
        for (k, tk) in t.iter().enumerate() {
            let rot = DualQuaternion::scalar_plus_i(tk.clone(), -S::one());
            acc = &(&acc * &rot) * &self.build_g(k + 1).g;
        }
        acc
    }
}

impl LinkageParams<Surd> {
    pub fn to_field<T: Scalar>(&self) -> LinkageParams<T> {
        let conv = |arr: &[Surd; 6]| -> [T; 6] { std::array::from_fn(|k| T::from_surd(&arr[k])) };
        LinkageParams::from_dsw(conv(&self.d), conv(&self.s), conv(&self.w))
            .expect("nonzero twist cotangents stay nonzero")
    }

    pub fn to_document(&self) -> ParamDocument {
        let tokens = |arr: &[Surd; 6]| arr.iter().map(|v| Value::String(v.to_string())).collect();
        ParamDocument { d: tokens(&self.d), s: tokens(&self.s), w: Some(tokens(&self.w)), phi_degrees: None }
    }

    pub fn to_raw(&self) -> RawParams {
        RawParams { d: self.d.clone(), s: self.s.clone(), twist: Twist::Cot(self.w.clone()) }
    }
}

/// A transfer element together with its joint index.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTransfer<S> {
    pub g: DualQuaternion<S>,
    pub index: usize,
    pub normalized: bool,
}

/// Twist angle in `(0, 2 pi)` from its half-angle cotangent.
pub fn twist_from_cot(w: f64) -> f64 {
    2.0 * 1f64.atan2(w)
}

pub fn cot_from_twist(phi: f64) -> f64 {
    let half = phi / 2.0;
    half.cos() / half.sin()
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Joint angles of one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationPoint {
    pub theta: [f64; 6],
}

impl ConfigurationPoint {
    pub fn new(theta: [f64; 6]) -> Self {
        Self { theta }
    }

    /// From half-angle cotangents; `t = +-inf` maps to `theta = 0`.
    pub fn from_t(t: [f64; 6]) -> Self {
        Self { theta: t.map(|tk| wrap_angle(2.0 * 1f64.atan2(tk))) }
    }

    /// `t_k = cot(theta_k / 2)`; infinite at `theta_k = 0`.
    pub fn t(&self) -> [f64; 6] {
        self.theta.map(|th| {
            let half = th / 2.0;
            if half.sin() == 0.0 {
                f64::INFINITY
            } else {
                half.cos() / half.sin()
            }
        })
    }

    pub fn wrapped(&self) -> Self {
        Self { theta: self.theta.map(wrap_angle) }
    }

    pub fn as_vector(&self) -> Vector6<f64> {
        Vector6::from_column_slice(&self.theta)
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self { theta: std::array::from_fn(|k| v[k]) }
    }
}

fn rotation_factor(theta: f64) -> DualQuaternion<f64> {
    let half = theta / 2.0;
    DualQuaternion::scalar_plus_i(half.cos(), -half.sin())
}

fn rotation_factor_derivative(theta: f64) -> DualQuaternion<f64> {
    let half = theta / 2.0;
    DualQuaternion::scalar_plus_i(-half.sin() / 2.0, -half.cos() / 2.0)
}

/// Closure evaluation for float parameters with the normalized transfer
/// elements cached.
#[derive(Clone, Debug)]
pub struct Closure {
    g: [DualQuaternion<f64>; 6],
}

impl Closure {
    pub fn new(params: &LinkageParams<f64>) -> Self {
        Self {
            g: std::array::from_fn(|k| {
                params.build_g_normalized(k + 1).expect("w^2 + 1 > 0 has a real square root").g
            }),
        }
    }

    pub fn product(&self, cfg: &ConfigurationPoint) -> DualQuaternion<f64> {
        let mut acc = DualQuaternion::one();
        for (k, g) in self.g.iter().enumerate() {
            acc = &(&acc * &rotation_factor(cfg.theta[k])) * g;
        }
        acc
    }

    /// Sign that fixes the projective representative: the scalar coordinate
    /// is made non-negative, so the residual is 2 pi periodic in each angle.
    fn orientation(product: &DualQuaternion<f64>) -> f64 {
        if product[0] < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn residual(&self, cfg: &ConfigurationPoint) -> Vector6<f64> {
        let p = self.product(cfg);
        let sign = Self::orientation(&p);
        Vector6::from_fn(|r, _| sign * p[RESIDUAL_COORDS[r]])
    }

    /// Analytic Jacobian of [`residual`](Self::residual) by the product rule.
    pub fn jacobian(&self, cfg: &ConfigurationPoint) -> Matrix6<f64> {
        let factors: Vec<_> = cfg.theta.iter().map(|&th| rotation_factor(th)).collect();
        // prefix[k] = F_1 G_1 ... F_{k} G_{k} (k factors pairs)
        let mut prefix = Vec::with_capacity(JOINTS + 1);
        prefix.push(DualQuaternion::one());
        for k in 0..JOINTS {
            let next = &(&prefix[k] * &factors[k]) * &self.g[k];
            prefix.push(next);
        }
        // suffix[k] = G_k F_{k+1} G_{k+1} ... G_6
        let mut suffix = vec![DualQuaternion::zero(); JOINTS];
        suffix[JOINTS - 1] = self.g[JOINTS - 1].clone();
        for k in (0..JOINTS - 1).rev() {
            suffix[k] = &(&self.g[k] * &factors[k + 1]) * &suffix[k + 1];
        }
        let sign = Self::orientation(&prefix[JOINTS]);
        let mut jac = Matrix6::zeros();
        for k in 0..JOINTS {
            let column = &(&prefix[k] * &rotation_factor_derivative(cfg.theta[k])) * &suffix[k];
            for (r, &coord) in RESIDUAL_COORDS.iter().enumerate() {
                jac[(r, k)] = sign * column[coord];
            }
        }
        jac
    }

    /// Central finite-difference Jacobian with step [`FD_STEP`].
    pub fn jacobian_fd(&self, cfg: &ConfigurationPoint) -> Matrix6<f64> {
        let mut jac = Matrix6::zeros();
        for k in 0..JOINTS {
            let mut plus = *cfg;
            let mut minus = *cfg;
            plus.theta[k] += FD_STEP;
            minus.theta[k] -= FD_STEP;
            let col = (self.residual(&plus) - self.residual(&minus)) / (2.0 * FD_STEP);
            jac.set_column(k, &col);
        }
        jac
    }
}

impl LinkageParams<f64> {
    pub fn closure(&self) -> Closure {
        Closure::new(self)
    }

    /// `r_1 g_1 r_2 g_2 ... r_6 g_6` with normalized `g_i`.
    pub fn closure_product(&self, cfg: &ConfigurationPoint) -> DualQuaternion<f64> {
        self.closure().product(cfg)
    }

    pub fn closure_residual(&self, cfg: &ConfigurationPoint) -> Vector6<f64> {
        self.closure().residual(cfg)
    }

    pub fn closure_jacobian(&self, cfg: &ConfigurationPoint) -> Matrix6<f64> {
        self.closure().jacobian(cfg)
    }

    pub fn closure_jacobian_fd(&self, cfg: &ConfigurationPoint) -> Matrix6<f64> {
        self.closure().jacobian_fd(cfg)
    }
}

/// Whether a rational number is an integer multiple of 180.
pub fn is_straight_angle(deg: &BigRational) -> bool {
    (deg / BigRational::from_integer(180.into())).is_integer()
}
