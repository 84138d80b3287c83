//! Bond diagram hypotheses and the necessary conditions they induce.
//!
//! A near connection joins `J_i` and `J_{i+2}` and forces a Bennett
//! condition. A far connection joins `J_k` and `J_{k+3}`; one connection of
//! a sign forces the quad polynomials of the pair to share a root, two force
//! them to coincide.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linkage::LinkageParams;
use crate::quadpoly::{coefficient_distance, quad, quads_equal, relative_resultant, resultant_vanishes, QuadSign};
use crate::scalar::Scalar;

/// Number of raw hypotheses before the coverage filter: `2^6 * 3^3 * 3^3`.
pub const RAW_COUNT: usize = 46656;

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("hypothesis leaves joints {0:?} unconnected")]
    Uncovered(Vec<usize>),
    #[error("connection count {0} is outside 0..=2")]
    CountOutOfRange(u8),
    #[error("invalid hypothesis JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Assumed connections of a candidate bond diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondHypothesis {
    /// `near[i - 1]`: `J_i` and `J_{i+2}` are connected.
    pub near: [bool; 6],
    /// Connections of `J_k`, `J_{k+3}` with `t_k = t_{k+3} = i`.
    pub far_plus: [u8; 3],
    /// Connections of `J_k`, `J_{k+3}` with `t_k = -t_{k+3} = i`.
    pub far_minus: [u8; 3],
}

fn wrap(j: usize) -> usize {
    (j - 1) % 6 + 1
}

impl BondHypothesis {
    pub fn empty() -> Self {
        Self { near: [false; 6], far_plus: [0; 3], far_minus: [0; 3] }
    }

    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        let h: Self = serde_json::from_str(text)?;
        if let Some(&bad) = h.far_plus.iter().chain(&h.far_minus).find(|&&c| c > 2) {
            return Err(DiagramError::CountOutOfRange(bad));
        }
        Ok(h)
    }

    pub fn far(&self, sign: QuadSign) -> &[u8; 3] {
        match sign {
            QuadSign::Plus => &self.far_plus,
            QuadSign::Minus => &self.far_minus,
        }
    }

    /// Joints not touched by any assumed connection.
    pub fn uncovered(&self) -> Vec<usize> {
        let mut covered = [false; 6];
        for i in 1..=6 {
            if self.near[i - 1] {
                covered[i - 1] = true;
                covered[wrap(i + 2) - 1] = true;
            }
        }
        for k in 1..=3 {
            if self.far_plus[k - 1] + self.far_minus[k - 1] > 0 {
                covered[k - 1] = true;
                covered[k + 2] = true;
            }
        }
        (1..=6).filter(|j| !covered[j - 1]).collect()
    }

    /// Whether `other` assumes at least every connection `self` does.
    pub fn is_refined_by(&self, other: &Self) -> bool {
        (0..6).all(|i| !self.near[i] || other.near[i])
            && (0..3).all(|k| self.far_plus[k] <= other.far_plus[k] && self.far_minus[k] <= other.far_minus[k])
    }
}

impl fmt::Display for BondHypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let near: Vec<String> = (1..=6).filter(|i| self.near[i - 1]).map(|i| format!("{i}-{}", wrap(i + 2))).collect();
        write!(f, "near [{}] far+ {:?} far- {:?}", near.join(", "), self.far_plus, self.far_minus)
    }
}

/// Coverage rule: every joint is connected to at least one other joint.
pub fn validate(h: &BondHypothesis) -> bool {
    h.far_plus.iter().chain(&h.far_minus).all(|&c| c <= 2) && h.uncovered().is_empty()
}

fn decode(mut index: usize) -> BondHypothesis {
    let mut h = BondHypothesis::empty();
    for k in (0..3).rev() {
        h.far_minus[k] = (index % 3) as u8;
        index /= 3;
    }
    for k in (0..3).rev() {
        h.far_plus[k] = (index % 3) as u8;
        index /= 3;
    }
    for i in (0..6).rev() {
        h.near[i] = index % 2 == 1;
        index /= 2;
    }
    h
}

/// Every raw hypothesis, valid or not, in a fixed order.
pub fn raw_hypotheses() -> impl Iterator<Item = BondHypothesis> {
    (0..RAW_COUNT).map(decode)
}

/// All valid hypotheses in a deterministic order.
pub fn enumerate() -> impl Iterator<Item = BondHypothesis> {
    raw_hypotheses().filter(validate)
}

pub fn enumerate_filtered<F: Fn(&BondHypothesis) -> bool>(filter: F) -> impl Iterator<Item = BondHypothesis> {
    enumerate().filter(move |h| filter(h))
}

/// Hypothesis forms of the known diagrams, labelled by linkage name.
pub fn known_diagrams() -> [(&'static str, BondHypothesis); 8] {
    let near_at = |idx: &[usize]| {
        let mut near = [false; 6];
        for &i in idx {
            near[i - 1] = true;
        }
        near
    };
    let h = |near: [bool; 6], far_plus: [u8; 3], far_minus: [u8; 3]| BondHypothesis { near, far_plus, far_minus };
    [
        ("cube", h([false; 6], [2, 2, 2], [2, 2, 2])),
        ("line_symmetric", h([false; 6], [2, 2, 2], [0, 0, 0])),
        ("new_family", h([false; 6], [2, 2, 2], [0, 2, 2])),
        ("waldron", h(near_at(&[1, 3, 5]), [2, 2, 2], [0, 0, 0])),
        ("plane_symmetric", h(near_at(&[3, 6]), [2, 0, 0], [2, 0, 0])),
        ("hooke", h(near_at(&[3, 6]), [2, 0, 0], [2, 0, 0])),
        ("dietmaier", h(near_at(&[3, 6]), [2, 0, 0], [2, 0, 0])),
        ("orthogonal", h([false; 6], [2, 2, 2], [2, 2, 2])),
    ]
}

pub fn known_diagram(name: &str) -> Option<BondHypothesis> {
    known_diagrams().into_iter().find(|(n, _)| *n == name).map(|(_, h)| h)
}

/// Bennett condition of the near pair `J_index`, `J_{index+2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BennettCondition {
    pub index: usize,
    pub joints: [usize; 2],
    pub equations: Vec<String>,
}

impl BennettCondition {
    pub fn new(index: usize) -> Self {
        let n = wrap(index + 1);
        Self {
            index,
            joints: [index, wrap(index + 2)],
            equations: vec![format!("s_{n} = 0"), format!("b_{index}^2 = b_{n}^2")],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FarKind {
    Equality,
    ResultantZero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FarCondition {
    pub pair: usize,
    pub sign: QuadSign,
    pub kind: FarKind,
    pub equations: Vec<String>,
}

impl FarCondition {
    pub fn new(pair: usize, sign: QuadSign, kind: FarKind) -> Self {
        let (p, q) = (format!("Q_{pair}^{}", sign.symbol()), format!("Q_{}^{}", pair + 3, sign.symbol()));
        let equations = match kind {
            FarKind::Equality => ["Re a1", "Im a1", "Re a0", "Im a0"]
                .iter()
                .map(|c| format!("{c}({p}) = {c}({q})"))
                .collect(),
            FarKind::ResultantZero => vec![format!("Re Res({p}, {q}) = 0"), format!("Im Res({p}, {q}) = 0")],
        };
        Self { pair, sign, kind, equations }
    }

    /// Whether this condition implies `other`. Equal quadratics share roots.
    pub fn implies(&self, other: &FarCondition) -> bool {
        self.pair == other.pair
            && self.sign == other.sign
            && (self.kind == other.kind || self.kind == FarKind::Equality)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConditionSystem {
    pub bennett_conditions: Vec<BennettCondition>,
    pub far_conditions: Vec<FarCondition>,
}

impl ConditionSystem {
    pub fn equation_count(&self) -> usize {
        self.bennett_conditions.iter().map(|b| b.equations.len()).sum::<usize>()
            + self.far_conditions.iter().map(|f| f.equations.len()).sum::<usize>()
    }

    /// Whether every condition of `other` follows from one of `self`.
    pub fn implies(&self, other: &ConditionSystem) -> bool {
        other.bennett_conditions.iter().all(|b| self.bennett_conditions.contains(b))
            && other.far_conditions.iter().all(|f| self.far_conditions.iter().any(|g| g.implies(f)))
    }
}

pub fn conditions_for(h: &BondHypothesis) -> Result<ConditionSystem, DiagramError> {
    if let Some(&bad) = h.far_plus.iter().chain(&h.far_minus).find(|&&c| c > 2) {
        return Err(DiagramError::CountOutOfRange(bad));
    }
    let uncovered = h.uncovered();
    if !uncovered.is_empty() {
        return Err(DiagramError::Uncovered(uncovered));
    }
    let bennett_conditions = (1..=6).filter(|i| h.near[i - 1]).map(BennettCondition::new).collect();
    let mut far_conditions = Vec::new();
    for sign in QuadSign::BOTH {
        for pair in 1..=3 {
            let kind = match h.far(sign)[pair - 1] {
                0 => continue,
                1 => FarKind::ResultantZero,
                _ => FarKind::Equality,
            };
            far_conditions.push(FarCondition::new(pair, sign, kind));
        }
    }
    Ok(ConditionSystem { bennett_conditions, far_conditions })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    Bennett,
    Equality,
    ResultantZero,
}

impl From<FarKind> for ConditionKind {
    fn from(k: FarKind) -> Self {
        match k {
            FarKind::Equality => ConditionKind::Equality,
            FarKind::ResultantZero => ConditionKind::ResultantZero,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionResult {
    pub kind: ConditionKind,
    pub indices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<QuadSign>,
    /// Scale-free residual; see [`bennett_residuals`] and
    /// [`crate::quadpoly::coefficient_distance`].
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "necessary conditions hold")]
    NecessaryConditionsHold,
    #[serde(rename = "hypothesis excluded")]
    HypothesisExcluded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NecessaryConditionsHold => "necessary conditions hold",
            Verdict::HypothesisExcluded => "hypothesis excluded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub hypothesis: BondHypothesis,
    pub conditions: Vec<ConditionResult>,
    pub verdict: Verdict,
}

/// Bennett residuals of near pair `index`: `(|s_{i+1}| / L, |b_i^2 - b_{i+1}^2| / L^2)`
/// and whether each vanishes at `tol`.
pub fn bennett_residuals<S: Scalar>(p: &LinkageParams<S>, index: usize, tol: f64) -> ([f64; 2], [bool; 2]) {
    let scale = p.length_scale();
    let s = p.s(index + 1).clone();
    let db = p.b(index).square() - p.b(index + 1).square();
    (
        [s.magnitude() / scale, db.magnitude() / (scale * scale)],
        [s.is_negligible(tol, scale), db.is_negligible(tol, scale * scale)],
    )
}

fn far_result<S: Scalar>(p: &LinkageParams<S>, pair: usize, sign: QuadSign, kind: FarKind, tol: f64) -> ConditionResult {
    let a = quad(p, pair, sign);
    let b = quad(p, pair + 3, sign);
    let (residual, pass) = match kind {
        FarKind::Equality => (coefficient_distance(&a, &b), quads_equal(&a, &b, tol)),
        FarKind::ResultantZero => (relative_resultant(&a, &b), resultant_vanishes(&a, &b, tol)),
    };
    ConditionResult { kind: kind.into(), indices: vec![pair, pair + 3], sign: Some(sign), residual, pass }
}

/// Checks the conditions induced by `h` on concrete parameters. Passing
/// means only that the necessary conditions hold.
pub fn evaluate<S: Scalar>(h: &BondHypothesis, p: &LinkageParams<S>, tol: f64) -> Result<EvaluationReport, DiagramError> {
    let system = conditions_for(h)?;
    let mut conditions = Vec::new();
    for b in &system.bennett_conditions {
        let (res, ok) = bennett_residuals(p, b.index, tol);
        conditions.push(ConditionResult {
            kind: ConditionKind::Bennett,
            indices: b.joints.to_vec(),
            sign: None,
            residual: res[0].max(res[1]),
            pass: ok[0] && ok[1],
        });
    }
    for f in &system.far_conditions {
        conditions.push(far_result(p, f.pair, f.sign, f.kind, tol));
    }
    let verdict = if conditions.iter().all(|c| c.pass) {
        Verdict::NecessaryConditionsHold
    } else {
        Verdict::HypothesisExcluded
    };
    Ok(EvaluationReport { hypothesis: *h, conditions, verdict })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BennettViolation {
    pub index: usize,
    pub joints: [usize; 2],
    pub s_residual: f64,
    pub b_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultantWitness {
    pub pair: usize,
    pub sign: QuadSign,
    /// `|Res|` divided by the fourth power of the pair's root scale.
    pub relative: f64,
    pub absolute: f64,
}

/// Proof that no bond exists: every near pair violates its Bennett
/// condition and every far pair has nonzero resultants of both signs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidityCertificate {
    pub bennett_violations: Vec<BennettViolation>,
    pub resultants: Vec<ResultantWitness>,
}

pub fn rigidity_certificate<S: Scalar>(p: &LinkageParams<S>, tol: f64) -> Option<RigidityCertificate> {
    let mut bennett_violations = Vec::with_capacity(6);
    for index in 1..=6 {
        let (res, ok) = bennett_residuals(p, index, tol);
        if ok[0] && ok[1] {
            return None;
        }
        bennett_violations.push(BennettViolation {
            index,
            joints: [index, wrap(index + 2)],
            s_residual: res[0],
            b_residual: res[1],
        });
    }
    let mut resultants = Vec::with_capacity(6);
    for sign in QuadSign::BOTH {
        for pair in 1..=3 {
            let a = quad(p, pair, sign);
            let b = quad(p, pair + 3, sign);
            if resultant_vanishes(&a, &b, tol) {
                return None;
            }
            resultants.push(ResultantWitness {
                pair,
                sign,
                relative: relative_resultant(&a, &b),
                absolute: crate::quadpoly::resultant(&a, &b).magnitude(),
            });
        }
    }
    Some(RigidityCertificate { bennett_violations, resultants })
}
