//! Probability measures and charges on finite algebras.
//!
//! A [`Measure`] is a weight vector indexed by the atoms of its algebra. The
//! value on a member is the sum of the weights of the atoms inside it. On a
//! finite algebra a finitely additive probability and a σ-additive one are the
//! same object; [`Mode`] records which one a value is meant as.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::FormatError;
use crate::rational::{format_rational, parse_rational, sum, Rational};
use crate::setalg::{premeasurability_witness, Algebra, PointMap, SetError, SetInstance, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub enum Mode {
    /// σ-additive probability measure.
    #[default]
    #[serde(rename = "sigma")]
    Sigma,
    /// Finitely additive probability (a charge).
    #[serde(rename = "finitely_additive")]
    FinitelyAdditive,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sigma => "sigma",
            Mode::FinitelyAdditive => "finitely_additive",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sigma" => Ok(Mode::Sigma),
            "finitely_additive" | "charge" => Ok(Mode::FinitelyAdditive),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// One problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    WeightCount { expected: usize, found: usize },
    OutOfRange {
        atom: usize,
        #[serde(with = "crate::rational::serde_rational")]
        weight: Rational,
    },
    Normalization {
        #[serde(with = "crate::rational::serde_rational")]
        total: Rational,
    },
    Additivity {
        a: Subset,
        b: Subset,
        #[serde(with = "crate::rational::serde_rational")]
        union_value: Rational,
        #[serde(with = "crate::rational::serde_rational")]
        sum_value: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("set {0} is not a member of the algebra")]
    NotMember(Subset),
    #[error("point {0} is not in the ground set")]
    NoSuchPoint(usize),
    #[error("measures live on different algebras")]
    AlgebraMismatch,
    #[error("invalid measure: {0:?}")]
    Invalid(Vec<Diagnostic>),
    #[error("map is not premeasurable: preimage of {witness} is not measurable")]
    NotPremeasurable { witness: Subset },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl MeasureError {
    pub fn is_input_error(&self) -> bool {
        !matches!(self, MeasureError::NotPremeasurable { .. } | MeasureError::Invalid(_))
    }
}

/// A probability measure (or charge) on a finite algebra, stored on atoms.
#[derive(Clone)]
pub struct Measure {
    algebra: Arc<Algebra>,
    weights: Vec<Rational>,
    mode: Mode,
}

impl Measure {
    /// Validated constructor: one weight per atom, weights in `[0,1]`
    /// summing to exactly one.
    pub fn new(algebra: Arc<Algebra>, weights: Vec<Rational>, mode: Mode) -> Result<Self, MeasureError> {
        let m = Measure { algebra, weights, mode };
        let diagnostics = m.basic_diagnostics();
        if diagnostics.is_empty() {
            Ok(m)
        } else {
            Err(MeasureError::Invalid(diagnostics))
        }
    }

    /// Unvalidated constructor, for diagnostics and deserialisation. Run
    /// [`validate`] before trusting the result.
    pub fn unchecked(algebra: Arc<Algebra>, weights: Vec<Rational>, mode: Mode) -> Self {
        Measure { algebra, weights, mode }
    }

    pub fn uniform(algebra: Arc<Algebra>, mode: Mode) -> Self {
        let k = algebra.num_atoms();
        let w = Rational::new(1.into(), (k as i64).into());
        Measure { weights: vec![w; k], algebra, mode }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> &Rational {
        &self.weights[atom]
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// `P(A)`; fails if `A` is not a member.
    pub fn evaluate(&self, set: &Subset) -> Result<Rational, MeasureError> {
        let atoms = self
            .algebra
            .atoms_in(set)
            .ok_or_else(|| MeasureError::NotMember(set.clone()))?;
        Ok(sum(atoms.iter().map(|i| &self.weights[*i])))
    }

    /// Value on the member given by an atom mask.
    pub fn evaluate_mask(&self, mask: u64) -> Rational {
        sum((0..self.weights.len()).filter(|i| mask >> i & 1 == 1).map(|i| &self.weights[i]))
    }

    /// Weight of the atom containing each point, as a per-point vector.
    pub fn point_masses(&self) -> Vec<Rational> {
        let alg = &self.algebra;
        (0..alg.ground().len()).map(|x| self.weights[alg.atom_of(x)].clone()).collect()
    }

    fn basic_diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let k = self.algebra.num_atoms();
        if self.weights.len() != k {
            out.push(Diagnostic::WeightCount { expected: k, found: self.weights.len() });
            return out;
        }
        for (atom, w) in self.weights.iter().enumerate() {
            if w.is_negative() || w > &Rational::one() {
                out.push(Diagnostic::OutOfRange { atom, weight: w.clone() });
            }
        }
        let total = sum(&self.weights);
        if !total.is_one() {
            out.push(Diagnostic::Normalization { total });
        }
        out
    }

    pub fn to_json(&self) -> Result<MeasureJson, SetError> {
        Ok(MeasureJson {
            algebra: self.algebra.to_instance()?,
            weights: self
                .weights
                .iter()
                .enumerate()
                .map(|(i, w)| (i.to_string(), format_rational(w)))
                .collect(),
            mode: self.mode,
        })
    }
}

impl PartialEq for Measure {
    /// Equal atom weight vectors over the same algebra; the mode flag is not
    /// part of the comparison.
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra)
            && self.weights == other.weights
    }
}

impl Eq for Measure {}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Measure[{}](", self.mode)?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", self.algebra.atoms()[i], w)?;
        }
        write!(f, ")")
    }
}

pub fn evaluate(p: &Measure, set: &Subset) -> Result<Rational, MeasureError> {
    p.evaluate(set)
}

/// The Dirac measure at point `x`.
pub fn dirac(x: usize, algebra: &Arc<Algebra>, mode: Mode) -> Result<Measure, MeasureError> {
    if x >= algebra.ground().len() {
        return Err(MeasureError::NoSuchPoint(x));
    }
    let mut weights = vec![Rational::zero(); algebra.num_atoms()];
    weights[algebra.atom_of(x)] = Rational::one();
    Ok(Measure { algebra: algebra.clone(), weights, mode })
}

/// Image measure `P ∘ f⁻¹` on `cod`. The mode of `P` is preserved.
pub fn pushforward(p: &Measure, f: &PointMap, cod: &Arc<Algebra>) -> Result<Measure, MeasureError> {
    if f.dom() != p.algebra.ground() || f.cod() != cod.ground() {
        return Err(MeasureError::AlgebraMismatch);
    }
    if let Some(witness) = premeasurability_witness(f, &p.algebra, cod) {
        return Err(MeasureError::NotPremeasurable { witness });
    }
    let weights = cod
        .atoms()
        .iter()
        .map(|b| p.evaluate(&f.preimage(b)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Measure { algebra: cod.clone(), weights, mode: p.mode })
}

/// Result of [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub valid: bool,
    pub diagnostics: Vec<Diagnostic>,
}

/// Largest atom count for which every disjoint member pair (`3^k` of them) is
/// checked for additivity.
const MAX_ADDITIVITY_ATOMS: usize = 10;

/// Checks normalisation, range, and additivity `P(A ∪ B) = P(A) + P(B)` over
/// every pair of disjoint members.
pub fn validate(p: &Measure) -> Validation {
    let mut diagnostics = p.basic_diagnostics();
    let k = p.algebra.num_atoms();
    if p.weights.len() == k && k <= MAX_ADDITIVITY_ATOMS {
        let full = (1u64 << k) - 1;
        for a in 0..=full {
            // enumerate submasks b of the complement of a
            let rest = full & !a;
            let mut b = rest;
            loop {
                if a <= b {
                    let lhs = p.evaluate_mask(a | b);
                    let rhs = p.evaluate_mask(a) + p.evaluate_mask(b);
                    if lhs != rhs {
                        diagnostics.push(Diagnostic::Additivity {
                            a: p.algebra.member_from_mask(a),
                            b: p.algebra.member_from_mask(b),
                            union_value: lhs,
                            sum_value: rhs,
                        });
                    }
                }
                if b == 0 {
                    break;
                }
                b = (b - 1) & rest;
            }
        }
    }
    Validation { valid: diagnostics.is_empty(), diagnostics }
}

/// `{"algebra": <set instance>, "weights": {"atom_index": "p/q"}, "mode": ...}`.
///
/// Atom indices refer to the canonical atom order (ascending smallest point).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub algebra: SetInstance,
    pub weights: BTreeMap<String, String>,
    #[serde(default)]
    pub mode: Mode,
}

impl MeasureJson {
    /// Parses into a measure; atoms missing from `weights` get weight zero.
    /// The result is validated.
    pub fn to_measure(&self) -> Result<Measure, MeasureError> {
        let algebra = Arc::new(self.algebra.to_algebra()?);
        let mut weights = vec![Rational::zero(); algebra.num_atoms()];
        for (key, value) in &self.weights {
            let idx: usize = key.parse().map_err(|_| FormatError::Schema {
                path: format!("weights.{key}"),
                message: "atom index must be a non-negative integer".into(),
            })?;
            if idx >= weights.len() {
                return Err(FormatError::Schema {
                    path: format!("weights.{key}"),
                    message: format!("algebra has only {} atoms", weights.len()),
                }
                .into());
            }
            weights[idx] = parse_rational(value)?;
        }
        Measure::new(algebra, weights, self.mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::setalg::{generate_algebra, GroundSet, SubsetFamily};

    fn alg_0_12() -> Arc<Algebra> {
        let g = GroundSet::range(3);
        let gens = SubsetFamily::new(&g, [g.subset([0]).unwrap()]).unwrap();
        Arc::new(generate_algebra(&g, &gens).unwrap())
    }

    #[test]
    fn evaluate_examples() {
        let g = GroundSet::range(3);
        let alg = Arc::new(Algebra::powerset(&g));
        let p = Measure::uniform(alg.clone(), Mode::Sigma);
        assert_eq!(p.evaluate(&g.subset([0, 2]).unwrap()).unwrap(), ratio(2, 3));
        assert_eq!(p.evaluate(&g.full_set()).unwrap(), int(1));
        assert_eq!(p.evaluate(&g.empty_set()).unwrap(), int(0));
        let coarse = alg_0_12();
        let q = Measure::uniform(coarse, Mode::Sigma);
        assert_eq!(q.evaluate(&g.subset([1]).unwrap()), Err(MeasureError::NotMember(g.subset([1]).unwrap())));
    }

    #[test]
    fn dirac_examples() {
        let g = GroundSet::new(["a", "b"]).unwrap();
        let alg = Arc::new(Algebra::powerset(&g));
        let d = dirac(0, &alg, Mode::Sigma).unwrap();
        assert_eq!(d.evaluate(&g.subset([0]).unwrap()).unwrap(), int(1));
        assert_eq!(d.evaluate(&g.subset([1]).unwrap()).unwrap(), int(0));
        assert_eq!(d.evaluate(&g.full_set()).unwrap(), int(1));
        let coarse = alg_0_12();
        let d1 = dirac(1, &coarse, Mode::Sigma).unwrap();
        assert_eq!(d1.evaluate(&GroundSet::range(3).subset([1, 2]).unwrap()).unwrap(), int(1));
        assert_eq!(dirac(5, &coarse, Mode::Sigma).unwrap_err(), MeasureError::NoSuchPoint(5));
    }

    #[test]
    fn pushforward_examples() {
        let x = GroundSet::range(3);
        let y = GroundSet::range(2);
        let ax = Arc::new(Algebra::powerset(&x));
        let ay = Arc::new(Algebra::powerset(&y));
        let p = Measure::uniform(ax.clone(), Mode::Sigma);
        let f = PointMap::new(&x, &y, vec![0, 0, 1]).unwrap();
        let q = pushforward(&p, &f, &ay).unwrap();
        assert_eq!(q.weights(), &[ratio(2, 3), ratio(1, 3)]);
        let c = PointMap::constant(&x, &y, 1).unwrap();
        assert_eq!(pushforward(&p, &c, &ay).unwrap(), dirac(1, &ay, Mode::Sigma).unwrap());
        assert_eq!(pushforward(&p, &PointMap::identity(&x), &ax).unwrap(), p);
    }

    #[test]
    fn pushforward_rejects_non_measurable() {
        let x = GroundSet::range(3);
        let y = GroundSet::range(2);
        let p = Measure::uniform(alg_0_12(), Mode::FinitelyAdditive);
        let f = PointMap::new(&x, &y, vec![0, 0, 1]).unwrap();
        let err = pushforward(&p, &f, &Arc::new(Algebra::powerset(&y))).unwrap_err();
        assert!(matches!(err, MeasureError::NotPremeasurable { .. }));
    }

    #[test]
    fn validate_examples() {
        let alg = Arc::new(Algebra::powerset(&GroundSet::range(3)));
        assert!(validate(&Measure::uniform(alg.clone(), Mode::Sigma)).valid);
        let short = Measure::unchecked(alg.clone(), vec![ratio(3, 10), ratio(3, 10), ratio(3, 10)], Mode::Sigma);
        let v = validate(&short);
        assert!(!v.valid);
        assert_eq!(v.diagnostics, vec![Diagnostic::Normalization { total: ratio(9, 10) }]);
        let half = Measure::new(alg, vec![ratio(1, 2), ratio(1, 2), int(0)], Mode::Sigma).unwrap();
        assert!(validate(&half).valid);
    }

    #[test]
    fn json_round_trip() {
        let alg = alg_0_12();
        let p = Measure::new(alg, vec![ratio(1, 4), ratio(3, 4)], Mode::FinitelyAdditive).unwrap();
        let text = serde_json::to_string(&p.to_json().unwrap()).unwrap();
        assert_eq!(
            text,
            r#"{"algebra":{"points":["0","1","2"],"family":[[],[1,2],[0],[0,1,2]]},"weights":{"0":"1/4","1":"3/4"},"mode":"finitely_additive"}"#
        );
        let back: MeasureJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_measure().unwrap(), p);
    }
}
