//! The Giry monad on finite spaces: `G` on objects and maps, the Dirac unit,
//! the averaging multiplication, and exact law checks.
//!
//! Measures on `GX` are represented by finitely supported distributions
//! ([`FiniteDist`]); `GX` itself is never given an explicit algebra, since
//! evaluation at members of `X` is all that finite support needs.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::gen;
use crate::measure::{dirac, pushforward, Measure, MeasureError, Mode};
use crate::rational::{format_rational, Rational};
use crate::report::{Check, Report, SuiteConfig};
use crate::setalg::{Algebra, GroundSet, PointMap, SetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonadError {
    #[error("weight {} is not positive", format_rational(.0))]
    NonPositiveWeight(Rational),
    #[error("weights sum to {}, not one", format_rational(.0))]
    Normalization(Rational),
    #[error("empty support")]
    EmptySupport,
    #[error("support measures live on different algebras")]
    AlgebraMismatch,
    #[error("expected {expected} weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// A finitely supported probability distribution with pairwise distinct
/// support points and strictly positive weights summing to one.
#[derive(Debug, Clone)]
pub struct FiniteDist<T> {
    support: Vec<T>,
    weights: Vec<Rational>,
}

impl<T: Clone + PartialEq> FiniteDist<T> {
    /// Validates and merges repeated support points.
    pub fn new(pairs: Vec<(T, Rational)>) -> Result<Self, MonadError> {
        if pairs.is_empty() {
            return Err(MonadError::EmptySupport);
        }
        let mut total = Rational::zero();
        for (_, w) in &pairs {
            if !w.is_positive() {
                return Err(MonadError::NonPositiveWeight(w.clone()));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(MonadError::Normalization(total));
        }
        Ok(Self::merged(pairs))
    }

    /// Merges repeated points and drops zero weights; no other validation.
    fn merged(pairs: Vec<(T, Rational)>) -> Self {
        let mut support: Vec<T> = Vec::new();
        let mut weights: Vec<Rational> = Vec::new();
        for (t, w) in pairs {
            if w.is_zero() {
                continue;
            }
            match support.iter().position(|s| s == &t) {
                Some(i) => weights[i] += w,
                None => {
                    support.push(t);
                    weights.push(w);
                }
            }
        }
        FiniteDist { support, weights }
    }

    pub fn point(t: T) -> Self {
        FiniteDist { support: vec![t], weights: vec![Rational::one()] }
    }

    pub fn support(&self) -> &[T] {
        &self.support
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Rational)> {
        self.support.iter().zip(&self.weights)
    }

    /// Pushforward along `f`.
    pub fn map<U: Clone + PartialEq>(&self, f: impl Fn(&T) -> U) -> FiniteDist<U> {
        FiniteDist::merged(self.iter().map(|(t, w)| (f(t), w.clone())).collect())
    }

    /// Convex combination `Σ c_j · D_j`.
    pub fn mix(parts: &[(Rational, FiniteDist<T>)]) -> Self {
        FiniteDist::merged(
            parts
                .iter()
                .flat_map(|(c, d)| d.iter().map(move |(t, w)| (t.clone(), c * w)))
                .collect(),
        )
    }
}

impl<T: Clone + PartialEq> FiniteDist<FiniteDist<T>> {
    /// Multiplication of the finite distribution monad.
    pub fn flatten(&self) -> FiniteDist<T> {
        let parts: Vec<(Rational, FiniteDist<T>)> = self.iter().map(|(d, w)| (w.clone(), d.clone())).collect();
        FiniteDist::mix(&parts)
    }
}

/// Equality as distributions: same support set with the same weights.
impl<T: Clone + PartialEq> PartialEq for FiniteDist<T> {
    fn eq(&self, other: &Self) -> bool {
        self.support.len() == other.support.len()
            && self.iter().all(|(t, w)| {
                other.support.iter().position(|s| s == t).map(|i| &other.weights[i]) == Some(w)
            })
    }
}

/// A probability measure on `GX` with finite support.
pub type MetaMeasure = FiniteDist<Measure>;

/// A point of the simplex `GA` for a finite label set `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexPoint {
    index_set: GroundSet,
    weights: Vec<Rational>,
}

impl SimplexPoint {
    pub fn new(index_set: &GroundSet, weights: Vec<Rational>) -> Result<Self, MonadError> {
        if weights.len() != index_set.len() {
            return Err(MonadError::WeightCount { expected: index_set.len(), found: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(MonadError::NonPositiveWeight(w.clone()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(MonadError::Normalization(total));
        }
        Ok(SimplexPoint { index_set: index_set.clone(), weights })
    }

    pub fn vertex(index_set: &GroundSet, a: usize) -> Self {
        let weights = (0..index_set.len())
            .map(|i| if i == a { Rational::one() } else { Rational::zero() })
            .collect();
        SimplexPoint { index_set: index_set.clone(), weights }
    }

    pub fn index_set(&self) -> &GroundSet {
        &self.index_set
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// As a measure on the powerset of the index set.
    pub fn to_measure(&self, mode: Mode) -> Measure {
        let alg = Arc::new(Algebra::powerset(&self.index_set));
        Measure::new(alg, self.weights.clone(), mode).expect("simplex points are probabilities")
    }
}

/// `G` on maps: `(p_a)_a ↦ (Σ_{a ∈ f⁻¹(b)} p_a)_b`.
pub fn g_map(f: &PointMap, p: &SimplexPoint) -> Result<SimplexPoint, MonadError> {
    if f.dom() != &p.index_set {
        return Err(SetError::NotComposable.into());
    }
    let mut out = vec![Rational::zero(); f.cod().len()];
    for (a, w) in p.weights.iter().enumerate() {
        out[f.apply(a)] += w;
    }
    Ok(SimplexPoint { index_set: f.cod().clone(), weights: out })
}

/// `η_X(x) = δ_x`.
pub fn unit(x: usize, algebra: &Arc<Algebra>, mode: Mode) -> Result<Measure, MonadError> {
    Ok(dirac(x, algebra, mode)?)
}

/// `μ_X(M)(A) = Σ_i w_i · P_i(A)`.
pub fn mult(m: &MetaMeasure) -> Result<Measure, MonadError> {
    let first = m.support.first().ok_or(MonadError::EmptySupport)?;
    let alg = first.algebra().clone();
    let mut weights = vec![Rational::zero(); alg.num_atoms()];
    for (p, w) in m.iter() {
        if p.algebra() != &alg {
            return Err(MonadError::AlgebraMismatch);
        }
        for (acc, x) in weights.iter_mut().zip(p.weights()) {
            *acc += w * x;
        }
    }
    Ok(Measure::unchecked(alg, weights, first.mode()))
}

/// `G(η_X)(P)`: the image of `P` under `x ↦ δ_x`, a distribution over Dirac
/// measures (one per atom with positive weight).
pub fn g_unit(p: &Measure) -> MetaMeasure {
    let alg = p.algebra();
    let pairs = alg
        .atoms()
        .iter()
        .zip(p.weights())
        .map(|(a, w)| {
            let x = a.first().expect("atoms are nonempty");
            (dirac(x, alg, p.mode()).expect("point exists"), w.clone())
        })
        .collect();
    FiniteDist::merged(pairs)
}

/// `G(Gf)(M)`: push every support measure forward along `f`.
pub fn g_pushforward(m: &MetaMeasure, f: &PointMap, cod: &Arc<Algebra>) -> Result<MetaMeasure, MonadError> {
    let pairs = m
        .iter()
        .map(|(p, w)| Ok((pushforward(p, f, cod)?, w.clone())))
        .collect::<Result<Vec<_>, MonadError>>()?;
    Ok(FiniteDist::merged(pairs))
}

fn mjson(p: &Measure) -> Value {
    json!({"atoms": p.algebra().atoms(), "weights": p.weights().iter().map(format_rational).collect::<Vec<_>>()})
}

fn meta_json(m: &MetaMeasure) -> Value {
    Value::Array(
        m.iter()
            .map(|(p, w)| json!({"weight": format_rational(w), "measure": mjson(p)}))
            .collect(),
    )
}

/// Generates a meta-measure with support drawn by `draw`.
fn random_meta<R: rand::Rng>(
    rng: &mut R,
    max_support: usize,
    max_den: u32,
    mut draw: impl FnMut(&mut R) -> Measure,
) -> MetaMeasure {
    let s = rng.gen_range(1..=max_support);
    let w = gen::positive_weights(rng, s, max_den.max(s as u32));
    let pairs = w.into_iter().map(|w| (draw(rng), w)).collect();
    FiniteDist::merged(pairs)
}

const SUITE_LAWS: u64 = 1;

/// Law checks on one algebra, for `cases` random instances.
///
/// For each case: left unit `μ(δ_P) = P`, right unit `μ(G(η)(P)) = P`,
/// associativity `μ ∘ G(μ) = μ ∘ μ_G` on a random two-level structure,
/// naturality of `η` and `μ` along a random premeasurable map, and
/// functoriality of `g_map`.
pub fn check_monad_laws(x: &Arc<Algebra>, cfg: &SuiteConfig) -> Report {
    let mut checks = LawChecks::new();
    for case in 0..cfg.cases as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_LAWS, case);
        checks.run_case(&mut rng, x, cfg, case);
    }
    checks.into_report(cfg)
}

/// Like [`check_monad_laws`] but draws a fresh algebra (ground size up to
/// `cfg.max_ground_size`) for every case.
pub fn law_suite(cfg: &SuiteConfig) -> Report {
    let mut checks = LawChecks::new();
    for case in 0..cfg.cases as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_LAWS + 100, case);
        let x = gen::sized_algebra(&mut rng, 1, cfg.max_ground_size, 1);
        checks.run_case(&mut rng, &x, cfg, case);
    }
    checks.into_report(cfg)
}

struct LawChecks {
    left_unit: Check,
    right_unit: Check,
    associativity: Check,
    unit_naturality: Check,
    mult_naturality: Check,
    functoriality: Check,
    affine: Check,
}

impl LawChecks {
    fn new() -> Self {
        LawChecks {
            left_unit: Check::new("left_unit"),
            right_unit: Check::new("right_unit"),
            associativity: Check::new("associativity"),
            unit_naturality: Check::new("unit_naturality"),
            mult_naturality: Check::new("mult_naturality"),
            functoriality: Check::new("g_map_functoriality"),
            affine: Check::new("mult_affine"),
        }
    }

    fn run_case(&mut self, rng: &mut rand_chacha::ChaCha8Rng, x: &Arc<Algebra>, cfg: &SuiteConfig, case: u64) {
        use rand::Rng;
        let d = cfg.max_denominator;
        let mode = cfg.mode;
        let p = gen::measure(rng, x, d, mode, case);

        let left = mult(&FiniteDist::point(p.clone())).expect("nonempty");
        self.left_unit.record(left == p, || json!({"P": mjson(&p), "got": mjson(&left)}));

        let right = mult(&g_unit(&p)).expect("nonempty");
        self.right_unit.record(right == p, || json!({"P": mjson(&p), "got": mjson(&right)}));

        // two-level structure: a distribution over meta-measures
        let inner: Vec<MetaMeasure> = (0..rng.gen_range(1..=3))
            .map(|_| random_meta(rng, 3, d, |r| gen::measure(r, x, d, mode, 2)))
            .collect();
        let outer_w = gen::positive_weights(rng, inner.len(), d.max(inner.len() as u32));
        let mm: FiniteDist<MetaMeasure> =
            FiniteDist::merged(inner.into_iter().zip(outer_w).collect());
        let lhs = mult(&mm.map(|m| mult(m).expect("nonempty"))).expect("nonempty");
        let rhs = mult(&mm.flatten()).expect("nonempty");
        self.associativity.record(lhs == rhs, || {
            json!({"outer": mm.iter().map(|(m, w)| json!({"weight": format_rational(w), "meta": meta_json(m)})).collect::<Vec<_>>(),
                   "mult_after_g_mult": mjson(&lhs), "mult_after_mult": mjson(&rhs)})
        });
        let parts: Vec<(Rational, MetaMeasure)> = mm.iter().map(|(m, w)| (w.clone(), m.clone())).collect();
        let combined: Vec<Rational> = {
            let mut acc = vec![Rational::zero(); x.num_atoms()];
            for (c, m) in &parts {
                for (a, v) in acc.iter_mut().zip(mult(m).expect("nonempty").weights()) {
                    *a += c * v;
                }
            }
            acc
        };
        let mixed = mult(&FiniteDist::mix(&parts)).expect("nonempty");
        self.affine.record(mixed.weights() == combined.as_slice(), || json!({"mult_of_mix": mjson(&mixed)}));

        // naturality along a random map f: X → Y, Y with a random algebra
        let m_y = rng.gen_range(1..=cfg.max_ground_size.max(1));
        let y_ground = GroundSet::range(m_y);
        let y = Arc::new(gen::algebra(rng, &y_ground, 1));
        let f = gen::atomwise_map(rng, x, &y_ground);
        for pt in 0..x.ground().len() {
            let lhs = pushforward(&unit(pt, x, mode).expect("point"), &f, &y).expect("premeasurable");
            let rhs = unit(f.apply(pt), &y, mode).expect("point");
            self.unit_naturality.record(lhs == rhs, || json!({"x": pt, "image": f.image(), "got": mjson(&lhs)}));
        }
        let m = random_meta(rng, 3, d, |r| gen::measure(r, x, d, mode, 2));
        let lhs = pushforward(&mult(&m).expect("nonempty"), &f, &y).expect("premeasurable");
        let rhs = mult(&g_pushforward(&m, &f, &y).expect("premeasurable")).expect("nonempty");
        self.mult_naturality.record(lhs == rhs, || {
            json!({"meta": meta_json(&m), "image": f.image(), "lhs": mjson(&lhs), "rhs": mjson(&rhs)})
        });

        // functoriality on simplex points: A → B → C
        let a = x.ground().clone();
        let b = GroundSet::range(rng.gen_range(1..=cfg.max_ground_size.max(1)));
        let c = GroundSet::range(rng.gen_range(1..=cfg.max_ground_size.max(1)));
        let pa = Algebra::powerset(&a);
        let pb = Algebra::powerset(&b);
        let f1 = gen::atomwise_map(rng, &pa, &b);
        let f2 = gen::atomwise_map(rng, &pb, &c);
        let sp = SimplexPoint::new(&a, gen::weights(rng, a.len(), d)).expect("valid");
        let composed = g_map(&f1.then(&f2).expect("composable"), &sp).expect("domain");
        let stepwise = g_map(&f2, &g_map(&f1, &sp).expect("domain")).expect("domain");
        self.functoriality.record(composed == stepwise, || {
            json!({"p": sp.weights().iter().map(format_rational).collect::<Vec<_>>(), "f": f1.image(), "g": f2.image()})
        });
        let id = g_map(&PointMap::identity(&a), &sp).expect("domain");
        self.functoriality.record(id == sp, || json!({"identity_on": sp.weights().iter().map(format_rational).collect::<Vec<_>>()}));
    }

    fn into_report(self, cfg: &SuiteConfig) -> Report {
        Report::with_checks(
            format!("laws[{}]", cfg.mode),
            vec![
                self.left_unit,
                self.right_unit,
                self.associativity,
                self.unit_naturality,
                self.mult_naturality,
                self.functoriality,
                self.affine,
            ],
        )
        .note("on finite discrete spaces the Radon and Baire monads coincide with G, so these checks cover them as well")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn pw(n: usize) -> Arc<Algebra> {
        Arc::new(Algebra::powerset(&GroundSet::range(n)))
    }

    #[test]
    fn g_map_examples() {
        let a = GroundSet::range(3);
        let b = GroundSet::range(2);
        let p = SimplexPoint::new(&a, vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)]).unwrap();
        assert_eq!(g_map(&PointMap::identity(&a), &p).unwrap(), p);
        let c = PointMap::constant(&a, &b, 1).unwrap();
        assert_eq!(g_map(&c, &p).unwrap(), SimplexPoint::vertex(&b, 1));
        let f = PointMap::new(&a, &b, vec![0, 0, 1]).unwrap();
        assert_eq!(g_map(&f, &p).unwrap().weights(), &[ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn mult_examples() {
        let x = pw(2);
        let p = Measure::new(x.clone(), vec![ratio(1, 3), ratio(2, 3)], Mode::Sigma).unwrap();
        assert_eq!(mult(&FiniteDist::point(p.clone())).unwrap(), p);
        let d0 = dirac(0, &x, Mode::Sigma).unwrap();
        let d1 = dirac(1, &x, Mode::Sigma).unwrap();
        let m = FiniteDist::new(vec![(d0, ratio(1, 2)), (d1, ratio(1, 2))]).unwrap();
        assert_eq!(mult(&m).unwrap().weights(), &[ratio(1, 2), ratio(1, 2)]);
        let same = FiniteDist::new(vec![(p.clone(), ratio(1, 4)), (p.clone(), ratio(3, 4))]).unwrap();
        assert_eq!(same.support().len(), 1);
        assert_eq!(mult(&same).unwrap(), p);
    }

    #[test]
    fn associativity_worked_case() {
        let x = pw(2);
        let m = |a, b| Measure::new(x.clone(), vec![a, b], Mode::Sigma).unwrap();
        let p1 = m(int(1), int(0));
        let p2 = m(int(0), int(1));
        let p3 = m(ratio(1, 2), ratio(1, 2));
        let m1 = FiniteDist::new(vec![(p1.clone(), ratio(1, 2)), (p3.clone(), ratio(1, 2))]).unwrap();
        let m2 = FiniteDist::new(vec![(p2.clone(), ratio(1, 3)), (p3.clone(), ratio(2, 3))]).unwrap();
        let mm = FiniteDist::new(vec![(m1, ratio(1, 4)), (m2, ratio(3, 4))]).unwrap();
        let lhs = mult(&mm.map(|m| mult(m).unwrap())).unwrap();
        let rhs = mult(&mm.flatten()).unwrap();
        assert_eq!(lhs, rhs);
        // 1/4·(3/4, 1/4) + 3/4·(1/3, 2/3)
        assert_eq!(lhs.weights(), &[ratio(7, 16), ratio(9, 16)]);
    }

    #[test]
    fn right_unit_instance() {
        let x = Arc::new(Algebra::from_atoms(&GroundSet::range(3), vec![
            crate::setalg::Subset::from_points(3, [0, 2]).unwrap(),
            crate::setalg::Subset::from_points(3, [1]).unwrap(),
        ]).unwrap());
        let p = Measure::new(x, vec![ratio(1, 3), ratio(2, 3)], Mode::FinitelyAdditive).unwrap();
        assert_eq!(g_unit(&p).support().len(), 2);
        assert_eq!(mult(&g_unit(&p)).unwrap(), p);
    }

    #[test]
    fn finite_dist_rejects_bad_weights() {
        assert_eq!(FiniteDist::new(vec![(0u8, int(0)), (1, int(1))]).unwrap_err(), MonadError::NonPositiveWeight(int(0)));
        assert_eq!(FiniteDist::new(vec![(0u8, ratio(1, 2))]).unwrap_err(), MonadError::Normalization(ratio(1, 2)));
        assert_eq!(FiniteDist::<u8>::new(vec![]).unwrap_err(), MonadError::EmptySupport);
    }

    #[test]
    fn laws_on_powerset_of_two() {
        let cfg = SuiteConfig::default().with_cases(100);
        let r = check_monad_laws(&pw(2), &cfg);
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.check("left_unit").unwrap().checked, 100);
        let r = check_monad_laws(&pw(2), &cfg.with_mode(Mode::FinitelyAdditive));
        assert!(r.passed());
    }
}
