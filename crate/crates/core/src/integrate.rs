//! Simple functions and integration against finitely additive probabilities.
//!
//! On a finite algebra every measurable `[0,1]`-valued function is constant on
//! atoms and therefore simple, so [`SimpleFunction`] doubles as the type of
//! measurable test functions.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::error::FormatError;
use crate::measure::{Measure, Mode};
use crate::rational::{format_rational, in_unit_interval, parse_rational, ratio, sum, Rational};
use crate::setalg::{Algebra, SetError, Subset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegrateError {
    #[error("set {0} is not a member of the algebra")]
    NotMember(Subset),
    #[error("coefficient {} outside [0,1]", format_rational(.0))]
    Coefficient(Rational),
    #[error("value {} at point {point} outside [0,1]", format_rational(.value))]
    Range { point: usize, value: Rational },
    #[error("expected {expected} values, found {found}")]
    ValueCount { expected: usize, found: usize },
    #[error("function and measure live on different algebras")]
    AlgebraMismatch,
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl IntegrateError {
    pub fn is_input_error(&self) -> bool {
        true
    }
}

/// A `[0,1]`-valued simple function `Σ a_k 1_{A_k}` on a finite algebra.
///
/// The term list is kept as given; `values` is the canonical atom-indexed
/// form, which is what equality compares.
#[derive(Debug, Clone)]
pub struct SimpleFunction {
    algebra: Arc<Algebra>,
    terms: Vec<(Rational, Subset)>,
    values: Vec<Rational>,
}

impl SimpleFunction {
    pub fn from_terms(algebra: &Arc<Algebra>, terms: Vec<(Rational, Subset)>) -> Result<Self, IntegrateError> {
        let k = algebra.num_atoms();
        let mut values = vec![Rational::zero(); k];
        for (c, set) in &terms {
            if !in_unit_interval(c) {
                return Err(IntegrateError::Coefficient(c.clone()));
            }
            let atoms = algebra
                .atoms_in(set)
                .ok_or_else(|| IntegrateError::NotMember(set.clone()))?;
            for a in atoms {
                values[a] += c;
            }
        }
        check_range(algebra, &values)?;
        Ok(SimpleFunction { algebra: algebra.clone(), terms, values })
    }

    /// Builds the canonical form directly from one value per atom.
    pub fn from_atom_values(algebra: &Arc<Algebra>, values: Vec<Rational>) -> Result<Self, IntegrateError> {
        if values.len() != algebra.num_atoms() {
            return Err(IntegrateError::ValueCount { expected: algebra.num_atoms(), found: values.len() });
        }
        check_range(algebra, &values)?;
        let terms = canonical_terms(algebra, &values);
        Ok(SimpleFunction { algebra: algebra.clone(), terms, values })
    }

    /// From a per-point vector; fails unless it is constant on atoms.
    pub fn from_point_values(algebra: &Arc<Algebra>, point_values: &[Rational]) -> Result<Option<Self>, IntegrateError> {
        let n = algebra.ground().len();
        if point_values.len() != n {
            return Err(IntegrateError::ValueCount { expected: n, found: point_values.len() });
        }
        let mut values = Vec::with_capacity(algebra.num_atoms());
        for atom in algebra.atoms() {
            let mut pts = atom.points();
            let first = &point_values[pts.next().expect("atoms are nonempty")];
            if pts.any(|p| &point_values[p] != first) {
                return Ok(None);
            }
            values.push(first.clone());
        }
        Self::from_atom_values(algebra, values).map(Some)
    }

    pub fn indicator(algebra: &Arc<Algebra>, set: &Subset) -> Result<Self, IntegrateError> {
        Self::from_terms(algebra, vec![(Rational::one(), set.clone())])
    }

    pub fn constant(algebra: &Arc<Algebra>, c: Rational) -> Result<Self, IntegrateError> {
        let full = algebra.ground().full_set();
        Self::from_terms(algebra, vec![(c, full)])
    }

    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        Self::constant(algebra, Rational::zero()).expect("zero is in range")
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn terms(&self) -> &[(Rational, Subset)] {
        &self.terms
    }

    /// Canonical atom-indexed values.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value_at(&self, point: usize) -> &Rational {
        &self.values[self.algebra.atom_of(point)]
    }

    pub fn point_values(&self) -> Vec<Rational> {
        (0..self.algebra.ground().len()).map(|x| self.value_at(x).clone()).collect()
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &SimpleFunction) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    /// `self + other`, if it stays within `[0,1]`.
    pub fn checked_add(&self, other: &SimpleFunction) -> Option<SimpleFunction> {
        let values: Vec<Rational> = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::from_atom_values(&self.algebra, values).ok()
    }

    /// `other - self`, if `self ≤ other`.
    pub fn checked_sub_from(&self, other: &SimpleFunction) -> Option<SimpleFunction> {
        let values: Vec<Rational> = other.values.iter().zip(&self.values).map(|(a, b)| a - b).collect();
        Self::from_atom_values(&self.algebra, values).ok()
    }

    pub fn scale(&self, r: &Rational) -> Result<SimpleFunction, IntegrateError> {
        if !in_unit_interval(r) {
            return Err(IntegrateError::Coefficient(r.clone()));
        }
        let terms = self.terms.iter().map(|(c, s)| (c * r, s.clone())).collect();
        let values = self.values.iter().map(|v| v * r).collect();
        Ok(SimpleFunction { algebra: self.algebra.clone(), terms, values })
    }

    /// Pointwise minimum with a constant.
    pub fn min_const(&self, c: &Rational) -> SimpleFunction {
        let values = self.values.iter().map(|v| v.min(c).clone()).collect();
        Self::from_atom_values(&self.algebra, values).expect("min with a constant stays in range")
    }

    /// `self · 1_atom`.
    pub fn restrict_to_atom(&self, atom: usize) -> SimpleFunction {
        let values = (0..self.values.len())
            .map(|i| if i == atom { self.values[i].clone() } else { Rational::zero() })
            .collect();
        Self::from_atom_values(&self.algebra, values).expect("restriction stays in range")
    }

    pub fn to_json(&self) -> SimpleFunctionJson {
        SimpleFunctionJson {
            terms: self
                .terms
                .iter()
                .map(|(c, s)| (format_rational(c), s.to_indices()))
                .collect(),
        }
    }
}

impl PartialEq for SimpleFunction {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra)
            && self.values == other.values
    }
}

impl Eq for SimpleFunction {}

fn check_range(algebra: &Algebra, values: &[Rational]) -> Result<(), IntegrateError> {
    for (i, v) in values.iter().enumerate() {
        if !in_unit_interval(v) {
            let point = algebra.atoms()[i].first().expect("atoms are nonempty");
            return Err(IntegrateError::Range { point, value: v.clone() });
        }
    }
    Ok(())
}

fn canonical_terms(algebra: &Algebra, values: &[Rational]) -> Vec<(Rational, Subset)> {
    values
        .iter()
        .zip(algebra.atoms())
        .filter(|(v, _)| !v.is_zero())
        .map(|(v, a)| (v.clone(), a.clone()))
        .collect()
}

/// The atom-indexed form `Σ_atoms value · 1_atom`.
pub fn canonicalize(s: &SimpleFunction) -> SimpleFunction {
    SimpleFunction {
        algebra: s.algebra.clone(),
        terms: canonical_terms(&s.algebra, &s.values),
        values: s.values.clone(),
    }
}

fn same_algebra(p: &Measure, s: &SimpleFunction) -> Result<(), IntegrateError> {
    if Arc::ptr_eq(p.algebra(), &s.algebra) || **p.algebra() == *s.algebra {
        Ok(())
    } else {
        Err(IntegrateError::AlgebraMismatch)
    }
}

/// `J_P(s)` computed on the canonical form: `Σ_atoms value · weight`.
pub fn j_integral(p: &Measure, s: &SimpleFunction) -> Result<Rational, IntegrateError> {
    same_algebra(p, s)?;
    Ok(s.values.iter().zip(p.weights()).map(|(v, w)| v * w).sum())
}

/// `J_P(s)` computed on the term list as given: `Σ_k a_k P(A_k)`.
pub fn j_integral_terms(p: &Measure, s: &SimpleFunction) -> Result<Rational, IntegrateError> {
    same_algebra(p, s)?;
    let mut total = Rational::zero();
    for (c, set) in &s.terms {
        let atoms = p.algebra().atoms_in(set).ok_or_else(|| IntegrateError::NotMember(set.clone()))?;
        total += c * sum(atoms.iter().map(|a| p.weight(*a)));
    }
    Ok(total)
}

/// Supremum of `J_P(s)` over simple `s ≤ g` for an arbitrary `[0,1]`-valued
/// point function `g`. The greatest simple minorant takes, on each atom, the
/// minimum of `g` over that atom.
pub fn lower_integral(p: &Measure, g: &[Rational]) -> Result<Rational, IntegrateError> {
    envelope_integral(p, g, |a, b| a.min(b))
}

/// Infimum of `J_P(s)` over simple `s ≥ g`.
pub fn upper_integral(p: &Measure, g: &[Rational]) -> Result<Rational, IntegrateError> {
    envelope_integral(p, g, |a, b| a.max(b))
}

fn envelope_integral<'a>(
    p: &'a Measure,
    g: &'a [Rational],
    pick: impl Fn(&'a Rational, &'a Rational) -> &'a Rational,
) -> Result<Rational, IntegrateError> {
    let alg = p.algebra();
    if g.len() != alg.ground().len() {
        return Err(IntegrateError::ValueCount { expected: alg.ground().len(), found: g.len() });
    }
    for (point, v) in g.iter().enumerate() {
        if !in_unit_interval(v) {
            return Err(IntegrateError::Range { point, value: v.clone() });
        }
    }
    let mut total = Rational::zero();
    for (atom, w) in alg.atoms().iter().zip(p.weights()) {
        let mut pts = atom.points();
        let mut best = &g[pts.next().expect("atoms are nonempty")];
        for x in pts {
            best = pick(best, &g[x]);
        }
        total += best * w;
    }
    Ok(total)
}

/// `I_P(f)`: the supremum of `J_P` over simple minorants of `f`. On a finite
/// algebra the supremum is attained at `f` itself, so the result always
/// equals [`j_integral`].
pub fn i_integral(p: &Measure, f: &SimpleFunction) -> Result<Rational, IntegrateError> {
    same_algebra(p, f)?;
    let sup = lower_integral(p, &f.point_values())?;
    debug_assert_eq!(sup, j_integral(p, f)?);
    Ok(sup)
}

/// Integral of a nonnegative (not necessarily bounded by one) point function
/// that is constant on the atoms of `p`'s algebra; `None` if it is not.
pub fn integrate_nonnegative(p: &Measure, g: &[Rational]) -> Option<Rational> {
    let alg = p.algebra();
    if g.len() != alg.ground().len() || g.iter().any(Signed::is_negative) {
        return None;
    }
    let mut total = Rational::zero();
    for (atom, w) in alg.atoms().iter().zip(p.weights()) {
        let mut pts = atom.points();
        let v = &g[pts.next()?];
        if pts.any(|x| &g[x] != v) {
            return None;
        }
        total += v * w;
    }
    Some(total)
}

// ---------------------------------------------------------------------------
// Property report

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegralCheckConfig {
    /// Grid denominator for the exhaustive minorant/majorant search.
    pub grid_denominator: u32,
    /// Full grid search is done up to this many atoms; above it each atom
    /// only tries the grid neighbours of the function value.
    pub grid_max_atoms: usize,
    /// Length of the truncation sequence `f ∧ n/N` used for monotone limits.
    pub sequence_length: u32,
}

impl Default for IntegralCheckConfig {
    fn default() -> Self {
        IntegralCheckConfig { grid_denominator: 4, grid_max_atoms: 3, sequence_length: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseResult {
    pub clause: &'static str,
    pub description: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub witnesses: Vec<serde_json::Value>,
}

impl ClauseResult {
    fn new(clause: &'static str, description: &'static str) -> Self {
        ClauseResult { clause, description, checked: 0, failed: 0, witnesses: Vec::new() }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> serde_json::Value) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.witnesses.len() < 5 {
                self.witnesses.push(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralReport {
    pub mode: Mode,
    pub clauses: Vec<ClauseResult>,
}

impl IntegralReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(ClauseResult::passed)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.clause == name)
    }

    pub fn to_report(&self) -> crate::report::Report {
        let checks = self
            .clauses
            .iter()
            .map(|c| crate::report::Check {
                name: format!("clause_{}", c.clause),
                checked: c.checked as u64,
                failed: c.failed as u64,
                witnesses: c.witnesses.clone(),
            })
            .collect();
        crate::report::Report::with_checks(format!("integrate[{}]", self.mode), checks)
    }
}

fn fn_json(f: &SimpleFunction) -> serde_json::Value {
    json!(f.values.iter().map(format_rational).collect::<Vec<_>>())
}

fn grid_candidates(v: &Rational, d: u32, full: bool) -> Vec<Rational> {
    let d = d.max(1) as i64;
    let mut out: Vec<Rational> = if full {
        (0..=d).map(|i| ratio(i, d)).collect()
    } else {
        let scaled = v * Rational::from_integer(d.into());
        vec![scaled.floor() / Rational::from_integer(d.into()), scaled.ceil() / Rational::from_integer(d.into())]
    };
    out.push(v.clone());
    out.sort();
    out.dedup();
    out
}

/// Exhaustive `(max_{s ≤ f} J(s), min_{s ≥ f} J(s))` over the product grid.
fn grid_extrema(p: &Measure, f: &SimpleFunction, cfg: &IntegralCheckConfig) -> (Rational, Rational) {
    let full = f.values.len() <= cfg.grid_max_atoms;
    let cands: Vec<Vec<Rational>> = f
        .values
        .iter()
        .map(|v| grid_candidates(v, cfg.grid_denominator, full))
        .collect();
    let mut best_lower: Option<Rational> = None;
    let mut best_upper: Option<Rational> = None;
    let mut idx = vec![0usize; cands.len()];
    loop {
        let mut below = true;
        let mut above = true;
        let mut j = Rational::zero();
        for (i, c) in idx.iter().enumerate() {
            let s = &cands[i][*c];
            below &= s <= &f.values[i];
            above &= s >= &f.values[i];
            j += s * p.weight(i);
        }
        if below && best_lower.as_ref().is_none_or(|b| &j > b) {
            best_lower = Some(j.clone());
        }
        if above && best_upper.as_ref().is_none_or(|b| &j < b) {
            best_upper = Some(j);
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return (best_lower.expect("f is its own minorant"), best_upper.expect("f is its own majorant"));
            }
            idx[pos] += 1;
            if idx[pos] < cands[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Exact check of the six integral properties on a finite family:
/// (i) `I = J` on simple functions and `I(1) = 1`; (ii) monotonicity;
/// (iii) sup over minorants equals inf over majorants (grid search);
/// (iv) additivity when `f + g ≤ 1`; (v) monotone limits along the
/// eventually constant truncations `f ∧ n/N`; (vi) sums with finitely many
/// nonzero terms (atom decompositions and `f + g + (1 - f - g) = 1`).
pub fn check_integral_properties(
    p: &Measure,
    fns: &[SimpleFunction],
    cfg: &IntegralCheckConfig,
) -> Result<IntegralReport, IntegrateError> {
    for f in fns {
        same_algebra(p, f)?;
    }
    let alg = p.algebra();
    let one = SimpleFunction::constant(alg, Rational::one())?;
    let zero = SimpleFunction::zero(alg);
    let mut family: Vec<SimpleFunction> = fns.to_vec();
    family.push(zero);
    family.push(one.clone());
    let integrals: Vec<Rational> = family.iter().map(|f| i_integral(p, f)).collect::<Result<_, _>>()?;

    let mut c1 = ClauseResult::new("i", "I_P equals J_P on simple functions; I_P(1) = 1");
    let mut c2 = ClauseResult::new("ii", "f <= g implies I_P(f) <= I_P(g)");
    let mut c3 = ClauseResult::new("iii", "sup over simple minorants equals inf over simple majorants");
    let mut c4 = ClauseResult::new("iv", "I_P(f + g) = I_P(f) + I_P(g) when f + g <= 1");
    let mut c5 = ClauseResult::new("v", "monotone limits (finite form: eventually constant sequences)");
    let mut c6 = ClauseResult::new("vi", "series (finite form: finitely many nonzero terms)");

    for (f, i_f) in family.iter().zip(&integrals) {
        let j = j_integral(p, f)?;
        let jt = j_integral_terms(p, f)?;
        c1.record(i_f == &j && j == jt, || json!({"f": fn_json(f), "I": format_rational(i_f), "J": format_rational(&j)}));
    }
    let i_one = i_integral(p, &one)?;
    c1.record(i_one.is_one(), || json!({"I(1)": format_rational(&i_one)}));

    for (f, i_f) in family.iter().zip(&integrals) {
        for (g, i_g) in family.iter().zip(&integrals) {
            if f.le(g) {
                c2.record(i_f <= i_g, || json!({"f": fn_json(f), "g": fn_json(g)}));
            }
        }
    }

    for (f, i_f) in family.iter().zip(&integrals) {
        let (lo, hi) = grid_extrema(p, f, cfg);
        c3.record(&lo == i_f && &hi == i_f, || {
            json!({"f": fn_json(f), "sup_minorants": format_rational(&lo), "inf_majorants": format_rational(&hi)})
        });
    }

    for (a, (f, i_f)) in family.iter().zip(&integrals).enumerate() {
        for (g, i_g) in family.iter().zip(&integrals).skip(a) {
            if let Some(h) = f.checked_add(g) {
                let i_h = i_integral(p, &h)?;
                c4.record(i_h == i_f + i_g, || json!({"f": fn_json(f), "g": fn_json(g), "I(f+g)": format_rational(&i_h)}));
                // three-term finite series f + g + (1 - f - g) = 1
                let rest = h.checked_sub_from(&one).expect("h <= 1");
                let total = i_f + i_g + i_integral(p, &rest)?;
                c6.record(total.is_one(), || json!({"f": fn_json(f), "g": fn_json(g), "sum": format_rational(&total)}));
            }
        }
    }

    let n_steps = cfg.sequence_length.max(1) as i64;
    for (f, i_f) in family.iter().zip(&integrals) {
        let seq: Vec<Rational> = (0..=n_steps)
            .map(|n| i_integral(p, &f.min_const(&ratio(n, n_steps))))
            .collect::<Result<_, _>>()?;
        let increasing = seq.windows(2).all(|w| w[0] <= w[1]);
        let limit = seq.last().expect("nonempty");
        c5.record(increasing && limit == i_f, || json!({"f": fn_json(f), "limit": format_rational(limit)}));

        let pieces: Rational = (0..f.values.len())
            .map(|a| i_integral(p, &f.restrict_to_atom(a)))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .sum();
        c6.record(&pieces == i_f, || json!({"f": fn_json(f), "sum_of_pieces": format_rational(&pieces)}));
    }

    Ok(IntegralReport { mode: p.mode(), clauses: vec![c1, c2, c3, c4, c5, c6] })
}

/// `{"terms": [["p/q", [set indices]], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleFunctionJson {
    pub terms: Vec<(String, Vec<usize>)>,
}

impl SimpleFunctionJson {
    pub fn to_function(&self, algebra: &Arc<Algebra>) -> Result<SimpleFunction, IntegrateError> {
        let ground = algebra.ground();
        let terms = self
            .terms
            .iter()
            .map(|(c, set)| Ok((parse_rational(c)?, ground.subset(set.iter().copied())?)))
            .collect::<Result<Vec<_>, IntegrateError>>()?;
        SimpleFunction::from_terms(algebra, terms)
    }

    /// Per-point values without requiring measurability or the `[0,1]` bound.
    pub fn to_point_values(&self, n: usize) -> Result<Vec<Rational>, IntegrateError> {
        let mut out = vec![Rational::zero(); n];
        for (c, set) in &self.terms {
            let c = parse_rational(c)?;
            for &x in set {
                if x >= n {
                    return Err(SetError::PointOutOfRange { index: x, size: n }.into());
                }
                out[x] += &c;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Mode;
    use crate::rational::{int, ratio};
    use crate::setalg::GroundSet;

    fn powerset(n: usize) -> (GroundSet, Arc<Algebra>) {
        let g = GroundSet::range(n);
        let a = Arc::new(Algebra::powerset(&g));
        (g, a)
    }

    #[test]
    fn canonicalize_examples() {
        let (g, a) = powerset(2);
        let half = SimpleFunction::from_terms(&a, vec![(ratio(1, 2), g.full_set())]).unwrap();
        assert_eq!(canonicalize(&half).values(), &[ratio(1, 2), ratio(1, 2)]);
        let s = SimpleFunction::from_terms(
            &a,
            vec![(ratio(1, 2), g.subset([0]).unwrap()), (ratio(1, 2), g.subset([0, 1]).unwrap())],
        )
        .unwrap();
        assert_eq!(canonicalize(&s).values(), &[int(1), ratio(1, 2)]);
        let split = SimpleFunction::from_terms(
            &a,
            vec![(ratio(1, 2), g.subset([0]).unwrap()), (ratio(1, 2), g.subset([1]).unwrap())],
        )
        .unwrap();
        assert_eq!(canonicalize(&half).terms(), canonicalize(&split).terms());
        assert_eq!(half, split);
    }

    #[test]
    fn range_and_membership_errors() {
        let (g, a) = powerset(2);
        let too_big = SimpleFunction::from_terms(
            &a,
            vec![(ratio(3, 4), g.full_set()), (ratio(1, 2), g.subset([1]).unwrap())],
        );
        assert_eq!(too_big.unwrap_err(), IntegrateError::Range { point: 1, value: ratio(5, 4) });
        let coarse = Arc::new(Algebra::trivial(&g));
        let not_member = SimpleFunction::indicator(&coarse, &g.subset([0]).unwrap());
        assert!(matches!(not_member, Err(IntegrateError::NotMember(_))));
    }

    #[test]
    fn j_integral_examples() {
        let (g, a) = powerset(3);
        let p = Measure::uniform(a.clone(), Mode::Sigma);
        let one = SimpleFunction::constant(&a, int(1)).unwrap();
        assert_eq!(j_integral(&p, &one).unwrap(), int(1));
        let s = SimpleFunction::from_terms(
            &a,
            vec![(ratio(1, 2), g.subset([0]).unwrap()), (ratio(1, 2), g.subset([0, 1]).unwrap())],
        )
        .unwrap();
        assert_eq!(j_integral(&p, &s).unwrap(), ratio(1, 2));
        assert_eq!(j_integral_terms(&p, &s).unwrap(), ratio(1, 2));
        let set = g.subset([1, 2]).unwrap();
        let ind = SimpleFunction::indicator(&a, &set).unwrap();
        assert_eq!(j_integral(&p, &ind).unwrap(), p.evaluate(&set).unwrap());
    }

    #[test]
    fn i_integral_examples() {
        let (_, a) = powerset(2);
        let p = Measure::uniform(a.clone(), Mode::Sigma);
        assert_eq!(i_integral(&p, &SimpleFunction::constant(&a, int(1)).unwrap()).unwrap(), int(1));
        let f = SimpleFunction::from_atom_values(&a, vec![int(1), ratio(1, 2)]).unwrap();
        assert_eq!(i_integral(&p, &f).unwrap(), ratio(3, 4));
        assert_eq!(i_integral(&p, &SimpleFunction::zero(&a)).unwrap(), int(0));
    }

    #[test]
    fn algebra_mismatch_is_an_error() {
        let (_, a) = powerset(2);
        let (_, b) = powerset(3);
        let p = Measure::uniform(a, Mode::Sigma);
        let f = SimpleFunction::zero(&b);
        assert_eq!(j_integral(&p, &f).unwrap_err(), IntegrateError::AlgebraMismatch);
    }

    #[test]
    fn lower_and_upper_integrals_of_non_measurable_function() {
        let g = GroundSet::range(2);
        let a = Arc::new(Algebra::trivial(&g));
        let p = Measure::uniform(a, Mode::FinitelyAdditive);
        let h = vec![ratio(1, 4), ratio(3, 4)];
        assert_eq!(lower_integral(&p, &h).unwrap(), ratio(1, 4));
        assert_eq!(upper_integral(&p, &h).unwrap(), ratio(3, 4));
    }

    #[test]
    fn property_report_examples() {
        let (g, a) = powerset(3);
        let p = Measure::uniform(a.clone(), Mode::Sigma);
        let f = SimpleFunction::constant(&a, ratio(1, 3)).unwrap();
        let h = SimpleFunction::from_terms(&a, vec![(ratio(1, 3), g.subset([0]).unwrap())]).unwrap();
        let sum = f.checked_add(&h).unwrap();
        assert_eq!(i_integral(&p, &sum).unwrap(), ratio(4, 9));
        let set = g.subset([0, 2]).unwrap();
        let ind = SimpleFunction::indicator(&a, &set).unwrap();
        let co = SimpleFunction::indicator(&a, &set.complement()).unwrap();
        let both = ind.checked_add(&co).unwrap();
        assert_eq!(i_integral(&p, &both).unwrap(), int(1));
        let report = check_integral_properties(&p, &[f, h, ind, co], &IntegralCheckConfig::default()).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.clauses.len(), 6);
        assert!(report.clause("iv").unwrap().checked > 0);
    }

    #[test]
    fn json_terms() {
        let (_, a) = powerset(2);
        let j: SimpleFunctionJson = serde_json::from_str(r#"{"terms": [["1/2", [0]], ["1/2", [0, 1]]]}"#).unwrap();
        let f = j.to_function(&a).unwrap();
        assert_eq!(f.values(), &[int(1), ratio(1, 2)]);
        assert_eq!(serde_json::to_string(&f.to_json()).unwrap(), r#"{"terms":[["1/2",[0]],["1/2",[0,1]]]}"#);
    }
}
