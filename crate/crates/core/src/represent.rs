//! Recovering measures from integration functionals, and the slab / semi-ring
//! machinery behind the Daniell–Stone construction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::error::FormatError;
use crate::integrate::{
    integrate_nonnegative, j_integral, IntegrateError, SimpleFunction, SimpleFunctionJson,
};
use crate::measure::{validate, Measure, MeasureError, Mode};
use crate::rational::{format_rational, in_unit_interval, parse_rational, Rational};
use crate::setalg::{
    sigma_of_functions, Algebra, GroundSet, SemiRing, SetError, SetInstance, Subset, SubsetFamily,
    MAX_ENUMERATED_ATOMS,
};

/// Default bound on the integer multiplier `n` in `n·f ∈ ℕL`.
pub const DEFAULT_MULTIPLIER_BOUND: u32 = 64;

// ---------------------------------------------------------------------------
// Errors

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("functional takes value {} on the constant one", format_rational(.0))]
    NotNormalized(Rational),
    #[error("functional value {} on indicator of {set} lies outside [0,1]", format_rational(.value))]
    OutOfRange { set: Subset, value: Rational },
    #[error("additivity fails for {a} and {b}: {} != {}", format_rational(.union_value), format_rational(.sum_value))]
    Additivity { a: Subset, b: Subset, union_value: Rational, sum_value: Rational },
    #[error("{set} splits into {parts:?} but {} != {}", format_rational(.value), format_rational(.sum))]
    Decomposition { set: Subset, parts: Vec<Subset>, value: Rational, sum: Rational },
    #[error("function {0} is not in the functional's table")]
    NotInTable(String),
    #[error("test function {function}: functional gives {}, reconstructed integral {}", format_rational(.functional), format_rational(.integral))]
    TestFamily { function: String, functional: Rational, integral: Rational },
    #[error("functional and function live on different algebras")]
    AlgebraMismatch,
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl ReconstructError {
    pub fn is_input_error(&self) -> bool {
        match self {
            ReconstructError::NotInTable(_)
            | ReconstructError::AlgebraMismatch
            | ReconstructError::Integrate(_)
            | ReconstructError::Set(_)
            | ReconstructError::Format(_) => true,
            ReconstructError::Measure(e) => e.is_input_error(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("not a weak integration lattice: {0}")]
    Violation(LatticeViolation),
    #[error("function {index} has {found} values, expected {expected}")]
    Length { index: usize, expected: usize, found: usize },
    #[error("function {index} takes a negative value")]
    Negative { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("no value given for member {0}")]
    MissingValue(Subset),
    #[error("empty set has value {}", format_rational(.0))]
    NonzeroEmpty(Rational),
    #[error("member {set} has negative value {}", format_rational(.value))]
    Negative { set: Subset, value: Rational },
    #[error("members do not cover the ground set (missing {0})")]
    NotCovering(Subset),
    #[error("{set} = ⊔{parts:?} but {} != {}", format_rational(.value), format_rational(.sum))]
    Additivity { set: Subset, parts: Vec<Subset>, value: Rational, sum: Rational },
    #[error("extension has mass {}, not one", format_rational(.0))]
    NotNormalized(Rational),
    #[error("slab family fails the semi-ring clause for {a} and {b}")]
    SlabSemiring { a: String, b: String },
    #[error("malformed slab: {0}")]
    BadSlab(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("functional is negative on lattice member {0}")]
    NegativeFunctional(usize),
    #[error("functional not additive: f{f} + f{g} = f{h} but values disagree")]
    OperatorAdditivity { f: usize, g: usize, h: usize },
    #[error("lift is inconsistent on {function}: {values:?}")]
    InconsistentLift { function: String, values: Vec<String> },
    #[error("slab height {0} is not a multiple of a lattice member")]
    NotInLift(String),
    #[error("level set {0} × [0,1) is not in the algebra generated by the slabs")]
    LevelSetNotSeparated(Subset),
    #[error("lattice member {index}: integral {} differs from functional value {}", format_rational(.integral), format_rational(.value))]
    IntegralMismatch { index: usize, integral: Rational, value: Rational },
    #[error("slab route gives {slab:?}, indicator reconstruction gives {direct:?}")]
    ShortcutDisagrees { slab: Vec<String>, direct: Vec<String> },
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Set(#[from] SetError),
}

impl ExtensionError {
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            ExtensionError::MissingValue(_)
                | ExtensionError::BadSlab(_)
                | ExtensionError::Set(_)
                | ExtensionError::Lattice(LatticeError::Length { .. } | LatticeError::Negative { .. })
        )
    }
}

// ---------------------------------------------------------------------------
// Functionals

pub type Oracle = Arc<dyn Fn(&SimpleFunction) -> Rational + Send + Sync>;

#[derive(Clone)]
pub enum FunctionalOracle {
    Callback(Oracle),
    /// Values on a declared finite family; looked up by canonical form.
    Table(Vec<(SimpleFunction, Rational)>),
}

/// A functional on the simple functions of an algebra.
#[derive(Clone)]
pub struct Functional {
    algebra: Arc<Algebra>,
    oracle: FunctionalOracle,
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.oracle {
            FunctionalOracle::Callback(_) => "callback".to_string(),
            FunctionalOracle::Table(t) => format!("table[{}]", t.len()),
        };
        f.debug_struct("Functional").field("atoms", &self.algebra.num_atoms()).field("oracle", &kind).finish()
    }
}

impl Functional {
    pub fn from_fn<F>(algebra: &Arc<Algebra>, f: F) -> Self
    where
        F: Fn(&SimpleFunction) -> Rational + Send + Sync + 'static,
    {
        Functional { algebra: algebra.clone(), oracle: FunctionalOracle::Callback(Arc::new(f)) }
    }

    pub fn from_table(algebra: &Arc<Algebra>, table: Vec<(SimpleFunction, Rational)>) -> Result<Self, ReconstructError> {
        if table.iter().any(|(f, _)| f.algebra() != algebra) {
            return Err(ReconstructError::AlgebraMismatch);
        }
        Ok(Functional { algebra: algebra.clone(), oracle: FunctionalOracle::Table(table) })
    }

    /// `s ↦ ∫ s dP`.
    pub fn integration(p: &Measure) -> Self {
        let algebra = p.algebra().clone();
        let p = p.clone();
        Functional::from_fn(&algebra, move |s| j_integral(&p, s).expect("same algebra"))
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn oracle(&self) -> &FunctionalOracle {
        &self.oracle
    }

    /// Applies the oracle.
    pub fn eval(&self, s: &SimpleFunction) -> Result<Rational, ReconstructError> {
        if s.algebra() != &self.algebra {
            return Err(ReconstructError::AlgebraMismatch);
        }
        match &self.oracle {
            FunctionalOracle::Callback(f) => Ok(f(s)),
            FunctionalOracle::Table(t) => t
                .iter()
                .find(|(g, _)| g == s)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| ReconstructError::NotInTable(fn_text(s))),
        }
    }

    fn eval_set(&self, set: &Subset) -> Result<Rational, ReconstructError> {
        self.eval(&SimpleFunction::indicator(&self.algebra, set)?)
    }

    /// The functions listed in the table, or an empty slice for callbacks.
    pub fn table_family(&self) -> Vec<SimpleFunction> {
        match &self.oracle {
            FunctionalOracle::Callback(_) => Vec::new(),
            FunctionalOracle::Table(t) => t.iter().map(|(f, _)| f.clone()).collect(),
        }
    }
}

fn fn_text(s: &SimpleFunction) -> String {
    let vals: Vec<String> = s.values().iter().map(format_rational).collect();
    format!("[{}]", vals.join(", "))
}

fn indicator_values(f: &Functional) -> Result<Vec<(u64, Subset, Rational)>, ReconstructError> {
    let alg = &f.algebra;
    let k = alg.num_atoms();
    if k > MAX_ENUMERATED_ATOMS {
        return Err(SetError::TooManyAtoms { atoms: k, limit: MAX_ENUMERATED_ATOMS }.into());
    }
    let mut out = Vec::with_capacity(1 << k);
    for (mask, set) in alg.members_with_masks()? {
        let v = f.eval_set(&set)?;
        if !in_unit_interval(&v) {
            return Err(ReconstructError::OutOfRange { set, value: v });
        }
        out.push((mask, set, v));
    }
    Ok(out)
}

/// Pairwise additivity is checked over every disjoint member pair up to this
/// many atoms; above it only the split off the first atom is checked.
const PAIRWISE_ATOMS: usize = 10;

/// The unique charge `P(A) := F(1_A)` determined by an additive functional.
///
/// Checks normalisation, `F(1_{A∪B}) = F(1_A) + F(1_B)` on disjoint members,
/// and `∫ s dP = F(s)` on every function of `test_family` (and of the
/// functional's own table).
pub fn reconstruct_charge(f: &Functional, test_family: &[SimpleFunction]) -> Result<Measure, ReconstructError> {
    let alg = f.algebra.clone();
    let k = alg.num_atoms();
    let one = SimpleFunction::constant(&alg, Rational::one())?;
    let total = f.eval(&one)?;
    if !total.is_one() {
        return Err(ReconstructError::NotNormalized(total));
    }
    let values = indicator_values(f)?;
    let by_mask = |m: u64| &values[m as usize].2;
    let full = (1u64 << k) - 1;
    for a in 1..=full {
        let rest = full & !a;
        if k <= PAIRWISE_ATOMS {
            let mut b = rest;
            while b != 0 {
                if a < b {
                    check_pair(&alg, a, b, by_mask)?;
                }
                b = (b - 1) & rest;
            }
        } else if a.count_ones() > 1 {
            let low = a & a.wrapping_neg();
            check_pair(&alg, low, a & !low, by_mask)?;
        }
    }
    let weights: Vec<Rational> = (0..k).map(|i| by_mask(1 << i).clone()).collect();
    let p = Measure::new(alg.clone(), weights, Mode::FinitelyAdditive)?;
    let v = validate(&p);
    if !v.valid {
        return Err(MeasureError::Invalid(v.diagnostics).into());
    }
    let table = f.table_family();
    for s in test_family.iter().chain(&table) {
        let expected = f.eval(s)?;
        let got = j_integral(&p, s)?;
        if expected != got {
            return Err(ReconstructError::TestFamily { function: fn_text(s), functional: expected, integral: got });
        }
    }
    Ok(p)
}

fn check_pair<'a>(alg: &Algebra, a: u64, b: u64, v: impl Fn(u64) -> &'a Rational) -> Result<(), ReconstructError> {
    let union_value = v(a | b).clone();
    let sum_value = v(a) + v(b);
    if union_value != sum_value {
        return Err(ReconstructError::Additivity {
            a: alg.member_from_mask(a),
            b: alg.member_from_mask(b),
            union_value,
            sum_value,
        });
    }
    Ok(())
}

/// The unique σ-additive measure represented by `f`. On a finite algebra
/// countable additivity reduces to finite additivity, checked here as
/// `F(1_A) = Σ F(1_α)` over the atoms `α ⊆ A` of every member `A`, and as
/// `F(s) = Σ F(s·1_α)` for every test function where the oracle can answer.
pub fn reconstruct_measure(f: &Functional, test_family: &[SimpleFunction]) -> Result<Measure, ReconstructError> {
    let alg = f.algebra.clone();
    let values = indicator_values(f)?;
    let k = alg.num_atoms();
    for (mask, set, value) in &values {
        if mask.count_ones() < 2 {
            continue;
        }
        let atoms: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let sum: Rational = atoms.iter().map(|i| &values[1usize << i].2).sum();
        if &sum != value {
            return Err(ReconstructError::Decomposition {
                set: set.clone(),
                parts: atoms.iter().map(|i| alg.atoms()[*i].clone()).collect(),
                value: value.clone(),
                sum,
            });
        }
    }
    for s in test_family {
        let value = f.eval(s)?;
        let mut sum = Rational::zero();
        let mut answered = true;
        for a in 0..k {
            match f.eval(&s.restrict_to_atom(a)) {
                Ok(v) => sum += v,
                Err(ReconstructError::NotInTable(_)) => {
                    answered = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if answered && sum != value {
            return Err(ReconstructError::TestFamily { function: fn_text(s), functional: value, integral: sum });
        }
    }
    Ok(reconstruct_charge(f, test_family)?.with_mode(Mode::Sigma))
}

/// `{"algebra": <set instance>, "family": [<simple function>...], "values": ["p/q"...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub algebra: SetInstance,
    pub family: Vec<SimpleFunctionJson>,
    pub values: Vec<String>,
}

impl FunctionalJson {
    pub fn to_functional(&self) -> Result<Functional, ReconstructError> {
        let algebra = Arc::new(self.algebra.to_algebra()?);
        if self.family.len() != self.values.len() {
            return Err(FormatError::Schema {
                path: "values".into(),
                message: format!("{} values for {} functions", self.values.len(), self.family.len()),
            }
            .into());
        }
        let table = self
            .family
            .iter()
            .zip(&self.values)
            .map(|(f, v)| Ok((f.to_function(&algebra)?, parse_rational(v)?)))
            .collect::<Result<Vec<_>, ReconstructError>>()?;
        Functional::from_table(&algebra, table)
    }
}

// ---------------------------------------------------------------------------
// Weak integration lattices

/// A finite list of nonnegative functions together with the declared
/// closure parameters under which it is checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakIntegrationLattice {
    ground: GroundSet,
    functions: Vec<Vec<Rational>>,
    /// Rational scales `r` for which `r·f ∈ L` is required.
    pub scales: Vec<Rational>,
    /// `n·f ∧ 1 ∈ ℕL` is required for `1 ≤ n ≤ truncation_bound`.
    pub truncation_bound: u32,
    /// Largest multiplier searched when deciding membership in `ℕL`.
    pub multiplier_bound: u32,
}

impl WeakIntegrationLattice {
    pub fn new(ground: &GroundSet, functions: Vec<Vec<Rational>>) -> Result<Self, LatticeError> {
        let n = ground.len();
        for (index, f) in functions.iter().enumerate() {
            if f.len() != n {
                return Err(LatticeError::Length { index, expected: n, found: f.len() });
            }
            if f.iter().any(Signed::is_negative) {
                return Err(LatticeError::Negative { index });
            }
        }
        Ok(WeakIntegrationLattice {
            ground: ground.clone(),
            functions,
            scales: vec![Rational::zero(), Rational::one()],
            truncation_bound: 4,
            multiplier_bound: DEFAULT_MULTIPLIER_BOUND,
        })
    }

    /// Every function constant on the atoms of `algebra` with values in
    /// `{0, 1/d, .., 1}`.
    pub fn grid(algebra: &Algebra, d: u32) -> Self {
        let k = algebra.num_atoms();
        let d = d.max(1);
        let mut functions = Vec::new();
        let mut idx = vec![0u32; k];
        loop {
            let f = (0..algebra.ground().len())
                .map(|x| Rational::new(idx[algebra.atom_of(x)].into(), d.into()))
                .collect();
            functions.push(f);
            let mut pos = 0;
            while pos < k && idx[pos] == d {
                idx[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
            idx[pos] += 1;
        }
        Self::new(algebra.ground(), functions).expect("grid values are nonnegative")
    }

    pub fn with_scales(mut self, scales: Vec<Rational>) -> Self {
        self.scales = scales;
        self
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn functions(&self) -> &[Vec<Rational>] {
        &self.functions
    }

    fn index(&self) -> HashMap<&[Rational], usize> {
        let mut m = HashMap::new();
        for (i, f) in self.functions.iter().enumerate() {
            m.entry(f.as_slice()).or_insert(i);
        }
        m
    }

    /// All representations `h = n·f` with `f` listed and `1 ≤ n ≤ bound`.
    /// The zero function is represented by `n = 0`.
    pub fn multiples_of(&self, h: &[Rational]) -> Vec<Multiple> {
        if h.iter().all(Zero::is_zero) {
            return vec![Multiple { member: None, multiplier: 0 }];
        }
        let mut out = Vec::new();
        for (i, f) in self.functions.iter().enumerate() {
            if let Some(n) = integer_ratio(h, f) {
                if n >= 1 && n <= self.multiplier_bound {
                    out.push(Multiple { member: Some(i), multiplier: n });
                }
            }
        }
        out
    }

    fn find_multiple(&self, h: &[Rational]) -> Option<Multiple> {
        self.multiples_of(h).into_iter().next()
    }
}

/// `n` with `h = n·f`, if it is a nonnegative integer.
fn integer_ratio(h: &[Rational], f: &[Rational]) -> Option<u32> {
    let x = f.iter().position(|v| !v.is_zero())?;
    let q = &h[x] / &f[x];
    if !q.is_integer() || q.is_negative() {
        return None;
    }
    let n: u32 = q.to_integer().try_into().ok()?;
    let nq = Rational::from_integer(n.into());
    h.iter().zip(f).all(|(a, b)| a == &(&nq * b)).then_some(n)
}

/// Membership witness `n · functions[member]` for `ℕL` (`member = None`
/// encodes the zero function).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Multiple {
    pub member: Option<usize>,
    pub multiplier: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum LatticeViolation {
    MissingOne,
    Join { f: usize, g: usize, function: Vec<String> },
    Meet { f: usize, g: usize, function: Vec<String> },
    Gap { f: usize, g: usize, function: Vec<String> },
    Truncation { f: usize, n: u32, function: Vec<String> },
    Scale { f: usize, r: String, function: Vec<String> },
}

impl fmt::Display for LatticeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeViolation::MissingOne => write!(f, "constant 1 is not listed"),
            LatticeViolation::Join { f: a, g, function } => write!(f, "f{a} ∨ f{g} = {function:?} not in ℕL"),
            LatticeViolation::Meet { f: a, g, function } => write!(f, "f{a} ∧ f{g} = {function:?} not in ℕL"),
            LatticeViolation::Gap { f: a, g, function } => {
                write!(f, "f{a} ∨ f{g} - f{a} ∧ f{g} = {function:?} not in ℕL")
            }
            LatticeViolation::Truncation { f: a, n, function } => write!(f, "{n}·f{a} ∧ 1 = {function:?} not in ℕL"),
            LatticeViolation::Scale { f: a, r, function } => write!(f, "{r}·f{a} = {function:?} not in L"),
        }
    }
}

/// Closure witness: which member and multiplier exhibit a required function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureWitness {
    pub clause: &'static str,
    pub of: Vec<usize>,
    pub witness: Multiple,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeReport {
    pub valid: bool,
    pub violation: Option<LatticeViolation>,
    pub witnesses: Vec<ClosureWitness>,
}

fn texts(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

/// Checks the four closure clauses exactly and reports the first failure.
pub fn check_weak_lattice(l: &WeakIntegrationLattice) -> LatticeReport {
    let mut witnesses = Vec::new();
    let fail = |v, witnesses| LatticeReport { valid: false, violation: Some(v), witnesses };
    let one = vec![Rational::one(); l.ground.len()];
    if !l.functions.contains(&one) {
        return fail(LatticeViolation::MissingOne, witnesses);
    }
    let fs = &l.functions;
    for i in 0..fs.len() {
        for j in i..fs.len() {
            let join: Vec<Rational> = fs[i].iter().zip(&fs[j]).map(|(a, b)| a.max(b).clone()).collect();
            let meet: Vec<Rational> = fs[i].iter().zip(&fs[j]).map(|(a, b)| a.min(b).clone()).collect();
            let gap: Vec<Rational> = join.iter().zip(&meet).map(|(a, b)| a - b).collect();
            let cases = [("join", join), ("meet", meet), ("gap", gap)];
            for (clause, h) in cases {
                match l.find_multiple(&h) {
                    Some(w) => witnesses.push(ClosureWitness { clause, of: vec![i, j], witness: w }),
                    None => {
                        let function = texts(&h);
                        let v = match clause {
                            "join" => LatticeViolation::Join { f: i, g: j, function },
                            "meet" => LatticeViolation::Meet { f: i, g: j, function },
                            _ => LatticeViolation::Gap { f: i, g: j, function },
                        };
                        return fail(v, witnesses);
                    }
                }
            }
        }
    }
    for (i, f) in fs.iter().enumerate() {
        for n in 1..=l.truncation_bound {
            let nr = Rational::from_integer(n.into());
            let h: Vec<Rational> = f.iter().map(|v| (&nr * v).min(Rational::one())).collect();
            match l.find_multiple(&h) {
                Some(w) => witnesses.push(ClosureWitness { clause: "truncation", of: vec![i], witness: w }),
                None => return fail(LatticeViolation::Truncation { f: i, n, function: texts(&h) }, witnesses),
            }
        }
    }
    let index = l.index();
    for (i, f) in fs.iter().enumerate() {
        for r in &l.scales {
            let h: Vec<Rational> = f.iter().map(|v| r * v).collect();
            // 0 = 0·1 always counts as a member
            let found = if h.iter().all(Zero::is_zero) {
                Some(Multiple { member: None, multiplier: 0 })
            } else {
                index.get(h.as_slice()).map(|&m| Multiple { member: Some(m), multiplier: 1 })
            };
            match found {
                Some(witness) => witnesses.push(ClosureWitness { clause: "scale", of: vec![i], witness }),
                None => {
                    return fail(LatticeViolation::Scale { f: i, r: format_rational(r), function: texts(&h) }, witnesses)
                }
            }
        }
    }
    LatticeReport { valid: true, violation: None, witnesses }
}

// ---------------------------------------------------------------------------
// Slabs

/// The region `{(x, t) : lower(x) ≤ t < upper(x)}` of `X × [0, ∞)`.
///
/// Bounds are arbitrary nonnegative point functions, since slab heights in
/// `ℕL` may exceed one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slab {
    lower: Vec<Rational>,
    upper: Vec<Rational>,
}

impl Slab {
    /// Requires `0 ≤ lower ≤ upper` pointwise.
    pub fn new(lower: Vec<Rational>, upper: Vec<Rational>) -> Option<Slab> {
        let ok = lower.len() == upper.len()
            && lower.iter().zip(&upper).all(|(l, u)| !l.is_negative() && l <= u);
        ok.then_some(Slab { lower, upper })
    }

    /// `[l ∧ u, u)`: clamps the lower bound so the slab is well formed.
    pub fn normalized(lower: Vec<Rational>, upper: Vec<Rational>) -> Slab {
        let lower = lower.into_iter().zip(&upper).map(|(l, u)| l.min(u.clone())).collect();
        Slab { lower, upper }
    }

    pub fn empty(width: usize) -> Slab {
        Slab { lower: vec![Rational::zero(); width], upper: vec![Rational::zero(); width] }
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn width(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, x: usize, t: &Rational) -> bool {
        &self.lower[x] <= t && t < &self.upper[x]
    }

    /// Pointwise height `upper - lower`.
    pub fn height(&self) -> Vec<Rational> {
        self.upper.iter().zip(&self.lower).map(|(u, l)| u - l).collect()
    }

    pub fn to_json(&self) -> SlabJson {
        let terms = |v: &[Rational]| SimpleFunctionJson {
            terms: v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(x, c)| (format_rational(c), vec![x]))
                .collect(),
        };
        SlabJson { lower: terms(&self.lower), upper: terms(&self.upper) }
    }
}

impl fmt::Display for Slab {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?})", texts(&self.lower), texts(&self.upper))
    }
}

/// `{"lower": <simple fn>, "upper": <simple fn>}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlabJson {
    pub lower: SimpleFunctionJson,
    pub upper: SimpleFunctionJson,
}

impl SlabJson {
    pub fn to_slab(&self, n: usize) -> Result<Slab, ExtensionError> {
        let bad = |e: IntegrateError| ExtensionError::BadSlab(e.to_string());
        let lower = self.lower.to_point_values(n).map_err(bad)?;
        let upper = self.upper.to_point_values(n).map_err(bad)?;
        Slab::new(lower, upper).ok_or_else(|| ExtensionError::BadSlab("lower bound exceeds upper bound".into()))
    }
}

fn same_width(a: &Slab, b: &Slab) {
    assert_eq!(a.width(), b.width(), "slabs over different ground sets");
}

/// `[f₁, g₁) ∩ [f₂, g₂) = [f₁ ∨ f₂, g₁ ∧ g₂)`, normalised.
pub fn slab_intersect(a: &Slab, b: &Slab) -> Slab {
    same_width(a, b);
    let lower = a.lower.iter().zip(&b.lower).map(|(x, y)| x.max(y).clone()).collect();
    let upper = a.upper.iter().zip(&b.upper).map(|(x, y)| x.min(y).clone()).collect();
    Slab::normalized(lower, upper)
}

/// `[f₁, g₁) ∖ [f₂, g₂)` as at most two disjoint slabs:
/// `[f₁, g₁ ∧ f₂)` and `[f₁ ∨ g₂, g₁)`, each normalised, empty pieces dropped.
pub fn slab_subtract(a: &Slab, b: &Slab) -> Vec<Slab> {
    same_width(a, b);
    if b.is_empty() || slab_intersect(a, b).is_empty() {
        return if a.is_empty() { Vec::new() } else { vec![a.clone()] };
    }
    let below = Slab::normalized(
        a.lower.clone(),
        a.upper.iter().zip(&b.lower).map(|(g, f)| g.min(f).clone()).collect(),
    );
    let above = Slab::normalized(
        a.lower.iter().zip(&b.upper).map(|(f, g)| f.max(g).clone()).collect(),
        a.upper.clone(),
    );
    [below, above].into_iter().filter(|s| !s.is_empty()).collect()
}

/// Every value taken by any of the slabs, sorted.
pub fn breakpoints<'a>(slabs: impl IntoIterator<Item = &'a Slab>) -> Vec<Rational> {
    let mut set = BTreeSet::new();
    for s in slabs {
        set.extend(s.lower.iter().cloned());
        set.extend(s.upper.iter().cloned());
    }
    set.into_iter().collect()
}

/// Extensional check of both slab formulas for one pair: membership of
/// every `(x, t)` with `t` a breakpoint agrees with pointwise set semantics,
/// and the difference pieces are disjoint.
pub fn check_slab_pair(a: &Slab, b: &Slab) -> bool {
    let inter = slab_intersect(a, b);
    let diff = slab_subtract(a, b);
    let ts = breakpoints([a, b]);
    for x in 0..a.width() {
        for t in &ts {
            let (in_a, in_b) = (a.contains(x, t), b.contains(x, t));
            if inter.contains(x, t) != (in_a && in_b) {
                return false;
            }
            let hits = diff.iter().filter(|s| s.contains(x, t)).count();
            if hits > 1 || (hits == 1) != (in_a && !in_b) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Carathéodory extension

/// A nonnegative additive set function on a finite algebra, possibly with
/// total mass other than one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub algebra: Arc<Algebra>,
    pub weights: Vec<Rational>,
    pub mass: Rational,
}

impl Extension {
    /// Value on a member of the algebra, `None` otherwise.
    pub fn evaluate(&self, set: &Subset) -> Option<Rational> {
        let atoms = self.algebra.atoms_in(set)?;
        Some(atoms.iter().map(|a| &self.weights[*a]).sum())
    }

    /// The extension as a probability measure; fails unless the mass is one.
    pub fn to_probability(&self, mode: Mode) -> Result<Measure, ExtensionError> {
        if !self.mass.is_one() {
            return Err(ExtensionError::NotNormalized(self.mass.clone()));
        }
        Ok(Measure::new(self.algebra.clone(), self.weights.clone(), mode)?)
    }

    /// Divides by the total mass (which must be positive).
    pub fn normalized(&self, mode: Mode) -> Result<Measure, ExtensionError> {
        if !self.mass.is_positive() {
            return Err(ExtensionError::NotNormalized(self.mass.clone()));
        }
        let weights = self.weights.iter().map(|w| w / &self.mass).collect();
        Ok(Measure::new(self.algebra.clone(), weights, mode)?)
    }
}

/// Extends `mu` from the semi-ring `s` to the algebra it generates.
///
/// The atoms of the generated algebra are the sets `m_x = ⋂{A ∈ S : x ∈ A}`,
/// which belong to `S`; `mu` is additive on `S` exactly when every member's
/// value is the sum over the atoms inside it.
pub fn caratheodory_extend(s: &SemiRing, mu: &BTreeMap<Subset, Rational>) -> Result<Extension, ExtensionError> {
    let ground = s.ground();
    let members = s.members();
    let value = |m: &Subset| mu.get(m).ok_or_else(|| ExtensionError::MissingValue(m.clone()));
    let empty = ground.empty_set();
    if let Some(v) = mu.get(&empty) {
        if !v.is_zero() {
            return Err(ExtensionError::NonzeroEmpty(v.clone()));
        }
    }
    for m in members {
        let v = value(m)?;
        if v.is_negative() {
            return Err(ExtensionError::Negative { set: m.clone(), value: v.clone() });
        }
    }
    let covered = members.iter().fold(empty.clone(), |acc, m| acc.union(m));
    if covered != ground.full_set() {
        return Err(ExtensionError::NotCovering(covered.complement()));
    }
    let mut atoms: Vec<Subset> = Vec::new();
    let mut seen = empty;
    for x in 0..ground.len() {
        if seen.contains(x) {
            continue;
        }
        let m = members
            .iter()
            .filter(|m| m.contains(x))
            .fold(ground.full_set(), |acc, m| acc.intersection(m));
        seen = seen.union(&m);
        atoms.push(m);
    }
    let algebra = Arc::new(Algebra::from_atoms(ground, atoms)?);
    let weights: Vec<Rational> = algebra
        .atoms()
        .iter()
        .map(|a| value(a).cloned())
        .collect::<Result<_, _>>()?;
    for m in members {
        let parts = algebra.atoms_in(m).expect("members are unions of atoms");
        let sum: Rational = parts.iter().map(|a| &weights[*a]).sum();
        let v = value(m)?;
        if &sum != v {
            return Err(ExtensionError::Additivity {
                set: m.clone(),
                parts: parts.iter().map(|a| algebra.atoms()[*a].clone()).collect(),
                value: v.clone(),
                sum,
            });
        }
    }
    let mass = weights.iter().sum();
    Ok(Extension { algebra, weights, mass })
}

// ---------------------------------------------------------------------------
// Daniell–Stone via slabs

/// Result of [`daniell_stone`].
#[derive(Debug, Clone)]
pub struct DaniellStone {
    pub measure: Measure,
    /// Number of distinct nonempty slabs in the semi-ring.
    pub slabs: usize,
    /// Number of cells of the vertical refinement.
    pub cells: usize,
    /// Whether the result was compared against indicator reconstruction.
    pub cross_checked: bool,
}

/// Vertical refinement of `X × [0, M)` where `M(x)` is the largest lattice
/// value at `x`: cell `(x, i)` is `[t_i, t_{i+1})` between consecutive values.
struct CellGrid {
    /// Per point, the sorted breakpoints.
    levels: Vec<Vec<Rational>>,
    /// Index of the first cell of each point.
    offset: Vec<usize>,
    cells: usize,
}

impl CellGrid {
    fn new(functions: &[Vec<Rational>], n: usize) -> Self {
        let mut levels = Vec::with_capacity(n);
        let mut offset = Vec::with_capacity(n);
        let mut cells = 0;
        for x in 0..n {
            let mut ts: Vec<Rational> = functions.iter().map(|f| f[x].clone()).collect();
            ts.push(Rational::zero());
            ts.sort();
            ts.dedup();
            offset.push(cells);
            cells += ts.len() - 1;
            levels.push(ts);
        }
        CellGrid { levels, offset, cells }
    }

    fn level(&self, x: usize, t: &Rational) -> usize {
        self.levels[x].binary_search(t).expect("bounds are breakpoints")
    }

    fn cells_of(&self, slab: &Slab) -> Subset {
        let mut s = Subset::empty(self.cells);
        for x in 0..slab.width() {
            let (lo, hi) = (self.level(x, &slab.lower[x]), self.level(x, &slab.upper[x]));
            for i in lo..hi {
                s.insert(self.offset[x] + i);
            }
        }
        s
    }

    /// Cells of `A × [0, 1)`, if `1` is a breakpoint at every point of `A`.
    fn unit_band(&self, a: &Subset) -> Option<Subset> {
        let mut s = Subset::empty(self.cells);
        for x in a.points() {
            let hi = self.levels[x].binary_search(&Rational::one()).ok()?;
            for i in 0..hi {
                s.insert(self.offset[x] + i);
            }
        }
        Some(s)
    }
}

fn pointwise(f: &[Rational], g: &[Rational], pick_max: bool) -> Vec<Rational> {
    f.iter()
        .zip(g)
        .map(|(a, b)| if (a < b) == pick_max { b.clone() } else { a.clone() })
        .collect()
}

/// Closure of `fs ∪ {0}` under pointwise max and min.
fn lattice_closure(fs: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut set: BTreeSet<Vec<Rational>> = fs.iter().cloned().collect();
    set.insert(vec![Rational::zero(); n]);
    loop {
        let current: Vec<Vec<Rational>> = set.iter().cloned().collect();
        let before = set.len();
        for i in 0..current.len() {
            for j in i + 1..current.len() {
                set.insert(pointwise(&current[i], &current[j], true));
                set.insert(pointwise(&current[i], &current[j], false));
            }
        }
        if set.len() == before {
            return current;
        }
    }
}

/// The measure on `σ(L)` represented by `i` (one value per listed function),
/// built by Carathéodory extension over the slab semi-ring
/// `{[f, g) : f ≤ g}` with `μ[f, g) := I'(g - f)`, where `I'(n·f) := n·I(f)`
/// is the lift of `I` to `ℕL`. The probability is read off as
/// `P(A) := ρ(A × [0, 1))`.
pub fn daniell_stone(l: &WeakIntegrationLattice, i: &[Rational]) -> Result<DaniellStone, ExtensionError> {
    let report = check_weak_lattice(l);
    if let Some(v) = report.violation {
        return Err(LatticeError::Violation(v).into());
    }
    let fs = l.functions();
    let n = l.ground.len();
    if i.len() != fs.len() {
        return Err(SetError::MapLength { expected: fs.len(), found: i.len() }.into());
    }
    if let Some(idx) = i.iter().position(Signed::is_negative) {
        return Err(ExtensionError::NegativeFunctional(idx));
    }
    let index = l.index();
    let one = vec![Rational::one(); n];
    let i_one = &i[index[one.as_slice()]];
    if !i_one.is_one() {
        return Err(ExtensionError::Reconstruct(ReconstructError::NotNormalized(i_one.clone())));
    }
    // additivity over the finite sums present in L
    for a in 0..fs.len() {
        for b in a..fs.len() {
            let s: Vec<Rational> = fs[a].iter().zip(&fs[b]).map(|(x, y)| x + y).collect();
            if let Some(&h) = index.get(s.as_slice()) {
                if i[h] != &i[a] + &i[b] {
                    return Err(ExtensionError::OperatorAdditivity { f: a, g: b, h });
                }
            }
        }
    }
    let lift = |h: &[Rational]| -> Result<Rational, ExtensionError> {
        let reps = l.multiples_of(h);
        let values: BTreeSet<Rational> = reps
            .iter()
            .map(|m| match m.member {
                None => Rational::zero(),
                Some(j) => Rational::from_integer(m.multiplier.into()) * &i[j],
            })
            .collect();
        match values.len() {
            0 => Err(ExtensionError::NotInLift(format!("{:?}", texts(h)))),
            1 => Ok(values.into_iter().next().expect("one value")),
            _ => Err(ExtensionError::InconsistentLift {
                function: format!("{:?}", texts(h)),
                values: values.iter().map(format_rational).collect(),
            }),
        }
    };

    let closure = lattice_closure(fs, n);
    let grid = CellGrid::new(&closure, n);
    let mut slabs: Vec<Slab> = Vec::new();
    for f in &closure {
        for g in &closure {
            if let Some(s) = Slab::new(f.clone(), g.clone()) {
                if !s.is_empty() {
                    slabs.push(s);
                }
            }
        }
    }
    let mut by_cells: HashMap<Subset, Rational> = HashMap::new();
    let mut cell_sets = Vec::with_capacity(slabs.len());
    for s in &slabs {
        let cells = grid.cells_of(s);
        let v = lift(&s.height())?;
        if let Some(prev) = by_cells.get(&cells) {
            if prev != &v {
                return Err(ExtensionError::InconsistentLift {
                    function: format!("{:?}", texts(&s.height())),
                    values: vec![format_rational(prev), format_rational(&v)],
                });
            }
        }
        by_cells.insert(cells.clone(), v);
        cell_sets.push(cells);
    }
    // semi-ring clauses, through the slab formulas
    for (a, ca) in slabs.iter().zip(&cell_sets) {
        for (b, cb) in slabs.iter().zip(&cell_sets) {
            let inter = slab_intersect(a, b);
            let ci = grid.cells_of(&inter);
            let diff = slab_subtract(a, b);
            let pieces: Vec<Subset> = diff.iter().map(|d| grid.cells_of(d)).collect();
            let union = pieces.iter().fold(Subset::empty(grid.cells), |acc, p| acc.union(p));
            let ok = ci == ca.intersection(cb)
                && (ci.is_empty() || by_cells.contains_key(&ci))
                && union == ca.difference(cb)
                && pieces.iter().all(|p| by_cells.contains_key(p));
            if !ok {
                return Err(ExtensionError::SlabSemiring { a: a.to_string(), b: b.to_string() });
            }
        }
    }
    let cell_ground = GroundSet::range(grid.cells);
    let empty = cell_ground.empty_set();
    by_cells.insert(empty.clone(), Rational::zero());
    let family = SubsetFamily::new(&cell_ground, by_cells.keys().cloned())?;
    let semiring = SemiRing::trusted(family);
    let mu: BTreeMap<Subset, Rational> = by_cells.into_iter().collect();
    let rho = caratheodory_extend(&semiring, &mu)?;

    let sigma = Arc::new(sigma_of_functions(&l.ground, fs)?);
    let mut weights = Vec::with_capacity(sigma.num_atoms());
    for atom in sigma.atoms() {
        let band = grid
            .unit_band(atom)
            .ok_or_else(|| ExtensionError::LevelSetNotSeparated(atom.clone()))?;
        let w = rho
            .evaluate(&band)
            .ok_or_else(|| ExtensionError::LevelSetNotSeparated(atom.clone()))?;
        weights.push(w);
    }
    let measure = Measure::new(sigma.clone(), weights, Mode::Sigma)?;
    for (idx, f) in fs.iter().enumerate() {
        let integral = integrate_nonnegative(&measure, f).expect("lattice functions are σ(L)-measurable");
        if integral != i[idx] {
            return Err(ExtensionError::IntegralMismatch { index: idx, integral, value: i[idx].clone() });
        }
    }
    let cross_checked = cross_check(l, i, &measure)?;
    Ok(DaniellStone { measure, slabs: mu.len() - 1, cells: grid.cells, cross_checked })
}

/// Compares against indicator reconstruction when every atom indicator of
/// `σ(L)` is listed. Returns whether the comparison was possible.
fn cross_check(l: &WeakIntegrationLattice, i: &[Rational], p: &Measure) -> Result<bool, ExtensionError> {
    let alg = p.algebra();
    let index = l.index();
    let mut table = Vec::new();
    for (f, v) in l.functions().iter().zip(i) {
        if f.iter().all(in_unit_interval) {
            if let Some(s) = SimpleFunction::from_point_values(alg, f).map_err(ReconstructError::from)? {
                table.push((s, v.clone()));
            }
        }
    }
    let n = l.ground.len();
    for atom in alg.atoms() {
        let ind: Vec<Rational> = (0..n).map(|x| if atom.contains(x) { Rational::one() } else { Rational::zero() }).collect();
        if !index.contains_key(ind.as_slice()) {
            return Ok(false);
        }
    }
    // every member indicator is a sum of atom indicators, so extend the table
    // additively before reconstructing
    let atom_value: Vec<Rational> = alg
        .atoms()
        .iter()
        .map(|a| {
            let ind: Vec<Rational> = (0..n).map(|x| if a.contains(x) { Rational::one() } else { Rational::zero() }).collect();
            i[index[ind.as_slice()]].clone()
        })
        .collect();
    for (mask, set) in alg.members_with_masks()? {
        let f = SimpleFunction::indicator(alg, &set).map_err(ReconstructError::from)?;
        if table.iter().all(|(g, _)| g != &f) {
            let v = (0..alg.num_atoms()).filter(|a| mask >> a & 1 == 1).map(|a| &atom_value[a]).sum();
            table.push((f, v));
        }
    }
    let functional = Functional::from_table(alg, table)?;
    let direct = reconstruct_measure(&functional, &[])?;
    if &direct != p {
        return Err(ExtensionError::ShortcutDisagrees {
            slab: texts(p.weights()),
            direct: texts(direct.weights()),
        });
    }
    Ok(true)
}

/// `{"points": [...], "functions": [["p/q" per point]...], "values": ["p/q"...]}`,
/// with optional `"scales"` overriding the default `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub points: Vec<String>,
    pub functions: Vec<Vec<String>>,
    pub values: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<String>>,
}

impl LatticeJson {
    pub fn to_lattice(&self) -> Result<(WeakIntegrationLattice, Vec<Rational>), crate::Error> {
        let ground = GroundSet::new(self.points.iter().cloned())?;
        let parse = |v: &[String]| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>();
        let functions = self.functions.iter().map(|f| parse(f)).collect::<Result<Vec<_>, _>>()?;
        let mut lattice = WeakIntegrationLattice::new(&ground, functions)?;
        if let Some(scales) = &self.scales {
            lattice = lattice.with_scales(parse(scales)?);
        }
        Ok((lattice, parse(&self.values)?))
    }
}

/// `{"semiring": <set instance>, "values": ["p/q" per member]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiringJson {
    pub semiring: SetInstance,
    pub values: Vec<String>,
}

impl SemiringJson {
    pub fn to_semiring(&self) -> Result<(SemiRing, BTreeMap<Subset, Rational>), crate::Error> {
        let ground = self.semiring.ground()?;
        if self.semiring.family.len() != self.values.len() {
            return Err(FormatError::Schema {
                path: "values".into(),
                message: format!("{} values for {} members", self.values.len(), self.semiring.family.len()),
            }
            .into());
        }
        let mut mu = BTreeMap::new();
        for (i, (m, v)) in self.semiring.family.iter().zip(&self.values).enumerate() {
            let set = ground.subset(m.iter().copied())?;
            let v = parse_rational(v)?;
            if mu.insert(set, v.clone()).is_some_and(|old| old != v) {
                return Err(FormatError::Schema {
                    path: format!("values[{i}]"),
                    message: "member listed twice with different values".into(),
                }
                .into());
            }
        }
        let family = SubsetFamily::new(&ground, mu.keys().cloned())?;
        let s = SemiRing::new(family).map_err(|v| FormatError::Schema {
            path: "semiring".into(),
            message: format!("not a semi-ring: {v:?}"),
        })?;
        Ok((s, mu))
    }
}

/// Report witness for a failed reconstruction, as JSON.
pub fn reconstruct_witness(e: &ReconstructError) -> serde_json::Value {
    match e {
        ReconstructError::Additivity { a, b, union_value, sum_value } => json!({
            "kind": "additivity", "a": a, "b": b,
            "union_value": format_rational(union_value), "sum_value": format_rational(sum_value),
        }),
        ReconstructError::Decomposition { set, parts, value, sum } => json!({
            "kind": "decomposition", "set": set, "parts": parts,
            "value": format_rational(value), "sum": format_rational(sum),
        }),
        other => json!({"kind": "error", "message": other.to_string()}),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::dirac;
    use crate::rational::{int, ratio};

    fn pw(n: usize) -> (GroundSet, Arc<Algebra>) {
        let g = GroundSet::range(n);
        let a = Arc::new(Algebra::powerset(&g));
        (g, a)
    }

    fn measure(a: &Arc<Algebra>, w: &[(i64, i64)], mode: Mode) -> Measure {
        Measure::new(a.clone(), w.iter().map(|(p, q)| ratio(*p, *q)).collect(), mode).unwrap()
    }

    #[test]
    fn charge_from_integration_functional() {
        let (_, a) = pw(3);
        let p = Measure::uniform(a.clone(), Mode::Sigma);
        let got = reconstruct_charge(&Functional::integration(&p), &[]).unwrap();
        assert_eq!(got, p);
        assert_eq!(got.mode(), Mode::FinitelyAdditive);
    }

    #[test]
    fn evaluation_functional_gives_dirac() {
        let (_, a) = pw(3);
        let f = Functional::from_fn(&a, |s| s.value_at(1).clone());
        let got = reconstruct_charge(&f, &[]).unwrap();
        assert_eq!(got.weights(), &[int(0), int(1), int(0)]);
        assert_eq!(got, dirac(1, &a, Mode::Sigma).unwrap());
    }

    #[test]
    fn complement_violation_is_reported() {
        let (g, a) = pw(2);
        let set = g.subset([0]).unwrap();
        let set2 = set.clone();
        let f = Functional::from_fn(&a, move |s| {
            if s == &SimpleFunction::indicator(s.algebra(), &set2).unwrap() {
                int(1)
            } else {
                s.values().iter().sum::<Rational>() / int(2)
            }
        });
        let err = reconstruct_charge(&f, &[]).unwrap_err();
        match err {
            ReconstructError::Additivity { a, b, union_value, sum_value } => {
                assert!(a == set || b == set);
                assert_eq!(union_value, int(1));
                assert_eq!(sum_value, ratio(3, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn measure_from_table() {
        let (g, a) = pw(3);
        let p = measure(&a, &[(1, 2), (1, 4), (1, 4)], Mode::Sigma);
        let table = g
            .powerset()
            .into_iter()
            .map(|s| {
                let f = SimpleFunction::indicator(&a, &s).unwrap();
                let v = j_integral(&p, &f).unwrap();
                (f, v)
            })
            .collect();
        let f = Functional::from_table(&a, table).unwrap();
        let got = reconstruct_measure(&f, &[]).unwrap();
        assert_eq!(got.weights(), &[ratio(1, 2), ratio(1, 4), ratio(1, 4)]);
        assert_eq!(got.mode(), Mode::Sigma);
        let d = dirac(2, &a, Mode::Sigma).unwrap();
        assert_eq!(reconstruct_measure(&Functional::integration(&d), &[]).unwrap(), d);
    }

    #[test]
    fn three_term_violation() {
        let (g, a) = pw(3);
        let full = g.full_set();
        let f = Functional::from_fn(&a, move |s| {
            let base: Rational = s.values().iter().sum::<Rational>() / int(4);
            if s.values().iter().all(|v| v.is_one()) {
                int(1)
            } else {
                base
            }
        });
        match reconstruct_measure(&f, &[]).unwrap_err() {
            ReconstructError::Decomposition { set, parts, value, sum } => {
                assert_eq!(set, full);
                assert_eq!(parts.len(), 3);
                assert_eq!(value, int(1));
                assert_eq!(sum, ratio(3, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn test_family_mismatch() {
        let (g, a) = pw(2);
        let p = Measure::uniform(a.clone(), Mode::Sigma);
        let half = SimpleFunction::constant(&a, ratio(1, 2)).unwrap();
        let f = Functional::from_fn(&a, move |s| {
            if s.values() == [ratio(1, 2), ratio(1, 2)] {
                ratio(1, 3)
            } else {
                j_integral(&p, s).unwrap()
            }
        });
        let _ = g;
        assert!(matches!(
            reconstruct_charge(&f, &[half]).unwrap_err(),
            ReconstructError::TestFamily { .. }
        ));
    }

    #[test]
    fn lattice_examples() {
        let g = GroundSet::range(2);
        let alg = Algebra::powerset(&g);
        let grid = WeakIntegrationLattice::grid(&alg, 2);
        assert_eq!(grid.functions().len(), 9);
        assert!(check_weak_lattice(&grid).valid);
        let ones = WeakIntegrationLattice::new(&g, vec![vec![int(1), int(1)]]).unwrap();
        assert!(check_weak_lattice(&ones).valid);
        let bad = WeakIntegrationLattice::new(&g, vec![vec![int(1), int(1)], vec![ratio(1, 2), int(1)]]).unwrap();
        let r = check_weak_lattice(&bad);
        assert!(!r.valid);
        assert_eq!(
            r.violation,
            Some(LatticeViolation::Gap { f: 0, g: 1, function: vec!["1/2".into(), "0/1".into()] })
        );
        let no_one = WeakIntegrationLattice::new(&g, vec![vec![ratio(1, 2), int(1)]]).unwrap();
        assert_eq!(check_weak_lattice(&no_one).violation, Some(LatticeViolation::MissingOne));
        let scaled = grid.clone().with_scales(vec![ratio(1, 2)]);
        assert!(matches!(check_weak_lattice(&scaled).violation, Some(LatticeViolation::Scale { .. })));
    }

    fn s1(l: &[(i64, i64)], u: &[(i64, i64)]) -> Slab {
        Slab::new(l.iter().map(|(p, q)| ratio(*p, *q)).collect(), u.iter().map(|(p, q)| ratio(*p, *q)).collect()).unwrap()
    }

    #[test]
    fn slab_examples() {
        let unit = s1(&[(0, 1)], &[(1, 1)]);
        assert_eq!(slab_intersect(&unit, &unit), unit);
        let f = s1(&[(0, 1)], &[(1, 2)]);
        let fg = s1(&[(1, 2)], &[(1, 1)]);
        assert!(slab_intersect(&f, &fg).is_empty());
        assert_eq!(slab_intersect(&unit, &fg), fg);
        assert!(slab_subtract(&unit, &unit).is_empty());
        assert_eq!(slab_subtract(&unit, &Slab::empty(1)), vec![unit.clone()]);
        let mid = s1(&[(1, 4)], &[(1, 2)]);
        assert_eq!(slab_subtract(&unit, &mid), vec![s1(&[(0, 1)], &[(1, 4)]), s1(&[(1, 2)], &[(1, 1)])]);
        for (a, b) in [(&unit, &mid), (&f, &fg), (&mid, &unit), (&unit, &unit)] {
            assert!(check_slab_pair(a, b));
        }
    }

    fn singleton_semiring(n: usize) -> SemiRing {
        let g = GroundSet::range(n);
        let mut sets = vec![g.empty_set()];
        sets.extend((0..n).map(|i| Subset::singleton(n, i)));
        SemiRing::new(SubsetFamily::new(&g, sets).unwrap()).unwrap()
    }

    #[test]
    fn caratheodory_examples() {
        let s = singleton_semiring(3);
        let mu: BTreeMap<Subset, Rational> = s
            .members()
            .iter()
            .map(|m| (m.clone(), if m.is_empty() { int(0) } else { ratio(1, 3) }))
            .collect();
        let ext = caratheodory_extend(&s, &mu).unwrap();
        let (_, pw3) = pw(3);
        assert_eq!(ext.to_probability(Mode::Sigma).unwrap(), Measure::uniform(pw3, Mode::Sigma));

        let g = GroundSet::range(2);
        let alg = Algebra::powerset(&g);
        let p = Measure::new(Arc::new(alg.clone()), vec![ratio(1, 4), ratio(3, 4)], Mode::Sigma).unwrap();
        let sr = SemiRing::from(alg);
        let mu: BTreeMap<Subset, Rational> =
            sr.members().iter().map(|m| (m.clone(), p.evaluate(m).unwrap())).collect();
        assert_eq!(caratheodory_extend(&sr, &mu).unwrap().to_probability(Mode::Sigma).unwrap(), p);

        let mut bad = mu.clone();
        bad.insert(g.subset([0]).unwrap(), ratio(1, 2));
        bad.insert(g.subset([1]).unwrap(), ratio(3, 4));
        bad.insert(g.full_set(), int(1));
        match caratheodory_extend(&sr, &bad).unwrap_err() {
            ExtensionError::Additivity { set, parts, value, sum } => {
                assert_eq!(set, g.full_set());
                assert_eq!(parts, vec![g.subset([0]).unwrap(), g.subset([1]).unwrap()]);
                assert_eq!(value, int(1));
                assert_eq!(sum, ratio(5, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn caratheodory_reports_mass() {
        let s = singleton_semiring(2);
        let mu: BTreeMap<Subset, Rational> = s
            .members()
            .iter()
            .map(|m| (m.clone(), if m.is_empty() { int(0) } else { int(1) }))
            .collect();
        let ext = caratheodory_extend(&s, &mu).unwrap();
        assert_eq!(ext.mass, int(2));
        assert!(ext.to_probability(Mode::Sigma).is_err());
        assert_eq!(ext.normalized(Mode::Sigma).unwrap().weights(), &[ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn caratheodory_requires_cover() {
        let g = GroundSet::range(2);
        let fam = SubsetFamily::new(&g, vec![g.empty_set(), g.subset([0]).unwrap()]).unwrap();
        let s = SemiRing::new(fam).unwrap();
        let mu = s.members().iter().map(|m| (m.clone(), int(0))).collect();
        assert_eq!(caratheodory_extend(&s, &mu).unwrap_err(), ExtensionError::NotCovering(g.subset([1]).unwrap()));
    }

    #[test]
    fn daniell_stone_indicator_lattice() {
        let g = GroundSet::range(2);
        let alg = Arc::new(Algebra::powerset(&g));
        let p = Measure::new(alg.clone(), vec![ratio(1, 3), ratio(2, 3)], Mode::Sigma).unwrap();
        let l = WeakIntegrationLattice::grid(&alg, 1);
        let i: Vec<Rational> = l.functions().iter().map(|f| integrate_nonnegative(&p, f).unwrap()).collect();
        let ds = daniell_stone(&l, &i).unwrap();
        assert_eq!(ds.measure, p);
        assert!(ds.cross_checked);
    }

    #[test]
    fn daniell_stone_constant_lattice() {
        let g = GroundSet::range(3);
        let l = WeakIntegrationLattice::new(&g, vec![vec![int(1); 3]]).unwrap();
        let ds = daniell_stone(&l, &[int(1)]).unwrap();
        assert_eq!(ds.measure.algebra().num_atoms(), 1);
        assert_eq!(ds.measure.weights(), &[int(1)]);
    }

    #[test]
    fn daniell_stone_lipschitz_dirac() {
        // discrete metric on three points: every [0,1]-function is 1-Lipschitz
        let g = GroundSet::range(3);
        let alg = Arc::new(Algebra::powerset(&g));
        let l = WeakIntegrationLattice::grid(&alg, 2);
        let i: Vec<Rational> = l.functions().iter().map(|f| f[0].clone()).collect();
        let ds = daniell_stone(&l, &i).unwrap();
        assert_eq!(ds.measure, dirac(0, &alg, Mode::Sigma).unwrap());
        assert_eq!(ds.measure.algebra().num_atoms(), 3);
    }

    #[test]
    fn daniell_stone_rejects_bad_operator() {
        let g = GroundSet::range(2);
        let alg = Arc::new(Algebra::powerset(&g));
        let l = WeakIntegrationLattice::grid(&alg, 1);
        let mut i: Vec<Rational> = l.functions().iter().map(|f| f[0].clone()).collect();
        let k = l.functions().iter().position(|f| f == &vec![int(1), int(0)]).unwrap();
        i[k] = ratio(1, 2);
        assert!(matches!(daniell_stone(&l, &i), Err(ExtensionError::OperatorAdditivity { .. })));
    }
}
