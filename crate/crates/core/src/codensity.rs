//! Arrows `X → GA`, cones over finite arrow families, and the round trip
//! between measures and cones.
//!
//! A cone is only ever evaluated on hat arrows and finite collapses, so a
//! finite family closed under those is enough to recover the measure.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::gen;
use crate::integrate::{j_integral, SimpleFunction};
use crate::measure::{Measure, Mode};
use crate::monad::SimplexPoint;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::report::{Check, Report, SuiteConfig};
use crate::represent::{reconstruct_charge, reconstruct_measure, Functional, ReconstructError};
use crate::setalg::{Algebra, GroundSet, SetError, SetInstance, Subset};

/// Default bound on target sizes when enumerating triangles.
pub const DEFAULT_TRIANGLE_BOUND: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodensityError {
    #[error("component {label} is not constant on the atom of point {point}")]
    NotMeasurable { label: usize, point: usize },
    #[error("row of point {point} is not a probability vector")]
    NotSimplex { point: usize },
    #[error("arrow and measure have different sources")]
    AlgebraMismatch,
    #[error("cone family lacks the hat arrow of {0}")]
    MissingHat(Subset),
    #[error("cone legs do not commute: {0}")]
    Naturality(Triangle),
    #[error("reconstructed measure does not reproduce the leg of arrow {arrow}")]
    LegMismatch { arrow: usize },
    #[error("expected {expected} legs, found {found}")]
    LegCount { expected: usize, found: usize },
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Set(#[from] SetError),
}

impl CodensityError {
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            CodensityError::NotMeasurable { .. }
                | CodensityError::NotSimplex { .. }
                | CodensityError::AlgebraMismatch
                | CodensityError::MissingHat(_)
                | CodensityError::LegCount { .. }
                | CodensityError::Set(_)
        )
    }
}

/// A measurable map `X → GA`, stored as one simplex row per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    source: Arc<Algebra>,
    targets: GroundSet,
    rows: Vec<Vec<Rational>>,
}

impl Arrow {
    /// Checks that rows are probability vectors and every component is
    /// constant on atoms.
    pub fn new(source: &Arc<Algebra>, targets: &GroundSet, rows: Vec<Vec<Rational>>) -> Result<Self, CodensityError> {
        let n = source.ground().len();
        if rows.len() != n {
            return Err(SetError::MapLength { expected: n, found: rows.len() }.into());
        }
        for (x, row) in rows.iter().enumerate() {
            let ok = row.len() == targets.len()
                && row.iter().all(|v| !v.is_negative())
                && row.iter().sum::<Rational>().is_one();
            if !ok {
                return Err(CodensityError::NotSimplex { point: x });
            }
        }
        for (x, row) in rows.iter().enumerate() {
            let rep = source.atoms()[source.atom_of(x)].first().expect("atoms are nonempty");
            if let Some(label) = (0..targets.len()).find(|a| row[*a] != rows[rep][*a]) {
                return Err(CodensityError::NotMeasurable { label, point: x });
            }
        }
        Ok(Arrow { source: source.clone(), targets: targets.clone(), rows })
    }

    /// Builds the arrow from its components `f_a`, given one value per atom.
    pub fn from_atom_rows(source: &Arc<Algebra>, targets: &GroundSet, atom_rows: &[Vec<Rational>]) -> Result<Self, CodensityError> {
        let rows = (0..source.ground().len()).map(|x| atom_rows[source.atom_of(x)].clone()).collect();
        Arrow::new(source, targets, rows)
    }

    /// The constant arrow at a simplex point.
    pub fn constant(source: &Arc<Algebra>, p: &SimplexPoint) -> Self {
        Arrow {
            source: source.clone(),
            targets: p.index_set().clone(),
            rows: vec![p.weights().to_vec(); source.ground().len()],
        }
    }

    /// The unique arrow into `G1`.
    pub fn terminal(source: &Arc<Algebra>) -> Self {
        Arrow::constant(source, &SimplexPoint::vertex(&GroundSet::range(1), 0))
    }

    pub fn source(&self) -> &Arc<Algebra> {
        &self.source
    }

    pub fn targets(&self) -> &GroundSet {
        &self.targets
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> SimplexPoint {
        SimplexPoint::new(&self.targets, self.rows[x].clone()).expect("rows are validated")
    }

    /// The component `f_a = ev_a ∘ f`.
    pub fn component(&self, a: usize) -> SimpleFunction {
        let values = self
            .source
            .atoms()
            .iter()
            .map(|atom| self.rows[atom.first().expect("nonempty")][a].clone())
            .collect();
        SimpleFunction::from_atom_values(&self.source, values).expect("components lie in [0,1]")
    }

    fn atom_rows(&self) -> Vec<&[Rational]> {
        self.source
            .atoms()
            .iter()
            .map(|a| self.rows[a.first().expect("nonempty")].as_slice())
            .collect()
    }

    pub fn to_json(&self) -> ArrowJson {
        ArrowJson {
            targets: self.targets.labels().to_vec(),
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(x, r)| (self.source.ground().label(x).to_string(), r.iter().map(format_rational).collect()))
                .collect(),
        }
    }
}

/// `f̂ : x ↦ (1 - f(x), f(x))`.
pub fn hat(f: &SimpleFunction) -> Arrow {
    let rows = f
        .point_values()
        .into_iter()
        .map(|v| vec![Rational::one() - &v, v])
        .collect();
    Arrow { source: f.algebra().clone(), targets: GroundSet::range(2), rows }
}

/// Legs of a cone over a finite arrow family. Legs are raw vectors so that
/// deliberately broken cones can be represented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub family: Vec<Arrow>,
    pub legs: Vec<Vec<Rational>>,
}

impl Cone {
    pub fn new(family: Vec<Arrow>, legs: Vec<Vec<Rational>>) -> Result<Self, CodensityError> {
        if family.len() != legs.len() {
            return Err(CodensityError::LegCount { expected: family.len(), found: legs.len() });
        }
        Ok(Cone { family, legs })
    }

    pub fn leg_of(&self, arrow: &Arrow) -> Option<&[Rational]> {
        self.family.iter().position(|f| f == arrow).map(|i| self.legs[i].as_slice())
    }

    pub fn to_json(&self) -> ConeJson {
        ConeJson {
            legs: self
                .family
                .iter()
                .zip(&self.legs)
                .map(|(f, l)| (f.to_json(), l.iter().map(format_rational).collect()))
                .collect(),
        }
    }
}

/// `p_f(P) = (∫ f_a dP)_a` for every arrow of the family.
pub fn cone_of_measure(p: &Measure, family: &[Arrow]) -> Result<Cone, CodensityError> {
    let mut legs = Vec::with_capacity(family.len());
    for f in family {
        if f.source != *p.algebra() {
            return Err(CodensityError::AlgebraMismatch);
        }
        let leg = f
            .atom_rows()
            .iter()
            .zip(p.weights())
            .fold(vec![Rational::zero(); f.targets.len()], |mut acc, (row, w)| {
                for (a, v) in acc.iter_mut().zip(row.iter()) {
                    *a += v * w;
                }
                acc
            });
        debug_assert!(leg
            .iter()
            .enumerate()
            .all(|(a, v)| v == &j_integral(p, &f.component(a)).expect("same algebra")));
        legs.push(leg);
    }
    Ok(Cone { family: family.to_vec(), legs })
}

/// A triangle `g = G(s) ∘ f` inside a family, with the legs it compares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triangle {
    pub f: usize,
    pub g: usize,
    /// `s` as the image of each label of `f`'s target.
    pub s: Vec<usize>,
    pub expected: Vec<String>,
    pub found: Vec<String>,
}

impl std::fmt::Display for Triangle {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            fm,
            "arrow {} = G{:?} ∘ arrow {}, but leg {:?} != pushed leg {:?}",
            self.g, self.s, self.f, self.expected, self.found
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Naturality {
    pub holds: bool,
    pub triangles: usize,
    pub witness: Option<Triangle>,
}

/// Integer forms of the atom rows, all scaled by one common denominator.
fn scaled_rows(family: &[Arrow]) -> Vec<Vec<Vec<i64>>> {
    let mut l = num_bigint::BigInt::one();
    for f in family {
        for row in f.atom_rows() {
            for v in row {
                l = l.lcm(v.denom());
            }
        }
    }
    let scale = Rational::from_integer(l);
    family
        .iter()
        .map(|f| {
            f.atom_rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| (v * &scale).to_integer().to_i64().expect("denominators are small"))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Every `s : A_f → A_g` with `g(x) = G(s)(f(x))` on all atoms.
fn triangle_maps(f: &[Vec<i64>], g: &[Vec<i64>], nf: usize, ng: usize) -> Vec<Vec<usize>> {
    fn go(
        a: usize,
        f: &[Vec<i64>],
        g: &[Vec<i64>],
        nf: usize,
        ng: usize,
        partial: &mut [Vec<i64>],
        s: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if a == nf {
            if partial.iter().zip(g).all(|(p, row)| p == row) {
                out.push(s.clone());
            }
            return;
        }
        for b in 0..ng {
            if (0..f.len()).all(|r| partial[r][b] + f[r][a] <= g[r][b]) {
                for r in 0..f.len() {
                    partial[r][b] += f[r][a];
                }
                s.push(b);
                go(a + 1, f, g, nf, ng, partial, s, out);
                s.pop();
                for r in 0..f.len() {
                    partial[r][b] -= f[r][a];
                }
            }
        }
    }
    let mut partial = vec![vec![0i64; ng]; f.len()];
    let mut out = Vec::new();
    go(0, f, g, nf, ng, &mut partial, &mut Vec::with_capacity(nf), &mut out);
    out
}

/// Checks `legs(g) = G(s)(legs(f))` on every triangle of the family whose
/// arrows have at most `bound` target labels. Triangles are visited by
/// ascending target size of `g`, then by `f`, then by `s`.
pub fn check_cone_naturality(c: &Cone, bound: usize) -> Naturality {
    let scaled = scaled_rows(&c.family);
    let mut order: Vec<usize> = (0..c.family.len()).filter(|i| c.family[*i].targets.len() <= bound).collect();
    order.sort_by_key(|i| (c.family[*i].targets.len(), *i));
    let mut triangles = 0;
    for &gi in &order {
        let g = &c.family[gi];
        for fi in 0..c.family.len() {
            let f = &c.family[fi];
            if f.targets.len() > bound || f.source != g.source {
                continue;
            }
            for s in triangle_maps(&scaled[fi], &scaled[gi], f.targets.len(), g.targets.len()) {
                triangles += 1;
                let mut pushed = vec![Rational::zero(); g.targets.len()];
                for (a, b) in s.iter().enumerate() {
                    pushed[*b] += &c.legs[fi][a];
                }
                if pushed != c.legs[gi] {
                    let witness = Triangle {
                        f: fi,
                        g: gi,
                        s,
                        expected: c.legs[gi].iter().map(format_rational).collect(),
                        found: pushed.iter().map(format_rational).collect(),
                    };
                    return Naturality { holds: false, triangles, witness: Some(witness) };
                }
            }
        }
    }
    Naturality { holds: true, triangles, witness: None }
}

/// Recovers the measure with `P(A) = legs(1̂_A)_1`, after checking that the
/// legs commute with every triangle (which covers `I(1) = 1` through the
/// collapse to `G1` and finite additivity through the collapses of the
/// three-label arrows). The result is checked to induce the cone back.
pub fn reconstruct_from_cone(c: &Cone, mode: Mode) -> Result<Measure, CodensityError> {
    let nat = check_cone_naturality(c, DEFAULT_TRIANGLE_BOUND);
    if let Some(t) = nat.witness {
        return Err(CodensityError::Naturality(t));
    }
    let source = c.family.first().ok_or(CodensityError::AlgebraMismatch)?.source.clone();
    let mut table = Vec::new();
    for (_, set) in source.members_with_masks()? {
        let ind = SimpleFunction::indicator(&source, &set).map_err(ReconstructError::from)?;
        let leg = c.leg_of(&hat(&ind)).ok_or_else(|| CodensityError::MissingHat(set.clone()))?;
        table.push((ind, leg[1].clone()));
    }
    let functional = Functional::from_table(&source, table)?;
    let p = match mode {
        Mode::Sigma => reconstruct_measure(&functional, &[])?,
        Mode::FinitelyAdditive => reconstruct_charge(&functional, &[])?,
    };
    let back = cone_of_measure(&p, &c.family)?;
    if let Some(arrow) = (0..c.legs.len()).find(|i| back.legs[*i] != c.legs[*i]) {
        return Err(CodensityError::LegMismatch { arrow });
    }
    Ok(p)
}

/// The family used by the suites: the arrow into `G1`, the hat of every
/// member indicator, the three-label arrows `(1 - 1_{α∪B}, 1_α, 1_B)` for
/// each atom `α` and member `B` disjoint from it, and `extra` random arrows
/// with two or three labels together with the hats of their components.
pub fn standard_family(x: &Arc<Algebra>, rng: &mut impl Rng, extra: usize, max_den: u32) -> Vec<Arrow> {
    let mut family = vec![Arrow::terminal(x)];
    let members = x.members_with_masks().expect("small algebra");
    for (_, set) in &members {
        family.push(hat(&SimpleFunction::indicator(x, set).expect("member")));
    }
    let k = x.num_atoms();
    let three = GroundSet::range(3);
    let ind = |m: u64| -> Vec<Rational> {
        (0..k).map(|i| if m >> i & 1 == 1 { Rational::one() } else { Rational::zero() }).collect()
    };
    for alpha in 0..k {
        for (b, _) in &members {
            if b >> alpha & 1 == 1 {
                continue;
            }
            let (ia, ib) = (ind(1 << alpha), ind(*b));
            let rows: Vec<Vec<Rational>> = (0..k)
                .map(|i| vec![Rational::one() - &ia[i] - &ib[i], ia[i].clone(), ib[i].clone()])
                .collect();
            family.push(Arrow::from_atom_rows(x, &three, &rows).expect("valid rows"));
        }
    }
    for _ in 0..extra {
        let labels = rng.gen_range(2..=3);
        let targets = GroundSet::range(labels);
        let rows: Vec<Vec<Rational>> = (0..k).map(|_| gen::weights(rng, labels, max_den)).collect();
        let f = Arrow::from_atom_rows(x, &targets, &rows).expect("valid rows");
        for a in 0..labels {
            let h = hat(&f.component(a));
            if !family.contains(&h) {
                family.push(h);
            }
        }
        family.push(f);
    }
    family
}

const SUITE_CODENSITY: u64 = 2;
const SUITE_SMALL_INDEX: u64 = 3;

fn weights_json(p: &Measure) -> serde_json::Value {
    json!(p.weights().iter().map(format_rational).collect::<Vec<_>>())
}

/// Round trips on random measures over `x`: measure → cone → measure,
/// cone → measure → cone, naturality of every generated cone, and
/// uniqueness of the mediating measure.
pub fn verify_codensity_bijection(x: &Arc<Algebra>, cfg: &SuiteConfig) -> Report {
    let mut checks = BijectionChecks::new();
    for case in 0..cfg.cases as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_CODENSITY, case);
        checks.run_case(&mut rng, x, cfg, case);
    }
    checks.into_report(cfg)
}

/// Like [`verify_codensity_bijection`] with a fresh algebra per case.
pub fn codensity_suite(cfg: &SuiteConfig) -> Report {
    let mut checks = BijectionChecks::new();
    for case in 0..cfg.cases as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_CODENSITY + 100, case);
        let x = gen::sized_algebra(&mut rng, 1, cfg.max_ground_size, 1);
        checks.run_case(&mut rng, &x, cfg, case);
    }
    checks.into_report(cfg)
}

struct BijectionChecks {
    round_trip: Check,
    naturality: Check,
    triangles: Check,
    cone_round_trip: Check,
    uniqueness: Check,
}

impl BijectionChecks {
    fn new() -> Self {
        BijectionChecks {
            round_trip: Check::new("measure_cone_measure"),
            naturality: Check::new("cone_naturality"),
            triangles: Check::new("triangles"),
            cone_round_trip: Check::new("cone_measure_cone"),
            uniqueness: Check::new("mediating_uniqueness"),
        }
    }

    fn run_case(&mut self, rng: &mut impl Rng, x: &Arc<Algebra>, cfg: &SuiteConfig, case: u64) {
        let d = cfg.max_denominator;
        let p = gen::measure(rng, x, d, cfg.mode, case);
        let family = standard_family(x, rng, 2, d);
        let cone = cone_of_measure(&p, &family).expect("same source");
        let nat = check_cone_naturality(&cone, DEFAULT_TRIANGLE_BOUND);
        for _ in 0..nat.triangles {
            self.triangles.record(true, || json!(null));
        }
        self.naturality.record(nat.holds, || json!({"weights": weights_json(&p), "triangle": nat.witness}));
        match reconstruct_from_cone(&cone, cfg.mode) {
            Ok(q) => {
                self.round_trip.record(q == p, || json!({"P": weights_json(&p), "got": weights_json(&q)}));
                let again = cone_of_measure(&q, &family).expect("same source");
                self.cone_round_trip.record(again == cone, || json!({"P": weights_json(&p)}));
            }
            Err(e) => {
                self.round_trip.record(false, || json!({"P": weights_json(&p), "error": e.to_string()}));
                self.cone_round_trip.record(false, || json!({"P": weights_json(&p), "error": e.to_string()}));
            }
        }
        // a second measure (equal to P every fourth case)
        let q = if case % 4 == 3 { p.clone() } else { gen::measure(rng, x, d, cfg.mode, 2) };
        let cq = cone_of_measure(&q, &family).expect("same source");
        let hats_agree = (0..x.num_atoms()).all(|a| {
            let ind = SimpleFunction::indicator(x, &x.atoms()[a]).expect("atom");
            cq.leg_of(&hat(&ind)) == cone.leg_of(&hat(&ind))
        });
        let ok = (hats_agree == (q == p)) && ((cq == cone) == (q == p));
        self.uniqueness.record(ok, || json!({"P": weights_json(&p), "Q": weights_json(&q)}));
    }

    fn into_report(self, cfg: &SuiteConfig) -> Report {
        Report::with_checks(
            format!("codensity[{}]", cfg.mode),
            vec![self.round_trip, self.naturality, self.triangles, self.cone_round_trip, self.uniqueness],
        )
        .note("the countable collapse through GN is instantiated with finite index sets")
    }
}

/// Whether legs on arrows with at most `k` labels determine the measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Determination {
    pub determined: bool,
    pub rank: usize,
    pub atoms: usize,
    /// Two distinct measures with identical legs, when not determined.
    pub witness: Option<(Vec<String>, Vec<String>)>,
}

/// Exact rank of `rows`, and a nonzero kernel vector when the rank is less
/// than the column count.
fn rank_and_kernel(rows: &[Vec<Rational>], cols: usize) -> (usize, Option<Vec<Rational>>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|i| !m[*i][c].is_zero()) else { continue };
        m.swap(r, p);
        let lead = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v /= &lead;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (v, pv) in m[i].iter_mut().zip(&pivot_row) {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if r == cols {
        return (r, None);
    }
    let free = (0..cols).find(|c| !pivots.contains(c)).expect("rank below column count");
    let mut v = vec![Rational::zero(); cols];
    v[free] = Rational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[row][free].clone();
    }
    (r, Some(v))
}

/// Decides whether legs on the arrows of `family` with at most `k` target
/// labels determine the atom weights. Legs are linear in the weights, so this
/// is a rank condition on the component vectors together with the
/// normalisation row.
pub fn determination(x: &Arc<Algebra>, family: &[Arrow], k: usize) -> Determination {
    let atoms = x.num_atoms();
    let mut rows = vec![vec![Rational::one(); atoms]];
    for f in family.iter().filter(|f| f.targets.len() <= k) {
        let ar = f.atom_rows();
        for a in 0..f.targets.len() {
            rows.push(ar.iter().map(|r| r[a].clone()).collect());
        }
    }
    let (rank, kernel) = rank_and_kernel(&rows, atoms);
    let witness = kernel.map(|v| {
        // uniform ± a small multiple of the kernel vector stays a probability
        let u = Rational::new(1.into(), (atoms as i64).into());
        let max = v.iter().map(|c| c.abs()).max().expect("nonempty");
        let eps = &u / (max * Rational::from_integer(2.into()));
        let p: Vec<Rational> = v.iter().map(|c| &u + &eps * c).collect();
        let q: Vec<Rational> = v.iter().map(|c| &u - &eps * c).collect();
        (p.iter().map(format_rational).collect(), q.iter().map(format_rational).collect())
    });
    Determination { determined: rank == atoms, rank, atoms, witness }
}

/// Runs the bijection restricted to arrows with at most `k` labels, and
/// checks determination against the expectation (determined iff `k ≥ 2`).
/// Algebras are drawn with at least two atoms so that `k = 1` is informative.
pub fn small_index_sufficiency(k: usize, cfg: &SuiteConfig) -> Report {
    let mut expectation = Check::new("determination_matches_expectation");
    let mut round_trip = Check::new("restricted_round_trip");
    let mut determined_cases = 0u64;
    for case in 0..cfg.cases as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_SMALL_INDEX, case);
        let x = gen::sized_algebra(&mut rng, 2, cfg.max_ground_size.max(2), 2);
        let family = standard_family(&x, &mut rng, 2, cfg.max_denominator);
        let det = determination(&x, &family, k);
        determined_cases += u64::from(det.determined);
        expectation.record(det.determined == (k >= 2), || json!({"atoms": det.atoms, "rank": det.rank, "witness": det.witness}));
        if let Some((p, q)) = &det.witness {
            // the two witnesses must induce the same restricted legs
            let parse = |v: &Vec<String>| -> Vec<Rational> { v.iter().map(|s| parse_rational(s).expect("own output")).collect() };
            let mp = Measure::new(x.clone(), parse(p), cfg.mode).expect("witness is a probability");
            let mq = Measure::new(x.clone(), parse(q), cfg.mode).expect("witness is a probability");
            let small: Vec<Arrow> = family.iter().filter(|f| f.targets.len() <= k).cloned().collect();
            let same = cone_of_measure(&mp, &small).expect("source") == cone_of_measure(&mq, &small).expect("source");
            expectation.record(same && mp != mq, || json!({"witness_pair": [p, q]}));
        }
        if k >= 2 {
            let small: Vec<Arrow> = family.into_iter().filter(|f| f.targets.len() <= k).collect();
            let p = gen::measure(&mut rng, &x, cfg.max_denominator, cfg.mode, case);
            let cone = cone_of_measure(&p, &small).expect("source");
            let ok = matches!(reconstruct_from_cone(&cone, cfg.mode), Ok(q) if q == p);
            round_trip.record(ok, || json!({"P": weights_json(&p)}));
        }
    }
    Report::with_checks(format!("small_index[k={k}]"), vec![expectation, round_trip]).note(format!(
        "determined in {determined_cases} of {} cases",
        cfg.cases
    ))
}

/// `{"targets": [labels], "rows": {point label: ["p/q"...]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowJson {
    pub targets: Vec<String>,
    pub rows: BTreeMap<String, Vec<String>>,
}

impl ArrowJson {
    pub fn to_arrow(&self, source: &Arc<Algebra>) -> Result<Arrow, crate::Error> {
        let targets = GroundSet::with_cap(self.targets.iter().cloned(), usize::MAX)?;
        let ground = source.ground();
        let mut rows = vec![None; ground.len()];
        for (label, row) in &self.rows {
            let x = ground.index_of(label)?;
            let parsed = row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
            rows[x] = Some(parsed);
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(x, r)| {
                r.ok_or_else(|| crate::FormatError::Schema {
                    path: format!("rows.{}", ground.label(x)),
                    message: "missing row".into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Arrow::new(source, &targets, rows)?)
    }
}

/// `{"algebra": <set instance>, "legs": [[<arrow>, ["p/q"...]], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeJson {
    pub legs: Vec<(ArrowJson, Vec<String>)>,
}

impl ConeJson {
    pub fn to_cone(&self, algebra: &SetInstance) -> Result<Cone, crate::Error> {
        let source = Arc::new(algebra.to_algebra()?);
        let mut family = Vec::new();
        let mut legs = Vec::new();
        for (a, l) in &self.legs {
            family.push(a.to_arrow(&source)?);
            legs.push(l.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?);
        }
        Ok(Cone::new(family, legs)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::dirac;
    use crate::rational::{int, ratio};

    fn pw(n: usize) -> Arc<Algebra> {
        Arc::new(Algebra::powerset(&GroundSet::range(n)))
    }

    #[test]
    fn hat_examples() {
        let x = pw(3);
        let one = SimpleFunction::constant(&x, int(1)).unwrap();
        assert!(hat(&one).rows().iter().all(|r| r == &vec![int(0), int(1)]));
        let zero = SimpleFunction::zero(&x);
        assert!(hat(&zero).rows().iter().all(|r| r == &vec![int(1), int(0)]));
        let a = Subset::from_points(3, [1]).unwrap();
        let h = hat(&SimpleFunction::indicator(&x, &a).unwrap());
        assert_eq!(h.rows()[1], vec![int(0), int(1)]);
        assert_eq!(h.rows()[0], vec![int(1), int(0)]);
        assert_eq!(h.component(1), SimpleFunction::indicator(&x, &a).unwrap());
    }

    #[test]
    fn arrow_validation() {
        let g = GroundSet::range(2);
        let coarse = Arc::new(Algebra::trivial(&g));
        let rows = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(
            Arrow::new(&coarse, &g, rows).unwrap_err(),
            CodensityError::NotMeasurable { label: 0, point: 1 }
        );
        let bad = vec![vec![ratio(1, 2), ratio(1, 3)], vec![ratio(1, 2), ratio(1, 2)]];
        assert_eq!(Arrow::new(&pw(2), &g, bad).unwrap_err(), CodensityError::NotSimplex { point: 0 });
    }

    #[test]
    fn cone_examples() {
        let x = pw(3);
        let three = GroundSet::range(3);
        let ident = Arrow::from_atom_rows(
            &x,
            &three,
            &[vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)]],
        )
        .unwrap();
        let u = Measure::uniform(x.clone(), Mode::Sigma);
        let c = cone_of_measure(&u, std::slice::from_ref(&ident)).unwrap();
        assert_eq!(c.legs[0], vec![ratio(1, 3); 3]);
        let d = dirac(2, &x, Mode::Sigma).unwrap();
        assert_eq!(cone_of_measure(&d, std::slice::from_ref(&ident)).unwrap().legs[0], ident.rows()[2]);
        let p = SimplexPoint::new(&three, vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        let k = Arrow::constant(&x, &p);
        assert_eq!(cone_of_measure(&u, std::slice::from_ref(&k)).unwrap().legs[0], p.weights());
        assert_eq!(cone_of_measure(&d, &[k]).unwrap().legs[0], p.weights());
    }

    #[test]
    fn triangle_enumeration() {
        let x = pw(2);
        let a = Subset::from_points(2, [0]).unwrap();
        let h = hat(&SimpleFunction::indicator(&x, &a).unwrap());
        let fam = vec![Arrow::terminal(&x), h.clone()];
        let p = Measure::new(x.clone(), vec![ratio(1, 7), ratio(6, 7)], Mode::Sigma).unwrap();
        let c = cone_of_measure(&p, &fam).unwrap();
        let nat = check_cone_naturality(&c, 3);
        assert!(nat.holds);
        // e = G(!)∘e, e = G(!)∘h, and h = G(id)∘h
        assert_eq!(nat.triangles, 3);
    }

    #[test]
    fn no_triangles_is_vacuous() {
        let x = pw(2);
        let two = GroundSet::range(2);
        let f = Arrow::from_atom_rows(&x, &two, &[vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 3), ratio(2, 3)]]).unwrap();
        let g = Arrow::from_atom_rows(&x, &two, &[vec![ratio(1, 5), ratio(4, 5)], vec![ratio(1, 7), ratio(6, 7)]]).unwrap();
        let c = Cone::new(vec![f, g], vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        // only the identity triangles exist, and the legs are arbitrary
        let nat = check_cone_naturality(&c, 3);
        assert!(nat.holds);
        assert_eq!(nat.triangles, 2);
        let c = Cone::new(vec![], vec![]).unwrap();
        assert_eq!(check_cone_naturality(&c, 3), Naturality { holds: true, triangles: 0, witness: None });
    }

    #[test]
    fn perturbed_cone_fails_at_collapse() {
        let x = pw(3);
        let mut rng = gen::case_rng(0, 0, 0);
        let family = standard_family(&x, &mut rng, 0, 6);
        let p = Measure::new(x.clone(), vec![ratio(1, 7), ratio(2, 7), ratio(4, 7)], Mode::Sigma).unwrap();
        let mut cone = cone_of_measure(&p, &family).unwrap();
        let a = Subset::from_points(3, [0, 2]).unwrap();
        let target = hat(&SimpleFunction::indicator(&x, &a).unwrap());
        let i = cone.family.iter().position(|f| f == &target).unwrap();
        cone.legs[i][1] += ratio(1, 100);
        let nat = check_cone_naturality(&cone, 3);
        let w = nat.witness.unwrap();
        assert_eq!(w.g, 0);
        assert_eq!(w.f, i);
        assert_eq!(w.s, vec![0, 0]);
        assert_eq!(w.found, vec!["101/100".to_string()]);
        assert!(matches!(reconstruct_from_cone(&cone, Mode::Sigma), Err(CodensityError::Naturality(_))));
    }

    #[test]
    fn worked_round_trip() {
        let x = pw(3);
        let mut rng = gen::case_rng(0, 0, 1);
        let family = standard_family(&x, &mut rng, 2, 6);
        let p = Measure::new(x.clone(), vec![ratio(1, 7), ratio(2, 7), ratio(4, 7)], Mode::Sigma).unwrap();
        let cone = cone_of_measure(&p, &family).unwrap();
        let a = Subset::from_points(3, [1, 2]).unwrap();
        assert_eq!(cone.leg_of(&hat(&SimpleFunction::indicator(&x, &a).unwrap())).unwrap()[1], ratio(6, 7));
        assert_eq!(reconstruct_from_cone(&cone, Mode::Sigma).unwrap(), p);
        let d = dirac(1, &x, Mode::Sigma).unwrap();
        assert_eq!(reconstruct_from_cone(&cone_of_measure(&d, &family).unwrap(), Mode::Sigma).unwrap(), d);
    }

    #[test]
    fn determination_by_label_count() {
        let x = pw(3);
        let mut rng = gen::case_rng(0, 0, 2);
        let family = standard_family(&x, &mut rng, 1, 6);
        assert!(determination(&x, &family, 2).determined);
        assert!(determination(&x, &family, 3).determined);
        let d1 = determination(&x, &family, 1);
        assert!(!d1.determined);
        assert_eq!(d1.rank, 1);
        assert!(d1.witness.is_some());
    }

    #[test]
    fn kernel_vector() {
        let rows = vec![vec![int(1), int(1), int(1)], vec![int(1), int(0), int(0)]];
        let (r, k) = rank_and_kernel(&rows, 3);
        assert_eq!(r, 2);
        let k = k.unwrap();
        for row in &rows {
            assert!(row.iter().zip(&k).map(|(a, b)| a * b).sum::<Rational>().is_zero());
        }
    }

    #[test]
    fn json_round_trip() {
        let x = pw(2);
        let mut rng = gen::case_rng(0, 0, 3);
        let family = standard_family(&x, &mut rng, 1, 4);
        let cone = cone_of_measure(&Measure::uniform(x.clone(), Mode::Sigma), &family).unwrap();
        let text = serde_json::to_string(&cone.to_json()).unwrap();
        let back: ConeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_cone(&x.to_instance().unwrap()).unwrap(), cone);
    }

    #[test]
    fn small_suites_pass() {
        let cfg = SuiteConfig::default().with_cases(10).with_size(4);
        assert!(codensity_suite(&cfg).passed());
        for k in 1..=3 {
            let r = small_index_sufficiency(k, &cfg);
            assert!(r.passed(), "{}", r.to_text());
        }
    }
}
