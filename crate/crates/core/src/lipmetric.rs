//! Finite metric spaces and the bounded Lipschitz distance between
//! probability vectors on them.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::gen;
use crate::lp::{maximize, LpError};
use crate::measure::Measure;
use crate::monad::{check_monad_laws, mult, FiniteDist, SimplexPoint};
use crate::rational::{format_rational, parse_rational, ratio, Rational};
use crate::report::{Check, Report, SuiteConfig};
use crate::setalg::{Algebra, GroundSet, SetError};

/// Subset enumeration is offered up to this many labels.
pub const MAX_SUBSET_LABELS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("distance matrix is not {0}×{0}")]
    Shape(usize),
    #[error("d({x},{x}) = {} is not zero", format_rational(.value))]
    Diagonal { x: usize, value: Rational },
    #[error("d({x},{y}) = {} is not positive", format_rational(.value))]
    NotPositive { x: usize, y: usize, value: Rational },
    #[error("d({x},{y}) != d({y},{x})")]
    Asymmetric { x: usize, y: usize },
    #[error("triangle inequality fails: d({x},{z}) > d({x},{y}) + d({y},{z})")]
    Triangle { x: usize, y: usize, z: usize },
    #[error("vector has {found} entries, metric space has {expected} points")]
    Length { expected: usize, found: usize },
    #[error("{0} labels exceed the subset enumeration limit of {MAX_SUBSET_LABELS}")]
    TooManyLabels(usize),
    #[error("linear program failed: {0:?}")]
    Lp(LpError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Format(#[from] crate::FormatError),
}

impl MetricError {
    pub fn is_input_error(&self) -> bool {
        !matches!(self, MetricError::Lp(_))
    }
}

/// A finite metric space with rational distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    points: GroundSet,
    dist: Vec<Vec<Rational>>,
}

impl FiniteMetricSpace {
    pub fn new(points: &GroundSet, dist: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let n = points.len();
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(MetricError::Shape(n));
        }
        for x in 0..n {
            if !dist[x][x].is_zero() {
                return Err(MetricError::Diagonal { x, value: dist[x][x].clone() });
            }
            for y in 0..n {
                if x != y && !dist[x][y].is_positive() {
                    return Err(MetricError::NotPositive { x, y, value: dist[x][y].clone() });
                }
                if dist[x][y] != dist[y][x] {
                    return Err(MetricError::Asymmetric { x, y });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if dist[x][z] > &dist[x][y] + &dist[y][z] {
                        return Err(MetricError::Triangle { x, y, z });
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { points: points.clone(), dist })
    }

    /// All off-diagonal distances equal to one.
    pub fn discrete(points: &GroundSet) -> Self {
        let n = points.len();
        let dist = (0..n)
            .map(|x| (0..n).map(|y| if x == y { Rational::zero() } else { Rational::one() }).collect())
            .collect();
        FiniteMetricSpace { points: points.clone(), dist }
    }

    pub fn points(&self) -> &GroundSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dist(&self, x: usize, y: usize) -> &Rational {
        &self.dist[x][y]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &FiniteMetricSpace) -> bool {
        self.dist.iter().flatten().zip(other.dist.iter().flatten()).all(|(a, b)| a <= b)
    }

    pub fn to_json(&self) -> MetricJson {
        MetricJson {
            points: self.points.labels().to_vec(),
            dist: self.dist.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        }
    }
}

/// `{"points": [...], "dist": [["p/q"...]...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricJson {
    pub points: Vec<String>,
    pub dist: Vec<Vec<String>>,
}

impl MetricJson {
    pub fn to_metric(&self) -> Result<FiniteMetricSpace, MetricError> {
        let points = GroundSet::with_cap(self.points.iter().cloned(), usize::MAX)?;
        let dist = self
            .dist
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        FiniteMetricSpace::new(&points, dist)
    }
}

/// A 1-Lipschitz function into `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzFunction {
    values: Vec<Rational>,
}

impl LipschitzFunction {
    pub fn new(values: Vec<Rational>, m: &FiniteMetricSpace) -> Option<Self> {
        let ok = values.len() == m.len()
            && values.iter().all(crate::rational::in_unit_interval)
            && (0..m.len()).all(|x| (0..m.len()).all(|y| (&values[x] - &values[y]).abs() <= *m.dist(x, y)));
        ok.then_some(LipschitzFunction { values })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// Optimum and optimiser of `max Σ f(x)(p_x - q_x)` over 1-Lipschitz
/// `f : m → [0,1]`.
fn one_sided(p: &[Rational], q: &[Rational], m: &FiniteMetricSpace) -> Result<(Rational, Vec<Rational>), MetricError> {
    let n = m.len();
    let c: Vec<Rational> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for x in 0..n {
        let mut row = vec![Rational::zero(); n];
        row[x] = Rational::one();
        a.push(row);
        b.push(Rational::one());
    }
    // pairs at distance ≥ 1 are implied by the box constraints
    for x in 0..n {
        for y in 0..n {
            if x != y && m.dist(x, y) < &Rational::one() {
                let mut row = vec![Rational::zero(); n];
                row[x] = Rational::one();
                row[y] = -Rational::one();
                a.push(row);
                b.push(m.dist(x, y).clone());
            }
        }
    }
    let s = maximize(&c, &a, &b).map_err(MetricError::Lp)?;
    Ok((s.value, s.x))
}

fn check_len(v: &[Rational], n: usize) -> Result<(), MetricError> {
    if v.len() != n {
        return Err(MetricError::Length { expected: n, found: v.len() });
    }
    Ok(())
}

/// Bounded Lipschitz distance with an optimal test function.
pub fn bl_distance_with_witness(
    p: &[Rational],
    q: &[Rational],
    m: &FiniteMetricSpace,
) -> Result<(Rational, Vec<Rational>), MetricError> {
    check_len(p, m.len())?;
    check_len(q, m.len())?;
    let (up, fu) = one_sided(p, q, m)?;
    let (down, fd) = one_sided(q, p, m)?;
    Ok(if up >= down { (up, fu) } else { (down, fd) })
}

/// `sup_f |∫ f dp - ∫ f dq|` over 1-Lipschitz `f : m → [0,1]`, solved as two
/// exact linear programs (one per sign).
pub fn bl_distance_values(p: &[Rational], q: &[Rational], m: &FiniteMetricSpace) -> Result<Rational, MetricError> {
    Ok(bl_distance_with_witness(p, q, m)?.0)
}

pub fn bl_distance_lp(p: &SimplexPoint, q: &SimplexPoint, m: &FiniteMetricSpace) -> Result<Rational, MetricError> {
    bl_distance_values(p.weights(), q.weights(), m)
}

/// `max_{A' ⊆ A} |Σ_{A'} p_a - Σ_{A'} q_a|` by enumeration.
pub fn bl_distance_subsets_values(p: &[Rational], q: &[Rational]) -> Result<Rational, MetricError> {
    check_len(q, p.len())?;
    let n = p.len();
    if n > MAX_SUBSET_LABELS {
        return Err(MetricError::TooManyLabels(n));
    }
    let diff: Vec<Rational> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    let mut best = Rational::zero();
    // Gray-code walk: one addition or subtraction per subset
    let mut acc = Rational::zero();
    for i in 1u64..(1u64 << n) {
        let bit = i.trailing_zeros() as usize;
        let gray = i ^ (i >> 1);
        if gray >> bit & 1 == 1 {
            acc += &diff[bit];
        } else {
            acc -= &diff[bit];
        }
        let a = acc.abs();
        if a > best {
            best = a;
        }
    }
    Ok(best)
}

pub fn bl_distance_subsets(p: &SimplexPoint, q: &SimplexPoint) -> Result<Rational, MetricError> {
    if p.index_set() != q.index_set() {
        return Err(MetricError::Length { expected: p.index_set().len(), found: q.index_set().len() });
    }
    bl_distance_subsets_values(p.weights(), q.weights())
}

/// Outcome of [`check_simplex_lipschitz`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LipschitzVerdict {
    /// Direct criterion: `d_LA(f(x), f(y)) ≤ d(x, y)` for all pairs.
    pub direct: bool,
    /// Subset criterion: every `x ↦ Σ_{a ∈ A'} f(x)_a` is 1-Lipschitz.
    pub subsets: bool,
    pub witness: Option<LipschitzWitness>,
}

impl LipschitzVerdict {
    pub fn agree(&self) -> bool {
        self.direct == self.subsets
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LipschitzWitness {
    pub x: usize,
    pub y: usize,
    /// Labels of the violating subset (subset criterion only).
    pub subset: Option<Vec<usize>>,
    pub gap: String,
    pub dist: String,
}

/// Direct distances between image points, cached by pair of weight vectors.
pub type DistanceCache = HashMap<(Vec<Rational>, Vec<Rational>), Rational>;

/// Evaluates both sides of the characterisation of 1-Lipschitz maps into
/// `(GA, d_LA)` (discrete metric on `A`) independently.
pub fn check_simplex_lipschitz(f: &[SimplexPoint], m: &FiniteMetricSpace) -> Result<LipschitzVerdict, MetricError> {
    check_simplex_lipschitz_cached(f, m, &mut HashMap::new())
}

pub fn check_simplex_lipschitz_cached(
    f: &[SimplexPoint],
    m: &FiniteMetricSpace,
    cache: &mut DistanceCache,
) -> Result<LipschitzVerdict, MetricError> {
    let n = m.len();
    if f.len() != n {
        return Err(MetricError::Length { expected: n, found: f.len() });
    }
    let labels = match f.first() {
        Some(p) => p.index_set().clone(),
        None => return Ok(LipschitzVerdict { direct: true, subsets: true, witness: None }),
    };
    if labels.len() > MAX_SUBSET_LABELS {
        return Err(MetricError::TooManyLabels(labels.len()));
    }
    let discrete = FiniteMetricSpace::discrete(&labels);
    let mut direct = true;
    let mut direct_witness = None;
    for x in 0..n {
        for y in x + 1..n {
            let key = (f[x].weights().to_vec(), f[y].weights().to_vec());
            let d = match cache.get(&key) {
                Some(d) => d.clone(),
                None => {
                    let d = bl_distance_lp(&f[x], &f[y], &discrete)?;
                    cache.insert(key, d.clone());
                    d
                }
            };
            if direct && &d > m.dist(x, y) {
                direct = false;
                direct_witness = Some(LipschitzWitness {
                    x,
                    y,
                    subset: None,
                    gap: format_rational(&d),
                    dist: format_rational(m.dist(x, y)),
                });
            }
        }
    }
    let k = labels.len();
    let mut subsets = true;
    let mut subset_witness = None;
    'outer: for mask in 0u64..(1u64 << k) {
        let sums: Vec<Rational> = f
            .iter()
            .map(|p| (0..k).filter(|a| mask >> a & 1 == 1).map(|a| &p.weights()[a]).sum())
            .collect();
        for x in 0..n {
            for y in x + 1..n {
                let gap = (&sums[x] - &sums[y]).abs();
                if &gap > m.dist(x, y) {
                    subsets = false;
                    subset_witness = Some(LipschitzWitness {
                        x,
                        y,
                        subset: Some((0..k).filter(|a| mask >> a & 1 == 1).collect()),
                        gap: format_rational(&gap),
                        dist: format_rational(m.dist(x, y)),
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(LipschitzVerdict { direct, subsets, witness: subset_witness.or(direct_witness) })
}

/// Every point of the simplex on `k` labels whose coordinates have a common
/// denominator `d ≤ max_den`, without repetition.
pub fn simplex_grid(k: usize, max_den: u32) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for d in 1..=max_den.max(1) {
        let mut counts = vec![0u32; k];
        compositions(d, 0, &mut counts, &mut |c| {
            let p: Vec<Rational> = c.iter().map(|v| Rational::new((*v).into(), d.into())).collect();
            if !out.contains(&p) {
                out.push(p);
            }
        });
    }
    out
}

fn compositions(rest: u32, i: usize, counts: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if i + 1 == counts.len() {
        counts[i] = rest;
        emit(counts);
        return;
    }
    for v in 0..=rest {
        counts[i] = v;
        compositions(rest - v, i + 1, counts, emit);
    }
}

/// Every metric on `n` points whose off-diagonal distances are drawn from
/// `values` and which satisfies the triangle inequality.
pub fn all_metrics(n: usize, values: &[Rational]) -> Vec<FiniteMetricSpace> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
    let points = GroundSet::range(n);
    let mut out = Vec::new();
    let mut idx = vec![0usize; pairs.len()];
    loop {
        let mut dist = vec![vec![Rational::zero(); n]; n];
        for (p, &(x, y)) in pairs.iter().enumerate() {
            dist[x][y] = values[idx[p]].clone();
            dist[y][x] = values[idx[p]].clone();
        }
        if let Ok(m) = FiniteMetricSpace::new(&points, dist) {
            out.push(m);
        }
        let mut pos = 0;
        while pos < idx.len() && idx[pos] + 1 == values.len() {
            idx[pos] = 0;
            pos += 1;
        }
        if pos == idx.len() {
            return out;
        }
        idx[pos] += 1;
    }
}

/// Exhaustive comparison of the two Lipschitz criteria over every metric on
/// at most `max_points` points (distances with denominators up to
/// `max_den`, capped at one) and every map into the simplex grid on at most
/// `max_labels` labels with denominators up to `max_den`.
pub fn lipschitz_criteria_exhaustive(max_points: usize, max_labels: usize, max_den: u32) -> Report {
    let mut agree = Check::new("criteria_agree");
    let mut lipschitz_maps = 0u64;
    let mut values: Vec<Rational> = (1..=max_den)
        .flat_map(|d| (1..=d).map(move |c| ratio(c as i64, d as i64)))
        .collect();
    values.sort();
    values.dedup();
    let mut cache = DistanceCache::new();
    for n in 1..=max_points {
        let metrics = all_metrics(n, &values);
        for k in 1..=max_labels {
            let labels = GroundSet::range(k);
            let grid: Vec<SimplexPoint> = simplex_grid(k, max_den)
                .into_iter()
                .map(|w| SimplexPoint::new(&labels, w).expect("grid points are probabilities"))
                .collect();
            for m in &metrics {
                let mut idx = vec![0usize; n];
                loop {
                    let f: Vec<SimplexPoint> = idx.iter().map(|i| grid[*i].clone()).collect();
                    let v = check_simplex_lipschitz_cached(&f, m, &mut cache).expect("valid inputs");
                    lipschitz_maps += u64::from(v.direct && v.subsets);
                    agree.record(v.agree(), || {
                        json!({"metric": m.to_json(), "map": idx.iter().map(|i| grid[*i].weights().iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(), "verdict": v})
                    });
                    let mut pos = 0;
                    while pos < n && idx[pos] + 1 == grid.len() {
                        idx[pos] = 0;
                        pos += 1;
                    }
                    if pos == n {
                        break;
                    }
                    idx[pos] += 1;
                }
            }
        }
    }
    Report::with_checks("lipschitz_criteria", vec![agree])
        .note(format!("{lipschitz_maps} maps were 1-Lipschitz under both criteria"))
}

/// A random metric: distances `c/d` with `d ≤ max_den`, closed under
/// shortest paths so the triangle inequality holds.
pub fn random_metric(rng: &mut impl Rng, n: usize, max_den: u32) -> FiniteMetricSpace {
    let points = GroundSet::range(n);
    let mut dist = vec![vec![Rational::zero(); n]; n];
    for x in 0..n {
        for y in x + 1..n {
            let d = rng.gen_range(1..=max_den.max(1));
            let c = rng.gen_range(1..=d);
            let v = Rational::new(c.into(), d.into());
            dist[x][y] = v.clone();
            dist[y][x] = v;
        }
    }
    for k in 0..n {
        for x in 0..n {
            for y in 0..n {
                let via = &dist[x][k] + &dist[k][y];
                if via < dist[x][y] {
                    dist[x][y] = via;
                }
            }
        }
    }
    FiniteMetricSpace::new(&points, dist).expect("shortest-path closure is a metric")
}

/// Bounded Lipschitz distance between two finitely supported distributions
/// of probability vectors, where the support points carry the bounded
/// Lipschitz metric of `m`.
///
/// Only the values of a test function on the joint support matter, and any
/// 1-Lipschitz `[0,1]`-valued function on a subset of a metric space extends
/// to the whole space (McShane extension followed by clamping), so this is
/// the exact distance on `G(GX)`, computed as a linear program on the finite
/// support.
pub fn meta_distance(
    m1: &FiniteDist<Vec<Rational>>,
    m2: &FiniteDist<Vec<Rational>>,
    m: &FiniteMetricSpace,
) -> Result<(Rational, FiniteMetricSpace, Vec<Vec<Rational>>), MetricError> {
    let mut support: Vec<Vec<Rational>> = m1.support().to_vec();
    for p in m2.support() {
        if !support.contains(p) {
            support.push(p.clone());
        }
    }
    let s = support.len();
    let mut dist = vec![vec![Rational::zero(); s]; s];
    for i in 0..s {
        for j in i + 1..s {
            let d = bl_distance_values(&support[i], &support[j], m)?;
            dist[i][j] = d.clone();
            dist[j][i] = d;
        }
    }
    let space = FiniteMetricSpace::new(&GroundSet::range(s), dist)?;
    let weights = |d: &FiniteDist<Vec<Rational>>| -> Vec<Rational> {
        support
            .iter()
            .map(|p| d.support().iter().position(|q| q == p).map_or_else(Rational::zero, |i| d.weights()[i].clone()))
            .collect()
    };
    let d = bl_distance_values(&weights(m1), &weights(m2), &space)?;
    Ok((d, space, support))
}

const SUITE_METRIC: u64 = 4;

/// Non-expansiveness of the unit and multiplication with respect to the
/// bounded Lipschitz metric, on random metric spaces (`cfg.cases` of them,
/// up to six points).
///
/// For the multiplication the optimal test function `f` for
/// `d(μM₁, μM₂)` is pushed through `ev_f(P) = ∫ f dP`, which must be
/// 1-Lipschitz on the support and reproduce the same gap, and the gap must
/// not exceed the exact meta-level distance.
pub fn check_bl_monad_nonexpansive(cfg: &SuiteConfig, max_points: usize) -> Report {
    let mut unit_check = Check::new("unit_nonexpansive");
    let mut tight = Check::new("unit_tight_discrete");
    let mut mult_check = Check::new("mult_nonexpansive");
    let mut ev_check = Check::new("ev_f_chain");
    let d = cfg.max_denominator;
    let mut law_parts = Vec::new();
    for case in 0..cfg.cases as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_METRIC, case);
        let n = rng.gen_range(1..=max_points.max(1));
        let discrete = case % 4 == 0;
        let m = if discrete { FiniteMetricSpace::discrete(&GroundSet::range(n)) } else { random_metric(&mut rng, n, d) };
        let delta = |x: usize| -> Vec<Rational> {
            (0..n).map(|i| if i == x { Rational::one() } else { Rational::zero() }).collect()
        };
        for x in 0..n {
            for y in x + 1..n {
                let dd = bl_distance_values(&delta(x), &delta(y), &m).expect("valid");
                unit_check.record(&dd <= m.dist(x, y), || {
                    json!({"metric": m.to_json(), "x": x, "y": y, "bl": format_rational(&dd)})
                });
                if discrete {
                    tight.record(dd.is_one(), || json!({"n": n, "x": x, "y": y, "bl": format_rational(&dd)}));
                }
            }
        }
        // meta-measures over probability vectors on m
        let meta = |rng: &mut rand_chacha::ChaCha8Rng| -> FiniteDist<Vec<Rational>> {
            let s = rng.gen_range(1..=3usize);
            let w = gen::positive_weights(rng, s, d.max(s as u32));
            FiniteDist::new(w.into_iter().map(|w| (gen::weights(rng, n, d), w)).collect()).expect("valid weights")
        };
        let m1 = meta(&mut rng);
        let m2 = if case % 5 == 4 { m1.clone() } else { meta(&mut rng) };
        let alg = Arc::new(Algebra::powerset(m.points()));
        let as_measures = |dist: &FiniteDist<Vec<Rational>>| {
            dist.map(|w| Measure::new(alg.clone(), w.clone(), cfg.mode).expect("probability vector"))
        };
        let p1 = mult(&as_measures(&m1)).expect("nonempty");
        let p2 = mult(&as_measures(&m2)).expect("nonempty");
        let (lhs, f) = bl_distance_with_witness(p1.weights(), p2.weights(), &m).expect("valid");
        let (rhs, space, support) = meta_distance(&m1, &m2, &m).expect("valid");
        mult_check.record(lhs <= rhs, || {
            json!({"metric": m.to_json(), "d_mult": format_rational(&lhs), "d_meta": format_rational(&rhs)})
        });
        let ev: Vec<Rational> = support
            .iter()
            .map(|p| p.iter().zip(&f).map(|(a, b)| a * b).sum())
            .collect();
        let ev_lipschitz = LipschitzFunction::new(ev.clone(), &space).is_some();
        let integral = |dist: &FiniteDist<Vec<Rational>>| -> Rational {
            dist.iter()
                .map(|(p, w)| w * &ev[support.iter().position(|q| q == p).expect("in support")])
                .sum()
        };
        let gap = (integral(&m1) - integral(&m2)).abs();
        ev_check.record(ev_lipschitz && gap == lhs && gap <= rhs, || {
            json!({"metric": m.to_json(), "gap": format_rational(&gap), "d_mult": format_rational(&lhs), "lipschitz": ev_lipschitz})
        });
        if case < 3 {
            let law_cfg = SuiteConfig { seed: cfg.seed ^ case, ..cfg.with_cases(10) };
            law_parts.push(check_monad_laws(&alg, &law_cfg));
        }
    }
    let mut report = Report::with_checks("nonexpansive", vec![unit_check, tight, mult_check, ev_check])
        .note("meta-level distance is the exact bounded Lipschitz distance on the joint finite support");
    report.parts = law_parts;
    report
}

const SUITE_DISTANCE: u64 = 5;

/// Under the discrete metric: LP optimum, subset maximum and half the L1
/// distance coincide, on `cfg.cases` random pairs with up to `max_labels`
/// labels.
pub fn discrete_identity_suite(cfg: &SuiteConfig, max_labels: usize) -> Report {
    let mut lp_subsets = Check::new("lp_equals_subsets");
    let mut subsets_l1 = Check::new("subsets_equals_half_l1");
    for case in 0..cfg.cases as u64 {
        let mut rng = gen::case_rng(cfg.seed, SUITE_DISTANCE, case);
        let k = rng.gen_range(1..=max_labels.max(1));
        let p = gen::weights(&mut rng, k, cfg.max_denominator);
        let q = if case % 10 == 9 { p.clone() } else { gen::weights(&mut rng, k, cfg.max_denominator) };
        let m = FiniteMetricSpace::discrete(&GroundSet::range(k));
        let lp = bl_distance_values(&p, &q, &m).expect("valid");
        let sub = bl_distance_subsets_values(&p, &q).expect("valid");
        let l1: Rational = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<Rational>() / Rational::from_integer(2.into());
        let w = || json!({"p": p.iter().map(format_rational).collect::<Vec<_>>(), "q": q.iter().map(format_rational).collect::<Vec<_>>()});
        lp_subsets.record(lp == sub, w);
        subsets_l1.record(sub == l1, w);
    }
    Report::with_checks("discrete_identity", vec![lp_subsets, subsets_l1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn sp(labels: usize, w: &[(i64, i64)]) -> SimplexPoint {
        SimplexPoint::new(&GroundSet::range(labels), w.iter().map(|(a, b)| ratio(*a, *b)).collect()).unwrap()
    }

    fn two_points(d: Rational) -> FiniteMetricSpace {
        FiniteMetricSpace::new(&GroundSet::range(2), vec![vec![int(0), d.clone()], vec![d, int(0)]]).unwrap()
    }

    #[test]
    fn metric_validation() {
        let g = GroundSet::range(3);
        let bad = vec![
            vec![int(0), ratio(1, 10), int(1)],
            vec![ratio(1, 10), int(0), ratio(1, 10)],
            vec![int(1), ratio(1, 10), int(0)],
        ];
        assert_eq!(FiniteMetricSpace::new(&g, bad).unwrap_err(), MetricError::Triangle { x: 0, y: 1, z: 2 });
        let zero = vec![vec![int(0), int(0)], vec![int(0), int(0)]];
        assert!(matches!(FiniteMetricSpace::new(&GroundSet::range(2), zero), Err(MetricError::NotPositive { .. })));
    }

    #[test]
    fn lp_examples() {
        let disc = FiniteMetricSpace::discrete(&GroundSet::range(2));
        let p = sp(2, &[(1, 1), (0, 1)]);
        let q = sp(2, &[(0, 1), (1, 1)]);
        assert_eq!(bl_distance_lp(&p, &p, &disc).unwrap(), int(0));
        assert_eq!(bl_distance_lp(&p, &q, &disc).unwrap(), int(1));
        assert_eq!(bl_distance_lp(&p, &q, &two_points(ratio(1, 2))).unwrap(), ratio(1, 2));
        assert_eq!(bl_distance_lp(&p, &q, &two_points(ratio(1, 3))).unwrap(), ratio(1, 3));
    }

    #[test]
    fn subset_examples() {
        assert_eq!(bl_distance_subsets(&sp(2, &[(1, 1), (0, 1)]), &sp(2, &[(0, 1), (1, 1)])).unwrap(), int(1));
        let p = sp(3, &[(1, 2), (1, 2), (0, 1)]);
        let q = sp(3, &[(1, 3), (1, 3), (1, 3)]);
        assert_eq!(bl_distance_subsets(&p, &q).unwrap(), ratio(1, 3));
        assert_eq!(bl_distance_lp(&p, &q, &FiniteMetricSpace::discrete(&GroundSet::range(3))).unwrap(), ratio(1, 3));
        assert_eq!(bl_distance_subsets(&p, &p).unwrap(), int(0));
    }

    #[test]
    fn lipschitz_examples() {
        let m = two_points(ratio(1, 10));
        let a = sp(2, &[(1, 2), (1, 2)]);
        let v = check_simplex_lipschitz(&[a.clone(), a], &m).unwrap();
        assert!(v.direct && v.subsets && v.witness.is_none());

        let v = check_simplex_lipschitz(&[sp(2, &[(1, 1), (0, 1)]), sp(2, &[(0, 1), (1, 1)])], &m).unwrap();
        assert!(!v.direct && !v.subsets);
        let w = v.witness.unwrap();
        assert_eq!(w.subset, Some(vec![0]));
        assert_eq!(w.gap, "1/1");
        assert_eq!(w.dist, "1/10");

        let labels = GroundSet::range(3);
        let disc = FiniteMetricSpace::discrete(&labels);
        let verts: Vec<SimplexPoint> = (0..3).map(|a| SimplexPoint::vertex(&labels, a)).collect();
        let v = check_simplex_lipschitz(&verts, &disc).unwrap();
        assert!(v.direct && v.subsets);
    }

    #[test]
    fn simplex_grid_counts() {
        assert_eq!(simplex_grid(3, 3).len(), 13);
        assert_eq!(simplex_grid(2, 3).len(), 5);
        assert_eq!(simplex_grid(1, 3).len(), 1);
    }

    #[test]
    fn metric_enumeration() {
        let values = vec![ratio(1, 3), ratio(1, 2), ratio(2, 3), int(1)];
        assert_eq!(all_metrics(2, &values).len(), 4);
        let three = all_metrics(3, &values);
        assert!(three.len() < 64);
        // (1/3, 1/3, 1) violates the triangle inequality
        assert!(!three.iter().any(|m| m.dist(0, 1) == &ratio(1, 3) && m.dist(1, 2) == &ratio(1, 3) && m.dist(0, 2) == &int(1)));
    }

    #[test]
    fn unit_pairs() {
        let m = two_points(ratio(1, 3));
        let d = bl_distance_values(&[int(1), int(0)], &[int(0), int(1)], &m).unwrap();
        assert_eq!(d, ratio(1, 3));
        let m = FiniteMetricSpace::discrete(&GroundSet::range(4));
        assert_eq!(bl_distance_values(&[int(0), int(1), int(0), int(0)], &[int(0), int(0), int(0), int(1)], &m).unwrap(), int(1));
    }

    #[test]
    fn meta_distance_of_equal_metas_is_zero() {
        let m = FiniteMetricSpace::discrete(&GroundSet::range(2));
        let d = FiniteDist::new(vec![(vec![ratio(1, 2), ratio(1, 2)], ratio(1, 3)), (vec![int(1), int(0)], ratio(2, 3))]).unwrap();
        assert_eq!(meta_distance(&d, &d, &m).unwrap().0, int(0));
    }

    #[test]
    fn small_suites_pass() {
        let cfg = SuiteConfig::default().with_cases(12);
        assert!(check_bl_monad_nonexpansive(&cfg, 4).passed());
        assert!(discrete_identity_suite(&cfg, 6).passed());
        let r = lipschitz_criteria_exhaustive(2, 2, 2);
        assert!(r.passed(), "{}", r.to_text());
    }
}
