//! Finite ground sets, algebras of subsets, semi-rings and premeasurable maps.
//!
//! Subsets are fixed-width bit vectors over the canonical point order of a
//! [`GroundSet`]. An [`Algebra`] is stored by its atom partition: on a finite
//! set the atoms determine every member (each member is a union of atoms), so
//! the `2^k` members are only materialised on request.
//!
//! Algebras and σ-algebras coincide on finite ground sets, so the same type
//! serves for both.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::rational::Rational;

/// Default cap on ground-set size for user-facing instances.
pub const DEFAULT_MAX_GROUND: usize = 16;

/// Largest number of atoms for which [`Algebra::members`] will enumerate.
pub const MAX_ENUMERATED_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("ground set must contain at least one point")]
    EmptyGround,
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("ground set of size {size} exceeds the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("point index {index} out of range for a ground set of size {size}")]
    PointOutOfRange { index: usize, size: usize },
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
    #[error("subset of width {found} used with a ground set of size {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("atoms do not form a partition of the ground set")]
    NotPartition,
    #[error("{atoms} atoms is too many to enumerate all members (limit {limit})")]
    TooManyAtoms { atoms: usize, limit: usize },
    #[error("map image length {found} does not match domain size {expected}")]
    MapLength { expected: usize, found: usize },
    #[error("maps are not composable")]
    NotComposable,
}

// ---------------------------------------------------------------------------
// Subsets

/// A subset of `{0, .., width-1}` as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    width: usize,
    words: SmallVec<[u64; 1]>,
}

fn words_for(width: usize) -> usize {
    width.div_ceil(64).max(1)
}

impl Subset {
    pub fn empty(width: usize) -> Self {
        Subset {
            width,
            words: SmallVec::from_elem(0, words_for(width)),
        }
    }

    pub fn full(width: usize) -> Self {
        let mut s = Self::empty(width);
        for i in 0..width {
            s.insert(i);
        }
        s
    }

    pub fn singleton(width: usize, point: usize) -> Self {
        let mut s = Self::empty(width);
        s.insert(point);
        s
    }

    /// Builds a subset from point indices; indices must be `< width`.
    pub fn from_points<I: IntoIterator<Item = usize>>(width: usize, points: I) -> Result<Self, SetError> {
        let mut s = Self::empty(width);
        for p in points {
            if p >= width {
                return Err(SetError::PointOutOfRange { index: p, size: width });
            }
            s.insert(p);
        }
        Ok(s)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn insert(&mut self, point: usize) {
        debug_assert!(point < self.width);
        self.words[point / 64] |= 1u64 << (point % 64);
    }

    pub fn contains(&self, point: usize) -> bool {
        point < self.width && self.words[point / 64] & (1u64 << (point % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn zip_with(&self, other: &Subset, f: impl Fn(u64, u64) -> u64) -> Subset {
        debug_assert_eq!(self.width, other.width);
        Subset {
            width: self.width,
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Subset) -> Subset {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Subset {
        let mut out = self.zip_with(&Subset::full(self.width), |a, full| !a & full);
        out.width = self.width;
        out
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    /// Smallest point in the subset.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(move |p| self.contains(*p))
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.points().collect()
    }
}

impl Ord for Subset {
    /// Lexicographic order of the bit vector `(b_0, b_1, .., b_{n-1})`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.width.cmp(&other.width).then_with(|| {
            for (a, b) in self.words.iter().zip(other.words.iter()) {
                let diff = a ^ b;
                if diff != 0 {
                    let bit = diff.trailing_zeros();
                    return if a & (1u64 << bit) == 0 {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    };
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_indices().serialize(s)
    }
}

// ---------------------------------------------------------------------------
// Ground sets and families

/// An ordered list of distinct point labels.
#[derive(Clone)]
pub struct GroundSet {
    labels: Arc<[String]>,
}

impl GroundSet {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(labels: I) -> Result<Self, SetError> {
        Self::with_cap(labels, DEFAULT_MAX_GROUND)
    }

    pub fn with_cap<S: Into<String>, I: IntoIterator<Item = S>>(
        labels: I,
        cap: usize,
    ) -> Result<Self, SetError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(SetError::EmptyGround);
        }
        if labels.len() > cap {
            return Err(SetError::TooLarge { size: labels.len(), cap });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SetError::DuplicateLabel(l.clone()));
            }
        }
        Ok(GroundSet { labels: labels.into() })
    }

    /// The ground set `{"0", .., "n-1"}`.
    pub fn range(n: usize) -> Self {
        Self::with_cap((0..n).map(|i| i.to_string()), usize::MAX).expect("n >= 1")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, SetError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SetError::UnknownLabel(label.to_string()))
    }

    pub fn empty_set(&self) -> Subset {
        Subset::empty(self.len())
    }

    pub fn full_set(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn subset<I: IntoIterator<Item = usize>>(&self, points: I) -> Result<Subset, SetError> {
        Subset::from_points(self.len(), points)
    }

    pub fn check(&self, s: &Subset) -> Result<(), SetError> {
        if s.width() != self.len() {
            return Err(SetError::WidthMismatch { expected: self.len(), found: s.width() });
        }
        Ok(())
    }

    /// Every subset of the ground set in lexicographic bit-vector order.
    /// Only sensible for small ground sets.
    pub fn powerset(&self) -> Vec<Subset> {
        let n = self.len();
        assert!(n < 31, "powerset enumeration limited to small ground sets");
        let mut all: Vec<Subset> = (0u64..(1u64 << n))
            .map(|mask| Subset::from_points(n, (0..n).filter(|i| mask >> i & 1 == 1)).unwrap())
            .collect();
        all.sort();
        all
    }
}

impl PartialEq for GroundSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for GroundSet {}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

/// A sorted, deduplicated family of subsets of one ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetFamily {
    ground: GroundSet,
    members: Vec<Subset>,
}

impl SubsetFamily {
    pub fn new<I: IntoIterator<Item = Subset>>(ground: &GroundSet, members: I) -> Result<Self, SetError> {
        let mut set = BTreeSet::new();
        for m in members {
            ground.check(&m)?;
            set.insert(m);
        }
        Ok(SubsetFamily {
            ground: ground.clone(),
            members: set.into_iter().collect(),
        })
    }

    pub fn from_indices(ground: &GroundSet, members: &[Vec<usize>]) -> Result<Self, SetError> {
        let subsets = members
            .iter()
            .map(|m| ground.subset(m.iter().copied()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ground, subsets)
    }

    pub fn empty_family(ground: &GroundSet) -> Self {
        SubsetFamily { ground: ground.clone(), members: Vec::new() }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &Subset) -> bool {
        self.members.binary_search(s).is_ok()
    }
}

// ---------------------------------------------------------------------------
// Algebras

/// An algebra of subsets of a finite ground set, stored by its atoms.
///
/// Atoms are kept in canonical order: ascending by their smallest point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    ground: GroundSet,
    atoms: Vec<Subset>,
    atom_of: Vec<usize>,
}

impl Algebra {
    /// Builds an algebra from a partition of the ground set.
    pub fn from_atoms(ground: &GroundSet, atoms: Vec<Subset>) -> Result<Self, SetError> {
        let n = ground.len();
        let mut atom_of = vec![usize::MAX; n];
        let mut atoms: Vec<Subset> = atoms;
        for a in &atoms {
            ground.check(a)?;
            if a.is_empty() {
                return Err(SetError::NotPartition);
            }
        }
        atoms.sort_by_key(|a| a.first());
        for (i, a) in atoms.iter().enumerate() {
            for p in a.points() {
                if atom_of[p] != usize::MAX {
                    return Err(SetError::NotPartition);
                }
                atom_of[p] = i;
            }
        }
        if atom_of.contains(&usize::MAX) {
            return Err(SetError::NotPartition);
        }
        Ok(Algebra { ground: ground.clone(), atoms, atom_of })
    }

    /// `{∅, X}`.
    pub fn trivial(ground: &GroundSet) -> Self {
        Self::from_atoms(ground, vec![ground.full_set()]).expect("single block partitions")
    }

    /// The full powerset, atoms are the singletons.
    pub fn powerset(ground: &GroundSet) -> Self {
        let n = ground.len();
        Self::from_atoms(ground, (0..n).map(|i| Subset::singleton(n, i)).collect())
            .expect("singletons partition")
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn atoms(&self) -> &[Subset] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Index of the atom containing `point`.
    pub fn atom_of(&self, point: usize) -> usize {
        self.atom_of[point]
    }

    /// Indices of the atoms making up `set`, or `None` if `set` is not a member.
    pub fn atoms_in(&self, set: &Subset) -> Option<Vec<usize>> {
        if set.width() != self.ground.len() {
            return None;
        }
        let mut out = Vec::new();
        for (i, a) in self.atoms.iter().enumerate() {
            if a.is_subset_of(set) {
                out.push(i);
            } else if !a.is_disjoint(set) {
                return None;
            }
        }
        Some(out)
    }

    pub fn contains(&self, set: &Subset) -> bool {
        self.atoms_in(set).is_some()
    }

    /// Union of the atoms whose indices are given.
    pub fn union_of_atoms<I: IntoIterator<Item = usize>>(&self, atoms: I) -> Subset {
        let mut s = self.ground.empty_set();
        for i in atoms {
            s = s.union(&self.atoms[i]);
        }
        s
    }

    /// The member selected by bit `i` of `mask` for atom `i`.
    pub fn member_from_mask(&self, mask: u64) -> Subset {
        self.union_of_atoms((0..self.atoms.len()).filter(|i| mask >> i & 1 == 1))
    }

    /// Every member, materialised (`2^k` subsets), sorted canonically.
    pub fn members(&self) -> Result<SubsetFamily, SetError> {
        let k = self.atoms.len();
        if k > MAX_ENUMERATED_ATOMS {
            return Err(SetError::TooManyAtoms { atoms: k, limit: MAX_ENUMERATED_ATOMS });
        }
        SubsetFamily::new(&self.ground, (0u64..(1u64 << k)).map(|m| self.member_from_mask(m)))
    }

    /// Members as `(atom mask, subset)` pairs in mask order.
    pub fn members_with_masks(&self) -> Result<Vec<(u64, Subset)>, SetError> {
        let k = self.atoms.len();
        if k > MAX_ENUMERATED_ATOMS {
            return Err(SetError::TooManyAtoms { atoms: k, limit: MAX_ENUMERATED_ATOMS });
        }
        Ok((0u64..(1u64 << k)).map(|m| (m, self.member_from_mask(m))).collect())
    }

    /// Whether `self` is contained in `other` (every member of `self` is a member of `other`).
    pub fn is_coarser_than(&self, other: &Algebra) -> bool {
        self.ground == other.ground && self.atoms.iter().all(|a| other.contains(a))
    }

    pub fn to_instance(&self) -> Result<SetInstance, SetError> {
        Ok(SetInstance {
            points: self.ground.labels().to_vec(),
            family: self.members()?.members().iter().map(Subset::to_indices).collect(),
        })
    }
}

/// Refines the partition `blocks` by a single set.
fn refine(blocks: Vec<Subset>, by: &Subset) -> Vec<Subset> {
    let mut out = Vec::with_capacity(blocks.len() + 1);
    for b in blocks {
        let inside = b.intersection(by);
        let outside = b.difference(by);
        if inside.is_empty() || outside.is_empty() {
            out.push(b);
        } else {
            out.push(inside);
            out.push(outside);
        }
    }
    out
}

/// Smallest algebra containing every generator, computed by partition
/// refinement: points are split by membership in each generator and the
/// resulting classes are the atoms.
pub fn generate_algebra(ground: &GroundSet, generators: &SubsetFamily) -> Result<Algebra, SetError> {
    if generators.ground() != ground {
        return Err(SetError::WidthMismatch {
            expected: ground.len(),
            found: generators.ground().len(),
        });
    }
    generate_from_sets(ground, generators.members().iter())
}

pub(crate) fn generate_from_sets<'a, I: IntoIterator<Item = &'a Subset>>(
    ground: &GroundSet,
    sets: I,
) -> Result<Algebra, SetError> {
    let mut blocks = vec![ground.full_set()];
    for g in sets {
        ground.check(g)?;
        blocks = refine(blocks, g);
    }
    Algebra::from_atoms(ground, blocks)
}

/// The atom partition of an algebra.
pub fn atoms(algebra: &Algebra) -> Vec<Subset> {
    algebra.atoms().to_vec()
}

/// The algebra generated by the level sets `{x : f(x) > r}` of every function,
/// for every value `r` the function takes.
pub fn sigma_of_functions(ground: &GroundSet, fns: &[Vec<Rational>]) -> Result<Algebra, SetError> {
    let n = ground.len();
    let mut level_sets = Vec::new();
    for f in fns {
        if f.len() != n {
            return Err(SetError::WidthMismatch { expected: n, found: f.len() });
        }
        let values: BTreeSet<&Rational> = f.iter().collect();
        for r in values {
            let set = Subset::from_points(n, (0..n).filter(|x| &f[*x] > r))?;
            level_sets.push(set);
        }
    }
    generate_from_sets(ground, level_sets.iter())
}

// ---------------------------------------------------------------------------
// Semi-rings

/// Which semi-ring clause a family fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum SemiringViolation {
    MissingEmpty,
    /// `a ∩ b` is not a member.
    Intersection { a: Subset, b: Subset },
    /// `a ∖ b` is not a finite disjoint union of members.
    Difference { a: Subset, b: Subset },
}

/// Finds members partitioning `target` exactly, by depth-first exact cover
/// with memoisation of failed remainders.
fn exact_cover(target: &Subset, members: &[Subset]) -> Option<Vec<Subset>> {
    fn go(
        rest: &Subset,
        candidates: &[&Subset],
        failed: &mut HashSet<Subset>,
        acc: &mut Vec<Subset>,
    ) -> bool {
        let Some(p) = rest.first() else { return true };
        if failed.contains(rest) {
            return false;
        }
        for c in candidates {
            if c.contains(p) && c.is_subset_of(rest) {
                acc.push((*c).clone());
                if go(&rest.difference(c), candidates, failed, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        failed.insert(rest.clone());
        false
    }
    let candidates: Vec<&Subset> = members
        .iter()
        .filter(|m| !m.is_empty() && m.is_subset_of(target))
        .collect();
    let mut acc = Vec::new();
    let mut failed = HashSet::new();
    go(target, &candidates, &mut failed, &mut acc).then_some(acc)
}

/// Checks the semi-ring axioms; returns the first violated clause.
pub fn is_semiring(ground: &GroundSet, family: &SubsetFamily) -> Result<Option<SemiringViolation>, SetError> {
    if family.ground() != ground {
        return Err(SetError::WidthMismatch { expected: ground.len(), found: family.ground().len() });
    }
    let members = family.members();
    if !family.contains(&ground.empty_set()) {
        return Ok(Some(SemiringViolation::MissingEmpty));
    }
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if !family.contains(&a.intersection(b)) {
                return Ok(Some(SemiringViolation::Intersection { a: a.clone(), b: b.clone() }));
            }
        }
    }
    for a in members {
        for b in members {
            if exact_cover(&a.difference(b), members).is_none() {
                return Ok(Some(SemiringViolation::Difference { a: a.clone(), b: b.clone() }));
            }
        }
    }
    Ok(None)
}

/// A family validated as a semi-ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiRing {
    family: SubsetFamily,
}

impl SemiRing {
    /// Validates `family`; on failure returns the violated clause.
    pub fn new(family: SubsetFamily) -> Result<Self, SemiringViolation> {
        match is_semiring(family.ground(), &family) {
            Ok(None) => Ok(SemiRing { family }),
            Ok(Some(v)) => Err(v),
            Err(_) => unreachable!("family ground is its own ground"),
        }
    }

    /// Wraps a family already known to be a semi-ring by other means (for
    /// instance the slab formulas, which are checked separately).
    pub(crate) fn trusted(family: SubsetFamily) -> Self {
        SemiRing { family }
    }

    pub fn ground(&self) -> &GroundSet {
        self.family.ground()
    }

    pub fn family(&self) -> &SubsetFamily {
        &self.family
    }

    pub fn members(&self) -> &[Subset] {
        self.family.members()
    }

    /// Witness decomposition of `a ∖ b` into disjoint members.
    pub fn decompose_difference(&self, a: &Subset, b: &Subset) -> Option<Vec<Subset>> {
        exact_cover(&a.difference(b), self.family.members())
    }
}

impl From<Algebra> for SemiRing {
    fn from(algebra: Algebra) -> Self {
        SemiRing::trusted(algebra.members().expect("algebra small enough to enumerate"))
    }
}

// ---------------------------------------------------------------------------
// Maps

/// A total function between two finite ground sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMap {
    dom: GroundSet,
    cod: GroundSet,
    image: Vec<usize>,
}

impl PointMap {
    pub fn new(dom: &GroundSet, cod: &GroundSet, image: Vec<usize>) -> Result<Self, SetError> {
        if image.len() != dom.len() {
            return Err(SetError::MapLength { expected: dom.len(), found: image.len() });
        }
        if let Some(&bad) = image.iter().find(|y| **y >= cod.len()) {
            return Err(SetError::PointOutOfRange { index: bad, size: cod.len() });
        }
        Ok(PointMap { dom: dom.clone(), cod: cod.clone(), image })
    }

    pub fn identity(ground: &GroundSet) -> Self {
        PointMap { dom: ground.clone(), cod: ground.clone(), image: (0..ground.len()).collect() }
    }

    pub fn constant(dom: &GroundSet, cod: &GroundSet, y: usize) -> Result<Self, SetError> {
        Self::new(dom, cod, vec![y; dom.len()])
    }

    pub fn dom(&self) -> &GroundSet {
        &self.dom
    }

    pub fn cod(&self) -> &GroundSet {
        &self.cod
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn preimage(&self, set: &Subset) -> Subset {
        let n = self.dom.len();
        let mut out = Subset::empty(n);
        for (x, y) in self.image.iter().enumerate() {
            if set.contains(*y) {
                out.insert(x);
            }
        }
        out
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &PointMap) -> Result<PointMap, SetError> {
        if self.cod != then.dom {
            return Err(SetError::NotComposable);
        }
        Ok(PointMap {
            dom: self.dom.clone(),
            cod: then.cod.clone(),
            image: self.image.iter().map(|y| then.image[*y]).collect(),
        })
    }

    /// Every map from `dom` to `cod`, in lexicographic order of images.
    pub fn all(dom: &GroundSet, cod: &GroundSet) -> Vec<PointMap> {
        let (n, m) = (dom.len(), cod.len());
        let total = m.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut image = vec![0; n];
                for slot in image.iter_mut().rev() {
                    *slot = code % m;
                    code /= m;
                }
                PointMap { dom: dom.clone(), cod: cod.clone(), image }
            })
            .collect()
    }
}

/// First codomain atom whose preimage is not a domain member, if any.
///
/// Checking atoms suffices: every codomain member is a union of atoms and
/// preimages commute with unions.
pub fn premeasurability_witness(map: &PointMap, dom: &Algebra, cod: &Algebra) -> Option<Subset> {
    cod.atoms()
        .iter()
        .find(|b| !dom.contains(&map.preimage(b)))
        .cloned()
}

pub fn is_premeasurable(map: &PointMap, dom: &Algebra, cod: &Algebra) -> bool {
    premeasurability_witness(map, dom, cod).is_none()
}

/// Finite-map condition between finite label sets: preimages of finite or
/// cofinite sets are finite or cofinite. Every subset of a finite set is
/// finite, so this holds for every map; it is kept for API parity with the
/// countable setting.
pub fn is_finite_map(map: &PointMap) -> bool {
    let _ = map;
    true
}

// ---------------------------------------------------------------------------
// JSON instance format

/// `{"points": [...], "family": [[indices]...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetInstance {
    pub points: Vec<String>,
    pub family: Vec<Vec<usize>>,
}

impl SetInstance {
    pub fn ground(&self) -> Result<GroundSet, SetError> {
        GroundSet::new(self.points.iter().cloned())
    }

    pub fn to_family(&self) -> Result<SubsetFamily, SetError> {
        SubsetFamily::from_indices(&self.ground()?, &self.family)
    }

    /// Reads the family as generators of an algebra. Generating is idempotent,
    /// so a family that already is an algebra is returned unchanged.
    pub fn to_algebra(&self) -> Result<Algebra, SetError> {
        let family = self.to_family()?;
        generate_algebra(family.ground(), &family)
    }

    pub fn from_family(family: &SubsetFamily) -> Self {
        SetInstance {
            points: family.ground().labels().to_vec(),
            family: family.members().iter().map(Subset::to_indices).collect(),
        }
    }
}
