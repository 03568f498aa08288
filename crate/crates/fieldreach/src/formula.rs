//! Propositional path-formulae over field propositions.
//!
//! A path-formula is stored as the explicit set of its models. A model is a
//! truth assignment, identified with the set of fields it makes true and
//! encoded as a bit mask over the indexed field universe of a
//! [`FieldSpace`]. `TRUE` (the full power set of the universe) is kept
//! symbolic so that it never has to be materialised by the common
//! operations.
//!
//! Two formulae are equal *as domain elements* iff they have the same
//! *viable* models — a model is viable when some heap path compatible with
//! the class hierarchy traverses exactly its fields. The concatenation
//! `⊙` and difference `⊖` operators work on all stored models, without
//! viability filtering; viability is applied only by [`PathFormula::leq`],
//! [`PathFormula::equiv`] and [`PathFormula::canonicalize`].
//!
//! Under *field abstraction* only a subset of the reference fields is
//! tracked explicitly and every other field is represented by one extra
//! proposition `ANY`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde_json::Value;
use thiserror::Error;

use crate::lang::{ClassId, ClassTable, FieldId, ModelSpec, Ty};

/// A truth assignment encoded as a bit set over the field universe.
pub type Mask = u64;

/// Name used for the abstract field standing for all untracked fields.
pub const ANY_NAME: &str = "ANY";

/// Largest number of propositions (tracked fields plus `ANY`) supported.
/// Model sets are enumerated explicitly, so larger universes must use
/// field abstraction.
pub const MAX_FIELDS: usize = 20;

/// Errors raised when building field spaces or formulae from names.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("unknown reference field `{0}`")]
    UnknownField(String),
    #[error("too many tracked fields ({0}); at most {MAX_FIELDS} are supported, use field abstraction")]
    TooManyFields(usize),
}

/// Iterates over every submask of `m` (including `0` and `m`).
pub fn submasks(m: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

/// The reflexive-transitive closure `R*` of the class-level reachability
/// relation restricted to a set of fields: `(κ₁, κ₂) ∈ R*` iff an object
/// of class `κ₂` may be reached from an object of class `κ₁` by
/// dereferencing only fields of the set (zero or more times).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReach {
    rel: Vec<Vec<bool>>,
}

impl ClassReach {
    /// Whether `(a, b)` belongs to the relation.
    pub fn contains(&self, a: ClassId, b: ClassId) -> bool {
        self.rel[a][b]
    }

    /// All pairs of the relation, in lexicographic order.
    pub fn pairs(&self) -> Vec<(ClassId, ClassId)> {
        let n = self.rel.len();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.rel[a][b])
            .collect()
    }
}

/// Computes `R*` for the field set `phi`. The one-step relation relates
/// `κ'` to `κ''` when `κ'` has (possibly by inheritance) a field `f ∈ phi`
/// and `κ''` is a subclass of the declared type of `f`.
#[allow(clippy::needless_range_loop)] // square-matrix indexing reads best here
pub fn class_reach_closure(ct: &ClassTable, phi: &[FieldId]) -> ClassReach {
    let n = ct.classes.len();
    let mut rel = vec![vec![false; n]; n];
    for (a, row) in rel.iter_mut().enumerate() {
        row[a] = true;
    }
    for &f in phi {
        let Ty::Ref(target) = ct.fields[f].ty else {
            continue;
        };
        for a in 0..n {
            if !ct.has_field(a, f) {
                continue;
            }
            for b in 0..n {
                if ct.is_subclass(b, target) {
                    rel[a][b] = true;
                }
            }
        }
    }
    // Warshall's transitive closure.
    for k in 0..n {
        for i in 0..n {
            if rel[i][k] {
                for j in 0..n {
                    if rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
    }
    ClassReach { rel }
}

/// Decides viability of the exact field set `phi` over a class table.
///
/// Follows the decision procedure based on permutations: a path traversing
/// exactly `phi` exists iff the fields can be ordered by first occurrence
/// `g₁ … gₘ` such that after each `gᵢ` (landing on a subclass of its
/// declared type) an object owning `gᵢ₊₁` is reachable using fields of
/// `phi` only. The permutations are explored by dynamic programming over
/// (set of fields already used, last field used).
pub fn is_viable_fields(ct: &ClassTable, phi: &[FieldId]) -> bool {
    let m = phi.len();
    if m == 0 {
        return true;
    }
    let rstar = class_reach_closure(ct, phi);
    let n = ct.classes.len();
    let target = |f: FieldId| match ct.fields[f].ty {
        Ty::Ref(c) => Some(c),
        Ty::Int => None,
    };
    // gap[i][j]: after dereferencing phi[i], an object owning phi[j] is reachable.
    let mut gap = vec![vec![false; m]; m];
    for i in 0..m {
        let Some(ti) = target(phi[i]) else {
            return false;
        };
        for j in 0..m {
            gap[i][j] = (0..n).any(|a| {
                ct.is_subclass(a, ti)
                    && (0..n).any(|b| ct.has_field(b, phi[j]) && rstar.contains(a, b))
            });
        }
    }
    let full = (1usize << m) - 1;
    let mut reach = vec![vec![false; m]; 1 << m];
    for i in 0..m {
        reach[1 << i][i] = true;
    }
    for set in 1..=full {
        for last in 0..m {
            if !reach[set][last] {
                continue;
            }
            for next in 0..m {
                if set & (1 << next) == 0 && gap[last][next] {
                    reach[set | (1 << next)][next] = true;
                }
            }
        }
    }
    reach[full].iter().any(|&b| b)
}

/// The indexed universe of field propositions, together with the class
/// hierarchy used to decide viability.
pub struct FieldSpace {
    /// Name of each bit (the `ANY` bit is named [`ANY_NAME`]).
    names: Vec<String>,
    any: Option<usize>,
    ct: Option<ClassTable>,
    /// Program field behind each tracked bit.
    bit_field: Vec<Option<FieldId>>,
    /// Bit of each program field (`None` for `int` fields; untracked
    /// reference fields map to the `ANY` bit).
    field_bit: Vec<Option<usize>>,
    cache: Mutex<HashMap<Mask, bool>>,
    viable: OnceLock<Vec<Mask>>,
}

impl fmt::Debug for FieldSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpace")
            .field("names", &self.names)
            .field("any", &self.any)
            .field("constrained", &self.ct.is_some())
            .finish()
    }
}

impl FieldSpace {
    fn new_raw(
        names: Vec<String>,
        any: Option<usize>,
        ct: Option<ClassTable>,
        bit_field: Vec<Option<FieldId>>,
        field_bit: Vec<Option<usize>>,
    ) -> Result<Self, FormulaError> {
        if names.len() > MAX_FIELDS {
            return Err(FormulaError::TooManyFields(names.len()));
        }
        Ok(FieldSpace {
            names,
            any,
            ct,
            bit_field,
            field_bit,
            cache: Mutex::new(HashMap::new()),
            viable: OnceLock::new(),
        })
    }

    /// A universe of named fields with no class constraints: every
    /// assignment is viable.
    ///
    /// # Panics
    /// If more than [`MAX_FIELDS`] names are given.
    pub fn unconstrained(names: &[&str]) -> Self {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let k = names.len();
        Self::new_raw(names, None, None, vec![None; k], Vec::new()).expect("universe too large")
    }

    /// Like [`FieldSpace::unconstrained`] with an extra `ANY` proposition.
    pub fn unconstrained_with_any(names: &[&str]) -> Self {
        let mut names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        names.push(ANY_NAME.to_string());
        let k = names.len();
        Self::new_raw(names, Some(k - 1), None, vec![None; k], Vec::new())
            .expect("universe too large")
    }

    /// The universe of the reference fields of a program. With
    /// `tracked = None` every reference field is tracked; otherwise only
    /// the listed fields are, and the others collapse into `ANY` (no `ANY`
    /// bit is created when the list covers every reference field).
    pub fn from_class_table(ct: &ClassTable, tracked: Option<&[String]>) -> Result<Self, FormulaError> {
        let refs = ct.ref_fields();
        let keep: Vec<FieldId> = match tracked {
            None => refs.clone(),
            Some(list) => {
                for name in list {
                    match ct.field_id(name) {
                        Some(f) if ct.fields[f].ty.is_ref() => {}
                        _ => return Err(FormulaError::UnknownField(name.clone())),
                    }
                }
                refs.iter()
                    .copied()
                    .filter(|&f| list.iter().any(|n| n == ct.field_name(f)))
                    .collect()
            }
        };
        let mut names: Vec<String> = keep.iter().map(|&f| ct.field_name(f).to_string()).collect();
        let mut bit_field: Vec<Option<FieldId>> = keep.iter().map(|&f| Some(f)).collect();
        let mut field_bit = vec![None; ct.fields.len()];
        for (b, &f) in keep.iter().enumerate() {
            field_bit[f] = Some(b);
        }
        let any = if keep.len() < refs.len() {
            let b = names.len();
            names.push(ANY_NAME.to_string());
            bit_field.push(None);
            for &f in &refs {
                if field_bit[f].is_none() {
                    field_bit[f] = Some(b);
                }
            }
            Some(b)
        } else {
            None
        };
        Self::new_raw(names, any, Some(ct.clone()), bit_field, field_bit)
    }

    /// Number of propositions.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True if the universe has no propositions.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Mask of all propositions.
    pub fn universe(&self) -> Mask {
        if self.names.is_empty() {
            0
        } else {
            (1u64 << self.names.len()) - 1
        }
    }

    /// Mask of the `ANY` proposition (0 without field abstraction).
    pub fn any_mask(&self) -> Mask {
        self.any.map_or(0, |b| 1 << b)
    }

    /// Whether field abstraction is active.
    pub fn has_any(&self) -> bool {
        self.any.is_some()
    }

    /// Names of all propositions, by bit index.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The class table constraining viability, if any.
    pub fn class_table(&self) -> Option<&ClassTable> {
        self.ct.as_ref()
    }

    /// Bit mask of a proposition name (tracked field or `ANY`).
    pub fn bit(&self, name: &str) -> Option<Mask> {
        self.names.iter().position(|n| n == name).map(|b| 1 << b)
    }

    /// Mask of a program field: its own bit when tracked, the `ANY` bit
    /// otherwise, and 0 for `int` fields.
    pub fn field_mask(&self, f: FieldId) -> Mask {
        self.field_bit.get(f).copied().flatten().map_or(0, |b| 1 << b)
    }

    /// Mask of a set of names. Program fields that are not tracked map to
    /// `ANY`.
    pub fn mask_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Mask, FormulaError> {
        let mut m = 0;
        for n in names {
            let n = n.as_ref();
            if let Some(b) = self.bit(n) {
                m |= b;
                continue;
            }
            let via_ct = self
                .ct
                .as_ref()
                .and_then(|ct| ct.field_id(n))
                .map(|f| self.field_mask(f))
                .filter(|&b| b != 0);
            match via_ct {
                Some(b) => m |= b,
                None => return Err(FormulaError::UnknownField(n.to_string())),
            }
        }
        Ok(m)
    }

    /// Names of the propositions of a mask, sorted alphabetically.
    pub fn names_of(&self, m: Mask) -> Vec<String> {
        let mut v: Vec<String> = (0..self.names.len())
            .filter(|b| m & (1 << b) != 0)
            .map(|b| self.names[b].clone())
            .collect();
        v.sort();
        v
    }

    /// The fields (of the class table) that a mask stands for; `ANY`
    /// expands to every untracked reference field.
    fn fields_of_mask(&self, ct: &ClassTable, m: Mask) -> Vec<FieldId> {
        let mut out = Vec::new();
        for (b, f) in self.bit_field.iter().enumerate() {
            if m & (1 << b) != 0 {
                if let Some(f) = f {
                    out.push(*f);
                }
            }
        }
        if m & self.any_mask() != 0 {
            out.extend(
                ct.ref_fields()
                    .into_iter()
                    .filter(|&f| self.field_bit[f] == self.any),
            );
        }
        out
    }

    /// `R*` for the fields of a mask (`ANY` stands for all untracked
    /// fields). Without a class table there are no classes and the
    /// relation is empty.
    pub fn class_reach(&self, m: Mask) -> ClassReach {
        match &self.ct {
            Some(ct) => class_reach_closure(ct, &self.fields_of_mask(ct, m)),
            None => ClassReach { rel: Vec::new() },
        }
    }

    /// Viability of an assignment. The empty assignment is always viable,
    /// as is every assignment containing `ANY` (it stands for unknown
    /// fields) and every assignment of an unconstrained universe.
    pub fn is_viable(&self, m: Mask) -> bool {
        if m == 0 || m & self.any_mask() != 0 {
            return true;
        }
        let Some(ct) = &self.ct else {
            return true;
        };
        if let Some(&v) = self.cache.lock().expect("viability cache poisoned").get(&m) {
            return v;
        }
        let v = is_viable_fields(ct, &self.fields_of_mask(ct, m));
        self.cache
            .lock()
            .expect("viability cache poisoned")
            .insert(m, v);
        v
    }

    /// All viable assignments of the universe, in increasing mask order.
    pub fn viable_masks(&self) -> &[Mask] {
        self.viable.get_or_init(|| {
            let mut v: Vec<Mask> = submasks(self.universe()).filter(|&m| self.is_viable(m)).collect();
            v.sort_unstable();
            v
        })
    }

    /// Sort key placing models by size, then lexicographically by names.
    pub fn model_key(&self, m: Mask) -> (u32, Vec<String>) {
        (m.count_ones(), self.names_of(m))
    }

    /// Sorts masks in display order.
    pub fn sort_models(&self, ms: &mut [Mask]) {
        ms.sort_by_cached_key(|&m| self.model_key(m));
    }

    /// `FALSE` over this universe.
    pub fn falsity(&self) -> PathFormula {
        PathFormula::models(self, std::iter::empty())
    }

    /// `TRUE` over this universe.
    pub fn truth(&self) -> PathFormula {
        PathFormula {
            univ: self.universe(),
            any: self.any_mask(),
            repr: Repr::True,
        }
    }

    /// `x∅`, whose only model is the empty assignment.
    pub fn empty_path(&self) -> PathFormula {
        self.only(0)
    }

    /// `x{S}` for the assignment `m`.
    pub fn only(&self, m: Mask) -> PathFormula {
        PathFormula::models(self, std::iter::once(m))
    }

    /// `x{S}` from field names.
    pub fn only_fields<S: AsRef<str>>(&self, names: &[S]) -> Result<PathFormula, FormulaError> {
        Ok(self.only(self.mask_of(names)?))
    }

    /// Builds a formula from lists of field names.
    pub fn from_name_lists<S: AsRef<str>>(&self, lists: &[Vec<S>]) -> Result<PathFormula, FormulaError> {
        let mut ms = Vec::with_capacity(lists.len());
        for l in lists {
            ms.push(self.mask_of(l)?);
        }
        Ok(PathFormula::models(self, ms))
    }

    /// Builds a formula from an annotation value.
    pub fn from_spec(&self, spec: &ModelSpec) -> Result<PathFormula, FormulaError> {
        match spec {
            ModelSpec::True => Ok(self.truth()),
            ModelSpec::Models(lists) => self.from_name_lists(lists),
        }
    }

    /// Renders a formula in x-notation: `FALSE`, `TRUE`, `x{}`, `x{f,h}`,
    /// or `∨`-joined x-terms.
    pub fn render(&self, f: &PathFormula) -> String {
        match &f.repr {
            Repr::True => "TRUE".to_string(),
            Repr::Models(s) if s.is_empty() => "FALSE".to_string(),
            Repr::Models(s) => {
                let mut ms: Vec<Mask> = s.iter().copied().collect();
                self.sort_models(&mut ms);
                ms.iter()
                    .map(|&m| format!("x{{{}}}", self.names_of(m).join(",")))
                    .collect::<Vec<_>>()
                    .join("∨")
            }
        }
    }

    /// Like [`FieldSpace::render`], but a formula whose models are exactly
    /// those of a conjunction of literals (with at least one unconstrained
    /// proposition) is written as that conjunction, e.g. `n` for
    /// `x{n}∨x{n,p}` over `{n,p}`, or `parent∧¬right`.
    pub fn render_compact(&self, f: &PathFormula) -> String {
        let Repr::Models(s) = &f.repr else {
            return self.render(f);
        };
        if s.len() < 2 {
            return self.render(f);
        }
        let univ = f.univ;
        let pos = s.iter().fold(univ, |a, &m| a & m);
        let neg = univ & !s.iter().fold(0, |a, &m| a | m);
        let free = univ & !pos & !neg;
        if s.len() as u64 != 1u64 << free.count_ones() {
            return self.render(f);
        }
        let mut lits = self.names_of(pos);
        lits.extend(self.names_of(neg).into_iter().map(|n| format!("¬{n}")));
        lits.join("∧")
    }

    /// JSON rendering: the sorted list of sorted name lists of the
    /// *viable* models (`TRUE` is materialised).
    pub fn to_json(&self, f: &PathFormula) -> Value {
        let ms = self.display_models(f);
        Value::Array(
            ms.into_iter()
                .map(|m| Value::Array(self.names_of(m).into_iter().map(Value::String).collect()))
                .collect(),
        )
    }

    /// Viable models of a formula in display order.
    pub fn display_models(&self, f: &PathFormula) -> Vec<Mask> {
        let mut ms: Vec<Mask> = match &f.repr {
            Repr::True => self.viable_masks().to_vec(),
            Repr::Models(s) => s.iter().copied().filter(|&m| self.is_viable(m)).collect(),
        };
        self.sort_models(&mut ms);
        ms
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    /// Every assignment of the universe.
    True,
    /// An explicit model set (never the full power set).
    Models(BTreeSet<Mask>),
}

/// A propositional formula over field propositions, kept as its model set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathFormula {
    univ: Mask,
    any: Mask,
    repr: Repr,
}

impl PathFormula {
    fn build(univ: Mask, any: Mask, set: BTreeSet<Mask>) -> Self {
        let full = 1u128 << univ.count_ones();
        let repr = if set.len() as u128 == full {
            Repr::True
        } else {
            Repr::Models(set)
        };
        PathFormula { univ, any, repr }
    }

    fn same(&self, set: BTreeSet<Mask>) -> Self {
        Self::build(self.univ, self.any, set)
    }

    /// The formula with exactly the given models (restricted to the
    /// universe).
    pub fn models(space: &FieldSpace, ms: impl IntoIterator<Item = Mask>) -> Self {
        let univ = space.universe();
        Self::build(univ, space.any_mask(), ms.into_iter().map(|m| m & univ).collect())
    }

    /// `FALSE` over the same universe.
    pub fn false_like(&self) -> PathFormula {
        self.same(BTreeSet::new())
    }

    /// `TRUE` over the same universe.
    pub fn true_like(&self) -> PathFormula {
        PathFormula {
            repr: Repr::True,
            ..self.clone()
        }
    }

    /// `x{m}` over the same universe.
    pub fn only_like(&self, m: Mask) -> PathFormula {
        self.same(std::iter::once(m & self.univ).collect())
    }

    /// Mask of the universe this formula lives in.
    pub fn universe(&self) -> Mask {
        self.univ
    }

    /// Syntactically `FALSE` (no stored model).
    pub fn is_false(&self) -> bool {
        matches!(&self.repr, Repr::Models(s) if s.is_empty())
    }

    /// Syntactically `TRUE`.
    pub fn is_true(&self) -> bool {
        matches!(self.repr, Repr::True)
    }

    /// Whether `m` is a stored model.
    pub fn contains(&self, m: Mask) -> bool {
        match &self.repr {
            Repr::True => m & !self.univ == 0,
            Repr::Models(s) => s.contains(&m),
        }
    }

    /// Number of stored models (`TRUE` counts the whole power set).
    pub fn model_count(&self) -> u128 {
        match &self.repr {
            Repr::True => 1u128 << self.univ.count_ones(),
            Repr::Models(s) => s.len() as u128,
        }
    }

    /// Every stored model, in increasing mask order (`TRUE` is
    /// materialised).
    pub fn model_vec(&self) -> Vec<Mask> {
        match &self.repr {
            Repr::True => {
                let mut v: Vec<Mask> = submasks(self.univ).collect();
                v.sort_unstable();
                v
            }
            Repr::Models(s) => s.iter().copied().collect(),
        }
    }

    fn model_set(&self) -> BTreeSet<Mask> {
        match &self.repr {
            Repr::True => submasks(self.univ).collect(),
            Repr::Models(s) => s.clone(),
        }
    }

    /// Disjunction: union of the model sets.
    pub fn join(&self, g: &PathFormula) -> PathFormula {
        match (&self.repr, &g.repr) {
            (Repr::True, _) | (_, Repr::True) => PathFormula {
                repr: Repr::True,
                ..self.clone()
            },
            (Repr::Models(a), Repr::Models(b)) => {
                if b.is_subset(a) {
                    return self.clone();
                }
                self.same(a.union(b).copied().collect())
            }
        }
    }

    /// Conjunction: intersection of the model sets.
    pub fn meet(&self, g: &PathFormula) -> PathFormula {
        match (&self.repr, &g.repr) {
            (Repr::True, _) => g.clone(),
            (_, Repr::True) => self.clone(),
            (Repr::Models(a), Repr::Models(b)) => self.same(a.intersection(b).copied().collect()),
        }
    }

    /// Upward closure `{m ∪ s | m ∈ self, s ⊆ U}`.
    fn upward_closure(&self) -> PathFormula {
        match &self.repr {
            Repr::True => self.clone(),
            Repr::Models(s) => {
                if s.contains(&0) {
                    return PathFormula {
                        repr: Repr::True,
                        ..self.clone()
                    };
                }
                let mut out = BTreeSet::new();
                for &m in s {
                    for x in submasks(self.univ & !m) {
                        out.insert(m | x);
                    }
                }
                self.same(out)
            }
        }
    }

    /// Downward closure `{m \ s | m ∈ self, s ⊆ U}`.
    fn downward_closure(&self) -> PathFormula {
        match &self.repr {
            Repr::True => self.clone(),
            Repr::Models(s) => {
                let mut out = BTreeSet::new();
                for &m in s {
                    out.extend(submasks(m));
                }
                self.same(out)
            }
        }
    }

    /// Path concatenation `F ⊙ G = {ω′ ∪ ω″ | ω′ ∈ F, ω″ ∈ G}`.
    pub fn odot(&self, g: &PathFormula) -> PathFormula {
        if self.is_false() || g.is_false() {
            return self.same(BTreeSet::new());
        }
        match (&self.repr, &g.repr) {
            (Repr::True, Repr::True) => self.clone(),
            (Repr::True, _) => g.upward_closure(),
            (_, Repr::True) => self.upward_closure(),
            (Repr::Models(a), Repr::Models(b)) => {
                let mut out = BTreeSet::new();
                for &x in a {
                    for &y in b {
                        out.insert(x | y);
                    }
                }
                self.same(out)
            }
        }
    }

    /// Path difference `F ⊖ G = {ω′ \ X | ω′ ∈ F, ω″ ∈ G, X ⊆ ω″}`.
    ///
    /// Under field abstraction, `ANY` may additionally be dropped from any
    /// resulting model when the removed model is non-empty, since `ANY`
    /// may stand for exactly the removed fields.
    pub fn ominus(&self, g: &PathFormula) -> PathFormula {
        if self.is_false() || g.is_false() {
            return self.same(BTreeSet::new());
        }
        match (&self.repr, &g.repr) {
            (Repr::True, _) => self.clone(),
            (_, Repr::True) => self.downward_closure(),
            (Repr::Models(a), Repr::Models(b)) => {
                let mut out = BTreeSet::new();
                for &x in a {
                    for &y in b {
                        for s in submasks(x & y) {
                            let r = x & !s;
                            out.insert(r);
                            if r & self.any != 0 && y != 0 {
                                out.insert(r & !self.any);
                            }
                        }
                    }
                }
                self.same(out)
            }
        }
    }

    /// Logical implication restricted to viable models.
    pub fn leq(&self, g: &PathFormula, space: &FieldSpace) -> bool {
        if g.is_true() {
            return true;
        }
        match &self.repr {
            Repr::True => space.viable_masks().iter().all(|&m| g.contains(m)),
            Repr::Models(s) => s.iter().all(|&m| g.contains(m) || !space.is_viable(m)),
        }
    }

    /// Equivalence: same viable models.
    pub fn equiv(&self, g: &PathFormula, space: &FieldSpace) -> bool {
        self.leq(g, space) && g.leq(self, space)
    }

    /// Display normal form: drops non-viable models and turns a formula
    /// holding every viable model into `TRUE`.
    pub fn canonicalize(&self, space: &FieldSpace) -> PathFormula {
        match &self.repr {
            Repr::True => self.clone(),
            Repr::Models(s) => {
                let kept: BTreeSet<Mask> = s.iter().copied().filter(|&m| space.is_viable(m)).collect();
                if kept.len() == space.viable_masks().len() {
                    return PathFormula {
                        repr: Repr::True,
                        ..self.clone()
                    };
                }
                self.same(kept)
            }
        }
    }

    /// Whether some viable model exists (the formula is not equivalent to
    /// `FALSE`).
    pub fn is_satisfiable(&self, space: &FieldSpace) -> bool {
        match &self.repr {
            Repr::True => true,
            Repr::Models(s) => s.iter().any(|&m| space.is_viable(m)),
        }
    }

    /// Maps a formula of one universe to another by field name: tracked
    /// names are kept, every other field becomes `ANY` of the target.
    pub fn project_fields(&self, from: &FieldSpace, to: &FieldSpace) -> PathFormula {
        let mut table = Vec::with_capacity(from.len());
        for name in from.names() {
            let b = to.bit(name).unwrap_or_else(|| to.any_mask());
            table.push(b);
        }
        let map = |m: Mask| -> Mask {
            (0..table.len())
                .filter(|b| m & (1 << b) != 0)
                .fold(0, |acc, b| acc | table[b])
        };
        PathFormula::models(to, self.model_set().into_iter().map(map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{build_class_table, parse_program};

    const EMPLOYEES: &str = "class Emp { LP mD; }\nclass L1 extends Emp { }\n\
        class L2 extends Emp { TB aD; }\nclass Dev { Emp owner; }\n\
        class LP extends Dev { }\nclass TB extends Dev { LP lnk; }\n";

    fn employees() -> ClassTable {
        build_class_table(&parse_program(EMPLOYEES).unwrap()).unwrap()
    }

    fn fids(ct: &ClassTable, names: &[&str]) -> Vec<FieldId> {
        names.iter().map(|n| ct.field_id(n).unwrap()).collect()
    }

    fn set(space: &FieldSpace, lists: &[&[&str]]) -> PathFormula {
        let v: Vec<Vec<&str>> = lists.iter().map(|l| l.to_vec()).collect();
        space.from_name_lists(&v).unwrap()
    }

    #[test]
    fn submask_enumeration() {
        let mut v: Vec<_> = submasks(0b101).collect();
        v.sort();
        assert_eq!(v, vec![0, 1, 4, 5]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn employee_viability() {
        let ct = employees();
        assert!(is_viable_fields(&ct, &fids(&ct, &["aD", "lnk", "owner"])));
        assert!(!is_viable_fields(&ct, &fids(&ct, &["mD", "lnk"])));
        assert!(is_viable_fields(&ct, &[]));
        let sp = FieldSpace::from_class_table(&ct, None).unwrap();
        assert!(sp.is_viable(sp.mask_of(&["aD", "lnk", "owner"]).unwrap()));
        assert!(!sp.is_viable(sp.mask_of(&["mD", "lnk"]).unwrap()));
    }

    #[test]
    fn employee_class_reach() {
        let ct = employees();
        let c = |n: &str| ct.class_id(n).unwrap();
        let r = class_reach_closure(&ct, &fids(&ct, &["aD", "lnk", "owner"]));
        assert!(r.contains(c("L2"), c("LP")));
        let id = class_reach_closure(&ct, &[]);
        assert_eq!(id.pairs(), (0..ct.classes.len()).map(|k| (k, k)).collect::<Vec<_>>());
        let l = class_reach_closure(&ct, &fids(&ct, &["lnk"]));
        assert!(l.contains(c("TB"), c("LP")));
        assert!(!l.contains(c("LP"), c("TB")));
    }

    #[test]
    fn non_viable_formula_is_false() {
        let ct = employees();
        let sp = FieldSpace::from_class_table(&ct, None).unwrap();
        let f = sp.only_fields(&["mD", "lnk"]).unwrap();
        assert!(f.leq(&sp.falsity(), &sp));
        assert!(f.equiv(&sp.falsity(), &sp));
        assert!(f.canonicalize(&sp).is_false());
    }

    #[test]
    fn only_fields_and_lattice() {
        let sp = FieldSpace::unconstrained(&["f", "g", "h"]);
        assert_eq!(sp.empty_path().model_vec(), vec![0]);
        assert_eq!(sp.render(&sp.only_fields(&["h", "f"]).unwrap()), "x{f,h}");
        let f = sp.only_fields(&["f"]).unwrap();
        let g = sp.only_fields(&["g"]).unwrap();
        assert!(f.meet(&g).is_false());
        assert_eq!(f.meet(&sp.truth()), f);
        assert_eq!(f.join(&sp.falsity()), f);
        let fg = set(&sp, &[&["f"], &["g"]]);
        assert!(!f.equiv(&fg, &sp));
        assert!(fg.contains(sp.mask_of(&["g"]).unwrap()) && !f.contains(sp.mask_of(&["g"]).unwrap()));
    }

    #[test]
    fn odot_examples() {
        let sp = FieldSpace::unconstrained(&["f", "g", "h"]);
        let f = sp.only_fields(&["f"]).unwrap();
        let h = sp.only_fields(&["h"]).unwrap();
        assert_eq!(f.odot(&h), sp.only_fields(&["f", "h"]).unwrap());
        assert!(sp.falsity().odot(&f).is_false());
        assert_eq!(sp.empty_path().odot(&f), f);
        assert!(sp.truth().odot(&sp.empty_path()).is_true());
        // TRUE ⊙ x{f}: every assignment containing f.
        let up = sp.truth().odot(&f);
        assert_eq!(up.model_count(), 4);
    }

    #[test]
    fn ominus_examples() {
        let sp = FieldSpace::unconstrained(&["f", "g", "h"]);
        let fh = sp.only_fields(&["f", "h"]).unwrap();
        let f = sp.only_fields(&["f"]).unwrap();
        assert_eq!(fh.ominus(&f), set(&sp, &[&["h"], &["f", "h"]]));
        let any = set(&sp, &[&["f"], &["g"]]);
        assert_eq!(any.ominus(&sp.empty_path()), any);
        assert_eq!(
            any.ominus(&sp.only_fields(&["f", "g"]).unwrap()),
            set(&sp, &[&[], &["f"], &["g"]])
        );
        assert!(f.ominus(&sp.falsity()).is_false());
        assert!(sp.truth().ominus(&f).is_true());
        assert_eq!(fh.ominus(&sp.truth()).model_count(), 4);
    }

    #[test]
    fn any_operations() {
        let sp = FieldSpace::unconstrained_with_any(&["fld1", "fld2"]);
        let a1 = sp.only_fields(&["ANY", "fld1"]).unwrap();
        let a2 = sp.only_fields(&["ANY", "fld2"]).unwrap();
        assert_eq!(a1.odot(&a2), sp.only_fields(&["ANY", "fld1", "fld2"]).unwrap());
        let d = a1.ominus(&sp.only_fields(&["fld2"]).unwrap());
        assert_eq!(d, set(&sp, &[&["fld1"], &["ANY", "fld1"]]));
        assert!(sp.is_viable(sp.mask_of(&["ANY"]).unwrap()));
    }

    #[test]
    fn project_tree_fields() {
        let src = "class Tree { Tree left; Tree right; Tree parent; }";
        let ct = build_class_table(&parse_program(src).unwrap()).unwrap();
        let full = FieldSpace::from_class_table(&ct, None).unwrap();
        let left = FieldSpace::from_class_table(&ct, Some(&["left".to_string()])).unwrap();
        let f = set(&full, &[&[], &["left", "right", "parent"]]);
        let p = f.project_fields(&full, &left);
        assert_eq!(p, set(&left, &[&[], &["ANY", "left"]]));
        assert_eq!(left.render(&p), "x{}∨x{ANY,left}");
        // Tracking everything is the identity.
        let all: Vec<String> = ["left", "right", "parent"].iter().map(|s| s.to_string()).collect();
        let same = FieldSpace::from_class_table(&ct, Some(&all)).unwrap();
        assert_eq!(f.project_fields(&full, &same), set(&same, &[&[], &["left", "right", "parent"]]));
        assert!(!same.has_any());
        // Untracked names in annotations map to ANY.
        assert_eq!(left.mask_of(&["right"]).unwrap(), left.any_mask());
    }

    #[test]
    fn rendering() {
        let sp = FieldSpace::unconstrained(&["n", "p"]);
        assert_eq!(sp.render(&sp.falsity()), "FALSE");
        assert_eq!(sp.render(&sp.truth()), "TRUE");
        assert_eq!(sp.render(&sp.empty_path()), "x{}");
        let a = set(&sp, &[&["n", "p"], &[]]);
        assert_eq!(sp.render(&a), "x{}∨x{n,p}");
        assert_eq!(sp.render_compact(&a), "x{}∨x{n,p}");
        let n = set(&sp, &[&["n"], &["n", "p"]]);
        assert_eq!(sp.render_compact(&n), "n");
        assert_eq!(sp.to_json(&n).to_string(), r#"[["n"],["n","p"]]"#);
        let sp3 = FieldSpace::unconstrained(&["left", "right", "parent"]);
        let pr = set(&sp3, &[&["parent"], &["parent", "left"]]);
        assert_eq!(sp3.render_compact(&pr), "parent∧¬right");
    }

    #[test]
    fn true_collapses_and_canonicalizes() {
        let sp = FieldSpace::unconstrained(&["f"]);
        assert!(set(&sp, &[&[], &["f"]]).is_true());
        let ct = employees();
        let esp = FieldSpace::from_class_table(&ct, None).unwrap();
        let all_viable = PathFormula::models(&esp, esp.viable_masks().to_vec());
        assert!(all_viable.canonicalize(&esp).is_true());
        assert!(all_viable.equiv(&esp.truth(), &esp));
    }
}
