//! Comparison domains: coarser reachability/cyclicity abstractions with
//! their abstraction (α) and concretization (γ) maps relative to the
//! path-formula domain, used to measure precision.
//!
//! * [`NoFieldsValue`] — which variables may reach which through a
//!   non-empty path, without field information;
//! * [`ClassPairsValue`] — which classes may reach which (an abstraction
//!   of [`NoFieldsValue`] through declared types);
//! * monotone formulae — path-formulae restricted to upward-closed model
//!   sets (positive clauses only);
//! * [`ScapinEntry`] — "`v` reaches `w` only without traversing the
//!   fields of `B`" statements;
//! * [`QValue`] — for cyclicity, the fields every cycle must traverse.
//!
//! Formulae are compared up to viability; the maps are defined on single
//! entries and lifted pointwise to whole abstract values.

use std::collections::{BTreeMap, BTreeSet};

use crate::domain::RcValue;
use crate::formula::{class_reach_closure, FieldSpace, Mask, PathFormula};
use crate::lang::{ClassId, ClassTable};

// ----------------------------------------------------------------------
// Boolean-function classes.

/// Every mask of the universe of `f`'s field space, by enumeration.
fn all_masks(universe: Mask) -> impl Iterator<Item = Mask> {
    crate::formula::submasks(universe)
}

/// Positive: satisfied by the assignment making every proposition true.
pub fn is_positive(f: &PathFormula) -> bool {
    f.contains(f.universe())
}

/// Definite: the model set is closed under intersection (a formula
/// without models counts as definite).
pub fn is_definite(f: &PathFormula) -> bool {
    let ms = f.model_vec();
    ms.iter().all(|&a| ms.iter().all(|&b| f.contains(a & b)))
}

/// Monotone: the model set is closed upwards.
pub fn is_monotone(f: &PathFormula) -> bool {
    let u = f.universe();
    f.model_vec()
        .iter()
        .all(|&m| all_masks(u & !m).all(|extra| f.contains(m | extra)))
}

// ----------------------------------------------------------------------
// Monotone formulae.

/// Best monotone over-approximation: `FALSE` and `TRUE` (up to viability)
/// pass through; otherwise the conjunction of every positive clause
/// entailed by `f`, i.e. the upward closure of its viable models.
pub fn alpha_monotone(f: &PathFormula, space: &FieldSpace) -> PathFormula {
    if !f.is_satisfiable(space) {
        return space.falsity();
    }
    if space.truth().leq(f, space) {
        return space.truth();
    }
    let u = space.universe();
    let mut out = BTreeSet::new();
    for m in space.display_models(f) {
        for extra in all_masks(u & !m) {
            out.insert(m | extra);
        }
    }
    PathFormula::models(space, out)
}

/// Concretization of a monotone formula: itself.
pub fn gamma_monotone(m: &PathFormula) -> PathFormula {
    m.clone()
}

// ----------------------------------------------------------------------
// Field-exclusion statements.

/// The statements `v ↛^B w` of one pair, kept as the family of the sets
/// `B` (downward closed when produced by [`alpha_scapin`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScapinEntry {
    pub sets: BTreeSet<Mask>,
}

impl ScapinEntry {
    /// The largest excluded set `B` (union of the family).
    pub fn max_excluded(&self) -> Mask {
        self.sets.iter().fold(0, |a, &b| a | b)
    }

    /// The family of all subsets of `b`.
    pub fn principal(b: Mask) -> Self {
        ScapinEntry {
            sets: crate::formula::submasks(b).collect(),
        }
    }
}

/// `v ↛^B w` for every `B` whose fields are all negatively entailed by
/// `f` (over viable models).
pub fn alpha_scapin(f: &PathFormula, space: &FieldSpace) -> ScapinEntry {
    let used = space.display_models(f).iter().fold(0, |a, &m| a | m);
    ScapinEntry::principal(space.universe() & !used)
}

/// `⋀_{fld ∈ B} ¬fld` for the maximal excluded set `B`; `TRUE` when the
/// family is empty (no statement constrains the pair).
pub fn gamma_scapin(e: &ScapinEntry, space: &FieldSpace) -> PathFormula {
    let b = e.max_excluded();
    let u = space.universe();
    PathFormula::models(space, all_masks(u & !b))
}

// ----------------------------------------------------------------------
// Required fields of cycles.

/// Cyclicity abstraction for one variable: `None` when it cannot be
/// cyclic, otherwise the fields every cycle traverses.
pub fn alpha_q(f: &PathFormula, space: &FieldSpace) -> Option<Mask> {
    let ms = space.display_models(f);
    if ms.is_empty() {
        return None;
    }
    Some(ms.iter().fold(space.universe(), |a, &m| a & m))
}

/// `⋀_{fld ∈ B} fld`, or `FALSE` outside the domain.
pub fn gamma_q(q: Option<Mask>, space: &FieldSpace) -> PathFormula {
    match q {
        None => space.falsity(),
        Some(b) => {
            let u = space.universe();
            PathFormula::models(space, all_masks(u & !b).map(|x| x | b))
        }
    }
}

/// The partial map `v ↦ required fields` of a whole value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QValue {
    pub map: BTreeMap<usize, Mask>,
}

/// Lifts [`alpha_q`] to the cyclicity part of a value.
pub fn alpha_q_value(i: &RcValue, vars: &[usize], space: &FieldSpace) -> QValue {
    QValue {
        map: vars
            .iter()
            .filter_map(|&v| alpha_q(i.cyc(v), space).map(|q| (v, q)))
            .collect(),
    }
}

// ----------------------------------------------------------------------
// Reachability without fields.

/// Variable-level reachability statements `v ⇝ w` (non-empty paths).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NoFieldsValue {
    pub pairs: BTreeSet<(usize, usize)>,
}

/// Declared classes of variables (`None` for integers) together with the
/// class table, defining which statements are expressible at all.
#[derive(Clone, Debug)]
pub struct TypeContext<'a> {
    pub ct: &'a ClassTable,
    pub types: Vec<Option<ClassId>>,
}

impl<'a> TypeContext<'a> {
    /// `v ⇝ w` is expressible: some subclass of `δ(w)` is reachable from
    /// some subclass of `δ(v)`.
    pub fn admits(&self, v: usize, w: usize) -> bool {
        let (Some(a), Some(b)) = (self.types[v], self.types[w]) else {
            return false;
        };
        let all: Vec<_> = self.ct.ref_fields();
        let r = class_reach_closure(self.ct, &all);
        let n = self.ct.classes.len();
        (0..n).any(|k1| {
            self.ct.is_subclass(k1, a) && (0..n).any(|k2| self.ct.is_subclass(k2, b) && r.contains(k1, k2))
        })
    }

    /// Reference variables.
    pub fn refs(&self) -> Vec<usize> {
        (0..self.types.len()).filter(|&v| self.types[v].is_some()).collect()
    }
}

/// `v ⇝ w` iff the pair is expressible and `reach(v, w)` has a viable
/// non-empty model.
pub fn alpha_nofields(i: &RcValue, tc: &TypeContext, space: &FieldSpace) -> NoFieldsValue {
    let mut pairs = BTreeSet::new();
    for v in tc.refs() {
        for w in tc.refs() {
            let nonempty = space.display_models(i.reach(v, w)).iter().any(|&m| m != 0);
            if nonempty && tc.admits(v, w) {
                pairs.insert((v, w));
            }
        }
    }
    NoFieldsValue { pairs }
}

/// `TRUE` for listed pairs, `¬(f₁ ∨ … ∨ fₙ)` (only the empty path)
/// elsewhere. The domain says nothing about cycles, so every cyclicity
/// entry of a reference variable is `TRUE`.
pub fn gamma_nofields(x: &NoFieldsValue, n: usize, refs: &[usize], space: &FieldSpace) -> RcValue {
    let mut r = RcValue::bottom(n, space);
    for &v in refs {
        r.set_cyc(v, space.truth());
        for &w in refs {
            let f = if x.pairs.contains(&(v, w)) {
                space.truth()
            } else {
                space.empty_path()
            };
            r.set_reach(v, w, f);
        }
    }
    r
}

// ----------------------------------------------------------------------
// Class-level reachability.

/// A set of class pairs, compared through its downward closure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ClassPairsValue {
    pub pairs: BTreeSet<(ClassId, ClassId)>,
}

impl ClassPairsValue {
    /// Adds every pair of subclasses of a listed pair.
    pub fn downward_closure(&self, ct: &ClassTable) -> ClassPairsValue {
        let n = ct.classes.len();
        let mut out = BTreeSet::new();
        for &(a, b) in &self.pairs {
            for x in 0..n {
                for y in 0..n {
                    if ct.is_subclass(x, a) && ct.is_subclass(y, b) {
                        out.insert((x, y));
                    }
                }
            }
        }
        ClassPairsValue { pairs: out }
    }

    /// Equivalence: equal downward closures.
    pub fn equiv(&self, o: &ClassPairsValue, ct: &ClassTable) -> bool {
        self.downward_closure(ct) == o.downward_closure(ct)
    }
}

/// All pairs `(κ₁, κ₂)` with `κ₂` reachable from `κ₁` (possibly by the
/// empty path), downward closed.
pub fn class_pairs(ct: &ClassTable) -> ClassPairsValue {
    let r = class_reach_closure(ct, &ct.ref_fields());
    ClassPairsValue {
        pairs: r.pairs().into_iter().collect(),
    }
    .downward_closure(ct)
}

/// Declared-type pairs of the statements.
pub fn alpha_classes(x: &NoFieldsValue, tc: &TypeContext) -> ClassPairsValue {
    ClassPairsValue {
        pairs: x
            .pairs
            .iter()
            .filter_map(|&(v, w)| Some((tc.types[v]?, tc.types[w]?)))
            .collect(),
    }
}

/// Every expressible statement whose declared types fall below a listed
/// pair.
pub fn gamma_classes(c: &ClassPairsValue, tc: &TypeContext) -> NoFieldsValue {
    let mut pairs = BTreeSet::new();
    for v in tc.refs() {
        for w in tc.refs() {
            let (a, b) = (tc.types[v].unwrap(), tc.types[w].unwrap());
            let covered = c
                .pairs
                .iter()
                .any(|&(k1, k2)| tc.ct.is_subclass(a, k1) && tc.ct.is_subclass(b, k2));
            if covered && tc.admits(v, w) {
                pairs.insert((v, w));
            }
        }
    }
    NoFieldsValue { pairs }
}

// ----------------------------------------------------------------------
// Side-by-side rendering.

/// A textual comparison of a value in every domain, one line per entry.
pub fn describe(i: &RcValue, names: &[String], tc: &TypeContext, space: &FieldSpace) -> Vec<String> {
    let refs = tc.refs();
    let nf = alpha_nofields(i, tc, space);
    let cls = alpha_classes(&nf, tc);
    let mut out = Vec::new();
    for &v in &refs {
        for &w in &refs {
            let f = i.reach(v, w);
            let mono = alpha_monotone(f, space);
            let sc = alpha_scapin(f, space);
            out.push(format!(
                "reach({},{}): fields {} | no-fields {} | monotone {} | excluded {{{}}}",
                names[v],
                names[w],
                space.render(&f.canonicalize(space)),
                if nf.pairs.contains(&(v, w)) { "reaches" } else { "-" },
                space.render(&mono.canonicalize(space)),
                space.names_of(sc.max_excluded()).join(","),
            ));
        }
    }
    for &v in &refs {
        let q = alpha_q(i.cyc(v), space);
        out.push(format!(
            "cyc({}): fields {} | required {}",
            names[v],
            space.render(&i.cyc(v).canonicalize(space)),
            match q {
                None => "acyclic".to_string(),
                Some(b) => format!("{{{}}}", space.names_of(b).join(",")),
            }
        ));
    }
    let mut cp: Vec<String> = cls
        .downward_closure(tc.ct)
        .pairs
        .iter()
        .map(|&(a, b)| format!("({},{})", tc.ct.class_name(a), tc.ct.class_name(b)))
        .collect();
    cp.sort();
    out.push(format!("class pairs: {}", cp.join(" ")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fg() -> FieldSpace {
        FieldSpace::unconstrained(&["f", "g"])
    }

    #[test]
    fn exclusive_disjunction_becomes_disjunction() {
        let s = fg();
        let xor = s.from_name_lists(&[vec!["f"], vec!["g"]]).unwrap();
        let or = s.from_name_lists(&[vec!["f"], vec!["g"], vec!["f", "g"]]).unwrap();
        assert_eq!(alpha_monotone(&xor, &s), or);
        assert!(xor.leq(&or, &s) && !or.leq(&xor, &s));
    }

    #[test]
    fn required_fields_of_dll_cycles_are_empty() {
        let s = FieldSpace::unconstrained(&["n", "p"]);
        let a = s.from_name_lists(&[vec![], vec!["n", "p"]]).unwrap();
        assert_eq!(alpha_q(&a, &s), Some(0));
        let np = s.only_fields(&["n", "p"]).unwrap();
        assert_eq!(alpha_q(&np, &s), Some(s.universe()));
        assert_eq!(alpha_q(&s.falsity(), &s), None);
    }

    #[test]
    fn excluded_fields() {
        let s = FieldSpace::unconstrained(&["f", "g", "h"]);
        let f = s.from_name_lists(&[vec!["h"], vec!["f", "h"]]).unwrap();
        assert_eq!(alpha_scapin(&f, &s).max_excluded(), s.mask_of(&["g"]).unwrap());
        assert_eq!(alpha_scapin(&s.truth(), &s).max_excluded(), 0);
        assert_eq!(alpha_scapin(&s.falsity(), &s).max_excluded(), s.universe());
    }

    #[test]
    fn boolean_classes() {
        let s = fg();
        let p_or_q = s.from_name_lists(&[vec!["f"], vec!["g"], vec!["f", "g"]]).unwrap();
        assert!(is_monotone(&p_or_q) && is_positive(&p_or_q) && !is_definite(&p_or_q));
        // ¬f ∨ g
        let nf_or_g = s.from_name_lists(&[vec![], vec!["g"], vec!["f", "g"]]).unwrap();
        assert!(is_definite(&nf_or_g) && !is_monotone(&nf_or_g));
        // ¬f ∧ ¬g
        let nn = s.empty_path();
        assert!(is_definite(&nn) && !is_positive(&nn));
    }
}
