//! Reference checks of the formula operators: lattice laws, the laws of
//! `⊙` and `⊖`, and their pointwise definitions over model sets.

use std::collections::BTreeSet;

use fieldreach::formula::{submasks, FieldSpace, Mask, PathFormula};

/// Every formula over the field space (feasible for small universes).
pub fn all_formulae(space: &FieldSpace) -> Vec<PathFormula> {
    let masks: Vec<Mask> = submasks(space.universe()).collect();
    (0u32..1 << masks.len())
        .map(|sel| {
            PathFormula::models(
                space,
                masks
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| sel & (1 << i) != 0)
                    .map(|(_, &m)| m),
            )
        })
        .collect()
}

/// Lattice and order laws on a triple.
pub fn check_lattice(s: &FieldSpace, a: &PathFormula, b: &PathFormula, c: &PathFormula) {
    assert_eq!(a.join(a), *a);
    assert_eq!(a.meet(a), *a);
    assert_eq!(a.join(b), b.join(a));
    assert_eq!(a.meet(b), b.meet(a));
    assert_eq!(a.join(&b.join(c)), a.join(b).join(c));
    assert_eq!(a.meet(&b.meet(c)), a.meet(b).meet(c));
    assert_eq!(a.join(&a.meet(b)), *a);
    assert_eq!(a.meet(&a.join(b)), *a);
    assert_eq!(a.join(&s.falsity()), *a);
    assert_eq!(a.meet(&s.truth()), *a);
    // Order: reflexive, transitive, antisymmetric up to equivalence, and
    // consistent with the lattice operations.
    assert!(a.leq(a, s));
    if a.leq(b, s) && b.leq(c, s) {
        assert!(a.leq(c, s));
    }
    if a.leq(b, s) && b.leq(a, s) {
        assert!(a.equiv(b, s));
    }
    assert_eq!(a.leq(b, s), a.join(b).equiv(b, s));
    assert!(s.falsity().leq(a, s) && a.leq(&s.truth(), s));
}

/// Laws of path concatenation on a triple.
pub fn check_odot(s: &FieldSpace, a: &PathFormula, b: &PathFormula, c: &PathFormula) {
    assert_eq!(a.odot(b), b.odot(a));
    assert_eq!(a.odot(&b.odot(c)), a.odot(b).odot(c));
    assert!(s.falsity().odot(a).is_false() && a.odot(&s.falsity()).is_false());
    assert_eq!(s.empty_path().odot(a), *a);
    if a.leq(b, s) {
        assert!(a.odot(c).leq(&b.odot(c), s));
    }
    // Pointwise definition: every union of a model pair, nothing else.
    let want: BTreeSet<Mask> = a
        .model_vec()
        .iter()
        .flat_map(|&x| b.model_vec().into_iter().map(move |y| x | y))
        .collect();
    assert_eq!(a.odot(b).model_vec().into_iter().collect::<BTreeSet<_>>(), want);
}

/// Laws of path difference on a pair.
pub fn check_ominus(s: &FieldSpace, a: &PathFormula, b: &PathFormula) {
    let d = a.ominus(b);
    if !b.is_false() {
        for m in a.model_vec() {
            assert!(d.contains(m), "F ⊖ G lost a model of F");
        }
    }
    assert_eq!(a.ominus(&s.empty_path()).model_vec(), a.model_vec());
    // Pointwise definition (no `ANY` here): ω′ \ X for X ⊆ ω″.
    if !s.has_any() {
        let mut want = BTreeSet::new();
        for x in a.model_vec() {
            for y in b.model_vec() {
                for r in submasks(x & y) {
                    want.insert(x & !r);
                }
            }
        }
        assert_eq!(d.model_vec().into_iter().collect::<BTreeSet<_>>(), want);
    }
}
