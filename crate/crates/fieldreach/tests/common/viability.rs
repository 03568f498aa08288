//! The employee hierarchy and a brute-force viability oracle.

use std::collections::{BTreeSet, HashSet, VecDeque};

use fieldreach::lang::{parse_program, ClassTable, FieldId, Ty};

/// The employee/device hierarchy.
pub const EMPLOYEES: &str = "
class Emp { LP mD; }
class L1 extends Emp { }
class L2 extends Emp { TB aD; }
class Dev { Emp owner; }
class LP extends Dev { }
class TB extends Dev { LP lnk; }
";

/// Builds the class table of a source text.
pub fn class_table(src: &str) -> ClassTable {
    ClassTable::build(&parse_program(src).unwrap()).unwrap()
}

/// Brute force: breadth-first search over (class of the current object,
/// fields used so far), starting from every class with no field used.
pub fn viable_by_search(ct: &ClassTable, phi: &[FieldId]) -> bool {
    let want: BTreeSet<FieldId> = phi.iter().copied().collect();
    let n = ct.classes.len();
    let mut seen: HashSet<(usize, BTreeSet<FieldId>)> = HashSet::new();
    let mut queue: VecDeque<(usize, BTreeSet<FieldId>)> = (0..n).map(|c| (c, BTreeSet::new())).collect();
    while let Some(st) = queue.pop_front() {
        if st.1 == want {
            return true;
        }
        if !seen.insert(st.clone()) {
            continue;
        }
        let (c, used) = st;
        for &f in &want {
            if !ct.has_field(c, f) {
                continue;
            }
            let Ty::Ref(target) = ct.fields[f].ty else { continue };
            for d in 0..n {
                if ct.is_subclass(d, target) {
                    let mut u = used.clone();
                    u.insert(f);
                    queue.push_back((d, u));
                }
            }
        }
    }
    false
}

/// Every subset of `fields`.
pub fn subsets(fields: &[FieldId]) -> Vec<Vec<FieldId>> {
    (0u32..1 << fields.len())
        .map(|s| {
            fields
                .iter()
                .enumerate()
                .filter(|(i, _)| s & (1 << i) != 0)
                .map(|(_, &f)| f)
                .collect()
        })
        .collect()
}
