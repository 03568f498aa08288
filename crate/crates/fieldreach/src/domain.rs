//! The reduced product of field-reachability and field-cyclicity.
//!
//! An [`RcValue`] maps every ordered pair of variables `(v, w)` of a scope
//! to a path-formula `reach(v, w)` (every path from `v` to `w` satisfies
//! it) and every variable `v` to a path-formula `cyc(v)` (every cycle
//! reachable from `v` satisfies it). Variables are referred to by their
//! index in the scope; the value itself does not know names or types.
//!
//! The value is in *normal form* when `cyc(v) ≥ reach(v, v)` for every
//! `v`; every value produced by the analysis is normalised.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::formula::{FieldSpace, PathFormula};

/// Dense reachability/cyclicity information over `n` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RcValue {
    n: usize,
    reach: Vec<PathFormula>,
    cyc: Vec<PathFormula>,
}

impl RcValue {
    /// The bottom value: every entry `FALSE`.
    pub fn bottom(n: usize, space: &FieldSpace) -> Self {
        RcValue {
            n,
            reach: vec![space.falsity(); n * n],
            cyc: vec![space.falsity(); n],
        }
    }

    /// The top value over the given reference variables (other variables
    /// stay `FALSE`).
    pub fn top(n: usize, refs: &[usize], space: &FieldSpace) -> Self {
        let mut r = Self::bottom(n, space);
        for &v in refs {
            r.cyc[v] = space.truth();
            for &w in refs {
                r.reach[v * n + w] = space.truth();
            }
        }
        r
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True if the scope has no variables.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `reach(v, w)`.
    pub fn reach(&self, v: usize, w: usize) -> &PathFormula {
        &self.reach[v * self.n + w]
    }

    /// `cyc(v)`.
    pub fn cyc(&self, v: usize) -> &PathFormula {
        &self.cyc[v]
    }

    /// Overwrites `reach(v, w)` (no re-normalisation).
    pub fn set_reach(&mut self, v: usize, w: usize, f: PathFormula) {
        self.reach[v * self.n + w] = f;
    }

    /// Overwrites `cyc(v)` (no re-normalisation).
    pub fn set_cyc(&mut self, v: usize, f: PathFormula) {
        self.cyc[v] = f;
    }

    /// Functional update of `reach(v, w)`.
    pub fn update_reach(&self, v: usize, w: usize, f: PathFormula) -> Self {
        let mut r = self.clone();
        r.set_reach(v, w, f);
        r
    }

    /// Functional update of `cyc(v)`.
    pub fn update_cyc(&self, v: usize, f: PathFormula) -> Self {
        let mut r = self.clone();
        r.set_cyc(v, f);
        r
    }

    fn clear_var(&mut self, v: usize, f: &PathFormula) {
        for z in 0..self.n {
            self.reach[v * self.n + z] = f.clone();
            self.reach[z * self.n + v] = f.clone();
        }
        self.cyc[v] = f.clone();
    }

    /// Existential projection `∃vs I`: every entry mentioning a variable
    /// of `vs` becomes `FALSE`.
    pub fn project(&self, vs: &[usize]) -> Self {
        let mut r = self.clone();
        for &v in vs {
            let f = self.cyc[v].false_like();
            r.clear_var(v, &f);
        }
        r
    }

    /// Renaming `I[v/w]`: `w` takes over every entry of `v`, and `v` is
    /// cleared. Entries of `w` itself are overwritten.
    pub fn rename(&self, v: usize, w: usize) -> Self {
        if v == w {
            return self.clone();
        }
        let n = self.n;
        let fls = self.cyc[v].false_like();
        let mut r = self.clone();
        for z in 0..n {
            if z == v || z == w {
                continue;
            }
            r.reach[w * n + z] = self.reach[v * n + z].clone();
            r.reach[z * n + w] = self.reach[z * n + v].clone();
        }
        r.reach[w * n + w] = self.reach[v * n + v].clone();
        r.cyc[w] = self.cyc[v].clone();
        r.clear_var(v, &fls);
        r
    }

    /// Copy `I[v+w]`: `w` becomes an alias of `v`. Rows and columns of `v`
    /// are duplicated, `reach(v,w) = reach(w,v) = reach(w,w) = reach(v,v)`
    /// and `cyc(w) = cyc(v)`; `v` keeps its information.
    pub fn copy(&self, v: usize, w: usize) -> Self {
        if v == w {
            return self.clone();
        }
        let n = self.n;
        let mut r = self.clone();
        for z in 0..n {
            if z == v || z == w {
                continue;
            }
            r.reach[w * n + z] = self.reach[v * n + z].clone();
            r.reach[z * n + w] = self.reach[z * n + v].clone();
        }
        let vv = self.reach[v * n + v].clone();
        r.reach[w * n + w] = vv.clone();
        r.reach[v * n + w] = vv.clone();
        r.reach[w * n + v] = vv;
        r.cyc[w] = self.cyc[v].clone();
        r
    }

    /// Normal form: `cyc(v) := cyc(v) ∨ reach(v, v)`.
    pub fn normalize(&self) -> Self {
        let mut r = self.clone();
        for v in 0..self.n {
            r.cyc[v] = self.cyc[v].join(&self.reach[v * self.n + v]);
        }
        r
    }

    /// Whether `cyc(v) ⊇ reach(v, v)` holds syntactically for every `v`.
    pub fn is_normal(&self) -> bool {
        (0..self.n).all(|v| self.cyc[v].join(&self.reach[v * self.n + v]) == self.cyc[v])
    }

    /// Pointwise join (the result of joining normal values is normal).
    ///
    /// # Panics
    /// If the two values have different scopes.
    pub fn join(&self, o: &RcValue) -> Self {
        assert_eq!(self.n, o.n, "joining values of different scopes");
        RcValue {
            n: self.n,
            reach: self.reach.iter().zip(&o.reach).map(|(a, b)| a.join(b)).collect(),
            cyc: self.cyc.iter().zip(&o.cyc).map(|(a, b)| a.join(b)).collect(),
        }
    }

    /// Pointwise ordering up to viability.
    pub fn leq(&self, o: &RcValue, space: &FieldSpace) -> bool {
        self.n == o.n
            && self.reach.iter().zip(&o.reach).all(|(a, b)| a.leq(b, space))
            && self.cyc.iter().zip(&o.cyc).all(|(a, b)| a.leq(b, space))
    }

    /// Pointwise equivalence up to viability.
    pub fn equiv(&self, o: &RcValue, space: &FieldSpace) -> bool {
        self.leq(o, space) && o.leq(self, space)
    }

    /// Pointwise display normal form of every entry.
    pub fn canonicalize(&self, space: &FieldSpace) -> Self {
        RcValue {
            n: self.n,
            reach: self.reach.iter().map(|f| f.canonicalize(space)).collect(),
            cyc: self.cyc.iter().map(|f| f.canonicalize(space)).collect(),
        }
    }

    /// Builds a value over `new_n` variables where new variable `i` reads
    /// the entries of old variable `map[i]` (or `FALSE` when `None`).
    pub fn restrict(&self, map: &[Option<usize>], space: &FieldSpace) -> Self {
        let new_n = map.len();
        let mut r = Self::bottom(new_n, space);
        for (i, mi) in map.iter().enumerate() {
            let Some(a) = *mi else { continue };
            r.cyc[i] = self.cyc[a].clone();
            for (j, mj) in map.iter().enumerate() {
                if let Some(b) = *mj {
                    r.reach[i * new_n + j] = self.reach[a * self.n + b].clone();
                }
            }
        }
        r
    }

    /// Builds a value over `new_n` variables by sending old variable `a`
    /// to `map[a]`; entries landing on the same place are joined.
    pub fn embed(&self, map: &[Option<usize>], new_n: usize, space: &FieldSpace) -> Self {
        let mut r = Self::bottom(new_n, space);
        for (a, ma) in map.iter().enumerate() {
            let Some(i) = *ma else { continue };
            r.cyc[i] = r.cyc[i].join(&self.cyc[a]);
            for (b, mb) in map.iter().enumerate() {
                if let Some(j) = *mb {
                    let k = i * new_n + j;
                    r.reach[k] = r.reach[k].join(&self.reach[a * self.n + b]);
                }
            }
        }
        r
    }

    /// JSON rendering over the variables selected by `shown`, with names
    /// `names`: `{"reach": {"(v,w)": [[..]]}, "cyc": {"v": [[..]]}}`, sorted.
    pub fn to_json(&self, names: &[String], shown: &[usize], space: &FieldSpace) -> Value {
        let mut reach = BTreeMap::new();
        let mut cyc = BTreeMap::new();
        for &v in shown {
            cyc.insert(names[v].clone(), space.to_json(&self.cyc[v]));
            for &w in shown {
                reach.insert(
                    format!("({},{})", names[v], names[w]),
                    space.to_json(&self.reach[v * self.n + w]),
                );
            }
        }
        let mut m = Map::new();
        m.insert("reach".into(), Value::Object(reach.into_iter().collect()));
        m.insert("cyc".into(), Value::Object(cyc.into_iter().collect()));
        Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Variables: 0 = v, 1 = w, 2 = z.
    fn setup() -> (FieldSpace, RcValue) {
        let sp = FieldSpace::unconstrained(&["f", "n", "p"]);
        let mut i = RcValue::bottom(3, &sp);
        i.set_reach(0, 0, sp.empty_path());
        i.set_reach(0, 2, sp.only_fields(&["f"]).unwrap());
        i.set_cyc(0, sp.only_fields(&["n", "p"]).unwrap());
        (sp, i.normalize())
    }

    #[test]
    fn project_clears_entries() {
        let (sp, i) = setup();
        let p = i.project(&[0]);
        assert!(p.reach(0, 2).is_false() && p.cyc(0).is_false());
        assert_eq!(i.project(&[]), i);
        assert_eq!(i.project(&[0, 1, 2]), RcValue::bottom(3, &sp));
        assert_eq!(i.project(&[0]).project(&[1]), i.project(&[0, 1]));
    }

    #[test]
    fn rename_moves_entries() {
        let (sp, i) = setup();
        let r = i.rename(0, 1);
        assert_eq!(r.reach(1, 2), &sp.only_fields(&["f"]).unwrap());
        assert!(r.reach(0, 2).is_false());
        assert_eq!(i.rename(0, 0), i);
        let b = RcValue::bottom(3, &sp);
        assert_eq!(b.rename(0, 1), b);
    }

    #[test]
    fn copy_aliases() {
        let (sp, i) = setup();
        let c = i.copy(0, 1);
        assert_eq!(c.reach(1, 1), &sp.empty_path());
        assert_eq!(c.reach(0, 1), &sp.empty_path());
        assert_eq!(c.reach(1, 0), &sp.empty_path());
        assert_eq!(c.reach(1, 2), &sp.only_fields(&["f"]).unwrap());
        assert_eq!(c.cyc(1), c.cyc(0));
        let b = RcValue::bottom(3, &sp);
        assert_eq!(b.copy(0, 1), b);
    }

    #[test]
    fn normalize_and_lattice() {
        let sp = FieldSpace::unconstrained(&["f", "g"]);
        let mut i = RcValue::bottom(1, &sp);
        i.set_reach(0, 0, sp.only_fields(&["f", "g"]).unwrap());
        let n = i.normalize();
        assert_eq!(n.cyc(0), &sp.only_fields(&["f", "g"]).unwrap());
        assert_eq!(n.normalize(), n);
        assert!(n.is_normal() && !i.is_normal());
        let b = RcValue::bottom(1, &sp);
        assert_eq!(b.normalize(), b);
        assert_eq!(n.join(&b), n);
        assert!(b.leq(&n, &sp));
        let upd = n.update_cyc(0, sp.truth()).normalize();
        assert!(upd.is_normal());
    }

    #[test]
    fn restrict_and_embed() {
        let (sp, i) = setup();
        let r = i.restrict(&[Some(2), Some(0)], &sp);
        assert_eq!(r.reach(1, 0), &sp.only_fields(&["f"]).unwrap());
        // Two old variables landing on one new variable are joined.
        let mut j = RcValue::bottom(2, &sp);
        j.set_cyc(0, sp.only_fields(&["f"]).unwrap());
        j.set_cyc(1, sp.only_fields(&["n"]).unwrap());
        let e = j.embed(&[Some(0), Some(0)], 1, &sp);
        assert_eq!(e.cyc(0).model_count(), 2);
    }

    #[test]
    fn json_shape() {
        let (sp, i) = setup();
        let names: Vec<String> = ["v", "w", "z"].iter().map(|s| s.to_string()).collect();
        let j = i.to_json(&names, &[0, 2], &sp);
        assert_eq!(j["reach"]["(v,z)"].to_string(), r#"[["f"]]"#);
        assert_eq!(j["cyc"]["v"].to_string(), r#"[[],["n","p"]]"#);
    }
}
