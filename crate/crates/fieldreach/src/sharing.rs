//! Deep-sharing and purity information.
//!
//! The reachability analysis relies on two auxiliary facts about each
//! program point:
//!
//! * `DS(v, w)`: `v` and `w` *may deep-share*, i.e. may both reach a common
//!   location through non-empty paths. Absence of the pair guarantees that
//!   they do not. `DS(v, v)` means that `v` may have a non-null reference
//!   field.
//! * purity: an input of the current method (the receiver or a formal
//!   parameter) is *impure* when the method may have updated a field of an
//!   object reachable from the input's entry value.
//!
//! They are computed by a set-sharing style analysis over an [`SpValue`],
//! which also keeps a plain sharing relation `SH(v, w)` (`v` and `w` may
//! reach a common location, possibly through empty paths; `SH(v, v)` means
//! that `v` may be non-null).
//!
//! The deep-sharing relation computed here is deliberately coarser than
//! the strict definition: whenever `v` may reach `w` through a non-empty
//! path, `DS(v, w)` is also present. The field-access rule of the
//! reachability analysis relies on this to account for variables that
//! alias the object being read.

use std::collections::BTreeSet;

/// Sharing, deep-sharing and purity information over `n` variables and
/// `k` method inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpValue {
    n: usize,
    sh: Vec<bool>,
    ds: Vec<bool>,
    impure: Vec<bool>,
}

impl SpValue {
    /// No sharing, every input pure.
    pub fn bottom(n: usize, inputs: usize) -> Self {
        SpValue {
            n,
            sh: vec![false; n * n],
            ds: vec![false; n * n],
            impure: vec![false; inputs],
        }
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True if there are no variables.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of inputs tracked for purity.
    pub fn inputs(&self) -> usize {
        self.impure.len()
    }

    /// `SH(a, b)`.
    pub fn sh(&self, a: usize, b: usize) -> bool {
        self.sh[a * self.n + b]
    }

    /// `DS(a, b)`.
    pub fn ds(&self, a: usize, b: usize) -> bool {
        self.ds[a * self.n + b]
    }

    /// Whether input `i` may have been updated.
    pub fn impure(&self, i: usize) -> bool {
        self.impure[i]
    }

    /// Adds `SH(a, b)` (symmetric).
    pub fn add_sh(&mut self, a: usize, b: usize) {
        self.sh[a * self.n + b] = true;
        self.sh[b * self.n + a] = true;
    }

    /// Adds `DS(a, b)` (symmetric).
    pub fn add_ds(&mut self, a: usize, b: usize) {
        self.ds[a * self.n + b] = true;
        self.ds[b * self.n + a] = true;
    }

    /// Flags input `i` as impure.
    pub fn set_impure(&mut self, i: usize) {
        self.impure[i] = true;
    }

    /// Unordered `DS` pairs `(a, b)` with `a ≤ b`.
    pub fn ds_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for a in 0..self.n {
            for b in a..self.n {
                if self.ds(a, b) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    /// Removes every pair mentioning a variable of `vs`.
    pub fn project(&self, vs: &[usize]) -> Self {
        let mut r = self.clone();
        for &v in vs {
            for z in 0..self.n {
                for (a, b) in [(v, z), (z, v)] {
                    r.sh[a * self.n + b] = false;
                    r.ds[a * self.n + b] = false;
                }
            }
        }
        r
    }

    /// `w` takes over the pairs of `v`; `v` is cleared.
    pub fn rename(&self, v: usize, w: usize) -> Self {
        if v == w {
            return self.clone();
        }
        let mut r = self.project(&[w]);
        for z in 0..self.n {
            let zz = if z == v { w } else { z };
            if self.sh(v, z) {
                r.add_sh(w, zz);
            }
            if self.ds(v, z) {
                r.add_ds(w, zz);
            }
        }
        r.project(&[v])
    }

    /// `w` becomes an alias of `v`.
    pub fn copy(&self, v: usize, w: usize) -> Self {
        if v == w {
            return self.clone();
        }
        let mut r = self.project(&[w]);
        for z in 0..self.n {
            if z == w {
                continue;
            }
            if self.sh(v, z) {
                r.add_sh(w, z);
            }
            if self.ds(v, z) {
                r.add_ds(w, z);
            }
        }
        if self.sh(v, v) {
            r.add_sh(w, w);
            r.add_sh(v, w);
        }
        if self.ds(v, v) {
            r.add_ds(w, w);
            r.add_ds(v, w);
        }
        r
    }

    /// Pointwise union.
    pub fn join(&self, o: &SpValue) -> Self {
        assert_eq!(self.n, o.n, "joining sharing values of different scopes");
        SpValue {
            n: self.n,
            sh: self.sh.iter().zip(&o.sh).map(|(a, b)| *a || *b).collect(),
            ds: self.ds.iter().zip(&o.ds).map(|(a, b)| *a || *b).collect(),
            impure: self.impure.iter().zip(&o.impure).map(|(a, b)| *a || *b).collect(),
        }
    }

    /// Pointwise inclusion.
    pub fn leq(&self, o: &SpValue) -> bool {
        self.n == o.n
            && self.sh.iter().zip(&o.sh).all(|(a, b)| !*a || *b)
            && self.ds.iter().zip(&o.ds).all(|(a, b)| !*a || *b)
            && self.impure.iter().zip(&o.impure).all(|(a, b)| !*a || *b)
    }

    /// New variable `i` reads old variable `map[i]`; purity flags are
    /// reset to `inputs` pure inputs.
    pub fn restrict(&self, map: &[Option<usize>], inputs: usize) -> Self {
        let mut r = SpValue::bottom(map.len(), inputs);
        for (i, a) in map.iter().enumerate() {
            for (j, b) in map.iter().enumerate() {
                if let (Some(a), Some(b)) = (a, b) {
                    if self.sh(*a, *b) {
                        r.add_sh(i, j);
                    }
                    if self.ds(*a, *b) {
                        r.add_ds(i, j);
                    }
                }
            }
        }
        r
    }

    /// Old variable `a` is sent to `map[a]` (pairs are unioned); purity
    /// flags are reset to `inputs` pure inputs.
    pub fn embed(&self, map: &[Option<usize>], new_n: usize, inputs: usize) -> Self {
        let mut r = SpValue::bottom(new_n, inputs);
        for (a, i) in map.iter().enumerate() {
            for (b, j) in map.iter().enumerate() {
                if let (Some(i), Some(j)) = (i, j) {
                    if self.sh(a, b) {
                        r.add_sh(*i, *j);
                    }
                    if self.ds(a, b) {
                        r.add_ds(*i, *j);
                    }
                }
            }
        }
        r
    }

    /// Replaces the purity flags.
    pub fn with_impure(mut self, impure: Vec<bool>) -> Self {
        self.impure = impure;
        self
    }

    /// The purity flags.
    pub fn impure_flags(&self) -> &[bool] {
        &self.impure
    }
}

/// `new κ`: the result is non-null and shares with nothing else.
pub fn eval_new(sp: &SpValue, rho: usize) -> SpValue {
    let mut r = sp.project(&[rho]);
    r.add_sh(rho, rho);
    r
}

/// Reading a reference variable: the result aliases it.
pub fn eval_var(sp: &SpValue, v: usize, rho: usize) -> SpValue {
    sp.copy(v, rho)
}

/// Reading the reference field `v.f`.
///
/// The result can only be non-null if `v` has a non-null field
/// (`DS(v, v)`), in which case it shares with everything `v` shares with,
/// and deep-shares with `v` (over-approximation: `v` reaches it through a
/// non-empty path) and with itself. It deep-shares with everything that
/// deep-shares with `v`.
pub fn eval_field(sp: &SpValue, v: usize, rho: usize) -> SpValue {
    let mut r = sp.project(&[rho]);
    let deep = sp.ds(v, v);
    for z in 0..sp.len() {
        if z == rho {
            continue;
        }
        if deep && sp.sh(v, z) {
            r.add_sh(rho, z);
        }
        if sp.ds(v, z) {
            r.add_ds(rho, z);
        }
    }
    if deep {
        r.add_sh(rho, rho);
        r.add_sh(rho, v);
        r.add_ds(rho, v);
        r.add_ds(rho, rho);
    }
    r
}

/// `v := ρ`: forget `v`, then rename the result into it.
pub fn assign(sp: &SpValue, v: usize, rho: usize) -> SpValue {
    sp.project(&[v]).rename(rho, v)
}

/// `v.f := ρ` (with `sp` the state after evaluating the right-hand side).
///
/// Every variable `u` sharing with `v` may now reach the structure of
/// `ρ`: with `A = {u | SH(u, v)}` and `B = {z | SH(z, ρ)}`, when both `v`
/// and `ρ` may be non-null, `DS` is added on `A × (A ∪ B)` and `SH` on
/// `A × B`. Input `i` becomes impure when its entry value (held by
/// `handles[i]`) may share with `v`.
pub fn field_update(sp: &SpValue, v: usize, rho: usize, handles: &[usize]) -> SpValue {
    let mut r = sp.clone();
    for (i, &h) in handles.iter().enumerate() {
        if sp.sh(v, h) {
            r.set_impure(i);
        }
    }
    if !(sp.sh(v, v) && sp.sh(rho, rho)) {
        return r;
    }
    let a: Vec<usize> = (0..sp.len()).filter(|&u| sp.sh(u, v)).collect();
    let b: Vec<usize> = (0..sp.len()).filter(|&z| sp.sh(z, rho)).collect();
    for &x in &a {
        for &y in a.iter().chain(&b) {
            r.add_ds(x, y);
        }
        for &y in &b {
            r.add_sh(x, y);
        }
    }
    r
}

/// Effect of a call `v₀.m(v₁..vₙ)` on the caller's sharing information.
///
/// * `actuals[i]` is the caller variable passed at input position `i`;
/// * `exit` is the callee exit information over `[inputs…, out]`
///   (entry values of the inputs, and the result);
/// * `handles[i]` holds the entry value of the caller's own input `i`.
///
/// Returns the new caller value and the callee exit information mapped to
/// the caller scope (`I_sp''`).
pub fn call(
    sp: &SpValue,
    actuals: &[usize],
    rho: usize,
    exit: &SpValue,
    handles: &[usize],
) -> (SpValue, SpValue) {
    let n = sp.len();
    let k = actuals.len();
    let out = k;
    let mut map: Vec<Option<usize>> = actuals.iter().map(|&a| Some(a)).collect();
    map.push(Some(rho));
    let mapped = exit.embed(&map, n, sp.inputs());

    let mut r = sp.project(&[rho]);
    // Everything that shares with each actual, the actual included.
    let s: Vec<Vec<usize>> = actuals
        .iter()
        .map(|&v| {
            let mut set: Vec<usize> = (0..n).filter(|&z| z != rho && sp.sh(z, v)).collect();
            if !set.contains(&v) {
                set.push(v);
            }
            set
        })
        .collect();
    for i in 0..k {
        for j in 0..k {
            if !(exit.impure(i) || exit.impure(j)) {
                continue;
            }
            let (dsij, shij) = (exit.ds(i, j), exit.sh(i, j));
            if !(dsij || shij) {
                continue;
            }
            for &a in &s[i] {
                for &b in &s[j] {
                    r.add_sh(a, b);
                    if dsij {
                        r.add_ds(a, b);
                    }
                }
            }
        }
    }
    if exit.sh(out, out) {
        r.add_sh(rho, rho);
    }
    if exit.ds(out, out) {
        r.add_ds(rho, rho);
    }
    for (i, si) in s.iter().enumerate().take(k) {
        if exit.sh(out, i) || exit.ds(out, i) {
            for &z in si {
                r.add_sh(rho, z);
                r.add_ds(rho, z);
            }
        }
    }
    // Purity of the caller's own inputs.
    for (h_idx, &h) in handles.iter().enumerate() {
        for (j, &vj) in actuals.iter().enumerate() {
            if exit.impure(j) && sp.sh(h, vj) {
                r.set_impure(h_idx);
            }
        }
    }
    (r, mapped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_and_rename() {
        let mut s = SpValue::bottom(3, 0);
        s.add_sh(0, 0);
        s.add_ds(0, 0);
        s.add_sh(0, 1);
        let c = s.copy(0, 2);
        assert!(c.sh(2, 2) && c.ds(2, 0) && c.sh(2, 1));
        let r = s.rename(0, 2);
        assert!(r.sh(2, 2) && r.sh(2, 1) && !r.sh(0, 0) && r.ds(2, 2));
    }

    #[test]
    fn field_update_builds_deep_sharing() {
        // Variables: 0 = x, 1 = tmp, 2 = ρ.
        let mut s = SpValue::bottom(3, 0);
        s.add_sh(0, 0);
        s.add_sh(1, 1);
        let s = eval_var(&s, 1, 2);
        let r = field_update(&s, 0, 2, &[]);
        let r = r.project(&[2]);
        assert_eq!(r.ds_pairs(), [(0, 0), (0, 1)].into_iter().collect());
        assert!(r.sh(0, 1));
    }

    #[test]
    fn aliasing_is_not_deep_sharing() {
        let mut s = SpValue::bottom(3, 0);
        let s2 = eval_new(&s, 2);
        s = assign(&s2, 0, 2);
        let s = assign(&eval_var(&s, 0, 2), 1, 2);
        assert!(s.sh(0, 1));
        assert!(s.ds_pairs().is_empty());
    }

    #[test]
    fn update_marks_impure_input() {
        // 0 = x1 (param), 1 = x2 (param), 2 = ū1, 3 = ū2, 4 = ρ.
        let mut s = SpValue::bottom(5, 2);
        for (a, b) in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 2), (1, 3)] {
            s.add_sh(a, b);
        }
        let s = eval_var(&s, 1, 4);
        let r = field_update(&s, 0, 4, &[2, 3]);
        assert!(r.impure(0));
        assert!(!r.impure(1));
    }
}
