//! Expected table for the loop building a doubly-linked list.

pub type P = fn(&dyn Fn(&str) -> bool) -> bool;

pub fn ff(_: &dyn Fn(&str) -> bool) -> bool {
    false
}
pub fn e(h: &dyn Fn(&str) -> bool) -> bool {
    !h("n") && !h("p")
}
pub fn e_np(h: &dyn Fn(&str) -> bool) -> bool {
    e(h) || (h("n") && h("p"))
}
pub fn only_n(h: &dyn Fn(&str) -> bool) -> bool {
    h("n") && !h("p")
}
pub fn n(h: &dyn Fn(&str) -> bool) -> bool {
    h("n")
}
pub fn p(h: &dyn Fn(&str) -> bool) -> bool {
    h("p")
}

/// Columns: reach(x,x) reach(x,tmp) reach(tmp,x) reach(tmp,tmp) cyc(x)
/// cyc(tmp).
pub fn expected() -> Vec<(&'static str, [P; 6])> {
    vec![
        ("1", [ff, ff, ff, ff, ff, ff]),
        ("2", [ff, ff, ff, e, ff, e]),
        ("3", [ff, ff, ff, e, ff, e]),
        ("4", [e, ff, ff, e, e, e]),
        ("5", [e, only_n, ff, e, e, e]),
        ("6", [e_np, n, p, e_np, e_np, e_np]),
        ("7", [e_np; 6]),
        ("8", [e_np; 6]),
        ("3'", [e_np; 6]),
        ("4'", [e, ff, ff, e_np, e, e_np]),
        ("5'", [e, n, ff, e_np, e_np, e_np]),
        ("6'", [e_np, n, p, e_np, e_np, e_np]),
        ("7'", [e_np; 6]),
        ("8'", [e_np; 6]),
    ]
}

