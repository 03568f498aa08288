//! Expected tables for `join` on parent-linked trees.

/// Column order: reach(l,l) reach(l,r) reach(l,t) reach(r,l) reach(r,r)
/// reach(r,t) reach(t,l) reach(t,r) reach(t,t) cyc(l) cyc(r) cyc(t).
pub const COLS: [(&str, &str); 12] = [
    ("l", "l"),
    ("l", "r"),
    ("l", "t"),
    ("r", "l"),
    ("r", "r"),
    ("r", "t"),
    ("t", "l"),
    ("t", "r"),
    ("t", "t"),
    ("l", ""),
    ("r", ""),
    ("t", ""),
];

pub type P = fn(&dyn Fn(&str) -> bool) -> bool;

pub fn ff(_: &dyn Fn(&str) -> bool) -> bool {
    false
}
/// Only the empty path.
pub fn e(h: &dyn Fn(&str) -> bool) -> bool {
    !h("left") && !h("right") && !h("parent")
}

/// The published tables, one predicate per cell.
pub fn published(line: usize) -> [P; 12] {
    let l_only: P = |h| h("left") && !h("right") && !h("parent");
    let r_only: P = |h| h("right") && !h("left") && !h("parent");
    let e_or_pl_nr: P = |h| e(h) || (h("parent") && h("left") && !h("right"));
    match line {
        6 => [e, ff, ff, ff, e, ff, ff, ff, ff, e, e, ff],
        7 => [e, ff, ff, ff, e, ff, ff, ff, e, e, e, e],
        8 => [e, ff, ff, ff, e, ff, l_only, ff, e, e, e, e],
        9 => [e, ff, ff, ff, e, ff, l_only, r_only, e, e, e, e],
        10 => [
            e_or_pl_nr,
            ff,
            |h| h("parent") && !h("right"),
            ff,
            e,
            ff,
            |h| h("left") && !h("right"),
            r_only,
            e_or_pl_nr,
            e_or_pl_nr,
            e,
            e_or_pl_nr,
        ],
        11 => [
            |h| e(h) || (h("parent") && h("left")),
            |h| h("parent") && h("right"),
            |h| h("parent"),
            |h| h("parent") && h("left"),
            |h| e(h) || (h("parent") && h("right")),
            |h| h("parent"),
            |h| h("left") && (!h("right") || h("parent")),
            |h| h("right") && (!h("left") || h("parent")),
            |h| e(h) || (h("parent") && (h("left") || h("right"))),
            |h| e(h) || (h("parent") && h("left")),
            |h| e(h) || (h("parent") && h("right")),
            |h| e(h) || (h("parent") && (h("left") || h("right"))),
        ],
        _ => unreachable!(),
    }
}

/// The published cells that are unsound, with the value we compute and
/// the field set of a concrete path or cycle they miss.
pub struct Deviation {
    pub line: usize,
    pub col: usize,
    pub ours: P,
    pub witness: &'static [&'static str],
}

pub const DEVIATIONS: [Deviation; 4] = [
    // l -parent-> t -right-> r
    Deviation {
        line: 10,
        col: 1,
        ours: |h| h("parent") && h("right"),
        witness: &["parent", "right"],
    },
    // t -left-> l -parent-> t -right-> r
    Deviation {
        line: 10,
        col: 7,
        ours: |h| (h("right") && !h("left") && !h("parent")) || (h("left") && h("parent") && h("right")),
        witness: &["left", "parent", "right"],
    },
    // the cycle t -right-> r -parent-> t is reachable from l
    Deviation {
        line: 11,
        col: 9,
        ours: |h| e(h) || (h("parent") && (h("left") || h("right"))),
        witness: &["parent", "right"],
    },
    // the cycle t -left-> l -parent-> t is reachable from r
    Deviation {
        line: 11,
        col: 10,
        ours: |h| e(h) || (h("parent") && (h("left") || h("right"))),
        witness: &["left", "parent"],
    },
];

/// The deviation recorded for a cell, if any.
pub fn deviation(line: usize, col: usize) -> Option<&'static Deviation> {
    DEVIATIONS.iter().find(|d| d.line == line && d.col == col)
}
