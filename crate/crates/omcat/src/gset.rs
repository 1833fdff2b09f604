//! Globular sets: graded cell sets with source/target maps, representable
//! globes, and exhaustive map counting.
//!
//! A globular set here is always truncated: it stores cells for dimensions
//! `0..=trunc_dim` and nothing above. Cell identifiers are opaque strings,
//! unique within a dimension; the same identifier may appear at several
//! dimensions.

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A finite truncated globular set.
///
/// `cells[n]` lists the n-cells; `src`/`tgt` assign to every (n+1)-cell its
/// n-dimensional source and target, for `0 <= n < trunc_dim`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GlobularWire", into = "GlobularWire")]
pub struct GlobularData {
    pub trunc_dim: usize,
    pub cells: Vec<Vec<String>>,
    /// `src[k]` maps (k+1)-cells to k-cells.
    pub src: Vec<BTreeMap<String, String>>,
    /// `tgt[k]` maps (k+1)-cells to k-cells.
    pub tgt: Vec<BTreeMap<String, String>>,
}

/// Wire format: boundary maps are keyed by the dimension of their *argument*
/// cells, as strings, so `"1"` holds the sources of 1-cells.
#[derive(Serialize, Deserialize)]
struct GlobularWire {
    trunc_dim: usize,
    cells: Vec<Vec<String>>,
    src: BTreeMap<String, BTreeMap<String, String>>,
    tgt: BTreeMap<String, BTreeMap<String, String>>,
}

fn maps_to_wire(maps: &[BTreeMap<String, String>]) -> BTreeMap<String, BTreeMap<String, String>> {
    maps.iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(k, m)| ((k + 1).to_string(), m.clone()))
        .collect()
}

fn maps_from_wire(
    wire: &BTreeMap<String, BTreeMap<String, String>>,
    trunc_dim: usize,
    what: &str,
) -> std::result::Result<Vec<BTreeMap<String, String>>, String> {
    let mut out = vec![BTreeMap::new(); trunc_dim];
    for (key, m) in wire {
        let dim: usize = key
            .parse()
            .map_err(|_| format!("{what} key `{key}` is not a dimension"))?;
        if dim == 0 || dim > trunc_dim {
            return Err(format!("{what} key `{key}` out of range 1..={trunc_dim}"));
        }
        out[dim - 1] = m.clone();
    }
    Ok(out)
}

impl From<GlobularData> for GlobularWire {
    fn from(g: GlobularData) -> Self {
        GlobularWire {
            trunc_dim: g.trunc_dim,
            cells: g.cells,
            src: maps_to_wire(&g.src),
            tgt: maps_to_wire(&g.tgt),
        }
    }
}

impl TryFrom<GlobularWire> for GlobularData {
    type Error = String;

    fn try_from(w: GlobularWire) -> std::result::Result<Self, String> {
        if w.cells.len() != w.trunc_dim + 1 {
            return Err(format!(
                "expected {} cell dimensions, found {}",
                w.trunc_dim + 1,
                w.cells.len()
            ));
        }
        Ok(GlobularData {
            trunc_dim: w.trunc_dim,
            cells: w.cells,
            src: maps_from_wire(&w.src, w.trunc_dim, "src")?,
            tgt: maps_from_wire(&w.tgt, w.trunc_dim, "tgt")?,
        })
    }
}

impl GlobularData {
    /// An empty globular set of the given truncation.
    pub fn empty(trunc_dim: usize) -> Self {
        GlobularData {
            trunc_dim,
            cells: vec![Vec::new(); trunc_dim + 1],
            src: vec![BTreeMap::new(); trunc_dim],
            tgt: vec![BTreeMap::new(); trunc_dim],
        }
    }

    pub fn cells_at(&self, n: usize) -> &[String] {
        static EMPTY: Vec<String> = Vec::new();
        self.cells.get(n).unwrap_or(&EMPTY)
    }

    pub fn has_cell(&self, n: usize, id: &str) -> bool {
        self.cells_at(n).iter().any(|c| c == id)
    }

    /// Source of the n-cell `id` (an (n-1)-cell).
    pub fn src_of(&self, n: usize, id: &str) -> Result<&str> {
        if n == 0 || n > self.trunc_dim {
            return Err(Error::InvalidInput(format!("no source at dimension {n}")));
        }
        self.src[n - 1]
            .get(id)
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownCell { dim: n, id: id.to_string() })
    }

    /// Target of the n-cell `id` (an (n-1)-cell).
    pub fn tgt_of(&self, n: usize, id: &str) -> Result<&str> {
        if n == 0 || n > self.trunc_dim {
            return Err(Error::InvalidInput(format!("no target at dimension {n}")));
        }
        self.tgt[n - 1]
            .get(id)
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownCell { dim: n, id: id.to_string() })
    }

    /// Iterated source: the k-dimensional source of the n-cell `id`, k <= n.
    pub fn src_iter(&self, n: usize, id: &str, k: usize) -> Result<String> {
        let mut cur = id.to_string();
        for m in (k + 1..=n).rev() {
            cur = self.src_of(m, &cur)?.to_string();
        }
        Ok(cur)
    }

    /// Iterated target: the k-dimensional target of the n-cell `id`, k <= n.
    pub fn tgt_iter(&self, n: usize, id: &str, k: usize) -> Result<String> {
        let mut cur = id.to_string();
        for m in (k + 1..=n).rev() {
            cur = self.tgt_of(m, &cur)?.to_string();
        }
        Ok(cur)
    }

    /// Two n-cells are parallel when they share all boundaries (always true
    /// for 0-cells).
    pub fn parallel(&self, n: usize, a: &str, b: &str) -> Result<bool> {
        if n == 0 {
            return Ok(true);
        }
        Ok(self.src_of(n, a)? == self.src_of(n, b)? && self.tgt_of(n, a)? == self.tgt_of(n, b)?)
    }
}

/// Exhaustively checks the globular identities and referential integrity.
pub fn validate_globular(g: &GlobularData) -> ValidationReport {
    let mut report = ValidationReport::new();
    if g.cells.len() != g.trunc_dim + 1 {
        report.push(
            "shape",
            None,
            &[],
            format!("expected {} cell dimensions, found {}", g.trunc_dim + 1, g.cells.len()),
        );
        return report;
    }
    for n in 1..=g.trunc_dim {
        for id in g.cells_at(n) {
            for (what, map) in [("src", &g.src[n - 1]), ("tgt", &g.tgt[n - 1])] {
                match map.get(id) {
                    None => report.push(
                        "missing-boundary",
                        Some(n),
                        &[id],
                        format!("{n}-cell `{id}` has no {what}"),
                    ),
                    Some(b) if !g.has_cell(n - 1, b) => report.push(
                        "dangling-boundary",
                        Some(n),
                        &[id, b],
                        format!("{what} of `{id}` is `{b}`, not a {}-cell", n - 1),
                    ),
                    _ => {}
                }
            }
        }
        // Entries for identifiers that are not declared cells.
        for (what, map) in [("src", &g.src[n - 1]), ("tgt", &g.tgt[n - 1])] {
            for id in map.keys() {
                if !g.has_cell(n, id) {
                    report.push(
                        "spurious-entry",
                        Some(n),
                        &[id],
                        format!("{what} entry for undeclared {n}-cell `{id}`"),
                    );
                }
            }
        }
    }
    if !report.is_valid() {
        return report;
    }
    // Globular identities on cells of dimension >= 2.
    for n in 2..=g.trunc_dim {
        for id in g.cells_at(n) {
            let s = g.src_of(n, id).unwrap();
            let t = g.tgt_of(n, id).unwrap();
            let ss = g.src_of(n - 1, s).unwrap();
            let st = g.src_of(n - 1, t).unwrap();
            if ss != st {
                report.push(
                    "globular-ss-st",
                    Some(n),
                    &[id],
                    format!("src(src({id})) = {ss} but src(tgt({id})) = {st}"),
                );
            }
            let ts = g.tgt_of(n - 1, s).unwrap();
            let tt = g.tgt_of(n - 1, t).unwrap();
            if ts != tt {
                report.push(
                    "globular-ts-tt",
                    Some(n),
                    &[id],
                    format!("tgt(src({id})) = {ts} but tgt(tgt({id})) = {tt}"),
                );
            }
        }
    }
    report
}

/// Address of the source-side boundary generator at dimension `k` of a globe.
pub fn globe_src_name(k: usize) -> String {
    format!("b{k}s")
}

/// Address of the target-side boundary generator at dimension `k` of a globe.
pub fn globe_tgt_name(k: usize) -> String {
    format!("b{k}t")
}

/// The n-globe: two cells in every dimension below n, one top cell `c`.
pub fn globe(n: usize) -> GlobularData {
    let mut g = GlobularData::empty(n);
    for k in 0..n {
        g.cells[k] = vec![globe_src_name(k), globe_tgt_name(k)];
    }
    g.cells[n] = vec!["c".to_string()];
    for k in 1..n {
        for name in [globe_src_name(k), globe_tgt_name(k)] {
            g.src[k - 1].insert(name.clone(), globe_src_name(k - 1));
            g.tgt[k - 1].insert(name, globe_tgt_name(k - 1));
        }
    }
    if n >= 1 {
        g.src[n - 1].insert("c".to_string(), globe_src_name(n - 1));
        g.tgt[n - 1].insert("c".to_string(), globe_tgt_name(n - 1));
    }
    g
}

/// The boundary of the n-globe: `globe(n)` without its top cell. For n = 0
/// this is the empty globular set.
pub fn boundary_globe(n: usize) -> GlobularData {
    if n == 0 {
        return GlobularData::empty(0);
    }
    let mut g = globe(n - 1);
    if n >= 1 {
        // Replace the unique top cell by the parallel pair at dimension n-1.
        g.cells[n - 1] = vec![globe_src_name(n - 1), globe_tgt_name(n - 1)];
        if n >= 2 {
            g.src[n - 2].clear();
            g.tgt[n - 2].clear();
            for name in [globe_src_name(n - 1), globe_tgt_name(n - 1)] {
                g.src[n - 2].insert(name.clone(), globe_src_name(n - 2));
                g.tgt[n - 2].insert(name, globe_tgt_name(n - 2));
            }
        }
    }
    g
}

/// Disjoint union; cell names are prefixed `l.`/`r.` to keep them unique.
/// The result is truncated at the larger of the two truncations.
pub fn disjoint_union(a: &GlobularData, b: &GlobularData) -> GlobularData {
    let d = a.trunc_dim.max(b.trunc_dim);
    let mut g = GlobularData::empty(d);
    for (prefix, part) in [("l.", a), ("r.", b)] {
        for n in 0..=part.trunc_dim {
            for id in part.cells_at(n) {
                g.cells[n].push(format!("{prefix}{id}"));
            }
        }
        for k in 0..part.trunc_dim {
            for (id, v) in &part.src[k] {
                g.src[k].insert(format!("{prefix}{id}"), format!("{prefix}{v}"));
            }
            for (id, v) in &part.tgt[k] {
                g.tgt[k].insert(format!("{prefix}{id}"), format!("{prefix}{v}"));
            }
        }
    }
    g
}

/// Counts graded maps `from -> to` commuting with src/tgt, by exhaustive
/// dimension-increasing enumeration. `budget` caps the number of candidate
/// extensions examined.
pub fn count_maps(from: &GlobularData, to: &GlobularData, budget: u64) -> Result<u64> {
    // Quick infeasibility: a nonempty dimension must map somewhere. Cells of
    // `from` above `to.trunc_dim` have no possible image.
    for n in (to.trunc_dim + 1)..=from.trunc_dim {
        if !from.cells_at(n).is_empty() {
            return Ok(0);
        }
    }
    let mut steps: u64 = 0;
    let mut assignment: Vec<BTreeMap<String, String>> = vec![BTreeMap::new(); from.trunc_dim + 1];
    count_maps_rec(from, to, 0, 0, &mut assignment, &mut steps, budget)
}

fn count_maps_rec(
    from: &GlobularData,
    to: &GlobularData,
    n: usize,
    idx: usize,
    assignment: &mut Vec<BTreeMap<String, String>>,
    steps: &mut u64,
    budget: u64,
) -> Result<u64> {
    if n > from.trunc_dim {
        return Ok(1);
    }
    let layer = from.cells_at(n);
    if idx == layer.len() {
        return count_maps_rec(from, to, n + 1, 0, assignment, steps, budget);
    }
    let id = &layer[idx];
    let mut total = 0u64;
    let (want_src, want_tgt) = if n == 0 {
        (None, None)
    } else {
        let s = from.src_of(n, id)?;
        let t = from.tgt_of(n, id)?;
        (
            Some(assignment[n - 1].get(s).expect("lower dims assigned").clone()),
            Some(assignment[n - 1].get(t).expect("lower dims assigned").clone()),
        )
    };
    for cand in to.cells_at(n) {
        *steps += 1;
        if *steps > budget {
            return Err(Error::BudgetExceeded("counting globular maps".to_string()));
        }
        if let (Some(ws), Some(wt)) = (&want_src, &want_tgt) {
            if to.src_of(n, cand)? != ws.as_str() || to.tgt_of(n, cand)? != wt.as_str() {
                continue;
            }
        }
        assignment[n].insert(id.clone(), cand.clone());
        total += count_maps_rec(from, to, n, idx + 1, assignment, steps, budget)?;
        assignment[n].remove(id);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn globes_validate() {
        for n in 0..=6 {
            assert!(validate_globular(&globe(n)).is_valid(), "globe({n})");
            assert!(validate_globular(&boundary_globe(n)).is_valid(), "boundary_globe({n})");
        }
    }

    #[test]
    fn globe_shapes() {
        let g = globe(0);
        assert_eq!(g.cells, vec![vec!["c".to_string()]]);

        let g = globe(2);
        let counts: Vec<usize> = g.cells.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![2, 2, 1]);

        let b = boundary_globe(0);
        assert_eq!(b.trunc_dim, 0);
        assert!(b.cells_at(0).is_empty());

        let b = boundary_globe(3);
        let counts: Vec<usize> = b.cells.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![2, 2, 2]);
    }

    #[test]
    fn broken_globular_identity_is_reported() {
        let mut g = globe(2);
        // Point the source of the top cell at the wrong 1-cell so that
        // src(src(c)) != src(tgt(c)) fails... but that stays globular since
        // both 1-cells are parallel. Break it harder: swap a 1-cell boundary.
        g.tgt[0].insert(globe_src_name(1), globe_src_name(0));
        let report = validate_globular(&g);
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.code == "globular-ts-tt"
            && v.cells.contains(&"c".to_string())));
    }

    #[test]
    fn boundary_maps_must_be_total() {
        let mut g = globe(1);
        g.src[0].remove("c");
        let report = validate_globular(&g);
        assert!(report.violations.iter().any(|v| v.code == "missing-boundary"));
    }

    #[test]
    fn count_maps_into_point() {
        assert_eq!(count_maps(&boundary_globe(1), &globe(0), 1000).unwrap(), 1);
    }

    #[test]
    fn count_maps_respects_boundaries() {
        // globe(1) -> globe(1): the top cell must land on the top cell.
        assert_eq!(count_maps(&globe(1), &globe(1), 1000).unwrap(), 1);
        // globe(0) -> globe(1): two 0-cells to choose from.
        assert_eq!(count_maps(&globe(0), &boundary_globe(1), 1000).unwrap(), 2);
    }

    #[test]
    fn count_maps_budget_errors() {
        let u = disjoint_union(&globe(0), &globe(0));
        let big = disjoint_union(&u, &u);
        assert!(matches!(
            count_maps(&big, &big, 3),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn disjoint_union_counts_multiply() {
        let two = disjoint_union(&globe(1), &globe(1));
        assert!(validate_globular(&two).is_valid());
        let n1 = count_maps(&globe(1), &globe(1), 10_000).unwrap();
        let n2 = count_maps(&two, &globe(1), 10_000).unwrap();
        assert_eq!(n2, n1 * n1);
    }

    #[test]
    fn json_round_trip() {
        let g = globe(3);
        let text = serde_json::to_string(&g).unwrap();
        let back: GlobularData = serde_json::from_str(&text).unwrap();
        assert_eq!(g, back);
        // Wire format is dimension-keyed.
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["src"]["1"].is_object());
    }

    #[test]
    fn higher_cells_cannot_map_anywhere() {
        assert_eq!(count_maps(&globe(2), &globe(1), 1000).unwrap(), 0);
    }
}
