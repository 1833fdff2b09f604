//! Finite table-based strict ω-categories.
//!
//! A category is globular data plus identity assignments and, for every pair
//! of dimensions `0 <= k < n <= trunc_dim`, a composition table on n-cells
//! defined exactly on the k-composable pairs. All axioms (unit laws,
//! associativity, interchange, identity functoriality) are checked
//! exhaustively by [`validate_category`].
//!
//! Composition is written in diagrammatic order throughout: `comp2(k, n, a, b)`
//! is "a, then b", so for 1-cells `a: x -> y` and `b: y -> z` the composite
//! runs `x -> z`.

use crate::error::{Error, Result};
use crate::gset::{self, GlobularData};
use crate::report::ValidationReport;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Cells-per-dimension cap beyond which the exhaustive axiom checks are
/// skipped (and reported as a violation): the quartic interchange loop is
/// only meant for desk-scale tables.
pub const VALIDATE_CELL_CAP: usize = 64;

/// A graded set of positive-dimensional cells: `by_dim[i]` holds cells of
/// dimension `i + 1`. Serialized as a plain array of arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct CellSet {
    pub by_dim: Vec<BTreeSet<String>>,
}

impl CellSet {
    /// The empty set covering dimensions `1..=top_dim`.
    pub fn empty(top_dim: usize) -> Self {
        CellSet { by_dim: vec![BTreeSet::new(); top_dim] }
    }

    /// All positive-dimensional cells of `x`.
    pub fn full(x: &FiniteOmegaCat) -> Self {
        let d = x.trunc_dim();
        let mut set = CellSet::empty(d);
        for n in 1..=d {
            set.by_dim[n - 1] = x.cells_at(n).iter().cloned().collect();
        }
        set
    }

    /// Highest dimension this set has a slot for.
    pub fn top_dim(&self) -> usize {
        self.by_dim.len()
    }

    pub fn contains(&self, dim: usize, id: &str) -> bool {
        dim >= 1 && dim <= self.by_dim.len() && self.by_dim[dim - 1].contains(id)
    }

    /// Inserts a cell; dimension 0 is not representable and is rejected.
    pub fn insert(&mut self, dim: usize, id: impl Into<String>) {
        assert!(dim >= 1, "cell sets hold positive-dimensional cells only");
        if dim > self.by_dim.len() {
            self.by_dim.resize(dim, BTreeSet::new());
        }
        self.by_dim[dim - 1].insert(id.into());
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.iter().all(|(dim, id)| other.contains(dim, id))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str)> {
        self.by_dim
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |id| (i + 1, id.as_str())))
    }

    /// Cells of `self` not in `other`.
    pub fn difference(&self, other: &CellSet) -> CellSet {
        let mut out = CellSet::empty(self.top_dim());
        for (dim, id) in self.iter() {
            if !other.contains(dim, id) {
                out.insert(dim, id);
            }
        }
        out
    }
}

/// A finite truncated strict ω-category given by explicit tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CatWire", into = "CatWire")]
pub struct FiniteOmegaCat {
    pub underlying: GlobularData,
    /// `id_map[n]` sends each n-cell (n < trunc_dim) to its identity
    /// (n+1)-cell.
    pub id_map: Vec<BTreeMap<String, String>>,
    /// `comp[(k, n)]` is the table of k-composites of n-cells, keyed by
    /// (first, second) in diagrammatic order.
    pub comp: BTreeMap<(usize, usize), BTreeMap<(String, String), String>>,
    pub marking: CellSet,
}

/// Wire format: globular fields inline, `id` keyed by argument dimension,
/// `comp` keyed by `"k,n"` with `[first, second, result]` rows.
#[derive(Serialize, Deserialize)]
struct CatWire {
    trunc_dim: usize,
    cells: Vec<Vec<String>>,
    #[serde(default)]
    src: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    tgt: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    id: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    comp: BTreeMap<String, Vec<(String, String, String)>>,
    #[serde(default)]
    marking: Vec<BTreeSet<String>>,
}

impl From<FiniteOmegaCat> for CatWire {
    fn from(x: FiniteOmegaCat) -> Self {
        let globular: serde_json::Value = serde_json::to_value(&x.underlying).unwrap();
        let comp = x
            .comp
            .iter()
            .filter(|(_, table)| !table.is_empty())
            .map(|((k, n), table)| {
                let rows = table
                    .iter()
                    .map(|((a, b), r)| (a.clone(), b.clone(), r.clone()))
                    .collect();
                (format!("{k},{n}"), rows)
            })
            .collect();
        CatWire {
            trunc_dim: x.underlying.trunc_dim,
            cells: x.underlying.cells,
            src: serde_json::from_value(globular["src"].clone()).unwrap(),
            tgt: serde_json::from_value(globular["tgt"].clone()).unwrap(),
            id: x
                .id_map
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.is_empty())
                .map(|(n, m)| (n.to_string(), m.clone()))
                .collect(),
            comp,
            marking: x.marking.by_dim,
        }
    }
}

impl TryFrom<CatWire> for FiniteOmegaCat {
    type Error = String;

    fn try_from(w: CatWire) -> std::result::Result<Self, String> {
        let d = w.trunc_dim;
        let underlying: GlobularData = serde_json::from_value(serde_json::json!({
            "trunc_dim": d,
            "cells": w.cells,
            "src": w.src,
            "tgt": w.tgt,
        }))
        .map_err(|e| e.to_string())?;
        let mut id_map = vec![BTreeMap::new(); d];
        for (key, m) in w.id {
            let n: usize = key.parse().map_err(|_| format!("id key `{key}` is not a dimension"))?;
            if n >= d {
                return Err(format!("id key `{key}` out of range 0..{d}"));
            }
            id_map[n] = m;
        }
        let mut comp = BTreeMap::new();
        for (key, rows) in w.comp {
            let (ks, ns) = key
                .split_once(',')
                .ok_or_else(|| format!("comp key `{key}` is not of the form \"k,n\""))?;
            let k: usize = ks.parse().map_err(|_| format!("bad comp key `{key}`"))?;
            let n: usize = ns.parse().map_err(|_| format!("bad comp key `{key}`"))?;
            if k >= n || n > d {
                return Err(format!("comp key `{key}` violates 0 <= k < n <= {d}"));
            }
            let table: BTreeMap<(String, String), String> =
                rows.into_iter().map(|(a, b, r)| ((a, b), r)).collect();
            comp.insert((k, n), table);
        }
        Ok(FiniteOmegaCat {
            underlying,
            id_map,
            comp,
            marking: CellSet { by_dim: w.marking },
        })
    }
}

impl FiniteOmegaCat {
    pub fn trunc_dim(&self) -> usize {
        self.underlying.trunc_dim
    }

    pub fn cells_at(&self, n: usize) -> &[String] {
        self.underlying.cells_at(n)
    }

    pub fn has_cell(&self, n: usize, id: &str) -> bool {
        self.underlying.has_cell(n, id)
    }

    pub fn cells_total(&self) -> usize {
        self.underlying.cells.iter().map(Vec::len).sum()
    }

    pub fn src_of(&self, n: usize, id: &str) -> Result<&str> {
        self.underlying.src_of(n, id)
    }

    pub fn tgt_of(&self, n: usize, id: &str) -> Result<&str> {
        self.underlying.tgt_of(n, id)
    }

    /// k-dimensional source of an n-cell, k <= n.
    pub fn src_iter(&self, n: usize, id: &str, k: usize) -> Result<String> {
        self.underlying.src_iter(n, id, k)
    }

    /// k-dimensional target of an n-cell, k <= n.
    pub fn tgt_iter(&self, n: usize, id: &str, k: usize) -> Result<String> {
        self.underlying.tgt_iter(n, id, k)
    }

    pub fn parallel(&self, n: usize, a: &str, b: &str) -> Result<bool> {
        self.underlying.parallel(n, a, b)
    }

    /// Identity (n+1)-cell of the n-cell `id`.
    pub fn id_of(&self, n: usize, id: &str) -> Result<&str> {
        if n >= self.trunc_dim() {
            return Err(Error::InvalidInput(format!(
                "identity of a {n}-cell exceeds truncation {}",
                self.trunc_dim()
            )));
        }
        self.id_map[n]
            .get(id)
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownCell { dim: n, id: id.to_string() })
    }

    /// `count`-fold iterated identity on the n-cell `id`.
    pub fn lift_id(&self, n: usize, id: &str, count: usize) -> Result<String> {
        let mut cur = id.to_string();
        for m in n..n + count {
            cur = self.id_of(m, &cur)?.to_string();
        }
        Ok(cur)
    }

    /// Looks up the k-composite of two n-cells (diagrammatic order). Errors
    /// on boundary mismatch or a missing table entry.
    pub fn comp2(&self, k: usize, n: usize, a: &str, b: &str) -> Result<&str> {
        if k >= n {
            return Err(Error::InvalidInput(format!("composition of {n}-cells along {k}")));
        }
        if self.tgt_iter(n, a, k)? != self.src_iter(n, b, k)? {
            return Err(Error::IncompatibleBoundaries(format!(
                "{n}-cells `{a}` and `{b}` do not share a {k}-boundary"
            )));
        }
        self.comp
            .get(&(k, n))
            .and_then(|t| t.get(&(a.to_string(), b.to_string())))
            .map(String::as_str)
            .ok_or_else(|| {
                Error::InvalidInput(format!("no table entry for `{a}` o_{k} `{b}` at dimension {n}"))
            })
    }

    /// Composes two cells of possibly different dimensions along the
    /// k-boundary, lifting the lower-dimensional one by identities first.
    /// Returns the composite with its dimension.
    pub fn compose(&self, k: usize, a: (usize, &str), b: (usize, &str)) -> Result<(usize, String)> {
        let n = a.0.max(b.0);
        if k >= n {
            return Err(Error::InvalidInput(format!(
                "composition along {k} needs a cell of dimension above {k}"
            )));
        }
        let la = self.lift_id(a.0, a.1, n - a.0)?;
        let lb = self.lift_id(b.0, b.1, n - b.0)?;
        Ok((n, self.comp2(k, n, &la, &lb)?.to_string()))
    }

    /// Whiskering: composition of cells of *different* dimensions, derived
    /// from the tables by identity-lifting.
    pub fn whisker(&self, k: usize, a: (usize, &str), b: (usize, &str)) -> Result<(usize, String)> {
        if a.0 == b.0 {
            return Err(Error::InvalidInput(
                "whiskering needs arguments of different dimensions".to_string(),
            ));
        }
        self.compose(k, a, b)
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Exhaustively checks every category axiom on the tables. An empty report
/// means the input is a strict ω-category (with marking inside its cells).
///
/// Instances with more than [`VALIDATE_CELL_CAP`] cells in some dimension are
/// rejected with an `instance-too-large` violation instead of running the
/// quartic interchange scan.
pub fn validate_category(x: &FiniteOmegaCat) -> ValidationReport {
    let mut report = gset::validate_globular(&x.underlying);
    if !report.is_valid() {
        return report;
    }
    let d = x.trunc_dim();
    for n in 0..=d {
        if x.cells_at(n).len() > VALIDATE_CELL_CAP {
            report.push(
                "instance-too-large",
                Some(n),
                &[],
                format!(
                    "{} cells at dimension {n} exceed the exhaustive-check cap of {}",
                    x.cells_at(n).len(),
                    VALIDATE_CELL_CAP
                ),
            );
            return report;
        }
    }

    check_identities(x, &mut report);
    check_marking(x, &mut report);
    if !report.is_valid() {
        return report;
    }
    check_comp_tables(x, &mut report);
    if !report.is_valid() {
        return report;
    }
    check_units(x, &mut report);
    check_associativity(x, &mut report);
    check_interchange(x, &mut report);
    check_id_functoriality(x, &mut report);
    report
}

fn check_identities(x: &FiniteOmegaCat, report: &mut ValidationReport) {
    let d = x.trunc_dim();
    if x.id_map.len() != d {
        report.push(
            "id-shape",
            None,
            &[],
            format!("expected {} identity maps, found {}", d, x.id_map.len()),
        );
        return;
    }
    for n in 0..d {
        for cell in x.cells_at(n) {
            match x.id_map[n].get(cell) {
                None => report.push(
                    "missing-identity",
                    Some(n),
                    &[cell],
                    format!("{n}-cell `{cell}` has no identity"),
                ),
                Some(i) => {
                    if !x.has_cell(n + 1, i) {
                        report.push(
                            "dangling-identity",
                            Some(n),
                            &[cell, i],
                            format!("id({cell}) = `{i}` is not a {}-cell", n + 1),
                        );
                    } else {
                        let s = x.src_of(n + 1, i).unwrap();
                        let t = x.tgt_of(n + 1, i).unwrap();
                        if s != cell || t != cell {
                            report.push(
                                "identity-typing",
                                Some(n),
                                &[cell, i],
                                format!("id({cell}) = `{i}` has boundary ({s}, {t})"),
                            );
                        }
                    }
                }
            }
        }
        for cell in x.id_map[n].keys() {
            if !x.has_cell(n, cell) {
                report.push(
                    "spurious-identity",
                    Some(n),
                    &[cell],
                    format!("identity entry for undeclared {n}-cell `{cell}`"),
                );
            }
        }
    }
}

fn check_marking(x: &FiniteOmegaCat, report: &mut ValidationReport) {
    if x.marking.top_dim() > x.trunc_dim() {
        report.push(
            "marking-dimension",
            None,
            &[],
            format!(
                "marking covers dimensions up to {} but the category is {}-truncated",
                x.marking.top_dim(),
                x.trunc_dim()
            ),
        );
        return;
    }
    for (dim, id) in x.marking.iter() {
        if !x.has_cell(dim, id) {
            report.push(
                "marking-unknown-cell",
                Some(dim),
                &[id],
                format!("marked {dim}-cell `{id}` does not exist"),
            );
        }
    }
}

fn check_comp_tables(x: &FiniteOmegaCat, report: &mut ValidationReport) {
    let d = x.trunc_dim();
    let empty = BTreeMap::new();
    for n in 1..=d {
        for k in 0..n {
            let table = x.comp.get(&(k, n)).unwrap_or(&empty);
            for ((a, b), r) in table {
                if !x.has_cell(n, a) || !x.has_cell(n, b) || !x.has_cell(n, r) {
                    report.push(
                        "comp-unknown-cell",
                        Some(n),
                        &[a, b, r],
                        format!("table entry `{a}` o_{k} `{b}` = `{r}` mentions unknown {n}-cells"),
                    );
                }
            }
            if !report.is_valid() {
                continue;
            }
            for a in x.cells_at(n) {
                for b in x.cells_at(n) {
                    let compatible =
                        x.tgt_iter(n, a, k).unwrap() == x.src_iter(n, b, k).unwrap();
                    let entry = table.get(&(a.clone(), b.clone()));
                    match (compatible, entry) {
                        (true, None) => report.push(
                            "comp-missing",
                            Some(n),
                            &[a, b],
                            format!("k-composable pair `{a}`, `{b}` (k = {k}) has no composite"),
                        ),
                        (false, Some(_)) => report.push(
                            "comp-spurious",
                            Some(n),
                            &[a, b],
                            format!("`{a}` o_{k} `{b}` is defined but the pair is not composable"),
                        ),
                        (true, Some(r)) => {
                            // Boundary of the composite.
                            let (want_src, want_tgt) = if k == n - 1 {
                                (
                                    Some(x.src_of(n, a).unwrap().to_string()),
                                    Some(x.tgt_of(n, b).unwrap().to_string()),
                                )
                            } else {
                                let sa = x.src_of(n, a).unwrap();
                                let sb = x.src_of(n, b).unwrap();
                                let ta = x.tgt_of(n, a).unwrap();
                                let tb = x.tgt_of(n, b).unwrap();
                                (
                                    x.comp2(k, n - 1, sa, sb).ok().map(str::to_string),
                                    x.comp2(k, n - 1, ta, tb).ok().map(str::to_string),
                                )
                            };
                            let got_src = x.src_of(n, r).unwrap();
                            let got_tgt = x.tgt_of(n, r).unwrap();
                            if want_src.as_deref() != Some(got_src)
                                || want_tgt.as_deref() != Some(got_tgt)
                            {
                                report.push(
                                    "comp-boundary",
                                    Some(n),
                                    &[a, b, r],
                                    format!(
                                        "`{a}` o_{k} `{b}` = `{r}` has boundary ({got_src}, {got_tgt}), expected ({}, {})",
                                        want_src.as_deref().unwrap_or("?"),
                                        want_tgt.as_deref().unwrap_or("?")
                                    ),
                                );
                            }
                        }
                        (false, None) => {}
                    }
                }
            }
        }
    }
}

fn check_units(x: &FiniteOmegaCat, report: &mut ValidationReport) {
    for n in 1..=x.trunc_dim() {
        for k in 0..n {
            for a in x.cells_at(n) {
                let s = x.src_iter(n, a, k).unwrap();
                let t = x.tgt_iter(n, a, k).unwrap();
                let left = x.lift_id(k, &s, n - k).unwrap();
                let right = x.lift_id(k, &t, n - k).unwrap();
                if x.comp2(k, n, &left, a).map(str::to_string).ok() != Some(a.clone()) {
                    report.push(
                        "unit-left",
                        Some(n),
                        &[a],
                        format!("id^{}({s}) o_{k} `{a}` is not `{a}`", n - k),
                    );
                }
                if x.comp2(k, n, a, &right).map(str::to_string).ok() != Some(a.clone()) {
                    report.push(
                        "unit-right",
                        Some(n),
                        &[a],
                        format!("`{a}` o_{k} id^{}({t}) is not `{a}`", n - k),
                    );
                }
            }
        }
    }
}

fn check_associativity(x: &FiniteOmegaCat, report: &mut ValidationReport) {
    for ((k, n), table) in &x.comp {
        for ((a, b), ab) in table {
            for c in x.cells_at(*n) {
                let Some(bc) = table.get(&(b.clone(), c.clone())) else { continue };
                let left = table.get(&(ab.clone(), c.clone()));
                let right = table.get(&(a.clone(), bc.clone()));
                if left != right || left.is_none() {
                    report.push(
                        "associativity",
                        Some(*n),
                        &[a, b, c],
                        format!(
                            "(`{a}` o_{k} `{b}`) o_{k} `{c}` = {:?} but `{a}` o_{k} (`{b}` o_{k} `{c}`) = {:?}",
                            left, right
                        ),
                    );
                }
            }
        }
    }
}

fn check_interchange(x: &FiniteOmegaCat, report: &mut ValidationReport) {
    let d = x.trunc_dim();
    for n in 2..=d {
        for l in 1..n {
            for k in 0..l {
                let Some(tk) = x.comp.get(&(k, n)) else { continue };
                let Some(tl) = x.comp.get(&(l, n)) else { continue };
                for ((a, b), ab) in tk {
                    for ((c, dd), cd) in tk {
                        let Some(lhs) = tl.get(&(ab.clone(), cd.clone())) else { continue };
                        let Some(ac) = tl.get(&(a.clone(), c.clone())) else { continue };
                        let Some(bd) = tl.get(&(b.clone(), dd.clone())) else { continue };
                        let Some(rhs) = tk.get(&(ac.clone(), bd.clone())) else { continue };
                        if lhs != rhs {
                            report.push(
                                "interchange",
                                Some(n),
                                &[a, b, c, dd],
                                format!(
                                    "(`{a}` o_{k} `{b}`) o_{l} (`{c}` o_{k} `{dd}`) = `{lhs}` but the transpose composite is `{rhs}`"
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
}

fn check_id_functoriality(x: &FiniteOmegaCat, report: &mut ValidationReport) {
    let d = x.trunc_dim();
    for ((k, n), table) in &x.comp {
        if *n >= d {
            continue;
        }
        for ((a, b), ab) in table {
            let ia = x.id_of(*n, a).unwrap();
            let ib = x.id_of(*n, b).unwrap();
            let iab = x.id_of(*n, ab).unwrap();
            match x.comp.get(&(*k, n + 1)).and_then(|t| t.get(&(ia.to_string(), ib.to_string()))) {
                Some(r) if r == iab => {}
                got => report.push(
                    "identity-functoriality",
                    Some(*n),
                    &[a, b],
                    format!("id(`{a}` o_{k} `{b}`) = `{iab}` but id(`{a}`) o_{k} id(`{b}`) = {got:?}"),
                ),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// The terminal d-truncated category: one cell `*` in every dimension.
pub fn terminal(d: usize) -> FiniteOmegaCat {
    let star = "*".to_string();
    let mut g = GlobularData::empty(d);
    for n in 0..=d {
        g.cells[n] = vec![star.clone()];
    }
    for k in 0..d {
        g.src[k].insert(star.clone(), star.clone());
        g.tgt[k].insert(star.clone(), star.clone());
    }
    let id_map = vec![BTreeMap::from([(star.clone(), star.clone())]); d];
    let mut comp = BTreeMap::new();
    for n in 1..=d {
        for k in 0..n {
            comp.insert((k, n), BTreeMap::from([((star.clone(), star.clone()), star.clone())]));
        }
    }
    FiniteOmegaCat { underlying: g, id_map, comp, marking: CellSet::empty(d) }
}

/// Builds the free d-truncated category on generating globular data in which
/// no two positive-dimensional generators are ever k-composable (true of
/// globes and globe boundaries). Every cell is an iterated identity of a
/// generator and every composite is forced by a unit law.
fn free_on_composite_free(gens: &GlobularData, d: usize) -> FiniteOmegaCat {
    assert!(d >= gens.trunc_dim, "truncation below the generators");
    let mut g = GlobularData::empty(d);
    // origin[n][cell] = (base generator dimension, base generator).
    let mut origin: Vec<BTreeMap<String, (usize, String)>> = vec![BTreeMap::new(); d + 1];
    let mut id_map = vec![BTreeMap::new(); d];
    for n in 0..=d {
        for gen in gens.cells_at(n) {
            g.cells[n].push(gen.clone());
            origin[n].insert(gen.clone(), (n, gen.clone()));
            if n > 0 {
                g.src[n - 1].insert(gen.clone(), gens.src_of(n, gen).unwrap().to_string());
                g.tgt[n - 1].insert(gen.clone(), gens.tgt_of(n, gen).unwrap().to_string());
            }
        }
        if n > 0 {
            for lower in g.cells[n - 1].clone() {
                let id = format!("id_{lower}");
                g.cells[n].push(id.clone());
                g.src[n - 1].insert(id.clone(), lower.clone());
                g.tgt[n - 1].insert(id.clone(), lower.clone());
                id_map[n - 1].insert(lower.clone(), id.clone());
                let base = origin[n - 1][&lower].clone();
                origin[n].insert(id, base);
            }
        }
    }
    let mut comp: BTreeMap<(usize, usize), BTreeMap<(String, String), String>> = BTreeMap::new();
    for n in 1..=d {
        for k in 0..n {
            let mut table = BTreeMap::new();
            for a in g.cells_at(n) {
                for b in g.cells_at(n) {
                    if g.tgt_iter(n, a, k).unwrap() != g.src_iter(n, b, k).unwrap() {
                        continue;
                    }
                    let result = if origin[n][a].0 <= k {
                        b.clone()
                    } else if origin[n][b].0 <= k {
                        a.clone()
                    } else {
                        unreachable!("generators `{a}`, `{b}` are {k}-composable");
                    };
                    table.insert((a.clone(), b.clone()), result);
                }
            }
            comp.insert((k, n), table);
        }
    }
    FiniteOmegaCat { underlying: g, id_map, comp, marking: CellSet::empty(d) }
}

fn rename_globe_cells(mut g: GlobularData) -> GlobularData {
    let rename = |name: &str| -> String {
        match name {
            "b0s" => "x".to_string(),
            "b0t" => "y".to_string(),
            "c" => "u".to_string(),
            other => other.to_string(),
        }
    };
    for layer in &mut g.cells {
        for cell in layer.iter_mut() {
            *cell = rename(cell);
        }
    }
    for map in g.src.iter_mut().chain(g.tgt.iter_mut()) {
        *map = map.iter().map(|(k, v)| (rename(k), rename(v))).collect();
    }
    g
}

/// Free d-truncated category on one n-globe: 0-cells `x`, `y` (when n >= 1),
/// boundary generators `b{k}s`/`b{k}t`, top generator `u` (`x` itself when
/// n = 0), plus the iterated identities the truncation requires.
pub fn globe_cat(n: usize, d: usize) -> FiniteOmegaCat {
    let mut gens = rename_globe_cells(gset::globe(n));
    if n == 0 {
        gens.cells[0] = vec!["x".to_string()];
    }
    free_on_composite_free(&gens, d)
}

/// Free d-truncated category on the boundary of the n-globe: like
/// [`globe_cat`] with the top generator replaced by a parallel pair
/// `b{n-1}s`, `b{n-1}t` (empty for n = 0).
pub fn boundary_globe_cat(n: usize, d: usize) -> FiniteOmegaCat {
    let gens = rename_globe_cells(gset::boundary_globe(n));
    free_on_composite_free(&gens, d)
}

/// The walking isomorphism: 0-cells `x`, `y` and inverse 1-cells `u`, `v`
/// with `u o_0 v = id_x`, `v o_0 u = id_y`.
pub fn walking_iso() -> FiniteOmegaCat {
    let mut g = GlobularData::empty(1);
    g.cells[0] = vec!["x".to_string(), "y".to_string()];
    g.cells[1] = vec!["id_x".to_string(), "id_y".to_string(), "u".to_string(), "v".to_string()];
    for (cell, s, t) in [("id_x", "x", "x"), ("id_y", "y", "y"), ("u", "x", "y"), ("v", "y", "x")] {
        g.src[0].insert(cell.to_string(), s.to_string());
        g.tgt[0].insert(cell.to_string(), t.to_string());
    }
    let id_map = vec![BTreeMap::from([
        ("x".to_string(), "id_x".to_string()),
        ("y".to_string(), "id_y".to_string()),
    ])];
    let table: BTreeMap<(String, String), String> = [
        ("id_x", "id_x", "id_x"),
        ("id_x", "u", "u"),
        ("u", "v", "id_x"),
        ("u", "id_y", "u"),
        ("v", "id_x", "v"),
        ("v", "u", "id_y"),
        ("id_y", "v", "v"),
        ("id_y", "id_y", "id_y"),
    ]
    .into_iter()
    .map(|(a, b, r)| ((a.to_string(), b.to_string()), r.to_string()))
    .collect();
    FiniteOmegaCat {
        underlying: g,
        id_map,
        comp: BTreeMap::from([((0, 1), table)]),
        marking: CellSet::empty(1),
    }
}

/// Extends `x` to truncation `d >= trunc_dim(x)` by adjoining formal
/// identity cells named `id_<base>` at every new dimension.
pub fn pad_truncation(x: &FiniteOmegaCat, d: usize) -> FiniteOmegaCat {
    let old = x.trunc_dim();
    assert!(d >= old, "cannot pad downwards");
    if d == old {
        return x.clone();
    }
    let mut out = x.clone();
    out.underlying.trunc_dim = d;
    out.underlying.cells.resize(d + 1, Vec::new());
    out.underlying.src.resize(d, BTreeMap::new());
    out.underlying.tgt.resize(d, BTreeMap::new());
    out.id_map.resize(d, BTreeMap::new());
    // base[cell at current top] = underlying old-top cell.
    let mut base: BTreeMap<String, String> =
        x.cells_at(old).iter().map(|c| (c.clone(), c.clone())).collect();
    for n in old + 1..=d {
        let mut next_base = BTreeMap::new();
        for lower in out.underlying.cells[n - 1].clone() {
            let id = format!("id_{lower}");
            out.underlying.cells[n].push(id.clone());
            out.underlying.src[n - 1].insert(id.clone(), lower.clone());
            out.underlying.tgt[n - 1].insert(id.clone(), lower.clone());
            out.id_map[n - 1].insert(lower.clone(), id.clone());
            next_base.insert(id.clone(), base[&lower].clone());
        }
        let prev_base = std::mem::replace(&mut base, next_base);
        // Composition of the new identity cells.
        for k in 0..n {
            let mut table = BTreeMap::new();
            for a in out.underlying.cells_at(n) {
                for b in out.underlying.cells_at(n) {
                    if out.underlying.tgt_iter(n, a, k).unwrap()
                        != out.underlying.src_iter(n, b, k).unwrap()
                    {
                        continue;
                    }
                    let result = if k >= old {
                        // Both are identity towers over the same old-top cell.
                        debug_assert_eq!(base[a], base[b]);
                        a.clone()
                    } else {
                        let r = x.comp2(k, old, &base[a], &base[b]).unwrap();
                        format!("id_{}", lift_name(&prev_base, &out, n - 1, r))
                    };
                    table.insert((a.clone(), b.clone()), result);
                }
            }
            out.comp.insert((k, n), table);
        }
    }
    out
}

/// Finds the (n-1)-cell of `out` whose padding-base is `r`; identity towers
/// are in bijection with old-top cells, so the name is forced.
fn lift_name(prev_base: &BTreeMap<String, String>, _out: &FiniteOmegaCat, _n: usize, r: &str) -> String {
    prev_base
        .iter()
        .find(|(_, b)| b.as_str() == r)
        .map(|(name, _)| name.clone())
        .expect("identity tower exists for every old top cell")
}

/// Disjoint union. Cells are prefixed `l.`/`r.`; the shorter side is padded
/// with formal identities so both halves share a truncation.
pub fn disjoint_union(x: &FiniteOmegaCat, y: &FiniteOmegaCat) -> FiniteOmegaCat {
    let d = x.trunc_dim().max(y.trunc_dim());
    let xp = pad_truncation(x, d);
    let yp = pad_truncation(y, d);
    let mut g = GlobularData::empty(d);
    let mut id_map = vec![BTreeMap::new(); d];
    let mut comp: BTreeMap<(usize, usize), BTreeMap<(String, String), String>> = BTreeMap::new();
    let mut marking = CellSet::empty(d);
    for (prefix, part) in [("l.", &xp), ("r.", &yp)] {
        for n in 0..=d {
            for id in part.cells_at(n) {
                g.cells[n].push(format!("{prefix}{id}"));
            }
        }
        for k in 0..d {
            for (id, v) in &part.underlying.src[k] {
                g.src[k].insert(format!("{prefix}{id}"), format!("{prefix}{v}"));
            }
            for (id, v) in &part.underlying.tgt[k] {
                g.tgt[k].insert(format!("{prefix}{id}"), format!("{prefix}{v}"));
            }
        }
        for n in 0..d {
            for (cell, i) in &part.id_map[n] {
                id_map[n].insert(format!("{prefix}{cell}"), format!("{prefix}{i}"));
            }
        }
        for ((k, n), table) in &part.comp {
            let out = comp.entry((*k, *n)).or_default();
            for ((a, b), r) in table {
                out.insert(
                    (format!("{prefix}{a}"), format!("{prefix}{b}")),
                    format!("{prefix}{r}"),
                );
            }
        }
        for (dim, id) in part.marking.iter() {
            marking.insert(dim, format!("{prefix}{id}"));
        }
    }
    FiniteOmegaCat { underlying: g, id_map, comp, marking }
}

/// The k-cell classifier, d-truncated: one cell `*` below dimension k, cells
/// `w`, `*` at k, and pairs `a.b` (a, b in {w, *}) above. A map into it
/// picks out an arbitrary set of k-cells.
pub fn cosep(k: usize, d: usize) -> FiniteOmegaCat {
    assert!(k >= 1, "cosep needs k >= 1");
    assert!(k <= d, "cosep needs k <= d");
    let star = "*".to_string();
    let w = "w".to_string();
    let pairs: Vec<String> = ["w", "*"]
        .iter()
        .flat_map(|a| ["w", "*"].iter().map(move |b| format!("{a}.{b}")))
        .collect();
    let split = |p: &str| -> (String, String) {
        let (a, b) = p.split_once('.').unwrap();
        (a.to_string(), b.to_string())
    };
    // The k-cell composition rule along any lower dimension: strictly
    // star-absorbing, everything else collapses to w.
    let dot = |a: &str, b: &str| -> String {
        if a == "*" && b == "*" { star.clone() } else { w.clone() }
    };

    let mut g = GlobularData::empty(d);
    for n in 0..k {
        g.cells[n] = vec![star.clone()];
    }
    g.cells[k] = vec![w.clone(), star.clone()];
    for n in k + 1..=d {
        g.cells[n] = pairs.clone();
    }
    for n in 1..k {
        g.src[n - 1].insert(star.clone(), star.clone());
        g.tgt[n - 1].insert(star.clone(), star.clone());
    }
    if k >= 1 {
        for cell in [&w, &star] {
            g.src[k - 1].insert(cell.clone(), star.clone());
            g.tgt[k - 1].insert(cell.clone(), star.clone());
        }
    }
    if k + 1 <= d {
        for p in &pairs {
            let (a, b) = split(p);
            g.src[k].insert(p.clone(), a);
            g.tgt[k].insert(p.clone(), b);
        }
    }
    for n in k + 2..=d {
        for p in &pairs {
            g.src[n - 1].insert(p.clone(), p.clone());
            g.tgt[n - 1].insert(p.clone(), p.clone());
        }
    }

    let mut id_map = vec![BTreeMap::new(); d];
    for n in 0..k.saturating_sub(1) {
        id_map[n].insert(star.clone(), star.clone());
    }
    if k >= 1 && k - 1 < d {
        id_map[k - 1].insert(star.clone(), star.clone());
    }
    if k < d {
        for cell in [&w, &star] {
            id_map[k].insert(cell.clone(), format!("{cell}.{cell}"));
        }
    }
    for n in k + 1..d {
        for p in &pairs {
            id_map[n].insert(p.clone(), p.clone());
        }
    }

    let mut comp: BTreeMap<(usize, usize), BTreeMap<(String, String), String>> = BTreeMap::new();
    for n in 1..=d {
        for l in 0..n {
            let mut table = BTreeMap::new();
            if n < k {
                table.insert((star.clone(), star.clone()), star.clone());
            } else if n == k {
                for a in [&w, &star] {
                    for b in [&w, &star] {
                        table.insert((a.clone(), b.clone()), dot(a, b));
                    }
                }
            } else {
                for p in &pairs {
                    for q in &pairs {
                        let (p1, p2) = split(p);
                        let (q1, q2) = split(q);
                        if l < k {
                            table.insert((p.clone(), q.clone()), format!("{}.{}", dot(&p1, &q1), dot(&p2, &q2)));
                        } else if l == k {
                            if p2 == q1 {
                                table.insert((p.clone(), q.clone()), format!("{p1}.{q2}"));
                            }
                        } else if p == q {
                            table.insert((p.clone(), q.clone()), p.clone());
                        }
                    }
                }
            }
            comp.insert((l, n), table);
        }
    }
    FiniteOmegaCat { underlying: g, id_map, comp, marking: CellSet::empty(d) }
}

// ---------------------------------------------------------------------------
// Hom and suspension
// ---------------------------------------------------------------------------

/// The hom category between two 0-cells: n-cells are the (n+1)-cells of `x`
/// running from `a` to `b` at the bottom, with all structure shifted down by
/// one dimension. Cell identifiers are reused verbatim.
pub fn hom(x: &FiniteOmegaCat, a: &str, b: &str) -> Result<FiniteOmegaCat> {
    let d = x.trunc_dim();
    if d == 0 {
        return Err(Error::InvalidInput("hom of a 0-truncated category".to_string()));
    }
    for c in [a, b] {
        if !x.has_cell(0, c) {
            return Err(Error::UnknownCell { dim: 0, id: c.to_string() });
        }
    }
    let keep = |n: usize, id: &str| -> bool {
        x.src_iter(n, id, 0).unwrap() == a && x.tgt_iter(n, id, 0).unwrap() == b
    };
    let mut g = GlobularData::empty(d - 1);
    for n in 0..=d - 1 {
        g.cells[n] = x.cells_at(n + 1).iter().filter(|c| keep(n + 1, c)).cloned().collect();
        if n >= 1 {
            for c in &g.cells[n] {
                g.src[n - 1].insert(c.clone(), x.src_of(n + 1, c).unwrap().to_string());
                g.tgt[n - 1].insert(c.clone(), x.tgt_of(n + 1, c).unwrap().to_string());
            }
        }
    }
    let mut id_map = vec![BTreeMap::new(); d - 1];
    for n in 0..d - 1 {
        for c in g.cells_at(n) {
            id_map[n].insert(c.clone(), x.id_of(n + 1, c)?.to_string());
        }
    }
    let mut comp = BTreeMap::new();
    for n in 1..=d - 1 {
        for k in 0..n {
            let mut table = BTreeMap::new();
            if let Some(up) = x.comp.get(&(k + 1, n + 1)) {
                for ((p, q), r) in up {
                    if g.has_cell(n, p) && g.has_cell(n, q) {
                        table.insert((p.clone(), q.clone()), r.clone());
                    }
                }
            }
            comp.insert((k, n), table);
        }
    }
    let mut marking = CellSet::empty(d - 1);
    for (dim, id) in x.marking.iter() {
        if dim >= 2 && keep(dim, id) {
            marking.insert(dim - 1, id);
        }
    }
    Ok(FiniteOmegaCat { underlying: g, id_map, comp, marking })
}

/// Suspension: two fresh 0-cells `b0s`, `b0t`; every n-cell `c` of `x`
/// becomes the (n+1)-cell `s.c` running `b0s -> b0t` at the bottom, with
/// structure shifted up. The only 0-composable pairs in the result involve
/// an identity tower on a pole, so the composition tables stay total on
/// composable pairs.
pub fn suspend(x: &FiniteOmegaCat) -> FiniteOmegaCat {
    let d = x.trunc_dim();
    let poles = ["b0s".to_string(), "b0t".to_string()];
    let s = |c: &str| format!("s.{c}");
    let mut g = GlobularData::empty(d + 1);
    g.cells[0] = poles.to_vec();
    // Identity towers on the poles, one per positive dimension.
    let mut pole_tower: Vec<[String; 2]> = vec![poles.clone()];
    for n in 1..=d + 1 {
        let prev = pole_tower.last().unwrap().clone();
        let next = [format!("id_{}", prev[0]), format!("id_{}", prev[1])];
        for i in 0..2 {
            g.cells[n].push(next[i].clone());
            g.src[n - 1].insert(next[i].clone(), prev[i].clone());
            g.tgt[n - 1].insert(next[i].clone(), prev[i].clone());
        }
        for c in x.cells_at(n - 1) {
            g.cells[n].push(s(c));
            if n == 1 {
                g.src[0].insert(s(c), poles[0].clone());
                g.tgt[0].insert(s(c), poles[1].clone());
            } else {
                g.src[n - 1].insert(s(c), s(x.src_of(n - 1, c).unwrap()));
                g.tgt[n - 1].insert(s(c), s(x.tgt_of(n - 1, c).unwrap()));
            }
        }
        pole_tower.push(next);
    }
    let mut id_map = vec![BTreeMap::new(); d + 1];
    for n in 0..=d {
        id_map[n].insert(pole_tower[n][0].clone(), pole_tower[n + 1][0].clone());
        id_map[n].insert(pole_tower[n][1].clone(), pole_tower[n + 1][1].clone());
        if n >= 1 {
            for c in x.cells_at(n - 1) {
                id_map[n].insert(s(c), s(x.id_of(n - 1, c).unwrap()));
            }
        }
    }
    let mut comp: BTreeMap<(usize, usize), BTreeMap<(String, String), String>> = BTreeMap::new();
    // Shifted tables: o_{k+1} on suspended cells is o_k downstairs.
    for ((k, n), table) in &x.comp {
        let out = comp.entry((*k + 1, *n + 1)).or_default();
        for ((a, b), r) in table {
            out.insert((s(a), s(b)), s(r));
        }
    }
    // Pole towers compose with themselves at every codimension...
    for n in 1..=d + 1 {
        for k in 0..n {
            let out = comp.entry((k, n)).or_default();
            for i in 0..2 {
                let t = pole_tower[n][i].clone();
                out.insert((t.clone(), t.clone()), t);
            }
        }
    }
    // ...and absorb suspended cells along dimension 0 by the unit law.
    for n in 1..=d + 1 {
        let out = comp.entry((0, n)).or_default();
        for c in x.cells_at(n - 1) {
            out.insert((pole_tower[n][0].clone(), s(c)), s(c));
            out.insert((s(c), pole_tower[n][1].clone()), s(c));
        }
    }
    let mut marking = CellSet::empty(d + 1);
    for (dim, id) in x.marking.iter() {
        marking.insert(dim + 1, s(id));
    }
    FiniteOmegaCat { underlying: g, id_map, comp, marking }
}

// ---------------------------------------------------------------------------
// Isomorphism search
// ---------------------------------------------------------------------------

/// Searches for a dimension-wise bijection preserving src, tgt, id, comp and
/// marking, by globular backtracking with a full table check at the end.
pub fn isomorphic(x: &FiniteOmegaCat, y: &FiniteOmegaCat, budget: u64) -> Result<bool> {
    if x.trunc_dim() != y.trunc_dim() {
        return Ok(false);
    }
    for n in 0..=x.trunc_dim() {
        if x.cells_at(n).len() != y.cells_at(n).len() {
            return Ok(false);
        }
    }
    let mut map: Vec<BTreeMap<String, String>> = vec![BTreeMap::new(); x.trunc_dim() + 1];
    let mut steps = 0u64;
    iso_rec(x, y, 0, 0, &mut map, &mut steps, budget)
}

fn iso_rec(
    x: &FiniteOmegaCat,
    y: &FiniteOmegaCat,
    n: usize,
    idx: usize,
    map: &mut Vec<BTreeMap<String, String>>,
    steps: &mut u64,
    budget: u64,
) -> Result<bool> {
    if n > x.trunc_dim() {
        return Ok(iso_tables_ok(x, y, map));
    }
    let layer = x.cells_at(n);
    if idx == layer.len() {
        return iso_rec(x, y, n + 1, 0, map, steps, budget);
    }
    let a = &layer[idx];
    for b in y.cells_at(n) {
        *steps += 1;
        if *steps > budget {
            return Err(Error::BudgetExceeded("isomorphism search".to_string()));
        }
        if map[n].values().any(|v| v == b) {
            continue;
        }
        if x.marking.contains(n, a) != y.marking.contains(n, b) {
            continue;
        }
        if n > 0 {
            let sa = &map[n - 1][x.src_of(n, a).unwrap()];
            let ta = &map[n - 1][x.tgt_of(n, a).unwrap()];
            if y.src_of(n, b).unwrap() != sa || y.tgt_of(n, b).unwrap() != ta {
                continue;
            }
            // Identity cells must correspond.
            let a_is_id = x.id_map[n - 1].values().any(|v| v == a);
            let b_is_id = y.id_map[n - 1].values().any(|v| v == b);
            if a_is_id != b_is_id {
                continue;
            }
            if a_is_id {
                let base = x.id_map[n - 1].iter().find(|(_, v)| *v == a).unwrap().0;
                if y.id_of(n - 1, &map[n - 1][base]).unwrap() != b {
                    continue;
                }
            }
        }
        map[n].insert(a.clone(), b.clone());
        if iso_rec(x, y, n, idx + 1, map, steps, budget)? {
            return Ok(true);
        }
        map[n].remove(a);
    }
    Ok(false)
}

fn iso_tables_ok(x: &FiniteOmegaCat, y: &FiniteOmegaCat, map: &[BTreeMap<String, String>]) -> bool {
    for ((k, n), table) in &x.comp {
        for ((a, b), r) in table {
            let fa = &map[*n][a];
            let fb = &map[*n][b];
            match y.comp.get(&(*k, *n)).and_then(|t| t.get(&(fa.clone(), fb.clone()))) {
                Some(fr) if fr == &map[*n][r] => {}
                _ => return false,
            }
        }
    }
    // Equal counts plus injectivity make the map a bijection, and composable
    // pairs biject because boundaries are preserved; checking x's tables
    // into y's therefore suffices.
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A 1-truncated single-object category from a monoid table over
    /// elements named by `elems`, with `elems[0]` the unit.
    fn monoid_cat(elems: &[&str], mul: &dyn Fn(usize, usize) -> usize) -> FiniteOmegaCat {
        let mut g = GlobularData::empty(1);
        g.cells[0] = vec!["e".to_string()];
        g.cells[1] = elems.iter().map(|s| s.to_string()).collect();
        for m in elems {
            g.src[0].insert(m.to_string(), "e".to_string());
            g.tgt[0].insert(m.to_string(), "e".to_string());
        }
        let id_map = vec![BTreeMap::from([("e".to_string(), elems[0].to_string())])];
        let mut table = BTreeMap::new();
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                table.insert((a.to_string(), b.to_string()), elems[mul(i, j)].to_string());
            }
        }
        FiniteOmegaCat {
            underlying: g,
            id_map,
            comp: BTreeMap::from([((0, 1), table)]),
            marking: CellSet::empty(1),
        }
    }

    #[test]
    fn fixtures_validate() {
        assert!(validate_category(&walking_iso()).is_valid());
        assert!(validate_category(&terminal(3)).is_valid());
        assert!(validate_category(&terminal(0)).is_valid());
        for (n, d) in [(0, 0), (0, 2), (1, 1), (1, 3), (2, 2), (2, 3), (3, 4)] {
            assert!(validate_category(&globe_cat(n, d)).is_valid(), "globe_cat({n},{d})");
            assert!(
                validate_category(&boundary_globe_cat(n, d)).is_valid(),
                "boundary_globe_cat({n},{d})"
            );
        }
    }

    #[test]
    fn globe_cat_cell_counts() {
        let counts = |x: &FiniteOmegaCat| -> Vec<usize> {
            x.underlying.cells.iter().map(Vec::len).collect()
        };
        assert_eq!(counts(&globe_cat(1, 1)), vec![2, 3]);
        assert_eq!(counts(&globe_cat(2, 3)), vec![2, 4, 5, 5]);
        assert_eq!(counts(&boundary_globe_cat(2, 2)), vec![2, 4, 4]);
    }

    #[test]
    fn walking_iso_composition() {
        let x = walking_iso();
        assert_eq!(x.comp2(0, 1, "u", "v").unwrap(), "id_x");
        assert_eq!(x.comp2(0, 1, "v", "u").unwrap(), "id_y");
        assert_eq!(x.comp2(0, 1, "id_x", "u").unwrap(), "u");
        assert!(matches!(
            x.comp2(0, 1, "u", "u"),
            Err(Error::IncompatibleBoundaries(_))
        ));
    }

    #[test]
    fn whisker_lifts_identities() {
        let x = globe_cat(2, 2);
        // Whisker the 0-cell x onto the top generator: a unit, by lifting.
        let (n, r) = x.whisker(0, (0, "x"), (2, "u")).unwrap();
        assert_eq!((n, r.as_str()), (2, "u"));
        assert!(x.whisker(0, (2, "u"), (2, "u")).is_err());
    }

    #[test]
    fn associativity_violation_reported() {
        // Z/3 with one corrupted entry: b*b = b instead of a.
        let z3 = |i: usize, j: usize| (i + j) % 3;
        let mut x = monoid_cat(&["id", "a", "b"], &z3);
        assert!(validate_category(&x).is_valid());
        x.comp
            .get_mut(&(0, 1))
            .unwrap()
            .insert(("b".to_string(), "b".to_string()), "b".to_string());
        let report = validate_category(&x);
        assert!(report.violations.iter().any(|v| v.code == "associativity"));
    }

    #[test]
    fn unit_violation_reported() {
        let z3 = |i: usize, j: usize| (i + j) % 3;
        let mut x = monoid_cat(&["id", "a", "b"], &z3);
        x.comp
            .get_mut(&(0, 1))
            .unwrap()
            .insert(("id".to_string(), "a".to_string()), "b".to_string());
        let report = validate_category(&x);
        assert!(report.violations.iter().any(|v| v.code == "unit-left"));
    }

    #[test]
    fn missing_composite_reported() {
        let mut x = walking_iso();
        x.comp.get_mut(&(0, 1)).unwrap().remove(&("u".to_string(), "v".to_string()));
        let report = validate_category(&x);
        assert!(report.violations.iter().any(|v| v.code == "comp-missing"));
    }

    #[test]
    fn cosep_shapes_and_validity() {
        let c = cosep(1, 2);
        let counts: Vec<usize> = c.underlying.cells.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![1, 2, 4]);
        assert!(validate_category(&c).is_valid());
        assert!(validate_category(&cosep(2, 4)).is_valid());
        assert!(validate_category(&cosep(1, 1)).is_valid());
        assert!(validate_category(&cosep(3, 3)).is_valid());
    }

    #[test]
    fn cosep_composition_rules() {
        let c = cosep(1, 3);
        assert_eq!(c.comp2(0, 1, "*", "w").unwrap(), "w");
        assert_eq!(c.comp2(0, 1, "*", "*").unwrap(), "*");
        // Along the classifier dimension: pair composition concatenates.
        assert_eq!(c.comp2(1, 2, "w.*", "*.w").unwrap(), "w.w");
        // Below it: componentwise star-absorption.
        assert_eq!(c.comp2(0, 2, "w.*", "*.*").unwrap(), "w.*");
        // Above it: same-name only.
        assert_eq!(c.comp2(2, 3, "w.*", "w.*").unwrap(), "w.*");
        assert!(c.comp2(1, 2, "w.*", "w.w").is_err());
    }

    #[test]
    fn hom_of_walking_iso() {
        let h = hom(&walking_iso(), "x", "y").unwrap();
        assert_eq!(h.trunc_dim(), 0);
        assert_eq!(h.cells_at(0), ["u".to_string()]);
        // Only the identity 1-cell is an endo-cell of the free 1-globe.
        let h = hom(&globe_cat(1, 1), "x", "x").unwrap();
        assert_eq!(h.cells_at(0), ["id_x".to_string()]);
        assert_eq!(hom(&terminal(2), "*", "*").unwrap(), terminal(1));
    }

    #[test]
    fn hom_validates() {
        for (a, b) in [("x", "x"), ("x", "y"), ("y", "x")] {
            let h = hom(&walking_iso(), a, b).unwrap();
            assert!(validate_category(&h).is_valid(), "hom({a},{b})");
        }
        let h = hom(&globe_cat(2, 3), "x", "y").unwrap();
        assert!(validate_category(&h).is_valid());
    }

    #[test]
    fn suspension_of_globes() {
        for n in 0..=2 {
            let s = suspend(&globe_cat(n, n));
            assert!(validate_category(&s).is_valid(), "suspend(globe_cat({n},{n}))");
            assert!(isomorphic(&s, &globe_cat(n + 1, n + 1), 1_000_000).unwrap());
        }
    }

    #[test]
    fn suspension_hom_round_trip() {
        for x in [walking_iso(), terminal(1), globe_cat(1, 2)] {
            let s = suspend(&x);
            assert!(validate_category(&s).is_valid());
            let h = hom(&s, "b0s", "b0t").unwrap();
            assert!(isomorphic(&h, &x, 1_000_000).unwrap());
        }
    }

    #[test]
    fn suspension_of_terminal_point() {
        let s = suspend(&terminal(0));
        assert_eq!(s.trunc_dim(), 1);
        assert_eq!(s.cells_at(0).len(), 2);
        // id towers on the two poles plus the suspended point.
        assert_eq!(s.cells_at(1).len(), 3);
        assert!(validate_category(&s).is_valid());
    }

    #[test]
    fn pad_and_union() {
        let p = pad_truncation(&walking_iso(), 3);
        assert_eq!(p.trunc_dim(), 3);
        assert!(validate_category(&p).is_valid());
        assert_eq!(p.comp2(0, 3, "id_id_u", "id_id_v").unwrap(), "id_id_id_x");

        let u = disjoint_union(&walking_iso(), &terminal(1));
        assert!(validate_category(&u).is_valid());
        assert_eq!(u.cells_at(0).len(), 3);

        let mixed = disjoint_union(&terminal(0), &terminal(2));
        assert!(validate_category(&mixed).is_valid());
        assert_eq!(mixed.trunc_dim(), 2);
    }

    #[test]
    fn isomorphism_distinguishes() {
        assert!(isomorphic(&walking_iso(), &walking_iso(), 1_000_000).unwrap());
        assert!(!isomorphic(&walking_iso(), &globe_cat(1, 1), 1_000_000).unwrap());
        // Same counts, different tables: Z/4 vs Klein four-group.
        let z4 = monoid_cat(&["e0", "e1", "e2", "e3"], &|i, j| (i + j) % 4);
        let klein = monoid_cat(&["e0", "e1", "e2", "e3"], &|i, j| i ^ j);
        assert!(validate_category(&z4).is_valid());
        assert!(validate_category(&klein).is_valid());
        assert!(!isomorphic(&z4, &klein, 1_000_000).unwrap());
        assert!(isomorphic(&z4, &z4, 1_000_000).unwrap());
    }

    #[test]
    fn cat_json_round_trip() {
        let x = cosep(1, 2);
        let text = serde_json::to_string_pretty(&x).unwrap();
        let back: FiniteOmegaCat = serde_json::from_str(&text).unwrap();
        assert_eq!(x, back);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["comp"]["0,1"].is_array());
        assert!(v["id"]["0"].is_object());
    }

    #[test]
    fn cellset_basics() {
        let x = walking_iso();
        let full = CellSet::full(&x);
        assert_eq!(full.len(), 4);
        let mut s = CellSet::empty(1);
        s.insert(1, "u");
        assert!(s.is_subset(&full));
        assert!(!full.is_subset(&s));
        assert_eq!(full.difference(&s).len(), 3);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"[["u"]]"#);
    }
}
