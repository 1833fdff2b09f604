//! Polygraph presentations with a formal-composite term language, and the
//! emitters for the walking-equivalence presentations: the one-step
//! adjunction `F`, its half-adjoint variant `H`, the marked-globe ladder,
//! the direct system-of-witnesses emission, and the suspension-glued `OR`
//! model.
//!
//! Terms are formal composites over named generators. Normalization rewrites
//! only equalities forced by the strict axioms — unit absorption, identity
//! functoriality, left-associated bracketing — and makes no attempt at the
//! general free-category word problem; every boundary the emitters produce
//! is a normal form, which is what makes canonical comparison sound.

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::scat::FiniteOmegaCat;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// A formal composite: a generator, an iterated identity on a term, or a
/// binary composite along dimension `k` (diagrammatic order).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub enum Term {
    Gen(String),
    IdLift(Box<Term>, usize),
    Comp(usize, Box<Term>, Box<Term>),
}

impl Term {
    pub fn gen(name: impl Into<String>) -> Term {
        Term::Gen(name.into())
    }

    pub fn id(t: Term, count: usize) -> Term {
        Term::IdLift(Box::new(t), count)
    }

    pub fn comp(k: usize, a: Term, b: Term) -> Term {
        Term::Comp(k, Box::new(a), Box::new(b))
    }

    /// Names of all generators occurring in the term.
    pub fn gens(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_gens(&mut out);
        out
    }

    fn collect_gens(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Gen(g) => {
                out.insert(g.clone());
            }
            Term::IdLift(t, _) => t.collect_gens(out),
            Term::Comp(_, a, b) => {
                a.collect_gens(out);
                b.collect_gens(out);
            }
        }
    }
}

impl From<Term> for Value {
    fn from(t: Term) -> Value {
        match t {
            Term::Gen(name) => json!(["gen", name]),
            Term::IdLift(t, c) => json!(["id", Value::from(*t), c]),
            Term::Comp(k, a, b) => json!(["comp", k, Value::from(*a), Value::from(*b)]),
        }
    }
}

impl TryFrom<Value> for Term {
    type Error = String;

    fn try_from(v: Value) -> std::result::Result<Term, String> {
        let arr = v.as_array().ok_or("term must be a JSON array")?;
        let tag = arr.first().and_then(Value::as_str).ok_or("term tag must be a string")?;
        match (tag, arr.len()) {
            ("gen", 2) => {
                let name = arr[1].as_str().ok_or("generator name must be a string")?;
                Ok(Term::gen(name))
            }
            ("id", 3) => {
                let t = Term::try_from(arr[1].clone())?;
                let c = arr[2].as_u64().ok_or("identity count must be a number")? as usize;
                Ok(Term::id(t, c))
            }
            ("comp", 4) => {
                let k = arr[1].as_u64().ok_or("composition dimension must be a number")? as usize;
                let a = Term::try_from(arr[2].clone())?;
                let b = Term::try_from(arr[3].clone())?;
                Ok(Term::comp(k, a, b))
            }
            _ => Err(format!("unrecognized term shape starting with `{tag}`")),
        }
    }
}

// ---------------------------------------------------------------------------
// Polygraphs
// ---------------------------------------------------------------------------

/// A generating cell. `src`/`tgt` are terms over generators that appear
/// earlier in the polygraph (absent exactly for 0-generators). `address` is
/// the emitter-recorded position used for canonical relabeling; emitters
/// guarantee it determines the generator within its dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub dim: usize,
    pub src: Option<Term>,
    pub tgt: Option<Term>,
    pub marked: bool,
    pub address: String,
}

/// A finite polygraph: an ordered list of generators truncated at `max_dim`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygraph {
    pub max_dim: usize,
    pub generators: Vec<Generator>,
}

impl Polygraph {
    pub fn find(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn gen_dim(&self, name: &str) -> Result<usize> {
        self.find(name)
            .map(|g| g.dim)
            .ok_or_else(|| Error::IllFormedTerm(format!("unknown generator `{name}`")))
    }

    pub fn gens_at(&self, dim: usize) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(move |g| g.dim == dim)
    }

    /// (total, marked) generator counts at a dimension.
    pub fn census(&self, dim: usize) -> (usize, usize) {
        let total = self.gens_at(dim).count();
        let marked = self.gens_at(dim).filter(|g| g.marked).count();
        (total, marked)
    }
}

/// Dimension of a term over a polygraph.
pub fn term_dim(t: &Term, p: &Polygraph) -> Result<usize> {
    match t {
        Term::Gen(g) => p.gen_dim(g),
        Term::IdLift(t, c) => Ok(term_dim(t, p)? + c),
        Term::Comp(k, a, b) => {
            let da = term_dim(a, p)?;
            let db = term_dim(b, p)?;
            if da != db || da <= *k {
                return Err(Error::IllFormedTerm(format!(
                    "composite along {k} of terms of dimensions {da} and {db}"
                )));
            }
            Ok(da)
        }
    }
}

/// Rewrites a term to its strict normal form: identity-lift flattening, unit
/// absorption, identity functoriality (identities pulled outward), and
/// left-associated composite chains.
pub fn normalize(t: &Term, p: &Polygraph) -> Result<Term> {
    term_dim(t, p)?; // surface ill-formedness first
    let mut cur = t.clone();
    for _ in 0..10_000 {
        let next = rewrite(&cur, p)?;
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::IllFormedTerm("normalization did not terminate".to_string()))
}

fn rewrite(t: &Term, p: &Polygraph) -> Result<Term> {
    Ok(match t {
        Term::Gen(_) => t.clone(),
        Term::IdLift(inner, c) => {
            let inner = rewrite(inner, p)?;
            match (inner, *c) {
                (t, 0) => t,
                (Term::IdLift(t2, c2), c) => Term::id(*t2, c + c2),
                (t, c) => Term::id(t, c),
            }
        }
        Term::Comp(k, a, b) => {
            let a = rewrite(a, p)?;
            let b = rewrite(b, p)?;
            // Unit absorption: an identity tower over a cell of dimension
            // <= k is a unit for composition along k.
            if let Term::IdLift(base, c) = &a {
                if *c >= 1 && term_dim(base, p)? <= *k {
                    return Ok(b);
                }
            }
            if let Term::IdLift(base, c) = &b {
                if *c >= 1 && term_dim(base, p)? <= *k {
                    return Ok(a);
                }
            }
            // Identity functoriality: id(x) o_k id(y) = id(x o_k y).
            if let (Term::IdLift(ba, ca), Term::IdLift(bb, cb)) = (&a, &b) {
                let c = (*ca).min(*cb);
                if c >= 1 && term_dim(&a, p)? - c > *k {
                    let inner_a = Term::id((**ba).clone(), ca - c);
                    let inner_b = Term::id((**bb).clone(), cb - c);
                    return Ok(Term::id(Term::comp(*k, inner_a, inner_b), c));
                }
            }
            // Left-associated chains.
            if let Term::Comp(k2, x, y) = &b {
                if k2 == k {
                    return Ok(Term::comp(*k, Term::comp(*k, a, (**x).clone()), (**y).clone()));
                }
            }
            Term::comp(*k, a, b)
        }
    })
}

fn term_src(t: &Term, p: &Polygraph) -> Result<Term> {
    match t {
        Term::Gen(g) => p
            .find(g)
            .and_then(|g| g.src.clone())
            .ok_or_else(|| Error::IllFormedTerm(format!("`{g}` has no source"))),
        Term::IdLift(inner, c) => {
            if *c == 0 {
                term_src(inner, p)
            } else {
                Ok(Term::id((**inner).clone(), c - 1))
            }
        }
        Term::Comp(k, a, b) => {
            let n = term_dim(t, p)?;
            if *k == n - 1 {
                term_src(a, p)
            } else {
                Ok(Term::comp(*k, term_src(a, p)?, term_src(b, p)?))
            }
        }
    }
}

fn term_tgt(t: &Term, p: &Polygraph) -> Result<Term> {
    match t {
        Term::Gen(g) => p
            .find(g)
            .and_then(|g| g.tgt.clone())
            .ok_or_else(|| Error::IllFormedTerm(format!("`{g}` has no target"))),
        Term::IdLift(inner, c) => {
            if *c == 0 {
                term_tgt(inner, p)
            } else {
                Ok(Term::id((**inner).clone(), c - 1))
            }
        }
        Term::Comp(k, a, b) => {
            let n = term_dim(t, p)?;
            if *k == n - 1 {
                term_tgt(b, p)
            } else {
                Ok(Term::comp(*k, term_tgt(a, p)?, term_tgt(b, p)?))
            }
        }
    }
}

/// Normalized (source, target) of a positive-dimensional term.
pub fn term_boundary(t: &Term, p: &Polygraph) -> Result<(Term, Term)> {
    Ok((normalize(&term_src(t, p)?, p)?, normalize(&term_tgt(t, p)?, p)?))
}

fn term_src_iter(t: &Term, p: &Polygraph, k: usize) -> Result<Term> {
    let mut cur = t.clone();
    for _ in k..term_dim(t, p)? {
        cur = term_src(&cur, p)?;
    }
    normalize(&cur, p)
}

fn term_tgt_iter(t: &Term, p: &Polygraph, k: usize) -> Result<Term> {
    let mut cur = t.clone();
    for _ in k..term_dim(t, p)? {
        cur = term_tgt(&cur, p)?;
    }
    normalize(&cur, p)
}

/// Checks every term-level invariant: unique names, boundary presence by
/// dimension, references to earlier generators only, well-formed composites
/// (k-boundaries glue after normalization), and globularity.
pub fn validate_polygraph(p: &Polygraph) -> ValidationReport {
    let mut report = ValidationReport::new();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, g) in p.generators.iter().enumerate() {
        if seen.insert(&g.name, i).is_some() {
            report.push(
                "duplicate-name",
                Some(g.dim),
                &[&g.name],
                format!("generator `{}` declared twice", g.name),
            );
        }
        if g.dim > p.max_dim {
            report.push(
                "dimension-overflow",
                Some(g.dim),
                &[&g.name],
                format!("generator `{}` exceeds max_dim {}", g.name, p.max_dim),
            );
        }
        if (g.dim == 0) != (g.src.is_none() && g.tgt.is_none()) {
            report.push(
                "boundary-presence",
                Some(g.dim),
                &[&g.name],
                format!("generator `{}` must have boundaries iff its dimension is positive", g.name),
            );
            continue;
        }
        for (what, side) in [("src", &g.src), ("tgt", &g.tgt)] {
            let Some(term) = side else { continue };
            for used in term.gens() {
                match seen.get(used.as_str()) {
                    Some(j) if *j < i => {}
                    _ => report.push(
                        "forward-reference",
                        Some(g.dim),
                        &[&g.name, &used],
                        format!("{what} of `{}` references `{used}`, not an earlier generator", g.name),
                    ),
                }
            }
        }
    }
    if !report.is_valid() {
        return report;
    }
    for g in &p.generators {
        let (Some(src), Some(tgt)) = (&g.src, &g.tgt) else { continue };
        for (what, term) in [("src", src), ("tgt", tgt)] {
            match term_dim(term, p) {
                Err(e) => {
                    report.push(
                        "ill-formed-boundary",
                        Some(g.dim),
                        &[&g.name],
                        format!("{what} of `{}`: {e}", g.name),
                    );
                    continue;
                }
                Ok(d) if d + 1 != g.dim => {
                    report.push(
                        "boundary-dimension",
                        Some(g.dim),
                        &[&g.name],
                        format!("{what} of `{}` has dimension {d}, expected {}", g.name, g.dim - 1),
                    );
                    continue;
                }
                Ok(_) => {}
            }
            if let Err(e) = check_gluing(term, p) {
                report.push(
                    "composite-gluing",
                    Some(g.dim),
                    &[&g.name],
                    format!("{what} of `{}`: {e}", g.name),
                );
            }
        }
        if !report.is_valid() {
            continue;
        }
        if g.dim >= 2 {
            let ss = term_src_iter(src, p, g.dim - 2).unwrap();
            let st = term_src_iter(tgt, p, g.dim - 2).unwrap();
            let ts = term_tgt_iter(src, p, g.dim - 2).unwrap();
            let tt = term_tgt_iter(tgt, p, g.dim - 2).unwrap();
            if ss != st || ts != tt {
                report.push(
                    "globularity",
                    Some(g.dim),
                    &[&g.name],
                    format!("boundaries of `{}` are not parallel after normalization", g.name),
                );
            }
        }
    }
    report
}

fn check_gluing(t: &Term, p: &Polygraph) -> Result<()> {
    match t {
        Term::Gen(_) => Ok(()),
        Term::IdLift(inner, _) => check_gluing(inner, p),
        Term::Comp(k, a, b) => {
            check_gluing(a, p)?;
            check_gluing(b, p)?;
            let ta = term_tgt_iter(a, p, *k)?;
            let sb = term_src_iter(b, p, *k)?;
            if ta != sb {
                return Err(Error::IllFormedTerm(format!(
                    "{k}-boundaries do not glue: target normalizes to {ta:?}, source to {sb:?}"
                )));
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation in table categories
// ---------------------------------------------------------------------------

/// The value of a term in a table category: an iterated formal identity
/// `id^lift(cell)` on a `dim`-cell. In canonical form `lift > 0` only when
/// `dim` is the ambient truncation (lower identities are materialized
/// through the identity tables).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Val {
    pub dim: usize,
    pub cell: String,
    pub lift: usize,
}

impl Val {
    pub fn cell(dim: usize, cell: impl Into<String>) -> Val {
        Val { dim, cell: cell.into(), lift: 0 }
    }

    pub fn total_dim(&self) -> usize {
        self.dim + self.lift
    }

    /// Materializes identities through the tables until the value is either
    /// an honest cell or a formal tower over a top-dimensional cell.
    pub fn canonical(self, x: &FiniteOmegaCat) -> Result<Val> {
        let mut v = self;
        while v.lift > 0 && v.dim < x.trunc_dim() {
            v.cell = x.id_of(v.dim, &v.cell)?.to_string();
            v.dim += 1;
            v.lift -= 1;
        }
        Ok(v)
    }
}

/// Evaluates a term in `x` under a generator assignment, by structural
/// recursion on the tables; identities above the truncation stay formal.
pub fn eval_term(t: &Term, x: &FiniteOmegaCat, assign: &BTreeMap<String, Val>) -> Result<Val> {
    match t {
        Term::Gen(g) => assign
            .get(g)
            .cloned()
            .ok_or_else(|| Error::IllFormedTerm(format!("generator `{g}` is unassigned")))?
            .canonical(x),
        Term::IdLift(inner, c) => {
            let mut v = eval_term(inner, x, assign)?;
            v.lift += c;
            v.canonical(x)
        }
        Term::Comp(k, a, b) => {
            let va = eval_term(a, x, assign)?;
            let vb = eval_term(b, x, assign)?;
            let n = va.total_dim();
            if n != vb.total_dim() || n <= *k {
                return Err(Error::IllFormedTerm(format!(
                    "composite along {k} of values of dimensions {n} and {}",
                    vb.total_dim()
                )));
            }
            if n <= x.trunc_dim() {
                let r = x.comp2(*k, n, &va.cell, &vb.cell)?.to_string();
                return Ok(Val::cell(n, r));
            }
            // Both values are formal towers over top-dimensional cells.
            if *k < x.trunc_dim() {
                let r = x.comp2(*k, x.trunc_dim(), &va.cell, &vb.cell)?.to_string();
                Val { dim: x.trunc_dim(), cell: r, lift: n - x.trunc_dim() }.canonical(x)
            } else {
                // Composition of identity towers along k >= trunc_dim needs
                // matching bases and changes nothing.
                if va.cell != vb.cell {
                    return Err(Error::IncompatibleBoundaries(format!(
                        "identity towers over `{}` and `{}` do not meet along {k}",
                        va.cell, vb.cell
                    )));
                }
                Ok(va)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Emitters
// ---------------------------------------------------------------------------

/// Names for the globe carrier: `x`, `y` at the bottom, `b{k}s`/`b{k}t`
/// above. Addresses are always `b{k}s`/`b{k}t`.
fn carrier_name(k: usize, target_side: bool) -> String {
    match (k, target_side) {
        (0, false) => "x".to_string(),
        (0, true) => "y".to_string(),
        (k, false) => format!("b{k}s"),
        (k, true) => format!("b{k}t"),
    }
}

fn carrier_address(k: usize, target_side: bool) -> String {
    if target_side {
        format!("b{k}t")
    } else {
        format!("b{k}s")
    }
}

/// Boundary-globe generators for dimensions `0..n`.
fn carrier(n: usize) -> Vec<Generator> {
    let mut out = Vec::new();
    for k in 0..n {
        for side in [false, true] {
            let (src, tgt) = if k == 0 {
                (None, None)
            } else {
                (
                    Some(Term::gen(carrier_name(k - 1, false))),
                    Some(Term::gen(carrier_name(k - 1, true))),
                )
            };
            out.push(Generator {
                name: carrier_name(k, side),
                dim: k,
                src,
                tgt,
                marked: false,
                address: carrier_address(k, side),
            });
        }
    }
    out
}

fn marked_top(n: usize, name: &str, address: &str) -> Generator {
    Generator {
        name: name.to_string(),
        dim: n,
        src: Some(Term::gen(carrier_name(n - 1, false))),
        tgt: Some(Term::gen(carrier_name(n - 1, true))),
        marked: true,
        address: address.to_string(),
    }
}

/// One free equivalence step on the n-globe: the marked cell `u`, a reverse
/// pair `v`, `w`, and marked cancellation witnesses `p: u∘v -> id(src)` and
/// `q: w∘u -> id(tgt)` one dimension up.
pub fn emit_F(n: usize) -> Polygraph {
    assert!(n >= 1, "the marked cell needs a positive dimension");
    let mut gens = carrier(n);
    let s = Term::gen(carrier_name(n - 1, false));
    let t = Term::gen(carrier_name(n - 1, true));
    gens.push(marked_top(n, "u", ""));
    for (name, addr) in [("v", "v"), ("w", "w")] {
        gens.push(Generator {
            name: name.to_string(),
            dim: n,
            src: Some(t.clone()),
            tgt: Some(s.clone()),
            marked: false,
            address: addr.to_string(),
        });
    }
    gens.push(Generator {
        name: "p".to_string(),
        dim: n + 1,
        src: Some(Term::comp(n - 1, Term::gen("u"), Term::gen("v"))),
        tgt: Some(Term::id(s.clone(), 1)),
        marked: true,
        address: "p".to_string(),
    });
    gens.push(Generator {
        name: "q".to_string(),
        dim: n + 1,
        src: Some(Term::comp(n - 1, Term::gen("w"), Term::gen("u"))),
        tgt: Some(Term::id(t.clone(), 1)),
        marked: true,
        address: "q".to_string(),
    });
    Polygraph { max_dim: n + 1, generators: gens }
}

/// The half-adjoint variant: a single two-sided inverse `v`, invertibility
/// witnesses `p: id(src) -> u∘v` and `q: v∘u -> id(tgt)`, and a marked
/// swallowtail cell `r` one further dimension up relating them. Boundaries
/// are the strict reflection of the displayed composite: coherence cells
/// are identities and have been absorbed.
pub fn emit_H(n: usize) -> Polygraph {
    assert!(n >= 1, "the marked cell needs a positive dimension");
    let mut gens = carrier(n);
    let s = Term::gen(carrier_name(n - 1, false));
    let t = Term::gen(carrier_name(n - 1, true));
    gens.push(marked_top(n, "u", ""));
    gens.push(Generator {
        name: "v".to_string(),
        dim: n,
        src: Some(t.clone()),
        tgt: Some(s.clone()),
        marked: false,
        address: "v".to_string(),
    });
    gens.push(Generator {
        name: "p".to_string(),
        dim: n + 1,
        src: Some(Term::id(s.clone(), 1)),
        tgt: Some(Term::comp(n - 1, Term::gen("u"), Term::gen("v"))),
        marked: true,
        address: "p".to_string(),
    });
    gens.push(Generator {
        name: "q".to_string(),
        dim: n + 1,
        src: Some(Term::comp(n - 1, Term::gen("v"), Term::gen("u"))),
        tgt: Some(Term::id(t.clone(), 1)),
        marked: true,
        address: "q".to_string(),
    });
    let id_u = Term::id(Term::gen("u"), 1);
    gens.push(Generator {
        name: "r".to_string(),
        dim: n + 2,
        src: Some(Term::id(Term::gen("u"), 1)),
        tgt: Some(Term::comp(
            n,
            Term::comp(n - 1, Term::gen("p"), id_u.clone()),
            Term::comp(n - 1, id_u, Term::gen("q")),
        )),
        marked: true,
        address: "r".to_string(),
    });
    Polygraph { max_dim: n + 2, generators: gens }
}

/// Name scheme shared by the ladder, witness, and OR emitters: the address
/// is a word recording how a generator arose; the root is called `u`.
fn witness_name(address: &str) -> String {
    if address.is_empty() {
        "u".to_string()
    } else {
        format!("x_{address}")
    }
}

/// Adjoins, for one marked generator `g`, its reverse pair and marked
/// cancellation witnesses with the one-step boundaries instantiated at `g`.
/// Witnesses are emitted only when they fit under `max_dim`.
fn adjoin_partners(gens: &mut Vec<Generator>, g: &Generator, max_dim: usize) {
    let src = g.src.clone().unwrap();
    let tgt = g.tgt.clone().unwrap();
    for letter in ["v", "w"] {
        gens.push(Generator {
            name: witness_name(&format!("{}{letter}", g.address)),
            dim: g.dim,
            src: Some(tgt.clone()),
            tgt: Some(src.clone()),
            marked: false,
            address: format!("{}{letter}", g.address),
        });
    }
    if g.dim + 1 > max_dim {
        return;
    }
    gens.push(Generator {
        name: witness_name(&format!("{}p", g.address)),
        dim: g.dim + 1,
        src: Some(Term::comp(
            g.dim - 1,
            Term::gen(&g.name),
            Term::gen(witness_name(&format!("{}v", g.address))),
        )),
        tgt: Some(Term::id(src.clone(), 1)),
        marked: true,
        address: format!("{}p", g.address),
    });
    gens.push(Generator {
        name: witness_name(&format!("{}q", g.address)),
        dim: g.dim + 1,
        src: Some(Term::comp(
            g.dim - 1,
            Term::gen(witness_name(&format!("{}w", g.address))),
            Term::gen(&g.name),
        )),
        tgt: Some(Term::id(tgt.clone(), 1)),
        marked: true,
        address: format!("{}q", g.address),
    });
}

/// The marked-globe ladder: step 0 is the marked n-globe; step m+1 adjoins,
/// for every marked generator at the top dimension, a reverse pair and
/// marked cancellation witnesses one dimension up. Returns steps `0..=m_max`.
pub fn emit_EF_ladder(n: usize, m_max: usize) -> Vec<Polygraph> {
    assert!(n >= 1);
    let mut gens = carrier(n);
    gens.push(marked_top(n, "u", ""));
    let mut steps = vec![Polygraph { max_dim: n, generators: gens }];
    for m in 0..m_max {
        let prev = steps.last().unwrap();
        let mut next = prev.clone();
        next.max_dim = n + m + 1;
        let tops: Vec<Generator> =
            prev.gens_at(n + m).filter(|g| g.marked).cloned().collect();
        for g in &tops {
            adjoin_partners(&mut next.generators, g, next.max_dim);
        }
        steps.push(next);
    }
    steps
}

/// Direct emission of the witness system truncated at `D`: one marked
/// generator per word over {p, q}, each with a reverse pair at its own
/// dimension and cancellation witnesses above (cut off at `D`).
pub fn emit_EF_witness(n: usize, d_max: usize) -> Polygraph {
    assert!(n >= 1 && d_max >= n, "need 1 <= n <= D");
    let mut gens = carrier(n);
    gens.push(marked_top(n, "u", ""));
    // Partners are adjoined dimension by dimension; the marked generators of
    // the next dimension are exactly the witnesses just emitted.
    for dim in n..=d_max {
        let tops: Vec<Generator> = gens
            .iter()
            .filter(|g| g.dim == dim && g.marked)
            .cloned()
            .collect();
        for g in &tops {
            adjoin_partners(&mut gens, g, d_max);
        }
    }
    Polygraph { max_dim: d_max, generators: gens }
}

/// Substitutes generators through `env` and shifts every composite up one
/// dimension: the działanie of suspension on boundary terms under a gluing
/// environment.
fn shift_subst(t: &Term, env: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Gen(g) => env.get(g).cloned().unwrap_or_else(|| {
            unreachable!("environment misses `{g}`")
        }),
        Term::IdLift(inner, c) => Term::id(shift_subst(inner, env), *c),
        Term::Comp(k, a, b) => Term::comp(k + 1, shift_subst(a, env), shift_subst(b, env)),
    }
}

/// The suspension-glued model of the walking equivalence on one 1-cell,
/// truncated at `D`: starts from `u, v, w` between two 0-cells and, at each
/// step, glues a p-copy and a q-copy of the suspended previous step along
/// the gluing environments; only the copies of the top generators are fresh.
pub fn emit_OR(d_max: usize) -> Polygraph {
    assert!(d_max >= 1);
    let mut gens = vec![
        Generator { name: "x".into(), dim: 0, src: None, tgt: None, marked: false, address: "b0s".into() },
        Generator { name: "y".into(), dim: 0, src: None, tgt: None, marked: false, address: "b0t".into() },
    ];
    let (x, y) = (Term::gen("x"), Term::gen("y"));
    gens.push(Generator {
        name: "u".into(),
        dim: 1,
        src: Some(x.clone()),
        tgt: Some(y.clone()),
        marked: true,
        address: String::new(),
    });
    for name in ["v", "w"] {
        gens.push(Generator {
            name: name.into(),
            dim: 1,
            src: Some(y.clone()),
            tgt: Some(x.clone()),
            marked: false,
            address: name.into(),
        });
    }
    // Gluing environments: where the suspension poles land in each copy.
    let mut env_p: BTreeMap<String, Term> = BTreeMap::from([
        ("x".to_string(), Term::comp(0, Term::gen("u"), Term::gen("v"))),
        ("y".to_string(), Term::id(x.clone(), 1)),
    ]);
    let mut env_q: BTreeMap<String, Term> = BTreeMap::from([
        ("x".to_string(), Term::comp(0, Term::gen("w"), Term::gen("u"))),
        ("y".to_string(), Term::id(y.clone(), 1)),
    ]);
    let mut p = Polygraph { max_dim: 1, generators: gens };
    for m in 1..d_max {
        let tops: Vec<Generator> = p.gens_at(m).cloned().collect();
        for (letter, env) in [("p", &env_p), ("q", &env_q)] {
            for g in &tops {
                let address = format!("{letter}{}", g.address);
                let src = normalize(&shift_subst(g.src.as_ref().unwrap(), env), &p).unwrap();
                let tgt = normalize(&shift_subst(g.tgt.as_ref().unwrap(), env), &p).unwrap();
                p.generators.push(Generator {
                    name: witness_name(&address),
                    dim: m + 1,
                    src: Some(src),
                    tgt: Some(tgt),
                    marked: g.marked,
                    address,
                });
            }
        }
        for (letter, env) in [("p", &mut env_p), ("q", &mut env_q)] {
            for g in &tops {
                env.insert(g.name.clone(), Term::gen(witness_name(&format!("{letter}{}", g.address))));
            }
        }
        p.max_dim = m + 1;
    }
    p
}

/// Suspends a presentation: two fresh pole 0-generators, every old
/// generator shifted up one dimension (old 0-generators run pole to pole),
/// all composites re-indexed, markings preserved. Carrier addresses shift
/// `b{k}` to `b{k+1}`; all other addresses are kept.
pub fn suspend_presentation(p: &Polygraph) -> Polygraph {
    let shift_address = |addr: &str| -> String {
        for k in 0..=p.max_dim {
            for side in ["s", "t"] {
                if addr == format!("b{k}{side}") {
                    return format!("b{}{side}", k + 1);
                }
            }
        }
        addr.to_string()
    };
    fn shift_term(t: &Term) -> Term {
        match t {
            Term::Gen(g) => Term::gen(format!("s.{g}")),
            Term::IdLift(inner, c) => Term::id(shift_term(inner), *c),
            Term::Comp(k, a, b) => Term::comp(k + 1, shift_term(a), shift_term(b)),
        }
    }
    let mut gens = vec![
        Generator { name: "x".into(), dim: 0, src: None, tgt: None, marked: false, address: "b0s".into() },
        Generator { name: "y".into(), dim: 0, src: None, tgt: None, marked: false, address: "b0t".into() },
    ];
    for g in &p.generators {
        let (src, tgt) = match (&g.src, &g.tgt) {
            (None, None) => (Some(Term::gen("x")), Some(Term::gen("y"))),
            (Some(s), Some(t)) => (Some(shift_term(s)), Some(shift_term(t))),
            _ => unreachable!("validated polygraphs have both boundaries or neither"),
        };
        gens.push(Generator {
            name: format!("s.{}", g.name),
            dim: g.dim + 1,
            src,
            tgt,
            marked: g.marked,
            address: shift_address(&g.address),
        });
    }
    Polygraph { max_dim: p.max_dim + 1, generators: gens }
}

/// Drops all generators above dimension `d`.
pub fn truncate_presentation(p: &Polygraph, d: usize) -> Polygraph {
    Polygraph {
        max_dim: d,
        generators: p.generators.iter().filter(|g| g.dim <= d).cloned().collect(),
    }
}

/// Compares two presentations up to the canonical relabeling by (dimension,
/// address): same truncation, same addressed generators with equal markings,
/// and equal normalized boundaries after renaming both sides to canonical
/// names. Falls back to plain equality when addresses are not unique.
pub fn presentations_isomorphic(p: &Polygraph, q: &Polygraph) -> bool {
    if p.max_dim != q.max_dim {
        return false;
    }
    let keys = |poly: &Polygraph| -> Vec<(usize, String)> {
        let mut v: Vec<(usize, String)> =
            poly.generators.iter().map(|g| (g.dim, g.address.clone())).collect();
        v.sort();
        v
    };
    let pk = keys(p);
    if pk != keys(q) {
        return false;
    }
    let unique = pk.windows(2).all(|w| w[0] != w[1]);
    if !unique {
        return p == q;
    }
    let rename = |poly: &Polygraph| -> BTreeMap<String, String> {
        poly.generators
            .iter()
            .map(|g| (g.name.clone(), format!("c{}_{}", g.dim, g.address)))
            .collect()
    };
    fn apply(t: &Term, map: &BTreeMap<String, String>) -> Term {
        match t {
            Term::Gen(g) => Term::gen(map[g].clone()),
            Term::IdLift(inner, c) => Term::id(apply(inner, map), *c),
            Term::Comp(k, a, b) => Term::comp(*k, apply(a, map), apply(b, map)),
        }
    }
    let (rp, rq) = (rename(p), rename(q));
    let index = |poly: &Polygraph| -> BTreeMap<(usize, String), &Generator> {
        poly.generators.iter().map(|g| ((g.dim, g.address.clone()), g)).collect()
    };
    let qi = index(q);
    for g in &p.generators {
        let h = qi[&(g.dim, g.address.clone())];
        if g.marked != h.marked {
            return false;
        }
        let norm = |t: &Option<Term>, poly: &Polygraph, map: &BTreeMap<String, String>| {
            t.as_ref().map(|t| apply(&normalize(t, poly).unwrap(), map))
        };
        if norm(&g.src, p, &rp) != norm(&h.src, q, &rq)
            || norm(&g.tgt, p, &rp) != norm(&h.tgt, q, &rq)
        {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scat::walking_iso;

    #[test]
    fn term_json_shapes() {
        let t = Term::comp(0, Term::id(Term::gen("x"), 1), Term::gen("u"));
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v, json!(["comp", 0, ["id", ["gen", "x"], 1], ["gen", "u"]]));
        let back: Term = serde_json::from_value(v).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn normalization_rules() {
        let p = emit_F(1);
        let unit = Term::comp(0, Term::id(Term::gen("x"), 1), Term::gen("u"));
        assert_eq!(normalize(&unit, &p).unwrap(), Term::gen("u"));

        let right = Term::comp(0, Term::gen("u"), Term::comp(0, Term::gen("v"), Term::gen("u")));
        let left = Term::comp(0, Term::comp(0, Term::gen("u"), Term::gen("v")), Term::gen("u"));
        assert_eq!(normalize(&right, &p).unwrap(), normalize(&left, &p).unwrap());

        let funct = Term::comp(0, Term::id(Term::gen("u"), 1), Term::id(Term::gen("v"), 2));
        assert_eq!(
            normalize(&funct, &p).unwrap(),
            Term::id(Term::comp(0, Term::gen("u"), Term::id(Term::gen("v"), 1)), 1)
        );

        let nested = Term::id(Term::id(Term::gen("u"), 1), 0);
        assert_eq!(normalize(&nested, &p).unwrap(), Term::id(Term::gen("u"), 1));
    }

    #[test]
    fn f_emitter_shape() {
        let p = emit_F(1);
        assert!(validate_polygraph(&p).is_valid());
        assert_eq!(p.generators.len(), 7);
        let positive: Vec<&str> = p
            .generators
            .iter()
            .filter(|g| g.dim >= 1)
            .map(|g| g.name.as_str())
            .collect();
        assert_eq!(positive, ["u", "v", "w", "p", "q"]);
        let marked: Vec<&str> =
            p.generators.iter().filter(|g| g.marked).map(|g| g.name.as_str()).collect();
        assert_eq!(marked, ["u", "p", "q"]);
        let (src, tgt) = term_boundary(&Term::gen("p"), &p).unwrap();
        assert_eq!(src, Term::comp(0, Term::gen("u"), Term::gen("v")));
        assert_eq!(tgt, Term::id(Term::gen("x"), 1));
    }

    #[test]
    fn h_emitter_shape() {
        let p = emit_H(1);
        assert!(validate_polygraph(&p).is_valid());
        let positive: Vec<&str> = p
            .generators
            .iter()
            .filter(|g| g.dim >= 1)
            .map(|g| g.name.as_str())
            .collect();
        assert_eq!(positive, ["u", "v", "p", "q", "r"]);
        let marked: Vec<&str> =
            p.generators.iter().filter(|g| g.marked).map(|g| g.name.as_str()).collect();
        assert_eq!(marked, ["u", "p", "q", "r"]);
        let r = p.find("r").unwrap();
        let id_u = Term::id(Term::gen("u"), 1);
        assert_eq!(
            r.tgt,
            Some(Term::comp(
                1,
                Term::comp(0, Term::gen("p"), id_u.clone()),
                Term::comp(0, id_u, Term::gen("q")),
            ))
        );
    }

    #[test]
    fn emitters_suspend() {
        assert!(presentations_isomorphic(&suspend_presentation(&emit_F(1)), &emit_F(2)));
        assert!(presentations_isomorphic(&suspend_presentation(&emit_H(1)), &emit_H(2)));
        assert!(presentations_isomorphic(
            &suspend_presentation(&emit_EF_witness(1, 3)),
            &emit_EF_witness(2, 4)
        ));
        assert!(!presentations_isomorphic(&emit_F(1), &emit_H(1)));
        assert!(presentations_isomorphic(&emit_F(1), &emit_F(1)));
    }

    #[test]
    fn witness_census() {
        let p = emit_EF_witness(1, 4);
        assert!(validate_polygraph(&p).is_valid());
        for m in 0..=3 {
            let (total, marked) = p.census(1 + m);
            assert_eq!(marked, 1 << m, "marked at dimension {}", 1 + m);
            assert_eq!(total, 3 << m, "total at dimension {}", 1 + m);
        }
        // No marked generators below the root dimension.
        let p = emit_EF_witness(2, 4);
        assert!(validate_polygraph(&p).is_valid());
        assert_eq!(p.census(1).1, 0);
        assert_eq!(p.census(2), (3, 1));
        assert_eq!(p.census(3), (6, 2));
    }

    #[test]
    fn ladder_counts_and_union() {
        let steps = emit_EF_ladder(1, 3);
        assert_eq!(steps.len(), 4);
        for (m, step) in steps.iter().enumerate() {
            assert!(validate_polygraph(step).is_valid(), "step {m}");
            assert_eq!(step.max_dim, 1 + m);
            // Top dimension: marked witnesses only, no partners yet.
            assert_eq!(step.census(1 + m), (1 << m, 1 << m));
            if m >= 1 {
                assert_eq!(step.census(m), (3 << (m - 1), 1 << (m - 1)));
            }
        }
        // The stabilized union at D equals the direct witness emission.
        for d in 1..=3 {
            let tall = emit_EF_ladder(1, d).pop().unwrap();
            let union = truncate_presentation(&tall, d);
            assert!(presentations_isomorphic(&union, &emit_EF_witness(1, d)), "D = {d}");
        }
    }

    #[test]
    fn or_matches_witness_system() {
        let p = emit_OR(1);
        let zero: Vec<&str> = p.gens_at(0).map(|g| g.name.as_str()).collect();
        let one: Vec<&str> = p.gens_at(1).map(|g| g.name.as_str()).collect();
        assert_eq!(zero, ["x", "y"]);
        assert_eq!(one, ["u", "v", "w"]);
        for d in 1..=4 {
            let or = emit_OR(d);
            assert!(validate_polygraph(&or).is_valid(), "OR({d})");
            assert!(presentations_isomorphic(&or, &emit_EF_witness(1, d)), "D = {d}");
        }
    }

    #[test]
    fn evaluation_in_walking_iso() {
        let x = walking_iso();
        let assign = BTreeMap::from([
            ("u".to_string(), Val::cell(1, "u")),
            ("v".to_string(), Val::cell(1, "v")),
        ]);
        let t = Term::comp(0, Term::gen("u"), Term::gen("v"));
        assert_eq!(eval_term(&t, &x, &assign).unwrap(), Val::cell(1, "id_x"));

        // Formal towers over the truncation collapse where tables allow.
        let lifted = Term::comp(0, Term::id(Term::gen("u"), 1), Term::id(Term::gen("v"), 1));
        assert_eq!(
            eval_term(&lifted, &x, &assign).unwrap(),
            Val { dim: 1, cell: "id_x".to_string(), lift: 1 }
        );
        let bad = Term::comp(0, Term::gen("u"), Term::gen("u"));
        assert!(eval_term(&bad, &x, &assign).is_err());

        // Identities below the truncation are materialized.
        let assign0 = BTreeMap::from([("x".to_string(), Val::cell(0, "x"))]);
        assert_eq!(
            eval_term(&Term::id(Term::gen("x"), 1), &x, &assign0).unwrap(),
            Val::cell(1, "id_x")
        );
    }

    #[test]
    fn polygraph_json_round_trip() {
        let p = emit_EF_witness(1, 3);
        let text = serde_json::to_string(&p).unwrap();
        let back: Polygraph = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn validator_rejects_broken_boundaries() {
        let mut p = emit_F(1);
        // Point p's source at a non-composable pair.
        p.generators.iter_mut().find(|g| g.name == "p").unwrap().src =
            Some(Term::comp(0, Term::gen("u"), Term::gen("u")));
        let report = validate_polygraph(&p);
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.code == "composite-gluing"));

        let mut p = emit_F(1);
        p.generators.iter_mut().find(|g| g.name == "q").unwrap().tgt =
            Some(Term::id(Term::gen("x"), 1));
        let report = validate_polygraph(&p);
        assert!(report.violations.iter().any(|v| v.code == "globularity"));
    }
}
