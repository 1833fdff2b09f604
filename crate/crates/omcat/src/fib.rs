//! Strict functors and the fibration zoo: equifibrations, weak equivalences,
//! trivial fibrations, gauntness, and exhaustive functor enumeration.
//!
//! All checks run elementwise over the truncation. One dimension above the
//! truncation every cell is a formal identity; for equifibrations the
//! corresponding lifting instance is always solvable by an identity, but for
//! trivial fibrations and weak equivalences it degenerates to a faithfulness
//! condition — no two distinct parallel top-cells may share an image — which
//! is checked explicitly.

use crate::coind::{equivalences, similar_with};
use crate::error::{Error, Result};
use crate::report::{ValidationReport, Verdict};
use crate::scat::{suspend, CellSet, FiniteOmegaCat};
use std::collections::BTreeMap;

/// Cell assignment per dimension, `map[n]` on n-cells.
pub type GradedMap = Vec<BTreeMap<String, String>>;

/// A strict functor between finite categories of equal truncation, given by
/// its graded cell map. Validity is checked by [`is_functor`], not assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaFunctor {
    pub dom: FiniteOmegaCat,
    pub cod: FiniteOmegaCat,
    pub map: GradedMap,
}

impl OmegaFunctor {
    pub fn new(dom: FiniteOmegaCat, cod: FiniteOmegaCat, map: GradedMap) -> Self {
        OmegaFunctor { dom, cod, map }
    }

    pub fn identity(x: &FiniteOmegaCat) -> Self {
        let map = x
            .underlying
            .cells
            .iter()
            .map(|layer| layer.iter().map(|c| (c.clone(), c.clone())).collect())
            .collect();
        OmegaFunctor { dom: x.clone(), cod: x.clone(), map }
    }

    /// Image of the n-cell `id`.
    pub fn apply(&self, n: usize, id: &str) -> Result<&str> {
        self.map
            .get(n)
            .and_then(|m| m.get(id))
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownCell { dim: n, id: id.to_string() })
    }

    /// Composite functor `self` then `g` (diagrammatic order, like cells).
    pub fn then(&self, g: &OmegaFunctor) -> Result<OmegaFunctor> {
        let mut map: GradedMap = Vec::new();
        for (n, layer) in self.map.iter().enumerate() {
            let mut out = BTreeMap::new();
            for (cell, image) in layer {
                out.insert(cell.clone(), g.apply(n, image)?.to_string());
            }
            map.push(out);
        }
        Ok(OmegaFunctor { dom: self.dom.clone(), cod: g.cod.clone(), map })
    }
}

/// Suspends a functor: poles map to poles, `s.c` maps to `s.f(c)`.
pub fn suspend_functor(f: &OmegaFunctor) -> OmegaFunctor {
    let dom = suspend(&f.dom);
    let cod = suspend(&f.cod);
    let mut map: GradedMap = vec![BTreeMap::new(); f.dom.trunc_dim() + 2];
    for n in 0..=f.dom.trunc_dim() + 1 {
        for cell in dom.cells_at(n) {
            let image = match cell.strip_prefix("s.") {
                Some(inner) => format!("s.{}", f.map[n - 1][inner]),
                // Identity towers on the poles are preserved on the nose.
                None => cell.clone(),
            };
            map[n].insert(cell.clone(), image);
        }
    }
    OmegaFunctor { dom, cod, map }
}

/// Exhaustively checks that the graded map is a strict functor: equal
/// truncations, totality, boundary/identity/composition preservation.
pub fn is_functor(f: &OmegaFunctor) -> ValidationReport {
    let mut report = ValidationReport::new();
    let d = f.dom.trunc_dim();
    if f.cod.trunc_dim() != d {
        report.push(
            "trunc-mismatch",
            None,
            &[],
            format!("domain is {d}-truncated, codomain {}-truncated", f.cod.trunc_dim()),
        );
        return report;
    }
    if f.map.len() != d + 1 {
        report.push(
            "map-shape",
            None,
            &[],
            format!("expected {} map layers, found {}", d + 1, f.map.len()),
        );
        return report;
    }
    for n in 0..=d {
        for cell in f.dom.cells_at(n) {
            match f.map[n].get(cell) {
                None => report.push(
                    "map-missing",
                    Some(n),
                    &[cell],
                    format!("{n}-cell `{cell}` has no image"),
                ),
                Some(img) if !f.cod.has_cell(n, img) => report.push(
                    "map-dangling",
                    Some(n),
                    &[cell, img],
                    format!("image `{img}` of `{cell}` is not a {n}-cell of the codomain"),
                ),
                _ => {}
            }
        }
    }
    if !report.is_valid() {
        return report;
    }
    for n in 1..=d {
        for cell in f.dom.cells_at(n) {
            let img = f.apply(n, cell).unwrap();
            let fs = f.apply(n - 1, f.dom.src_of(n, cell).unwrap()).unwrap();
            let ft = f.apply(n - 1, f.dom.tgt_of(n, cell).unwrap()).unwrap();
            if f.cod.src_of(n, img).unwrap() != fs || f.cod.tgt_of(n, img).unwrap() != ft {
                report.push(
                    "boundary-preservation",
                    Some(n),
                    &[cell],
                    format!(
                        "image of `{cell}` has boundary ({}, {}), expected ({fs}, {ft})",
                        f.cod.src_of(n, img).unwrap(),
                        f.cod.tgt_of(n, img).unwrap()
                    ),
                );
            }
        }
    }
    for n in 0..d {
        for cell in f.dom.cells_at(n) {
            let want = f.cod.id_of(n, f.apply(n, cell).unwrap()).unwrap();
            let got = f.apply(n + 1, f.dom.id_of(n, cell).unwrap()).unwrap();
            if want != got {
                report.push(
                    "identity-preservation",
                    Some(n),
                    &[cell],
                    format!("f(id({cell})) = `{got}` but id(f({cell})) = `{want}`"),
                );
            }
        }
    }
    for ((k, n), table) in &f.dom.comp {
        for ((a, b), r) in table {
            let fa = f.apply(*n, a).unwrap();
            let fb = f.apply(*n, b).unwrap();
            let fr = f.apply(*n, r).unwrap();
            match f.cod.comp2(*k, *n, fa, fb) {
                Ok(want) if want == fr => {}
                other => report.push(
                    "composition-preservation",
                    Some(*n),
                    &[a, b],
                    format!(
                        "f(`{a}` o_{k} `{b}`) = `{fr}` but f(`{a}`) o_{k} f(`{b}`) = {:?}",
                        other.map(str::to_string)
                    ),
                ),
            }
        }
    }
    report
}

fn sorted(cells: &[String]) -> Vec<String> {
    let mut v = cells.to_vec();
    v.sort();
    v
}

/// Shared context for the fibration checks: both equivalence sets, computed
/// once.
struct FibCtx {
    dom_equivs: CellSet,
    cod_equivs: CellSet,
}

impl FibCtx {
    fn new(f: &OmegaFunctor) -> Result<FibCtx> {
        Ok(FibCtx { dom_equivs: equivalences(&f.dom)?, cod_equivs: equivalences(&f.cod)? })
    }
}

/// Equifibration check: every equivalence cell downstairs emanating from an
/// image lifts to an equivalence cell upstairs with the prescribed source.
/// The instance one dimension above the truncation is always solvable by an
/// identity, so only dimensions `1..=trunc_dim` are scanned.
pub fn is_equifibration(f: &OmegaFunctor) -> Result<Verdict> {
    let ctx = FibCtx::new(f)?;
    let d = f.dom.trunc_dim();
    for n in 1..=d {
        for x in sorted(f.dom.cells_at(n - 1)) {
            let fx = f.apply(n - 1, &x)?;
            for u in sorted(f.cod.cells_at(n)) {
                if !ctx.cod_equivs.contains(n, &u) || f.cod.src_of(n, &u)? != fx {
                    continue;
                }
                let lift = f.dom.cells_at(n).iter().any(|c| {
                    ctx.dom_equivs.contains(n, c)
                        && f.dom.src_of(n, c).unwrap() == x
                        && f.apply(n, c).unwrap() == u
                });
                if !lift {
                    return Ok(Verdict::fails(
                        n,
                        &[&x, &u],
                        &format!(
                            "equivalence {n}-cell `{u}` out of f({x}) has no equivalence lift with source `{x}`"
                        ),
                    ));
                }
            }
        }
    }
    Ok(Verdict::holds())
}

/// Target-side variant of the equifibration property (equivalences *into* an
/// image lift with prescribed target); a consequence of
/// [`is_equifibration`], checked directly by the property suite.
pub fn equifibration_target_side(f: &OmegaFunctor) -> Result<Verdict> {
    let ctx = FibCtx::new(f)?;
    let d = f.dom.trunc_dim();
    for n in 1..=d {
        for x in sorted(f.dom.cells_at(n - 1)) {
            let fx = f.apply(n - 1, &x)?;
            for v in sorted(f.cod.cells_at(n)) {
                if !ctx.cod_equivs.contains(n, &v) || f.cod.tgt_of(n, &v)? != fx {
                    continue;
                }
                let lift = f.dom.cells_at(n).iter().any(|c| {
                    ctx.dom_equivs.contains(n, c)
                        && f.dom.tgt_of(n, c).unwrap() == x
                        && f.apply(n, c).unwrap() == v
                });
                if !lift {
                    return Ok(Verdict::fails(
                        n,
                        &[&x, &v],
                        &format!(
                            "equivalence {n}-cell `{v}` into f({x}) has no equivalence lift with target `{x}`"
                        ),
                    ));
                }
            }
        }
    }
    Ok(Verdict::holds())
}

/// Distinct parallel top-cells with a common image violate the lifting
/// instance one dimension above the truncation (the downstairs witness is a
/// formal identity, the upstairs lift would have to be one too).
fn top_faithfulness(f: &OmegaFunctor) -> Result<Verdict> {
    let d = f.dom.trunc_dim();
    if d == 0 {
        return Ok(Verdict::holds());
    }
    for a in sorted(f.dom.cells_at(d)) {
        for b in sorted(f.dom.cells_at(d)) {
            if a != b && f.dom.parallel(d, &a, &b)? && f.apply(d, &a)? == f.apply(d, &b)? {
                return Ok(Verdict::fails(
                    d + 1,
                    &[&a, &b],
                    &format!(
                        "distinct parallel {d}-cells `{a}`, `{b}` share the image `{}`; the formal identity between the images has no lift",
                        f.apply(d, &a)?
                    ),
                ));
            }
        }
    }
    Ok(Verdict::holds())
}

/// Trivial fibration check: surjective on 0-cells, and every cell downstairs
/// framed by a parallel pair of images lifts on the nose, through dimension
/// `trunc_dim` plus the faithfulness clause above it.
pub fn is_trivial_fibration(f: &OmegaFunctor) -> Result<Verdict> {
    let d = f.dom.trunc_dim();
    for y in sorted(f.cod.cells_at(0)) {
        if !f.dom.cells_at(0).iter().any(|x| f.apply(0, x).unwrap() == y) {
            return Ok(Verdict::fails(0, &[&y], &format!("0-cell `{y}` is not an image")));
        }
    }
    for n in 1..=d {
        for a in sorted(f.dom.cells_at(n - 1)) {
            for b in sorted(f.dom.cells_at(n - 1)) {
                if !f.dom.parallel(n - 1, &a, &b)? {
                    continue;
                }
                let fa = f.apply(n - 1, &a)?;
                let fb = f.apply(n - 1, &b)?;
                for u in sorted(f.cod.cells_at(n)) {
                    if f.cod.src_of(n, &u)? != fa || f.cod.tgt_of(n, &u)? != fb {
                        continue;
                    }
                    let lift = f.dom.cells_at(n).iter().any(|c| {
                        f.dom.src_of(n, c).unwrap() == a
                            && f.dom.tgt_of(n, c).unwrap() == b
                            && f.apply(n, c).unwrap() == u
                    });
                    if !lift {
                        return Ok(Verdict::fails(
                            n,
                            &[&a, &b, &u],
                            &format!("{n}-cell `{u}` between images of `{a}`, `{b}` has no lift"),
                        ));
                    }
                }
            }
        }
    }
    top_faithfulness(f)
}

/// ω-weak equivalence check: essentially surjective on 0-cells and full up
/// to ∼ in every dimension, with the same faithfulness clause above the
/// truncation.
pub fn is_weak_equivalence(f: &OmegaFunctor) -> Result<Verdict> {
    let ctx = FibCtx::new(f)?;
    let d = f.dom.trunc_dim();
    for y in sorted(f.cod.cells_at(0)) {
        let hit = f.dom.cells_at(0).iter().any(|x| {
            similar_with(&f.cod, &ctx.cod_equivs, 0, f.apply(0, x).unwrap(), &y).unwrap()
        });
        if !hit {
            return Ok(Verdict::fails(
                0,
                &[&y],
                &format!("no 0-cell maps near `{y}` up to similarity"),
            ));
        }
    }
    for n in 1..=d {
        for a in sorted(f.dom.cells_at(n - 1)) {
            for b in sorted(f.dom.cells_at(n - 1)) {
                if !f.dom.parallel(n - 1, &a, &b)? {
                    continue;
                }
                let fa = f.apply(n - 1, &a)?.to_string();
                let fb = f.apply(n - 1, &b)?.to_string();
                for u in sorted(f.cod.cells_at(n)) {
                    if f.cod.src_of(n, &u)? != fa || f.cod.tgt_of(n, &u)? != fb {
                        continue;
                    }
                    let hit = f.dom.cells_at(n).iter().any(|c| {
                        f.dom.src_of(n, c).unwrap() == a
                            && f.dom.tgt_of(n, c).unwrap() == b
                            && similar_with(&f.cod, &ctx.cod_equivs, n, f.apply(n, c).unwrap(), &u)
                                .unwrap()
                    });
                    if !hit {
                        return Ok(Verdict::fails(
                            n,
                            &[&a, &b, &u],
                            &format!(
                                "{n}-cell `{u}` between images of `{a}`, `{b}` has no lift up to similarity"
                            ),
                        ));
                    }
                }
            }
        }
    }
    top_faithfulness(f)
}

/// Is every equivalence cell an identity?
pub fn is_gaunt(x: &FiniteOmegaCat) -> Result<bool> {
    let equivs = equivalences(x)?;
    for (dim, cell) in equivs.iter() {
        if !x.id_map[dim - 1].values().any(|v| v == cell) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Enumerates every strict functor `x -> y` by dimension-increasing
/// backtracking. Identity cells have forced images; other cells try all
/// boundary-compatible candidates; composition preservation is verified on
/// each complete assignment. `budget` caps candidate examinations.
pub fn enumerate_functors(
    x: &FiniteOmegaCat,
    y: &FiniteOmegaCat,
    budget: u64,
) -> Result<Vec<OmegaFunctor>> {
    if x.trunc_dim() != y.trunc_dim() {
        return Err(Error::InvalidInput(
            "functor enumeration needs equal truncations; pad the smaller side".to_string(),
        ));
    }
    let mut out = Vec::new();
    let mut map: GradedMap = vec![BTreeMap::new(); x.trunc_dim() + 1];
    let mut steps = 0u64;
    enumerate_rec(x, y, 0, 0, &mut map, &mut out, &mut steps, budget)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    x: &FiniteOmegaCat,
    y: &FiniteOmegaCat,
    n: usize,
    idx: usize,
    map: &mut GradedMap,
    out: &mut Vec<OmegaFunctor>,
    steps: &mut u64,
    budget: u64,
) -> Result<()> {
    if n > x.trunc_dim() {
        if comp_preserved(x, y, map) {
            out.push(OmegaFunctor { dom: x.clone(), cod: y.clone(), map: map.clone() });
        }
        return Ok(());
    }
    let layer = x.cells_at(n);
    if idx == layer.len() {
        return enumerate_rec(x, y, n + 1, 0, map, out, steps, budget);
    }
    let cell = &layer[idx];
    // Identity images are forced by the image of the base cell.
    let forced = (n >= 1)
        .then(|| {
            x.id_map[n - 1]
                .iter()
                .find(|(_, v)| *v == cell)
                .map(|(base, _)| y.id_of(n - 1, &map[n - 1][base]).unwrap().to_string())
        })
        .flatten();
    let candidates: Vec<String> = match forced {
        Some(img) => vec![img],
        None => y.cells_at(n).to_vec(),
    };
    for img in candidates {
        *steps += 1;
        if *steps > budget {
            return Err(Error::BudgetExceeded("enumerating functors".to_string()));
        }
        if n >= 1 {
            let fs = &map[n - 1][x.src_of(n, cell)?];
            let ft = &map[n - 1][x.tgt_of(n, cell)?];
            if y.src_of(n, &img)? != fs || y.tgt_of(n, &img)? != ft {
                continue;
            }
        }
        map[n].insert(cell.clone(), img);
        enumerate_rec(x, y, n, idx + 1, map, out, steps, budget)?;
        map[n].remove(cell);
    }
    Ok(())
}

fn comp_preserved(x: &FiniteOmegaCat, y: &FiniteOmegaCat, map: &GradedMap) -> bool {
    for ((k, n), table) in &x.comp {
        for ((a, b), r) in table {
            match y.comp2(*k, *n, &map[*n][a], &map[*n][b]) {
                Ok(want) if want == map[*n][r] => {}
                _ => return false,
            }
        }
    }
    true
}

/// The unique functor to the terminal category of the same truncation.
pub fn to_terminal(x: &FiniteOmegaCat) -> OmegaFunctor {
    let cod = crate::scat::terminal(x.trunc_dim());
    let map = x
        .underlying
        .cells
        .iter()
        .map(|layer| layer.iter().map(|c| (c.clone(), "*".to_string())).collect())
        .collect();
    OmegaFunctor { dom: x.clone(), cod, map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gset::GlobularData;
    use crate::scat::{cosep, globe_cat, terminal, validate_category, walking_iso};

    /// The one-object subcategory {x} of the walking isomorphism, with the
    /// inclusion functor.
    fn point_in_iso() -> OmegaFunctor {
        let mut g = GlobularData::empty(1);
        g.cells[0] = vec!["x".to_string()];
        g.cells[1] = vec!["id_x".to_string()];
        g.src[0].insert("id_x".to_string(), "x".to_string());
        g.tgt[0].insert("id_x".to_string(), "x".to_string());
        let dom = FiniteOmegaCat {
            underlying: g,
            id_map: vec![BTreeMap::from([("x".to_string(), "id_x".to_string())])],
            comp: BTreeMap::from([(
                (0, 1),
                BTreeMap::from([(("id_x".to_string(), "id_x".to_string()), "id_x".to_string())]),
            )]),
            marking: crate::scat::CellSet::empty(1),
        };
        assert!(validate_category(&dom).is_valid());
        let map = vec![
            BTreeMap::from([("x".to_string(), "x".to_string())]),
            BTreeMap::from([("id_x".to_string(), "id_x".to_string())]),
        ];
        OmegaFunctor::new(dom, walking_iso(), map)
    }

    #[test]
    fn identity_and_terminal_functors_validate() {
        assert!(is_functor(&OmegaFunctor::identity(&walking_iso())).is_valid());
        assert!(is_functor(&to_terminal(&cosep(1, 2))).is_valid());
        assert!(is_functor(&point_in_iso()).is_valid());
    }

    #[test]
    fn broken_functor_reported() {
        // u -> id_x with v -> v: boundaries break, and so would composition.
        let x = walking_iso();
        let mut f = OmegaFunctor::identity(&x);
        f.map[1].insert("u".to_string(), "id_x".to_string());
        let report = is_functor(&f);
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.code == "boundary-preservation"));
    }

    #[test]
    fn equifibration_examples() {
        assert!(is_equifibration(&to_terminal(&walking_iso())).unwrap().holds);
        assert!(is_equifibration(&OmegaFunctor::identity(&walking_iso())).unwrap().holds);
        let verdict = is_equifibration(&point_in_iso()).unwrap();
        assert!(!verdict.holds);
        let ce = verdict.counterexample.unwrap();
        assert_eq!(ce.dim, 1);
        assert_eq!(ce.cells, vec!["x".to_string(), "u".to_string()]);
        // Target side: v into f(x) = x has no lift either.
        assert!(!equifibration_target_side(&point_in_iso()).unwrap().holds);
    }

    #[test]
    fn weak_equivalence_examples() {
        assert!(is_weak_equivalence(&point_in_iso()).unwrap().holds);
        assert!(is_weak_equivalence(&OmegaFunctor::identity(&terminal(2))).unwrap().holds);
        let verdict = is_weak_equivalence(&to_terminal(&globe_cat(1, 1))).unwrap();
        assert!(!verdict.holds);
        let ce = verdict.counterexample.unwrap();
        // First failure in (dimension, lex) order: the ordered pair (y, x).
        assert_eq!(ce.dim, 1);
        assert_eq!(ce.cells, vec!["y".to_string(), "x".to_string(), "*".to_string()]);
    }

    #[test]
    fn trivial_fibration_examples() {
        assert!(is_trivial_fibration(&OmegaFunctor::identity(&walking_iso())).unwrap().holds);
        // Both projections of the walking isomorphism to the point lift
        // everything: only identities sit downstairs.
        assert!(is_trivial_fibration(&to_terminal(&walking_iso())).unwrap().holds);
        for (k, d) in [(1, 2), (1, 3), (2, 3)] {
            assert!(
                is_trivial_fibration(&to_terminal(&cosep(k, d))).unwrap().holds,
                "cosep({k},{d})"
            );
        }
        let verdict = is_trivial_fibration(&to_terminal(&globe_cat(1, 1))).unwrap();
        assert!(!verdict.holds);
    }

    #[test]
    fn classifier_at_its_own_truncation_is_cut_off() {
        // Truncating the classifier at its classified dimension removes the
        // pair cells that lift the parallel pair (w, *): the projection
        // fails the faithfulness clause above the truncation.
        let verdict = is_trivial_fibration(&to_terminal(&cosep(1, 1))).unwrap();
        assert!(!verdict.holds);
        let ce = verdict.counterexample.unwrap();
        assert_eq!(ce.dim, 2);
        assert_eq!(ce.cells, vec!["*".to_string(), "w".to_string()]);
        // Prop-4.4 consistency: the weak-equivalence leg fails the same way.
        assert!(!is_weak_equivalence(&to_terminal(&cosep(1, 1))).unwrap().holds);
        assert!(is_equifibration(&to_terminal(&cosep(1, 1))).unwrap().holds);
    }

    #[test]
    fn gauntness() {
        assert!(is_gaunt(&globe_cat(1, 1)).unwrap());
        assert!(is_gaunt(&globe_cat(2, 2)).unwrap());
        assert!(is_gaunt(&terminal(3)).unwrap());
        assert!(!is_gaunt(&walking_iso()).unwrap());
    }

    #[test]
    fn functor_counts() {
        let budget = 1_000_000;
        assert_eq!(enumerate_functors(&terminal(1), &walking_iso(), budget).unwrap().len(), 2);
        assert_eq!(enumerate_functors(&globe_cat(1, 1), &walking_iso(), budget).unwrap().len(), 4);
        assert_eq!(enumerate_functors(&walking_iso(), &terminal(1), budget).unwrap().len(), 1);
        assert_eq!(enumerate_functors(&cosep(1, 2), &terminal(2), budget).unwrap().len(), 1);
        for f in enumerate_functors(&walking_iso(), &walking_iso(), budget).unwrap() {
            assert!(is_functor(&f).is_valid());
        }
    }

    #[test]
    fn enumeration_budget() {
        assert!(matches!(
            enumerate_functors(&walking_iso(), &walking_iso(), 3),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn suspension_of_functors_composes() {
        let f = point_in_iso();
        let g = to_terminal(&walking_iso());
        let fg = f.then(&g).unwrap();
        let sf = suspend_functor(&f);
        let sg = suspend_functor(&g);
        assert!(is_functor(&sf).is_valid());
        assert!(is_functor(&sg).is_valid());
        assert_eq!(sf.then(&sg).unwrap().map, suspend_functor(&fg).map);
    }
}
