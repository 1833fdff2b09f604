//! Equivalence cells as a greatest fixed point.
//!
//! A positive-dimensional cell is an equivalence when it is invertible up to
//! higher-dimensional equivalences, all the way up. On a truncated category
//! this coinductive definition closes off: witnesses one dimension above the
//! truncation are formal identities, which belong to every candidate set, so
//! top-dimension membership degenerates to strict table equations and the
//! fixed-point iteration stabilizes after at most `trunc_dim` steps.
//!
//! All operators here assume a category that passes
//! [`validate_category`](crate::scat::validate_category); they panic on
//! malformed tables.

use crate::error::{Error, Result};
use crate::scat::{CellSet, FiniteOmegaCat};

/// An endofunction on [`CellSet`]s of a fixed ambient category, promised
/// monotone (S ⊆ T implies op(S) ⊆ op(T)); the promise is spot-checked by
/// the property suite, and [`greatest_fixed_point`] reports a diagnostic
/// error if an iterate ever grows.
pub type MonotoneOperator<'a> = dyn Fn(&CellSet) -> CellSet + 'a;

/// Iterates `op` downward from the full cell set until stabilization. On a
/// finite lattice this yields the greatest fixed point (Knaster–Tarski).
pub fn greatest_fixed_point(x: &FiniteOmegaCat, op: &MonotoneOperator) -> Result<CellSet> {
    let mut cur = CellSet::full(x);
    for step in 1.. {
        let next = op(&cur);
        if !next.is_subset(&cur) {
            return Err(Error::NonMonotone(step));
        }
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
    unreachable!("descending chain in a finite lattice")
}

/// Does `S` contain a witness cell `from -> to` one dimension above `n`?
/// Above the truncation the only cells are formal identities, members of
/// every `S`, so existence means `from == to`.
fn witness_in(x: &FiniteOmegaCat, s: &CellSet, n: usize, from: &str, to: &str) -> bool {
    if n == x.trunc_dim() {
        return from == to;
    }
    x.cells_at(n + 1).iter().any(|c| {
        x.src_of(n + 1, c).unwrap() == from
            && x.tgt_of(n + 1, c).unwrap() == to
            && s.contains(n + 1, c)
    })
}

/// Cells of the opposite orientation: candidates `v` with src(v) = tgt(u)
/// and tgt(v) = src(u).
fn reverses<'a>(x: &'a FiniteOmegaCat, n: usize, u: &str) -> impl Iterator<Item = &'a String> {
    let s = x.src_of(n, u).unwrap().to_string();
    let t = x.tgt_of(n, u).unwrap().to_string();
    x.cells_at(n)
        .iter()
        .filter(move |v| x.src_of(n, v.as_str()).unwrap() == t && x.tgt_of(n, v.as_str()).unwrap() == s)
}

/// Spherical step: u is kept when a single candidate v reverses it with both
/// cancellation witnesses `p: u∘v -> id` and `q: v∘u -> id` drawn from `S`.
pub fn phi(x: &FiniteOmegaCat, s: &CellSet) -> CellSet {
    let d = x.trunc_dim();
    let mut out = CellSet::empty(d);
    for n in 1..=d {
        for u in x.cells_at(n) {
            let sx = x.src_of(n, u).unwrap().to_string();
            let ty = x.tgt_of(n, u).unwrap().to_string();
            let id_s = x.id_of(n - 1, &sx).unwrap().to_string();
            let id_t = x.id_of(n - 1, &ty).unwrap().to_string();
            let hit = reverses(x, n, u).any(|v| {
                let uv = x.comp2(n - 1, n, u, v).unwrap();
                let vu = x.comp2(n - 1, n, v, u).unwrap();
                witness_in(x, s, n, uv, &id_s) && witness_in(x, s, n, vu, &id_t)
            });
            if hit {
                out.insert(n, u.clone());
            }
        }
    }
    out
}

/// Flat step: like [`phi`] but the right inverse v and left inverse w are
/// chosen independently.
pub fn psi(x: &FiniteOmegaCat, s: &CellSet) -> CellSet {
    let d = x.trunc_dim();
    let mut out = CellSet::empty(d);
    for n in 1..=d {
        for u in x.cells_at(n) {
            let sx = x.src_of(n, u).unwrap().to_string();
            let ty = x.tgt_of(n, u).unwrap().to_string();
            let id_s = x.id_of(n - 1, &sx).unwrap().to_string();
            let id_t = x.id_of(n - 1, &ty).unwrap().to_string();
            let right = reverses(x, n, u)
                .any(|v| witness_in(x, s, n, x.comp2(n - 1, n, u, v).unwrap(), &id_s));
            let left = right
                && reverses(x, n, u)
                    .any(|w| witness_in(x, s, n, x.comp2(n - 1, n, w, u).unwrap(), &id_t));
            if left {
                out.insert(n, u.clone());
            }
        }
    }
    out
}

/// Right-inverse collector: cells v admitting some u with `p: u∘v -> id` in
/// `S` where u itself has a left cancellation `q: w∘u -> id` in `S`.
pub fn rinv(x: &FiniteOmegaCat, s: &CellSet) -> CellSet {
    let d = x.trunc_dim();
    let mut out = CellSet::empty(d);
    for n in 1..=d {
        for v in x.cells_at(n) {
            let hit = reverses(x, n, v).any(|u| {
                let ux = x.src_of(n, u).unwrap().to_string();
                let uy = x.tgt_of(n, u).unwrap().to_string();
                let id_ux = x.id_of(n - 1, &ux).unwrap().to_string();
                let id_uy = x.id_of(n - 1, &uy).unwrap().to_string();
                witness_in(x, s, n, x.comp2(n - 1, n, u, v).unwrap(), &id_ux)
                    && reverses(x, n, u)
                        .any(|w| witness_in(x, s, n, x.comp2(n - 1, n, w, u).unwrap(), &id_uy))
            });
            if hit {
                out.insert(n, v.clone());
            }
        }
    }
    out
}

/// The equivalence cells: greatest fixed point of the spherical step.
pub fn equivalences(x: &FiniteOmegaCat) -> Result<CellSet> {
    greatest_fixed_point(x, &|s| phi(x, s))
}

/// The flat-equivalence cells: greatest fixed point of the flat step.
/// Provably equal to [`equivalences`]; computed independently so the
/// equality stays testable.
pub fn flat_equivalences(x: &FiniteOmegaCat) -> Result<CellSet> {
    greatest_fixed_point(x, &|s| psi(x, s))
}

/// Are two parallel n-cells connected by an equivalence (n+1)-cell from the
/// supplied equivalence set? At the truncation top this is equality.
pub fn similar_with(
    x: &FiniteOmegaCat,
    equivs: &CellSet,
    n: usize,
    a: &str,
    b: &str,
) -> Result<bool> {
    if !x.parallel(n, a, b)? {
        return Err(Error::IncompatibleBoundaries(format!(
            "`{a}` and `{b}` are not parallel {n}-cells"
        )));
    }
    if n == x.trunc_dim() {
        return Ok(a == b);
    }
    Ok(x.cells_at(n + 1).iter().any(|c| {
        x.src_of(n + 1, c).unwrap() == a
            && x.tgt_of(n + 1, c).unwrap() == b
            && equivs.contains(n + 1, c)
    }))
}

/// One-shot [`similar_with`], computing the equivalence set on the fly.
pub fn similar(x: &FiniteOmegaCat, n: usize, a: &str, b: &str) -> Result<bool> {
    let equivs = equivalences(x)?;
    similar_with(x, &equivs, n, a, b)
}

/// Finds an inverse of the equivalence n-cell `u`: the first reverse cell v
/// (in serialized order) with `u∘v ~ id`. When u is an equivalence, `v∘u ~
/// id` follows; when it is not, returns `None`.
pub fn find_inverse(x: &FiniteOmegaCat, n: usize, u: &str) -> Result<Option<String>> {
    let equivs = equivalences(x)?;
    if !equivs.contains(n, u) {
        return Ok(None);
    }
    let sx = x.src_of(n, u)?.to_string();
    let id_s = x.id_of(n - 1, &sx)?.to_string();
    let candidates: Vec<String> = reverses(x, n, u).cloned().collect();
    for v in candidates {
        let uv = x.comp2(n - 1, n, u, &v)?.to_string();
        if similar_with(x, &equivs, n, &uv, &id_s)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scat::{globe_cat, terminal, walking_iso};

    #[test]
    fn gfp_of_trivial_operators() {
        let x = walking_iso();
        let full = CellSet::full(&x);
        assert_eq!(greatest_fixed_point(&x, &|s| s.clone()).unwrap(), full);
        assert_eq!(
            greatest_fixed_point(&x, &|_| CellSet::empty(1)).unwrap(),
            CellSet::empty(1)
        );
    }

    #[test]
    fn gfp_detects_growth() {
        let x = walking_iso();
        let full = CellSet::full(&x);
        let flip = |s: &CellSet| if s.is_empty() { full.clone() } else { CellSet::empty(1) };
        assert!(matches!(
            greatest_fixed_point(&x, &flip),
            Err(Error::NonMonotone(_))
        ));
    }

    #[test]
    fn walking_iso_is_all_equivalences() {
        let x = walking_iso();
        let full = CellSet::full(&x);
        assert_eq!(equivalences(&x).unwrap(), full);
        assert_eq!(flat_equivalences(&x).unwrap(), full);
        // Even from the empty set: top-dimension witnesses are formal.
        assert_eq!(phi(&x, &CellSet::empty(1)), full);
        assert_eq!(rinv(&x, &full), full);
    }

    #[test]
    fn free_globe_has_only_identity_equivalences() {
        let x = globe_cat(1, 1);
        let e = equivalences(&x).unwrap();
        assert!(e.contains(1, "id_x") && e.contains(1, "id_y"));
        assert!(!e.contains(1, "u"));
        assert_eq!(e.len(), 2);
        assert_eq!(rinv(&x, &CellSet::full(&x)), e);

        let x = globe_cat(2, 2);
        let e = equivalences(&x).unwrap();
        assert!(!e.contains(1, "b1s") && !e.contains(2, "u"));
        // id_x, id_y at dim 1; four identity 2-cells.
        assert_eq!(e.len(), 6);
        assert_eq!(flat_equivalences(&x).unwrap(), e);
    }

    #[test]
    fn terminal_is_indiscrete() {
        let x = terminal(3);
        assert_eq!(equivalences(&x).unwrap(), CellSet::full(&x));
    }

    #[test]
    fn similarity_and_inverses() {
        let x = walking_iso();
        assert!(similar(&x, 1, "u", "u").unwrap());
        assert!(similar(&x, 0, "x", "y").unwrap());
        assert!(similar_with(&x, &CellSet::empty(1), 0, "x", "x").is_ok());
        assert!(similar(&x, 1, "u", "v").is_err()); // not parallel

        assert_eq!(find_inverse(&x, 1, "u").unwrap(), Some("v".to_string()));
        assert_eq!(find_inverse(&x, 1, "id_x").unwrap(), Some("id_x".to_string()));
        assert_eq!(find_inverse(&globe_cat(1, 1), 1, "u").unwrap(), None);
    }

    #[test]
    fn globe_0_cells_not_similar_without_connections() {
        // In the free 1-globe, x and y are joined only by u, which is not an
        // equivalence, so they are parallel but not similar.
        let x = globe_cat(1, 1);
        assert!(!similar(&x, 0, "x", "y").unwrap());
        assert!(!similar(&x, 0, "y", "x").unwrap());
    }
}
