//! Common spans over a shared target chart.

use std::collections::HashSet;

use super::atlas::{Atlas, Span};
use crate::error::{Error, Result};
use crate::numerics::{AffineMap, PointC};

/// Given λ_nl(x_n) = λ_pl(x_p) in chart l, a span (q, x_q, λ_qn, λ_qp) with
/// λ_nl∘λ_qn = λ_pl∘λ_qp and both marked points preserved.
#[allow(clippy::too_many_arguments)]
pub fn common_span(
    atlas: &Atlas,
    n: usize,
    lam_nl: &AffineMap,
    x_n: &PointC,
    p: usize,
    lam_pl: &AffineMap,
    x_p: &PointC,
    l: usize,
) -> Result<Span> {
    check_pre(lam_nl, x_n, lam_pl, x_p)?;
    let cand = atlas
        .refine(n, x_n, p, x_p)?
        .ok_or_else(|| Error::OracleRefused(format!("({n}, {x_n}) vs ({p}, {x_p})")))?;
    correct_span(atlas, cand, lam_nl, lam_pl, l, x_n, x_p)
}

/// Every corrected completion reachable from the oracle's candidate list, twisted by
/// stabilizer elements of the middle point. The first entry equals [`common_span`]'s
/// answer when the oracle's canonical orientation matches (n, x_n) ≤ (p, x_p).
#[allow(clippy::too_many_arguments)]
pub fn common_span_completions(
    atlas: &Atlas,
    n: usize,
    lam_nl: &AffineMap,
    x_n: &PointC,
    p: usize,
    lam_pl: &AffineMap,
    x_p: &PointC,
    l: usize,
) -> Result<Vec<Span>> {
    check_pre(lam_nl, x_n, lam_pl, x_p)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for cand in atlas.refine_all(n, x_n, p, x_p)? {
        let base = correct_span(atlas, cand, lam_nl, lam_pl, l, x_n, x_p)?;
        let chart = atlas.chart(base.k);
        for s in chart.stabilizer_indices(&base.x_k)? {
            let g = &chart.group[s];
            let twisted = Span {
                k: base.k,
                x_k: base.x_k.clone(),
                left: base.left.compose(g)?,
                right: base.right.compose(g)?,
            };
            if seen.insert(twisted.clone()) {
                out.push(twisted);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::OracleRefused(format!("({n}, {x_n}) vs ({p}, {x_p})")));
    }
    Ok(out)
}

fn check_pre(lam_nl: &AffineMap, x_n: &PointC, lam_pl: &AffineMap, x_p: &PointC) -> Result<()> {
    if lam_nl.apply(x_n)? != lam_pl.apply(x_p)? {
        return Err(Error::OracleRefused("marked points have different images".into()));
    }
    Ok(())
}

fn correct_span(
    atlas: &Atlas,
    cand: Span,
    lam_nl: &AffineMap,
    lam_pl: &AffineMap,
    l: usize,
    x_n: &PointC,
    x_p: &PointC,
) -> Result<Span> {
    let alpha = lam_nl.compose(&cand.left)?;
    let beta = lam_pl.compose(&cand.right)?;
    let g = atlas.conjugator(l, &alpha, &beta)?;
    let target = atlas.chart(l).group[g].compose(&alpha)?;
    let q = atlas.chart(cand.k);
    let mut h = None;
    for el in &q.group {
        if alpha.compose(el)? == target {
            h = Some(el);
            break;
        }
    }
    let h = h.ok_or_else(|| Error::NoConjugator(format!("stabilizer correction missing in {}", q.id)))?;
    let span = Span {
        k: cand.k,
        x_k: cand.x_k,
        left: cand.left.compose(h)?,
        right: cand.right,
    };
    if span.left.apply(&span.x_k)? != *x_n || span.right.apply(&span.x_k)? != *x_p {
        return Err(Error::InvalidAtlas("corrected span moved a marked point".into()));
    }
    Ok(span)
}

/// Both squares commute: on maps into l and on the marked points.
pub fn span_commutes(span: &Span, lam_nl: &AffineMap, x_n: &PointC, lam_pl: &AffineMap, x_p: &PointC) -> Result<bool> {
    Ok(lam_nl.compose(&span.left)? == lam_pl.compose(&span.right)?
        && span.left.apply(&span.x_k)? == *x_n
        && span.right.apply(&span.x_k)? == *x_p)
}
