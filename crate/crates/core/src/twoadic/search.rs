//! Residue-tree search over the projective line of `Z_2`.
//!
//! Every coprime pair is a unit multiple of `(1, t)` or `(2s, 1)`; unit
//! squares are `1 mod 8` and leave classes unchanged. A node fixes `t` (or
//! `s`) modulo `2^k`, which determines `r u^2 + s v^2` modulo `2^(k+1)`
//! (respectively `2^(k+3)`). A value's class is fixed once its valuation `e`
//! satisfies `e + 2 <= known bits`.

use super::{classify_d, TwoAdicClass};
use crate::error::{domain, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchMode {
    /// Both forms in `D`.
    SinglePair,
    /// The product of the forms in `D`.
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchVerdict {
    Soluble { u: i128, v: i128 },
    Insoluble,
    Inconclusive,
}

#[derive(Clone, Copy)]
enum Family {
    /// `(u, v) = (1, t)`
    Affine,
    /// `(u, v) = (2s, 1)`
    Even,
}

fn fixed_class(value: i128, known_bits: u32) -> Option<TwoAdicClass> {
    if value == 0 {
        return None;
    }
    let e = value.trailing_zeros();
    if e + 2 <= known_bits {
        Some(TwoAdicClass::of_odd_residue(value >> e))
    } else {
        None
    }
}

enum Status {
    Good,
    Dead,
    Open,
}

fn eval(q: (i128, i128), u: i128, v: i128) -> Option<i128> {
    q.0.checked_mul(u.checked_mul(u)?)?
        .checked_add(q.1.checked_mul(v.checked_mul(v)?)?)
}

/// Search for coprime `(u, v)` with both forms in `D` (`SinglePair`) or their
/// product in `D` (`Product`), exploring residues modulo `2^depth`.
pub fn certify_by_search(
    q1: (i128, i128),
    q2: (i128, i128),
    mode: SearchMode,
    depth: u32,
) -> Result<SearchVerdict> {
    if q1.0 == 0 || q1.1 == 0 || q2.0 == 0 || q2.1 == 0 {
        return Err(domain("forms must have nonzero coefficients"));
    }
    if depth == 0 || depth > 40 {
        return Err(domain("depth must lie in 1..=40"));
    }
    let overflow = || crate::error::Error::Overflow("certify_by_search");

    let mut frontier: Vec<(Family, i128)> =
        vec![(Family::Affine, 0), (Family::Affine, 1), (Family::Even, 0), (Family::Even, 1)];
    for k in 1..=depth {
        let mut next = Vec::new();
        let mut open_at_limit = false;
        for &(family, x) in &frontier {
            let (u, v, bits) = match family {
                Family::Affine => (1, x, k + 1),
                Family::Even => (2 * x, 1, k + 3),
            };
            let r1 = eval(q1, u, v).ok_or_else(overflow)?;
            let r2 = eval(q2, u, v).ok_or_else(overflow)?;
            let c1 = fixed_class(r1, bits);
            let c2 = fixed_class(r2, bits);
            let status = match mode {
                SearchMode::SinglePair => match (c1, c2) {
                    (Some(TwoAdicClass::D), Some(TwoAdicClass::D)) => Status::Good,
                    (Some(TwoAdicClass::Dbar), _) | (_, Some(TwoAdicClass::Dbar)) => Status::Dead,
                    _ => Status::Open,
                },
                SearchMode::Product => match (c1, c2) {
                    (Some(x1), Some(x2)) if x1 == x2 => Status::Good,
                    (Some(_), Some(_)) => Status::Dead,
                    _ => Status::Open,
                },
            };
            match status {
                Status::Good => {
                    verify_witness(q1, q2, mode, u, v)?;
                    return Ok(SearchVerdict::Soluble { u, v });
                }
                Status::Dead => {}
                Status::Open => {
                    if k < depth {
                        next.push((family, x));
                        next.push((family, x + (1i128 << k)));
                    } else {
                        open_at_limit = true;
                    }
                }
            }
        }
        if open_at_limit {
            return Ok(SearchVerdict::Inconclusive);
        }
        if next.is_empty() {
            return Ok(SearchVerdict::Insoluble);
        }
        frontier = next;
    }
    Ok(SearchVerdict::Inconclusive)
}

fn verify_witness(q1: (i128, i128), q2: (i128, i128), mode: SearchMode, u: i128, v: i128) -> Result<()> {
    let r1 = eval(q1, u, v).unwrap();
    let r2 = eval(q2, u, v).unwrap();
    let c1 = classify_d(r1)?;
    let c2 = classify_d(r2)?;
    let ok = match mode {
        SearchMode::SinglePair => c1 == TwoAdicClass::D && c2 == TwoAdicClass::D,
        SearchMode::Product => c1 == c2,
    };
    if ok {
        Ok(())
    } else {
        Err(crate::error::Error::InternalInconsistency(format!(
            "search witness ({u},{v}) fails direct check"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(
            certify_by_search((1, 1), (1, 1), SearchMode::Product, 8).unwrap(),
            SearchVerdict::Soluble { u: 1, v: 0 }
        );
        assert_eq!(
            certify_by_search((1, -111), (-1, 112), SearchMode::Product, 16).unwrap(),
            SearchVerdict::Insoluble
        );
        assert_eq!(
            certify_by_search((1, -2), (-1, 3), SearchMode::SinglePair, 16).unwrap(),
            SearchVerdict::Insoluble
        );
        assert!(matches!(
            certify_by_search((1, -2), (-1, 3), SearchMode::Product, 16).unwrap(),
            SearchVerdict::Soluble { .. }
        ));
    }

    #[test]
    fn degenerate_forms_rejected() {
        assert!(certify_by_search((0, 1), (1, 2), SearchMode::Product, 8).is_err());
    }
}
