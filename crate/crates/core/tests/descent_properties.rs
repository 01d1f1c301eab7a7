//! Verdicts against explicit point search, and independence of the verdict
//! from the chosen representative.

use chatelet::arith::SquareSumKernel;
use chatelet::descent::{decide, witness_search_with, Decision};
use chatelet::model::CanonicalSurface;

fn reduced_box(bound: i64) -> Vec<CanonicalSurface> {
    let mut out = Vec::new();
    for a in (1..=bound).step_by(2) {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    if let Ok(s) = CanonicalSurface::from_reduced(a, b, c, d) {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn every_rational_point_verdict_has_a_small_witness() {
    let kernel = SquareSumKernel::new(20 * 500 * 500).unwrap();
    let mut missing = Vec::new();
    let mut points = 0;
    for s in reduced_box(10) {
        if let Decision::RationalPoint(_) = decide(&s).unwrap() {
            points += 1;
            let w = witness_search_with(&s, 500, Some(&kernel)).unwrap();
            match w {
                Some(w) => {
                    assert_eq!(s.q1(w.u, w.v) * s.q2(w.u, w.v), w.t as i128);
                    assert_eq!(w.y * w.y + w.z * w.z, w.t);
                }
                None => missing.push(s.coefficients()),
            }
        }
    }
    assert!(points > 10_000);
    assert!(missing.is_empty(), "no witness for {missing:?}");
}

#[test]
fn obstructed_surfaces_have_no_points() {
    let kernel = SquareSumKernel::new(20 * 150 * 150).unwrap();
    let obstructed: Vec<_> = reduced_box(10)
        .into_iter()
        .filter(|s| matches!(decide(s).unwrap(), Decision::LocalObstruction(_)))
        .collect();
    assert!(obstructed.len() > 1000);
    for s in obstructed.iter().step_by(7) {
        assert_eq!(witness_search_with(s, 150, Some(&kernel)).unwrap(), None, "{:?}", s.coefficients());
    }
}

#[test]
fn verdict_does_not_depend_on_the_representative() {
    let mut compared = 0;
    for s in reduced_box(9) {
        let [a, b, c, d] = s.coefficients();
        let images = [[c, d, a, b], [b, a, d, c], [d, c, b, a]];
        for t in images {
            for sign in [1, -1] {
                let t = t.map(|x| x * sign);
                if let Ok(r) = CanonicalSurface::from_reduced(t[0], t[1], t[2], t[3]) {
                    assert_eq!(
                        decide(&s).unwrap().status(),
                        decide(&r).unwrap().status(),
                        "{:?} vs {:?}",
                        s.coefficients(),
                        t
                    );
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 1000, "only {compared} pairs compared");
}
