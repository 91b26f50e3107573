//! Predicate families over finite index sets for a finite frame: the order
//! `≤_X`, reindexing, the quantifier adjoints and the generic element.

use crate::check::{CheckResult, Witness};
use crate::frame::{mask_of, FiniteFrame};

/// A family `X → Φ`, indexed by position.
pub type Family = Vec<usize>;

/// Every function `{0..nx} → {0..ny}` as a value table, in lexicographic order.
pub fn all_maps(nx: usize, ny: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if ny == 0 {
        if nx == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0; nx];
    loop {
        out.push(cur.clone());
        let mut i = nx;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < ny {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// `φ ≤_X ψ`: the first evidence uniform over `X`, if any.
pub fn ufam_order_evidence(f: &FiniteFrame, phi: &[usize], psi: &[usize]) -> Option<usize> {
    f.evs()
        .find(|&e| phi.iter().zip(psi).all(|(&a, &b)| f.rel(a, e, b)))
}

pub fn ufam_order(f: &FiniteFrame, phi: &[usize], psi: &[usize]) -> CheckResult {
    match ufam_order_evidence(f, phi, psi) {
        Some(e) => CheckResult::Verified(Witness::new(format!("uniform evidence {}", f.ev_name(e)))),
        None => CheckResult::Counterexample(Witness::new(format!(
            "no evidence is uniform over the {} indices",
            phi.len()
        ))),
    }
}

pub fn ufam_leq(f: &FiniteFrame, phi: &[usize], psi: &[usize]) -> bool {
    ufam_order_evidence(f, phi, psi).is_some()
}

pub fn ufam_equiv(f: &FiniteFrame, phi: &[usize], psi: &[usize]) -> bool {
    ufam_leq(f, phi, psi) && ufam_leq(f, psi, phi)
}

/// `f*ψ = ψ ∘ f`.
pub fn ufam_reindex(map: &[usize], psi: &[usize]) -> Family {
    map.iter().map(|&y| psi[y]).collect()
}

fn fibers(map: &[usize], phi: &[usize], ny: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); ny];
    for (x, &y) in map.iter().enumerate() {
        out[y].push(phi[x]);
    }
    out
}

/// `∃_f φ (y) = ∐{φ(x) | f(x) = y}`.
pub fn ufam_exists(f: &FiniteFrame, map: &[usize], phi: &[usize], ny: usize) -> Family {
    fibers(map, phi, ny)
        .iter()
        .map(|fib| f.big_coprod_mask(mask_of(fib)))
        .collect()
}

/// `∀_f φ (y) = ∏{φ(x) | f(x) = y}`.
pub fn ufam_forall(f: &FiniteFrame, map: &[usize], phi: &[usize], ny: usize) -> Family {
    fibers(map, phi, ny)
        .iter()
        .map(|fib| f.big_pi_mask(mask_of(fib)))
        .collect()
}

/// The generic element `σ = id_Φ`.
pub fn ufam_generic(f: &FiniteFrame) -> Family {
    f.props().collect()
}

/// The classifying map `⌜φ⌝ : X → Φ`, which is `φ` itself.
pub fn ufam_code(phi: &[usize]) -> Vec<usize> {
    phi.to_vec()
}

/// Both adjunctions for every function between sets of size `1..=max` and
/// every pair of families.
pub fn check_adjunctions(f: &FiniteFrame, max: usize) -> CheckResult {
    let n = f.num_props();
    let mut count = 0u64;
    for nx in 1..=max {
        for ny in 1..=max {
            let xfams = all_maps(nx, n);
            let yfams = all_maps(ny, n);
            for map in all_maps(nx, ny) {
                for phi in &xfams {
                    let ex = ufam_exists(f, &map, phi, ny);
                    let all = ufam_forall(f, &map, phi, ny);
                    for psi in &yfams {
                        count += 1;
                        let re = ufam_reindex(&map, psi);
                        if ufam_leq(f, &ex, psi) != ufam_leq(f, phi, &re) {
                            return adjunction_failure(f, "exists", &map, phi, psi);
                        }
                        if ufam_leq(f, &re, phi) != ufam_leq(f, psi, &all) {
                            return adjunction_failure(f, "forall", &map, phi, psi);
                        }
                    }
                }
            }
        }
    }
    CheckResult::Verified(Witness::new(format!(
        "{}: both adjunctions over {count} (f, φ, ψ) instances, sets of size ≤ {max}",
        f.name()
    )))
}

fn adjunction_failure(f: &FiniteFrame, which: &str, map: &[usize], phi: &[usize], psi: &[usize]) -> CheckResult {
    let names = |v: &[usize]| v.iter().map(|&p| f.prop_name(p)).collect::<Vec<_>>().join(",");
    CheckResult::Counterexample(
        Witness::new(format!("{which} adjunction fails"))
            .with_line(format!("f = {map:?}"))
            .with_line(format!("φ = [{}]", names(phi)))
            .with_line(format!("ψ = [{}]", names(psi))),
    )
}

/// Beck-Chevalley for every cospan `Z -k-> W <-h- Y` with sets of size
/// `1..=max`, the pullback `X` computed as the fibre product.
pub fn check_beck_chevalley(f: &FiniteFrame, max: usize) -> CheckResult {
    let n = f.num_props();
    let mut count = 0u64;
    for nw in 1..=max {
        for nz in 1..=max {
            for ny in 1..=max {
                let zfams = all_maps(nz, n);
                for k in all_maps(nz, nw) {
                    for h in all_maps(ny, nw) {
                        let mut pf = Vec::new();
                        let mut pg = Vec::new();
                        for z in 0..nz {
                            for y in 0..ny {
                                if k[z] == h[y] {
                                    pg.push(z);
                                    pf.push(y);
                                }
                            }
                        }
                        for phi in &zfams {
                            count += 1;
                            let lhs = ufam_forall(f, &pf, &ufam_reindex(&pg, phi), ny);
                            let rhs = ufam_reindex(&h, &ufam_forall(f, &k, phi, nw));
                            if !ufam_equiv(f, &lhs, &rhs) {
                                return CheckResult::Counterexample(
                                    Witness::new("Beck-Chevalley fails")
                                        .with_line(format!("k = {k:?}, h = {h:?}"))
                                        .with_line(format!("φ = {phi:?}")),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    CheckResult::Verified(Witness::new(format!(
        "{}: Beck-Chevalley over {count} (square, φ) instances, sets of size ≤ {max}",
        f.name()
    )))
}

/// `⌜φ⌝*(σ) ≃ φ` for every family on sets of size `1..=max`.
pub fn check_generic_element(f: &FiniteFrame, max: usize) -> CheckResult {
    let sigma = ufam_generic(f);
    for nx in 1..=max {
        for phi in all_maps(nx, f.num_props()) {
            if !ufam_equiv(f, &ufam_reindex(&ufam_code(&phi), &sigma), &phi) {
                return CheckResult::counterexample(format!("generic element fails at {phi:?}"));
            }
        }
    }
    CheckResult::verified(format!("{}: generic element, sets of size ≤ {max}", f.name()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::heyting_frame;
    use crate::heyting::{Builtin, HeytingAlgebra};

    fn frame(b: Builtin) -> FiniteFrame {
        heyting_frame(&HeytingAlgebra::builtin(b)).unwrap()
    }

    #[test]
    fn map_enumeration() {
        assert_eq!(all_maps(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(all_maps(3, 3).len(), 27);
        assert_eq!(all_maps(0, 2), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn quantifiers_on_a_fiber() {
        let c = frame(Builtin::Chain3);
        let (h, one) = (c.prop("h").unwrap(), c.prop("1").unwrap());
        let phi = vec![h, one];
        assert_eq!(ufam_exists(&c, &[0, 0], &phi, 1), vec![one]);
        assert_eq!(ufam_forall(&c, &[0, 0], &phi, 1), vec![h]);
        assert_eq!(ufam_reindex(&[0, 1], &phi), phi);
    }

    #[test]
    fn tripos_laws_small() {
        for b in Builtin::ALL {
            let f = frame(b);
            assert!(check_adjunctions(&f, 2).is_verified());
            assert!(check_beck_chevalley(&f, 2).is_verified());
            assert!(check_generic_element(&f, 3).is_verified());
        }
    }

    #[test]
    fn order_needs_uniform_evidence() {
        let c = frame(Builtin::Chain3);
        assert!(ufam_order(&c, &[0, 1], &[1, 2]).is_verified());
        assert!(ufam_order(&c, &[2, 1], &[1, 2]).is_counterexample());
    }
}
