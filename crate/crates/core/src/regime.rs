//! Noisy-interference regime classification.
//!
//! An exponent matrix lies in the extended regime when some ordering
//! `p = (i1, i2, i3, j1, j2)` satisfies
//!
//! ```text
//! α_{j1i1} − α_{j2i1} ≥ ψ,   ψ = max{α_{j1i3} − (α_{j2i3} − α_{j2i1})⁺, α_{j1i2}}
//! α_{j2i2} − α_{j1i2} ≥ max{α_{j2i1}, α_{j2i3}}
//! ```
//!
//! The older regime (Geng–Sun–Jafar) uses the same two conditions with ψ
//! replaced by `max{α_{j1i3}, α_{j1i2}}`, which is never smaller, so it is
//! contained in the extended one. Inside the extended regime TDMA-TIN is
//! GDoF optimal with GDoF `α_{j1i1} − α_{j2i1} + α_{j2i2} − α_{j1i2}`.

use serde::Serialize;

use crate::bounds::{enumerate_permutations, genie_params, TxPermutation};
use crate::channel::AlphaMatrix;
use crate::error::{Error, Result};
use crate::pos;

/// ψ for one ordering. The first argument may be negative and is not clipped.
pub fn psi(alpha: &AlphaMatrix, p: TxPermutation) -> f64 {
    let v = p.view(alpha);
    (v.a(1, 3) - pos(v.a(2, 3) - v.a(2, 1))).max(v.a(1, 2))
}

fn gsj_threshold(alpha: &AlphaMatrix, p: TxPermutation) -> f64 {
    let v = p.view(alpha);
    v.a(1, 3).max(v.a(1, 2))
}

fn conditions_hold(alpha: &AlphaMatrix, p: TxPermutation, threshold: f64, tol: f64) -> bool {
    let v = p.view(alpha);
    let first = v.a(1, 1) - v.a(2, 1) + tol >= threshold;
    let second = v.a(2, 2) - v.a(1, 2) + tol >= v.a(2, 1).max(v.a(2, 3));
    first && second
}

/// First ordering (lexicographic) satisfying the extended-regime conditions.
pub fn in_extended_regime(alpha: &AlphaMatrix) -> Option<TxPermutation> {
    in_extended_regime_tol(alpha, 0.0)
}

/// As [`in_extended_regime`], with both inequalities relaxed by `tol`.
pub fn in_extended_regime_tol(alpha: &AlphaMatrix, tol: f64) -> Option<TxPermutation> {
    enumerate_permutations()
        .into_iter()
        .find(|&p| conditions_hold(alpha, p, psi(alpha, p), tol))
}

/// First ordering (lexicographic) satisfying the Geng–Sun–Jafar conditions.
pub fn in_gsj_regime(alpha: &AlphaMatrix) -> Option<TxPermutation> {
    in_gsj_regime_tol(alpha, 0.0)
}

pub fn in_gsj_regime_tol(alpha: &AlphaMatrix, tol: f64) -> Option<TxPermutation> {
    enumerate_permutations()
        .into_iter()
        .find(|&p| conditions_hold(alpha, p, gsj_threshold(alpha, p), tol))
}

/// `α_{j1i1} − α_{j2i1} + α_{j2i2} − α_{j1i2}` for the given ordering.
pub fn regime_gdof(alpha: &AlphaMatrix, p: TxPermutation) -> f64 {
    let v = p.view(alpha);
    v.a(1, 1) - v.a(2, 1) + v.a(2, 2) - v.a(1, 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeVerdict {
    pub in_extended: bool,
    pub in_gsj: bool,
    pub witness_extended: Option<TxPermutation>,
    pub witness_gsj: Option<TxPermutation>,
    pub gdof_value: Option<f64>,
}

pub fn classify(alpha: &AlphaMatrix) -> RegimeVerdict {
    classify_tol(alpha, 0.0)
}

pub fn classify_tol(alpha: &AlphaMatrix, tol: f64) -> RegimeVerdict {
    let witness_extended = in_extended_regime_tol(alpha, tol);
    let witness_gsj = in_gsj_regime_tol(alpha, tol);
    RegimeVerdict {
        in_extended: witness_extended.is_some(),
        in_gsj: witness_gsj.is_some(),
        witness_extended,
        witness_gsj,
        gdof_value: witness_extended.map(|p| regime_gdof(alpha, p)),
    }
}

/// Squared gains of the two-user channel
/// `Y_A = h1 X_A + h2 X_B + Z_A`, `Y_B = h3 X_A + h4 X_B + Z_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Instance {
    pub h1_sq: f64,
    pub h2_sq: f64,
    pub h3_sq: f64,
    pub h4_sq: f64,
    pub rho: f64,
}

/// `|h1|² ≤ |h3|² ≤ |h4|²/(ρ|h2|²)` and `1 < ρ|h3|²`, compared exactly.
pub fn lemma2_conditions_hold(inst: &Lemma2Instance) -> bool {
    lemma2_conditions_hold_tol(inst, 0.0)
}

/// As [`lemma2_conditions_hold`], with the two `≤` comparisons relaxed by a
/// relative tolerance. The strict `1 < ρ|h3|²` is never relaxed.
pub fn lemma2_conditions_hold_tol(inst: &Lemma2Instance, rel_tol: f64) -> bool {
    let le = |a: f64, b: f64| a <= b * (1.0 + rel_tol);
    let upper = inst.h4_sq / (inst.rho * inst.h2_sq);
    le(inst.h1_sq, inst.h3_sq) && le(inst.h3_sq, upper) && inst.rho * inst.h3_sq > 1.0
}

/// Relative slack for the genie mapping: cases 2 and 3 make one of the `≤`
/// hold with equality, which rounding can push either way by a few ulps.
pub const LEMMA2_REL_TOL: f64 = 1e-12;

/// Maps the side-information construction of ordering `p` onto a Lemma-2
/// instance: `h1 = c·h_{j1i1}`, `h2 = c·h_{j1i3}`, `h3 = h_{j2i1}`,
/// `h4 = h_{j2i3}`, with `|h_{ji}|² = ρ^(α_{ji}−1)`.
pub fn lemma2_instance(rho: f64, alpha: &AlphaMatrix, p: TxPermutation) -> Result<Lemma2Instance> {
    let gp = genie_params(alpha, p, rho);
    if gp.d == 0 {
        return Err(Error::NotApplicable);
    }
    let v = p.view(alpha);
    let g = |k, l| rho.powf(v.a(k, l) - 1.0);
    Ok(Lemma2Instance {
        h1_sq: gp.c_sq * g(1, 1),
        h2_sq: gp.c_sq * g(1, 3),
        h3_sq: g(2, 1),
        h4_sq: g(2, 3),
        rho,
    })
}

pub fn genie_satisfies_lemma2(rho: f64, alpha: &AlphaMatrix, p: TxPermutation) -> Result<bool> {
    let inst = lemma2_instance(rho, alpha, p)?;
    Ok(lemma2_conditions_hold_tol(&inst, LEMMA2_REL_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::achievability::tdma_tin_gdof;
    use crate::bounds::gdof_ub;

    fn perm(i1: usize, i2: usize, i3: usize, j1: usize, j2: usize) -> TxPermutation {
        TxPermutation::new(i1, i2, i3, j1, j2).unwrap()
    }

    fn fig2_family(beta: f64, a21: f64, a12: f64) -> AlphaMatrix {
        AlphaMatrix::limit([[1.0, a12, beta], [a21, 1.0, beta]]).unwrap()
    }

    #[test]
    fn psi_examples() {
        let a = fig2_family(0.75, 0.4, 0.2);
        assert!((psi(&a, perm(1, 2, 3, 1, 2)) - 0.4).abs() < 1e-15);

        // a23 <= a21: positive part vanishes
        let a = AlphaMatrix::new([[1.0, 0.3, 0.6], [0.5, 1.0, 0.4]]).unwrap();
        assert_eq!(psi(&a, perm(1, 2, 3, 1, 2)), 0.6);
    }

    #[test]
    fn psi_first_argument_negative_is_immaterial() {
        // a13 = 0, a23 - a21 = 0.5 > 0: first argument is -0.5
        let a = AlphaMatrix::limit([[1.0, 0.0, 0.0], [0.1, 1.0, 0.6]]).unwrap();
        let p = perm(1, 2, 3, 1, 2);
        assert_eq!(psi(&a, p), 0.0);
        let clipped = pos(0.0 - pos(0.6 - 0.1)).max(0.0);
        assert_eq!(psi(&a, p), clipped);
    }

    #[test]
    fn extended_examples() {
        assert_eq!(
            in_extended_regime(&fig2_family(0.75, 0.4, 0.2)),
            Some(perm(1, 2, 3, 1, 2))
        );
        assert_eq!(in_extended_regime(&fig2_family(0.75, 0.6, 0.6)), None);
        let clean = AlphaMatrix::limit([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert!(in_extended_regime(&clean).is_some());
    }

    #[test]
    fn gsj_examples() {
        assert!(in_gsj_regime(&fig2_family(0.75, 0.2, 0.2)).is_some());
        assert!(in_gsj_regime(&fig2_family(0.75, 0.4, 0.2)).is_none());
        assert!(in_gsj_regime(&AlphaMatrix::new([[0.8; 3]; 2]).unwrap()).is_none());
    }

    #[test]
    fn classify_examples() {
        let v = classify(&fig2_family(0.75, 0.4, 0.2));
        assert!(v.in_extended && !v.in_gsj);
        assert!((v.gdof_value.unwrap() - 1.4).abs() < 1e-15);
        assert!(v.witness_gsj.is_none());

        let v = classify(&fig2_family(0.75, 0.2, 0.2));
        assert!(v.in_extended && v.in_gsj);
        assert!((v.gdof_value.unwrap() - 1.6).abs() < 1e-15);

        let v = classify(&fig2_family(0.75, 0.6, 0.6));
        assert!(!v.in_extended && !v.in_gsj && v.gdof_value.is_none());
    }

    #[test]
    fn gdof_chain_on_examples() {
        for a in [fig2_family(0.75, 0.4, 0.2), fig2_family(0.6, 0.1, 0.45)] {
            let v = classify(&a);
            let g = v.gdof_value.unwrap();
            assert!((tdma_tin_gdof(&a).value - g).abs() < 1e-12);
            assert!((gdof_ub(&a).value - g).abs() < 1e-12);
        }
    }

    #[test]
    fn lemma2_examples() {
        let inst = Lemma2Instance {
            h1_sq: 1.0,
            h2_sq: 0.01,
            h3_sq: 1.0,
            h4_sq: 2.0,
            rho: 100.0,
        };
        assert!(lemma2_conditions_hold(&inst));
        assert!(!lemma2_conditions_hold(&Lemma2Instance { h1_sq: 2.0, ..inst }));
        assert!(!lemma2_conditions_hold(&Lemma2Instance {
            h3_sq: 0.01,
            h1_sq: 0.001,
            ..inst
        }));
        // |h3|^2 > |h4|^2/(rho |h2|^2)
        assert!(!lemma2_conditions_hold(&Lemma2Instance { h4_sq: 0.5, ..inst }));
    }

    fn alpha_for(a11: f64, a13: f64, a21: f64, a23: f64) -> AlphaMatrix {
        AlphaMatrix::new([[a11, 0.5, a13], [a21, 1.0, a23]]).unwrap()
    }

    #[test]
    fn genie_lemma2_case2_and_case3() {
        let p = perm(1, 2, 3, 1, 2);
        assert!(genie_satisfies_lemma2(100.0, &alpha_for(1.0, 0.2, 0.3, 0.9), p).unwrap());

        let a = alpha_for(1.0, 0.85, 0.8, 0.9);
        assert!(genie_satisfies_lemma2(100.0, &a, p).unwrap());
        let inst = lemma2_instance(100.0, &a, p).unwrap();
        let upper = inst.h4_sq / (inst.rho * inst.h2_sq);
        assert!((inst.h3_sq - upper).abs() <= 1e-9 * upper);

        assert_eq!(
            genie_satisfies_lemma2(100.0, &alpha_for(1.0, 0.5, 0.5, 0.3), p),
            Err(Error::NotApplicable)
        );
    }
}
