//! Genie-aided converse: the finite-SNR sum-capacity upper bound `B(p)` for
//! each of the twelve transmitter/receiver orderings `p`, and its GDoF limit
//! `D(p)`.
//!
//! For an ordering `p = (i1, i2, i3, j1, j2)`, receiver `j1` is handed a noisy
//! scaled copy of Tx `i1` (and, when `d = 1`, also of Tx `i3`) as side
//! information. The scaling `c²` and the flag `d` follow a three-way rule on
//! the exponents, see [`genie_params`].

use std::fmt;

use serde::Serialize;

use crate::channel::{effective_inr, AlphaMatrix, Gain, RX, TX};
use crate::error::{Error, Result};
use crate::{cap, pos};

/// Ordering `(i1, i2, i3, j1, j2)` of the three transmitters and two receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TxPermutation {
    i: [usize; TX],
    j: [usize; RX],
}

impl TxPermutation {
    pub fn new(i1: usize, i2: usize, i3: usize, j1: usize, j2: usize) -> Result<Self> {
        let mut tx = [i1, i2, i3];
        tx.sort_unstable();
        let mut rx = [j1, j2];
        rx.sort_unstable();
        if tx != [1, 2, 3] || rx != [1, 2] {
            return Err(Error::InvalidIndex(format!(
                "permutation ({i1},{i2},{i3},{j1},{j2}) must use each tx 1..=3 and rx 1..=2 once"
            )));
        }
        Ok(TxPermutation {
            i: [i1, i2, i3],
            j: [j1, j2],
        })
    }

    pub fn i1(&self) -> usize {
        self.i[0]
    }
    pub fn i2(&self) -> usize {
        self.i[1]
    }
    pub fn i3(&self) -> usize {
        self.i[2]
    }
    pub fn j1(&self) -> usize {
        self.j[0]
    }
    pub fn j2(&self) -> usize {
        self.j[1]
    }

    /// The ordering that refers to the same links after transmitter `t` has
    /// been renamed `rename[t - 1]` and receivers possibly swapped.
    pub fn relabel(&self, rename_tx: [usize; TX], swap_rx: bool) -> Self {
        let r = |j: usize| if swap_rx { 3 - j } else { j };
        TxPermutation {
            i: self.i.map(|t| rename_tx[t - 1]),
            j: self.j.map(r),
        }
    }

    /// Exponents seen through this ordering.
    pub(crate) fn view<'a>(&self, alpha: &'a AlphaMatrix) -> PermView<'a> {
        PermView { alpha, p: *self }
    }
}

impl fmt::Display for TxPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{},{})",
            self.i[0], self.i[1], self.i[2], self.j[0], self.j[1]
        )
    }
}

impl Serialize for TxPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Exponent lookup relative to an ordering: `a(k, l)` is α_{j_k i_l}.
pub(crate) struct PermView<'a> {
    alpha: &'a AlphaMatrix,
    p: TxPermutation,
}

impl PermView<'_> {
    #[inline]
    pub(crate) fn a(&self, k: usize, l: usize) -> f64 {
        self.alpha.get(self.p.j[k - 1], self.p.i[l - 1])
    }
}

/// All twelve orderings, lexicographic in `(i1, i2, i3, j1, j2)`.
pub fn enumerate_permutations() -> Vec<TxPermutation> {
    const TX_ORDERS: [[usize; 3]; 6] = [
        [1, 2, 3],
        [1, 3, 2],
        [2, 1, 3],
        [2, 3, 1],
        [3, 1, 2],
        [3, 2, 1],
    ];
    TX_ORDERS
        .iter()
        .flat_map(|&i| [[1, 2], [2, 1]].map(|j| TxPermutation { i, j }))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GenieCase {
    /// α_{j2i3} ≤ α_{j2i1}; Tx i3 is not part of the side information.
    Weak = 1,
    /// Tx i3 included, scaling matched to the Tx i1 cross link.
    Matched = 2,
    /// Tx i3 included, scaling set by the Tx i3 links.
    ThirdDominant = 3,
}

/// Side-information construction for one ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenieParams {
    /// Power gain `c²` of the genie scaling coefficient.
    pub c_sq: f64,
    pub d: u8,
    pub case: GenieCase,
}

impl GenieParams {
    pub fn case_id(&self) -> u8 {
        self.case as u8
    }

    pub fn d_bar(&self) -> u8 {
        1 - self.d
    }
}

fn genie_case(a21: f64, a23: f64, a11: f64, a13: f64) -> GenieCase {
    if a23 <= a21 {
        GenieCase::Weak
    } else if a21 - a11 <= a23 - a13 - a21 {
        GenieCase::Matched
    } else {
        GenieCase::ThirdDominant
    }
}

/// Genie parameters from exponents.
///
/// With `a_kl = α_{j_k i_l}`:
/// case 1 if `a23 ≤ a21` gives `(ρ^(a21−a11), 0)`; case 2 if additionally
/// `a21 − a11 ≤ a23 − a13 − a21` gives `(ρ^(a21−a11), 1)`; otherwise case 3
/// gives `(ρ^(a23−a21−a13), 1)`.
pub fn genie_params(alpha: &AlphaMatrix, p: TxPermutation, rho: f64) -> GenieParams {
    let v = p.view(alpha);
    let (a11, a13, a21, a23) = (v.a(1, 1), v.a(1, 3), v.a(2, 1), v.a(2, 3));
    let case = genie_case(a21, a23, a11, a13);
    let (exp, d) = match case {
        GenieCase::Weak => (a21 - a11, 0),
        GenieCase::Matched => (a21 - a11, 1),
        GenieCase::ThirdDominant => (a23 - a21 - a13, 1),
    };
    GenieParams {
        c_sq: rho.powf(exp),
        d,
        case,
    }
}

/// Genie parameters from raw gains, using gain ratios instead of exponents.
pub fn genie_params_from_gains(
    gains: &[[Gain; TX]; RX],
    p: TxPermutation,
    rho: f64,
) -> GenieParams {
    let g = |k: usize, l: usize| gains[p.j[k - 1] - 1][p.i[l - 1] - 1].norm_sq();
    let (h11, h13, h21, h23) = (g(1, 1), g(1, 3), g(2, 1), g(2, 3));
    let (c_sq, d, case) = if h23 <= h21 {
        (h21 / h11, 0, GenieCase::Weak)
    } else if rho * h21 * h21 / h11 <= h23 / h13 {
        (h21 / h11, 1, GenieCase::Matched)
    } else {
        (h23 / (h21 * rho * h13), 1, GenieCase::ThirdDominant)
    };
    GenieParams { c_sq, d, case }
}

/// Finite-SNR bound `B(p)` in bits.
pub fn sum_capacity_ub_single(rho: f64, alpha: &AlphaMatrix, p: TxPermutation) -> f64 {
    let gp = genie_params(alpha, p, rho);
    let v = p.view(alpha);
    let pw = |k, l| effective_inr(rho, v.a(k, l));
    let d = f64::from(gp.d);
    let d_bar = f64::from(gp.d_bar());

    let side = pw(1, 1) + d * pw(1, 3);
    let first = cap(pw(1, 2) + d_bar * pw(1, 3) + side / (1.0 + gp.c_sq * side));
    let second = cap(pw(2, 1) + pw(2, 3) + pw(2, 2) / (1.0 + pw(1, 2)));
    first + second + 1.0
}

/// Minimum over orderings together with the full per-ordering profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub argmin: TxPermutation,
    pub per_perm: Vec<(TxPermutation, f64)>,
}

impl BoundResult {
    fn from_profile(per_perm: Vec<(TxPermutation, f64)>) -> Self {
        let (argmin, value) = per_perm
            .iter()
            .copied()
            .reduce(|best, cur| if cur.1 < best.1 { cur } else { best })
            .expect("twelve orderings");
        BoundResult {
            value,
            argmin,
            per_perm,
        }
    }
}

/// `min_p B(p)`, an upper bound on the sum-capacity in bits.
pub fn sum_capacity_ub(rho: f64, alpha: &AlphaMatrix) -> BoundResult {
    BoundResult::from_profile(
        enumerate_permutations()
            .into_iter()
            .map(|p| (p, sum_capacity_ub_single(rho, alpha, p)))
            .collect(),
    )
}

fn rx2_term(v: &PermView<'_>) -> f64 {
    v.a(2, 1).max(v.a(2, 3)).max(v.a(2, 2) - v.a(1, 2))
}

/// GDoF bound when `α_{j2i3} > α_{j2i1}` (genie includes Tx i3).
pub fn gdof_ub_case1(alpha: &AlphaMatrix, p: TxPermutation) -> Result<f64> {
    let v = p.view(alpha);
    if !(v.a(2, 3) > v.a(2, 1)) {
        return Err(Error::CaseMismatch("requires alpha[j2][i3] > alpha[j2][i1]"));
    }
    let rx1 = v
        .a(1, 2)
        .max(v.a(1, 1) - v.a(2, 1))
        .max(v.a(1, 3) - (v.a(2, 3) - v.a(2, 1)));
    Ok(rx2_term(&v) + rx1)
}

/// GDoF bound when `α_{j2i3} ≤ α_{j2i1}` (genie omits Tx i3).
pub fn gdof_ub_case2(alpha: &AlphaMatrix, p: TxPermutation) -> Result<f64> {
    let v = p.view(alpha);
    if !(v.a(2, 3) <= v.a(2, 1)) {
        return Err(Error::CaseMismatch("requires alpha[j2][i3] <= alpha[j2][i1]"));
    }
    let rx1 = v.a(1, 2).max(v.a(1, 3)).max(v.a(1, 1) - v.a(2, 1));
    Ok(rx2_term(&v) + rx1)
}

/// `D(p)`: both case formulas unified through a positive part.
pub fn gdof_ub_single(alpha: &AlphaMatrix, p: TxPermutation) -> f64 {
    let v = p.view(alpha);
    let rx1 = v
        .a(1, 2)
        .max(v.a(1, 1) - v.a(2, 1))
        .max(v.a(1, 3) - pos(v.a(2, 3) - v.a(2, 1)));
    rx2_term(&v) + rx1
}

/// `min_p D(p)`, an upper bound on the GDoF.
pub fn gdof_ub(alpha: &AlphaMatrix) -> BoundResult {
    BoundResult::from_profile(
        enumerate_permutations()
            .into_iter()
            .map(|p| (p, gdof_ub_single(alpha, p)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::achievability::tdma_tin_rate;

    fn perm(i1: usize, i2: usize, i3: usize, j1: usize, j2: usize) -> TxPermutation {
        TxPermutation::new(i1, i2, i3, j1, j2).unwrap()
    }

    fn fig2() -> AlphaMatrix {
        AlphaMatrix::new([[1.0, 0.2, 0.75], [0.4, 1.0, 0.75]]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn twelve_orderings() {
        let all = enumerate_permutations();
        assert_eq!(all.len(), 12);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all, "lexicographic order");
        sorted.dedup();
        assert_eq!(sorted.len(), 12);
        assert!(all.contains(&perm(1, 2, 3, 1, 2)));
        assert!(all.iter().all(|p| p.i1() != p.i3()));
        assert!(TxPermutation::new(1, 1, 3, 1, 2).is_err());
        assert!(TxPermutation::new(1, 2, 3, 2, 2).is_err());
        assert!(TxPermutation::new(1, 2, 4, 1, 2).is_err());
    }

    // Exponent placement for p = (1,2,3,1,2): a(k,l) = alpha[k][l].
    fn alpha_for(a11: f64, a13: f64, a21: f64, a23: f64) -> AlphaMatrix {
        AlphaMatrix::new([[a11, 0.5, a13], [a21, 1.0, a23]]).unwrap()
    }

    #[test]
    fn genie_case1() {
        let a = alpha_for(1.0, 0.5, 0.5, 0.3);
        let g = genie_params(&a, perm(1, 2, 3, 1, 2), 100.0);
        assert_eq!((g.d, g.case_id()), (0, 1));
        assert!(rel(g.c_sq, 0.1) < 1e-14);
    }

    #[test]
    fn genie_case2() {
        let a = alpha_for(1.0, 0.2, 0.3, 0.9);
        let g = genie_params(&a, perm(1, 2, 3, 1, 2), 100.0);
        assert_eq!((g.d, g.case_id()), (1, 2));
        assert!(rel(g.c_sq, 100f64.powf(-0.7)) < 1e-14);
    }

    #[test]
    fn genie_case3() {
        let a = alpha_for(1.0, 0.85, 0.8, 0.9);
        let g = genie_params(&a, perm(1, 2, 3, 1, 2), 100.0);
        assert_eq!((g.d, g.case_id()), (1, 3));
        assert!(rel(g.c_sq, 100f64.powf(-0.75)) < 1e-14);
    }

    #[test]
    fn genie_boundary_ties() {
        // a23 == a21 stays in case 1
        let a = alpha_for(1.0, 0.4, 0.6, 0.6);
        assert_eq!(genie_params(&a, perm(1, 2, 3, 1, 2), 50.0).case, GenieCase::Weak);

        // a21 - a11 == a23 - a13 - a21: case 2, and case 3's exponent agrees
        // a21=0.5, a11=1, a23=0.75, a13=0.75: -0.5 == 0.75-0.75-0.5
        let a = alpha_for(1.0, 0.75, 0.5, 0.75);
        let g = genie_params(&a, perm(1, 2, 3, 1, 2), 1e3);
        assert_eq!(g.case, GenieCase::Matched);
        let case3_c_sq = 1e3_f64.powf(0.75 - 0.5 - 0.75);
        assert!(rel(g.c_sq, case3_c_sq) < 1e-14);
    }

    #[test]
    fn genie_gain_form_matches_exponent_form() {
        let rho: f64 = 1e3;
        let a = AlphaMatrix::new([[1.0, 0.3, 0.85], [0.8, 1.1, 0.9]]).unwrap();
        let gains = a.rows().map(|row| row.map(|x| Gain::from_power(rho.powf(x - 1.0))));
        for p in enumerate_permutations() {
            let ga = genie_params(&a, p, rho);
            let gg = genie_params_from_gains(&gains, p, rho);
            assert_eq!((ga.d, ga.case), (gg.d, gg.case), "{p}");
            assert!(rel(ga.c_sq, gg.c_sq) < 1e-9, "{p}");
        }
    }

    #[test]
    fn bound_example_case1() {
        let a = AlphaMatrix::new([[1.0, 0.5, 0.6], [0.5, 1.0, 0.4]]).unwrap();
        let b = sum_capacity_ub_single(100.0, &a, perm(1, 2, 3, 1, 2));
        // mpmath: 10.89000451542284505
        assert!((b - 10.890004515422845).abs() < 1e-12, "{b}");
    }

    #[test]
    fn bound_d0_structure() {
        // With d = 0 the i3 term sits outside the fraction only.
        let a = AlphaMatrix::new([[1.0, 0.5, 0.6], [0.5, 1.0, 0.4]]).unwrap();
        let rho: f64 = 100.0;
        let by_hand = cap(10.0 + rho.powf(0.6) + 100.0 / 11.0)
            + cap(10.0 + rho.powf(0.4) + 100.0 / 11.0)
            + 1.0;
        let b = sum_capacity_ub_single(rho, &a, perm(1, 2, 3, 1, 2));
        assert!((b - by_hand).abs() < 1e-12);
    }

    #[test]
    fn bound_above_rate_fig2() {
        let b = sum_capacity_ub(1e4, &fig2());
        let r = tdma_tin_rate(1e4, &fig2());
        assert!(b.value > r.value);
        // mpmath: 20.216514460991011
        assert!((b.value - 20.216514460991011).abs() < 1e-9);
        for (_, v) in &b.per_perm {
            assert!(b.value <= *v);
            assert!(*v > 1.0);
        }
        assert_eq!(b.per_perm.len(), 12);
    }

    #[test]
    fn fig2_gap_under_seven_bits() {
        let gap = sum_capacity_ub(1e6, &fig2()).value - tdma_tin_rate(1e6, &fig2()).value;
        // mpmath: 1.6260763724914904
        assert!((gap - 1.6260763724914904).abs() < 1e-9);
        assert!(gap <= 7.0);
    }

    #[test]
    fn case_formulas() {
        let v = gdof_ub_case1(&fig2(), perm(1, 2, 3, 1, 2)).unwrap();
        assert!((v - 1.4).abs() < 1e-15);
        assert!(gdof_ub_case2(&fig2(), perm(1, 2, 3, 1, 2)).is_err());

        let ones = AlphaMatrix::new([[1.0; 3]; 2]).unwrap();
        for p in enumerate_permutations() {
            assert_eq!(gdof_ub_case2(&ones, p).unwrap(), 2.0);
            assert!(gdof_ub_case1(&ones, p).is_err());
        }

        let a = AlphaMatrix::new([[1.0, 0.5, 0.6], [0.5, 1.0, 0.4]]).unwrap();
        let v = gdof_ub_case2(&a, perm(1, 2, 3, 1, 2)).unwrap();
        assert!((v - 1.1).abs() < 1e-15);

        // modified all-ones with a21 = 0.5 < a23 = 1:
        // max{0.5, 1, 1-1} + max{1, 1-0.5, 1-(1-0.5)} = 1 + 1
        let m = AlphaMatrix::new([[1.0; 3], [0.5, 1.0, 1.0]]).unwrap();
        assert_eq!(gdof_ub_case1(&m, perm(1, 2, 3, 1, 2)).unwrap(), 2.0);
    }

    #[test]
    fn gdof_single_examples() {
        assert!((gdof_ub_single(&fig2(), perm(1, 2, 3, 1, 2)) - 1.4).abs() < 1e-15);
        let ones = AlphaMatrix::new([[1.0; 3]; 2]).unwrap();
        assert!(enumerate_permutations()
            .into_iter()
            .all(|p| gdof_ub_single(&ones, p) == 2.0));
        let clean = AlphaMatrix::limit([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(gdof_ub_single(&clean, perm(1, 2, 3, 1, 2)), 2.0);
    }

    #[test]
    fn gdof_ub_examples() {
        let r = gdof_ub(&fig2());
        assert!((r.value - 1.4).abs() < 1e-15);
        assert_eq!(r.argmin, perm(1, 2, 3, 1, 2));
        let ones = AlphaMatrix::new([[1.0; 3]; 2]).unwrap();
        assert_eq!(gdof_ub(&ones).value, 2.0);
    }

    #[test]
    fn relabel_is_consistent() {
        let a = fig2();
        let sigma = [2, 0, 1];
        let b = a.permute_tx(sigma);
        // column i of b is column sigma[i] of a, so old tx t is new tx k with sigma[k] = t
        let mut rename = [0; 3];
        for (k, &s) in sigma.iter().enumerate() {
            rename[s] = k + 1;
        }
        for p in enumerate_permutations() {
            let q = p.relabel(rename, false);
            assert_eq!(gdof_ub_single(&a, p), gdof_ub_single(&b, q));
            let q = p.relabel([1, 2, 3], true);
            assert_eq!(gdof_ub_single(&a, p), gdof_ub_single(&a.swap_rx(), q));
        }
    }
}
