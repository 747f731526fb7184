//! A brute-force oracle for the irregular filtration: the bigraded model of
//! the rescaled Rees module, its V-filtration computed from nilpotency
//! certificates, and the extraction of the irregular filtration as a graded
//! restriction. Everything is organized in bigraded slots so that the
//! extraction is an explicit lattice sum of subspaces, independent of the
//! closed floor formulas it is compared against.

use crate::filtops::{FiltrationTable, Window};
use crate::fourier::dual_key;
use crate::infinity::{add_chunk, j_beta, Chart, ChartTable};
use crate::matrix::Matrix;
use crate::monomod::{ExponentKey, Filtration, MonodromicModule};
use crate::rational::Rational;
use crate::subspace::Subspace;
use std::collections::BTreeMap;

/// One bigraded slot of the rescaled module: the filtration step at `level`
/// of the window piece at `key`, placed in rescaling degree `tau_power`.
#[derive(Debug, Clone)]
pub struct RescaledSlot {
    pub tau_power: i64,
    pub level: i64,
    pub key: ExponentKey,
    pub space: Subspace,
}

impl RescaledSlot {
    /// Eigenvalue of the rescaled Euler operator on this slot:
    /// tau_power - level - total exponent.
    pub fn eigenvalue(&self) -> Rational {
        &Rational::from_int(self.tau_power - self.level) - &self.key.total()
    }
}

/// The bigraded model of the rescaled Rees module over a range of rescaling
/// degrees: one slot per (degree, filtration step, window piece).
pub struct RescaledBasis {
    pub source: MonodromicModule,
    pub slots: Vec<RescaledSlot>,
    pub tau_range: (i64, i64),
}

/// Build the slot model: for each window piece, every filtration step at
/// every rescaling degree in the range.
pub fn build_rescaled(m: &MonodromicModule, tau_lo: i64, tau_hi: i64) -> RescaledBasis {
    assert!(tau_lo <= tau_hi);
    let mut slots = Vec::new();
    for (key, piece) in m.pieces() {
        for (level, space) in piece.filtration.steps() {
            for i in tau_lo..=tau_hi {
                slots.push(RescaledSlot {
                    tau_power: i,
                    level: *level,
                    key: key.clone(),
                    space: space.clone(),
                });
            }
        }
    }
    RescaledBasis { source: m.clone(), slots, tau_range: (tau_lo, tau_hi) }
}

/// Sum of the per-axis nilpotents on the window piece at `key`.
fn total_nilpotent(m: &MonodromicModule, key: &ExponentKey) -> Matrix {
    let piece = m.piece(key).expect("slot key must be a window piece");
    let mut n = Matrix::zero(piece.dim, piece.dim);
    for nil in &piece.nilpotents {
        n = &n + nil;
    }
    n
}

/// Nilpotency certificate of a slot: the least l such that the l-th power
/// of (the rescaled Euler operator minus its eigenvalue) annihilates the
/// slot. The operator acts on the slot as minus the total nilpotent, so the
/// certificate is found by iterating images until they vanish.
pub fn certificate(m: &MonodromicModule, slot: &RescaledSlot) -> usize {
    let n = total_nilpotent(m, &slot.key);
    let mut cur = slot.space.clone();
    let mut l = 0usize;
    while !cur.is_zero() {
        cur = cur.image(&n);
        l += 1;
        assert!(l <= n.rows() + 1, "operator is not nilpotent on the slot");
    }
    l
}

/// The V-filtration slice at index gamma: the sum of all slots whose
/// eigenvalue is at least gamma, grouped by (rescaling degree, window key).
/// Membership is decided by the certificate: a slot with finite certificate
/// at eigenvalue c lies in V^c and not deeper.
pub fn v_tau(rb: &RescaledBasis, gamma: &Rational) -> BTreeMap<(i64, ExponentKey), Subspace> {
    let mut out: BTreeMap<(i64, ExponentKey), Subspace> = BTreeMap::new();
    for slot in &rb.slots {
        // the certificate both guards nilpotency and witnesses membership
        let _ = certificate(&rb.source, slot);
        if slot.eigenvalue() >= *gamma {
            let k = (slot.tau_power, slot.key.clone());
            match out.get_mut(&k) {
                Some(s) => *s = s.sum(&slot.space),
                None => {
                    out.insert(k, slot.space.clone());
                }
            }
        }
    }
    out
}

/// Multiplication by the rescaling coordinate: degree up by one, level and
/// space unchanged (eigenvalue up by one).
pub fn tau_action(slot: &RescaledSlot) -> RescaledSlot {
    RescaledSlot {
        tau_power: slot.tau_power + 1,
        level: slot.level,
        key: slot.key.clone(),
        space: slot.space.clone(),
    }
}

/// The rescaling derivative: level up by one, same degree, the space hit by
/// (eigenvalue minus the total nilpotent); eigenvalue down by one.
pub fn eth_action(m: &MonodromicModule, slot: &RescaledSlot) -> RescaledSlot {
    let n = total_nilpotent(m, &slot.key);
    let op = (-&n).add_scalar_diag(&slot.eigenvalue());
    RescaledSlot {
        tau_power: slot.tau_power,
        level: slot.level + 1,
        key: slot.key.clone(),
        space: slot.space.image(&op),
    }
}

/// The irregular filtration of the transform extracted from the oracle: at
/// parameter alpha, the level-p part over the dual of each window piece is
/// the sum of the degree-p slots of the V-slice at -alpha, an explicit
/// lattice sum of filtration steps. Output matches the closed-formula table
/// key for key.
pub fn irr_from_oracle(m: &MonodromicModule, alpha: &Rational) -> FiltrationTable {
    let mut table = FiltrationTable::new();
    for (key, piece) in m.pieces() {
        let beta = key.total();
        let steps = piece.filtration.steps();
        let (qlo, qhi) = match (steps.first(), steps.last()) {
            (Some((a, _)), Some((b, _))) => (*a, *b),
            _ => continue,
        };
        // degrees that can matter: around the shifted jump range
        let plo = (&Rational::from_int(qlo) + &(&beta - alpha)).ceil_i64() - 1;
        let phi = (&Rational::from_int(qhi) + &(&beta - alpha)).ceil_i64() + 1;
        let rb = {
            let mut single = MonodromicModule::new(m.rank());
            single.insert_piece(key.clone(), piece.clone());
            build_rescaled(&single, plo, phi)
        };
        let v = v_tau(&rb, &-alpha);
        let mut out_steps = Vec::new();
        let mut cur = Subspace::zero(piece.dim);
        for p in plo..=phi {
            let s = v
                .get(&(p, key.clone()))
                .cloned()
                .unwrap_or_else(|| Subspace::zero(piece.dim));
            cur = cur.sum(&s);
            out_steps.push((p, cur.clone()));
        }
        table.insert(dual_key(key).0, Filtration::from_steps(piece.dim, out_steps));
    }
    table
}

/// The oracle for the chart at infinity: the level-p slice of the irregular
/// filtration of the localized module, as the full lattice sum over all
/// derivative counts k, all reciprocal powers j >= j_beta, and all
/// filtration levels q with p - k - q - beta >= -alpha, realized chunk by
/// chunk in the chart. Compared against the two-family formula route.
pub fn infinity_oracle(
    chart: &Chart,
    alpha: &Rational,
    p: i64,
    window: Window,
    pad: i64,
) -> ChartTable {
    let n = chart.rank();
    let mut table = ChartTable::new();
    for b in crate::infinity::source_exponents(chart, window, pad) {
        let piece = chart.source.piece_at(&b);
        if piece.dim == 0 {
            continue;
        }
        let mut beta = Rational::zero();
        for c in &b {
            beta += c;
        }
        let jb = j_beta(&beta, n) as i64;
        let d_last = crate::fourier::dual_coord(&b[n - 1]);
        let jump_bottom = match piece.filtration.steps().first() {
            Some((q, _)) => *q,
            None => continue,
        };
        for k in 0.. {
            // eligibility threshold for the filtration level at this k
            let top = &(&Rational::from_int(p - k) + alpha) - &beta;
            if Rational::from_int(jump_bottom) > top {
                break;
            }
            // lattice sum over the eligible filtration steps
            let mut s = Subspace::zero(piece.dim);
            for (q, step) in piece.filtration.steps() {
                if Rational::from_int(*q) <= top {
                    s = s.sum(step);
                }
            }
            if s.is_zero() {
                continue;
            }
            // all reciprocal powers whose landing key stays in the window
            let jmax = (&(&d_last + &Rational::from_int(k)) - &Rational::from_int(window.lo))
                .floor_i64();
            for j in jb..=jmax {
                let (e, c) = chart.realize_chunk(&b, &s, j as usize, k as usize);
                if e.iter().all(|x| {
                    *x >= Rational::from_int(window.lo) && *x <= Rational::from_int(window.hi)
                }) {
                    add_chunk(&mut table, e, c);
                }
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::filtops::fmt_exponent;
    use crate::fourier::irr_hodge;
    use crate::infinity::{compare_chart_tables, irr_infinity, table_slice};

    #[test]
    fn slot_eigenvalues_and_certificates() {
        let delta = corpus::delta();
        let rb = build_rescaled(&delta, 0, 0);
        assert_eq!(rb.slots.len(), 1);
        assert_eq!(rb.slots[0].eigenvalue(), Rational::one());
        assert_eq!(certificate(&delta, &rb.slots[0]), 1);

        let o = corpus::structure_sheaf();
        let rb = build_rescaled(&o, 0, 0);
        assert_eq!(rb.slots[0].eigenvalue(), Rational::zero());

        let jordan = corpus::log_unipotent();
        let rb = build_rescaled(&jordan, 0, 0);
        let max_cert = rb.slots.iter().map(|s| certificate(&jordan, s)).max().unwrap();
        assert_eq!(max_cert, 2);
    }

    #[test]
    fn v_slice_criterion() {
        let delta = corpus::delta();
        let rb = build_rescaled(&delta, -2, 2);
        // eigenvalue of the degree-i slot is i + 1; gamma = 1 keeps i >= 0
        let v = v_tau(&rb, &Rational::one());
        let degrees: Vec<i64> = v.keys().map(|(i, _)| *i).collect();
        assert_eq!(degrees, vec![0, 1, 2]);
        // a cutoff below the window keeps everything
        let all = v_tau(&rb, &Rational::from_int(-100));
        assert_eq!(all.len(), 5);
    }

    #[test]
    fn v_slice_is_decreasing_and_compatible_with_the_actions() {
        let m = corpus::log_unipotent();
        let rb = build_rescaled(&m, -3, 3);
        let gammas = [
            Rational::from_int(-2),
            Rational::from_frac(-1, 2),
            Rational::zero(),
            Rational::one(),
        ];
        for w in gammas.windows(2) {
            let lo = v_tau(&rb, &w[0]);
            let hi = v_tau(&rb, &w[1]);
            for (k, s) in &hi {
                let big = lo.get(k).expect("deeper slice must persist");
                assert!(big.contains(s), "V is not decreasing at {k:?}");
            }
        }
        // slot-wise compatibility of the two actions with the eigenvalue
        for slot in &rb.slots {
            let t = tau_action(slot);
            assert_eq!(t.eigenvalue(), &slot.eigenvalue() + &Rational::one());
            let d = eth_action(&m, slot);
            assert_eq!(d.eigenvalue(), &slot.eigenvalue() - &Rational::one());
            // the derivative image of a filtration step stays one level up
            assert!(m
                .piece(&slot.key)
                .unwrap()
                .filtration
                .at(slot.level + 1)
                .contains(&d.space));
        }
    }

    #[test]
    fn oracle_matches_the_closed_formula_on_the_corpus() {
        let mut modules = corpus::all_rank_one();
        modules.push(corpus::nc2());
        for m in modules {
            for alpha in corpus::alpha_candidates(&m) {
                let oracle = irr_from_oracle(&m, &alpha);
                let formula = irr_hodge(&m, &alpha, Window::default());
                assert_eq!(
                    oracle,
                    formula,
                    "oracle/formula mismatch at alpha = {alpha}"
                );
            }
        }
    }

    #[test]
    fn infinity_oracle_matches_the_two_family_formula() {
        let w = Window::new(-4, 4);
        for m in corpus::all_rank_one() {
            let chart = Chart::new(&m);
            for alpha in corpus::alpha_candidates(&m) {
                let table = irr_infinity(&chart, &alpha, w, 4);
                for p in -3..=3 {
                    let a = table_slice(&table, p);
                    let b = infinity_oracle(&chart, &alpha, p, w, 4);
                    let errors = compare_chart_tables(&a, &b);
                    assert!(
                        errors.is_empty(),
                        "alpha = {alpha}, p = {p}: {errors:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_module_gives_an_empty_oracle() {
        let z = corpus::zero(1);
        assert!(irr_from_oracle(&z, &Rational::zero()).is_empty());
        let chart = Chart::new(&z);
        let t = infinity_oracle(&chart, &Rational::zero(), 0, Window::default(), 2);
        assert!(t.is_empty());
        let _ = fmt_exponent(&[]);
    }
}
