//! Filtration-level operations on the realized grading: V-slices along an
//! axis, nearby and vanishing cycles, and the strictness checks relating the
//! filtration across realized pieces.

use crate::matrix::Matrix;
use crate::monomod::{ExponentKey, Filtration, GradedPiece, MonodromicModule, RealizedPiece};
use crate::rational::Rational;
use std::collections::BTreeMap;

/// Integer box [lo, hi]^n of realized exponents under consideration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Default for Window {
    fn default() -> Self {
        Window { lo: -5, hi: 5 }
    }
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi);
        Window { lo, hi }
    }

    fn contains(&self, g: &Rational) -> bool {
        *g >= Rational::from_int(self.lo) && *g <= Rational::from_int(self.hi)
    }
}

/// All realized exponents inside the window box at which the module has a
/// (possibly zero) piece, one per chain position of each window piece.
pub fn realized_exponents(m: &MonodromicModule, window: Window) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    for key in m.pieces().keys() {
        let mut per_axis: Vec<Vec<Rational>> = Vec::with_capacity(m.rank());
        for beta in &key.0 {
            let mut coords = Vec::new();
            for k in window.lo..=window.hi + 1 {
                let g = beta + &Rational::from_int(k);
                if window.contains(&g) && MonodromicModule::window_rep(&g) == *beta {
                    coords.push(g);
                }
            }
            per_axis.push(coords);
        }
        let mut acc: Vec<Vec<Rational>> = vec![vec![]];
        for coords in &per_axis {
            let mut next = Vec::new();
            for stem in &acc {
                for c in coords {
                    let mut v = stem.clone();
                    v.push(c.clone());
                    next.push(v);
                }
            }
            acc = next;
        }
        out.extend(acc);
    }
    out.sort();
    out.dedup();
    out
}

/// The realized pieces inside the window box whose exponent along `axis` is
/// at least `gamma`.
pub fn v_filtration(
    m: &MonodromicModule,
    axis: usize,
    gamma: &Rational,
    window: Window,
) -> Vec<(Vec<Rational>, RealizedPiece)> {
    realized_exponents(m, window)
        .into_iter()
        .filter(|e| &e[axis] >= gamma)
        .map(|e| {
            let p = m.piece_at(&e);
            (e, p)
        })
        .collect()
}

/// A cycle module along one axis: the rank is one lower, and the logarithm
/// of the unipotent part of the monodromy around the dropped axis is kept
/// separately per reduced piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleModule {
    pub module: MonodromicModule,
    pub monodromy_log: BTreeMap<ExponentKey, Matrix>,
}

fn reduce_key(key: &ExponentKey, axis: usize) -> ExponentKey {
    let mut v = key.0.clone();
    v.remove(axis);
    ExponentKey(v)
}

fn restrict_axis(m: &MonodromicModule, axis: usize, beta: &Rational) -> CycleModule {
    assert!(axis < m.rank());
    let mut out = MonodromicModule::new(m.rank() - 1);
    let mut monodromy_log = BTreeMap::new();
    for (key, piece) in m.pieces() {
        if &key.0[axis] != beta {
            continue;
        }
        let mut nil = piece.nilpotents.clone();
        let n_axis = nil.remove(axis);
        let rk = reduce_key(key, axis);
        monodromy_log.insert(rk.clone(), n_axis);
        out.insert_piece(rk, GradedPiece::new(piece.dim, nil, piece.filtration.clone()));
    }
    for ((a, from), mat) in m.can_entries() {
        if *a != axis && from.0[axis] == *beta {
            let ra = if *a > axis { a - 1 } else { *a };
            out.set_can(ra, reduce_key(from, axis), mat.clone());
        }
    }
    for ((a, from), mat) in m.var_entries() {
        if *a != axis && from.0[axis] == *beta {
            let ra = if *a > axis { a - 1 } else { *a };
            out.set_var(ra, reduce_key(from, axis), mat.clone());
        }
    }
    CycleModule { module: out, monodromy_log }
}

/// Nearby cycles along `axis` at exponent `beta` in (-1, 0]; the unit
/// monodromy eigenvalue sits at exponent 0.
pub fn nearby_cycles(m: &MonodromicModule, axis: usize, beta: &Rational) -> CycleModule {
    assert!(
        *beta > Rational::from_int(-1) && *beta <= Rational::zero(),
        "nearby-cycle exponent must lie in (-1, 0]"
    );
    restrict_axis(m, axis, beta)
}

/// Vanishing cycles along `axis` (the exponent -1 slice).
pub fn vanishing_cycles(m: &MonodromicModule, axis: usize) -> CycleModule {
    restrict_axis(m, axis, &Rational::from_int(-1))
}

/// The boundary maps between the unit nearby slice (exponent 0) and the
/// vanishing slice (exponent -1) along `axis`: for each reduced key, the
/// pair (can from the 0-slice piece, var from the -1-slice piece).
pub fn can_var(m: &MonodromicModule, axis: usize) -> BTreeMap<ExponentKey, (Matrix, Matrix)> {
    let mut out = BTreeMap::new();
    let mut reduced: Vec<ExponentKey> = Vec::new();
    for key in m.pieces().keys() {
        if key.0[axis].is_zero() || key.0[axis] == Rational::from_int(-1) {
            let rk = reduce_key(key, axis);
            if !reduced.contains(&rk) {
                reduced.push(rk);
            }
        }
    }
    for rk in reduced {
        let mut full0 = rk.0.clone();
        full0.insert(axis, Rational::zero());
        let key0 = ExponentKey(full0);
        let key1 = key0.with_coord(axis, Rational::from_int(-1));
        let c = m.eff_can(axis, &key0);
        let v = m.eff_var(axis, &key1);
        out.insert(rk, (c, v));
    }
    out
}

/// Filtrations attached to realized exponents, overriding the transported
/// ones where present.
pub type FiltrationTable = BTreeMap<Vec<Rational>, Filtration>;

fn table_filtration(
    m: &MonodromicModule,
    table: Option<&FiltrationTable>,
    gamma: &[Rational],
) -> Filtration {
    if let Some(t) = table {
        if let Some(f) = t.get(gamma) {
            return f.clone();
        }
    }
    m.piece_at(gamma).filtration
}

/// Check that every filtered piece is carried isomorphically onto the next
/// one by the coordinate actions:
/// (i) for exponents with gamma_i > -1, z_i maps F_p at gamma onto F_p at
///     gamma + e_i;
/// (ii) for exponents with gamma_i < 0, d/dz_i maps F_p at gamma onto
///     F_{p+1} at gamma - e_i.
/// With `table = None` the transported filtrations are used; a table lets a
/// caller check filtrations produced by an independent route.
pub fn check_strict_specializability(
    m: &MonodromicModule,
    window: Window,
    table: Option<&FiltrationTable>,
) -> Result<(), Vec<String>> {
    let mut errors = Vec::new();
    for gamma in realized_exponents(m, window) {
        let piece = m.piece_at(&gamma);
        if piece.dim == 0 {
            continue;
        }
        let f_here = table_filtration(m, table, &gamma);
        for axis in 0..m.rank() {
            let g = &gamma[axis];
            // (i) multiplication upward, away from -1
            if *g > Rational::from_int(-1) && *g < Rational::from_int(window.hi) {
                let mut up = gamma.clone();
                up[axis] = g + &Rational::one();
                let f_up = table_filtration(m, table, &up);
                let zmat = &piece.z[axis].matrix;
                for p in level_range(&f_here, &f_up) {
                    let img = f_here.at(p).image(zmat);
                    if img != f_up.at(p) {
                        errors.push(format!(
                            "z_{axis} at exponent {} does not carry F_{p} onto F_{p} one step up",
                            fmt_exponent(&gamma)
                        ));
                        break;
                    }
                }
            }
            // (ii) derivative downward, away from 0
            if *g < Rational::zero() && *g > Rational::from_int(window.lo) {
                let mut down = gamma.clone();
                down[axis] = g - &Rational::one();
                let f_down = table_filtration(m, table, &down);
                let dmat = &piece.dz[axis].matrix;
                for p in level_range(&f_here, &f_down) {
                    let img = f_here.at(p).image(dmat);
                    if img != f_down.at(p + 1) {
                        errors.push(format!(
                            "d/dz_{axis} at exponent {} does not carry F_{p} onto F_{} one step down",
                            fmt_exponent(&gamma),
                            p + 1
                        ));
                        break;
                    }
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn level_range(a: &Filtration, b: &Filtration) -> std::ops::RangeInclusive<i64> {
    let lo = a
        .bottom_level()
        .into_iter()
        .chain(b.bottom_level())
        .min()
        .unwrap_or(0)
        - 1;
    let hi = a.top_level().into_iter().chain(b.top_level()).max().unwrap_or(0) + 1;
    lo..=hi
}

pub fn fmt_exponent(gamma: &[Rational]) -> String {
    let parts: Vec<String> = gamma.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::subspace::Subspace;

    #[test]
    fn v_slice_of_polynomials() {
        let m = corpus::structure_sheaf();
        let v0 = v_filtration(&m, 0, &Rational::zero(), Window::default());
        assert_eq!(v0.len(), 6); // exponents 0..=5
        assert!(v0.iter().all(|(_, p)| p.dim == 1));
        let vm1 = v_filtration(&m, 0, &Rational::from_int(-1), Window::default());
        assert_eq!(vm1.len(), 6); // no piece below 0 on this module
    }

    #[test]
    fn nearby_and_vanishing_of_log_module() {
        let m = corpus::log_unipotent();
        let psi = nearby_cycles(&m, 0, &Rational::zero());
        assert_eq!(psi.module.rank(), 0);
        assert_eq!(psi.module.piece_dim(&ExponentKey(vec![])), 2);
        let n = &psi.monodromy_log[&ExponentKey(vec![])];
        assert_eq!(n.nilpotency_order(), Some(2));
        let phi = vanishing_cycles(&m, 0);
        assert_eq!(phi.module.piece_dim(&ExponentKey(vec![])), 2);
        let cv = can_var(&m, 0);
        let (c, v) = &cv[&ExponentKey(vec![])];
        assert_eq!(&(v * c), &(-n));
    }

    #[test]
    fn nearby_of_rank_two() {
        let m = corpus::nc2();
        let phi = vanishing_cycles(&m, 1);
        assert_eq!(phi.module.rank(), 1);
        assert_eq!(phi.module.piece_dim(&ExponentKey::from_i64(&[0])), 1);
        assert!(phi.module.validate().is_ok());
        let psi_half = nearby_cycles(&m, 0, &Rational::from_frac(-1, 2));
        assert_eq!(psi_half.module.piece_dim(&ExponentKey::from_strs(&["-1/2"])), 1);
    }

    #[test]
    fn strictness_holds_on_corpus() {
        for m in corpus::all_rank_one() {
            assert!(check_strict_specializability(&m, Window::default(), None).is_ok());
        }
        assert!(check_strict_specializability(&corpus::nc2(), Window::default(), None).is_ok());
    }

    #[test]
    fn strictness_detects_corrupted_table() {
        let m = corpus::kummer(Rational::from_frac(1, 2));
        let mut table = FiltrationTable::new();
        // the transported jump at -3/2 is at level 1; plant level 0 instead
        table.insert(
            vec![Rational::from_frac(-3, 2)],
            Filtration::from_steps(1, vec![(0, Subspace::full(1))]),
        );
        let err = check_strict_specializability(&m, Window::default(), Some(&table)).unwrap_err();
        assert!(!err.is_empty());
    }
}
