//! The Fourier transform of a monodromic module, the induced filtration
//! computed along two independent routes, and the irregular filtration.

use crate::filtops::{realized_exponents, FiltrationTable, Window};
use crate::monomod::{ExponentKey, MonodromicModule};
use crate::rational::Rational;

/// Dual exponent of a single coordinate: beta -> -beta - 1. Exchanges 0 and
/// -1 and maps the open interval (-1, 0) onto itself.
pub fn dual_coord(beta: &Rational) -> Rational {
    -&(beta + &Rational::one())
}

pub fn dual_key(key: &ExponentKey) -> ExponentKey {
    ExponentKey(key.0.iter().map(dual_coord).collect())
}

/// Sum over the axes of floor(-beta_i) for a source exponent.
fn hodge_shift(key: &ExponentKey) -> i64 {
    key.0.iter().map(|b| (-b).floor_i64()).sum()
}

/// The Fourier transform: window pieces move to their dual exponents, the
/// nilpotents change sign, can and var trade places (with one sign), and the
/// filtration of the dual piece at the image of beta is the source
/// filtration shifted by sum_i floor(-beta_i).
pub fn fourier_transform(m: &MonodromicModule) -> MonodromicModule {
    let mut out = MonodromicModule::new(m.rank());
    for (key, piece) in m.pieces() {
        let mut nil = Vec::with_capacity(piece.nilpotents.len());
        for n in &piece.nilpotents {
            nil.push(-n);
        }
        let filt = piece.filtration.shifted(-hodge_shift(key));
        out.insert_piece(
            dual_key(key),
            crate::monomod::GradedPiece::new(piece.dim, nil, filt),
        );
    }
    for ((axis, from), mat) in m.var_entries() {
        out.set_can(*axis, dual_key(from), mat.clone());
    }
    for ((axis, from), mat) in m.can_entries() {
        out.set_var(*axis, dual_key(from), -mat);
    }
    out
}

/// Filtrations of the transform at every realized exponent in the window,
/// read off the constructed dual module by transport.
pub fn hodge_via_gluing(m: &MonodromicModule, window: Window) -> FiltrationTable {
    hodge_table_from_module(&fourier_transform(m), window)
}

/// Transport table of an already-built module.
pub fn hodge_table_from_module(mhat: &MonodromicModule, window: Window) -> FiltrationTable {
    let mut table = FiltrationTable::new();
    for gamma in realized_exponents(mhat, window) {
        let p = mhat.piece_at(&gamma);
        if p.dim > 0 {
            table.insert(gamma, p.filtration);
        }
    }
    table
}

/// Filtrations of the transform at every realized exponent in the window,
/// computed directly from the source module: at dual exponent gamma', the
/// level-p subspace is F_{p + sum_i floor(-b_i)} of the source at the
/// realized exponent b = -gamma' - 1.
pub fn hodge_closed_formula(m: &MonodromicModule, window: Window) -> FiltrationTable {
    let mut table = FiltrationTable::new();
    // a skeleton with the dual key set, used only to enumerate the realized
    // dual exponents without building the transform
    let mut skeleton = MonodromicModule::new(m.rank());
    for k in m.pieces().keys() {
        skeleton.insert_piece(dual_key(k), crate::monomod::GradedPiece::line(m.rank(), 0));
    }
    for gamma in realized_exponents(&skeleton, window) {
        let b: Vec<Rational> = gamma.iter().map(dual_coord).collect();
        let src = m.piece_at(&b);
        if src.dim == 0 {
            continue;
        }
        let shift: i64 = b.iter().map(|c| (-c).floor_i64()).sum();
        table.insert(gamma, src.filtration.shifted(-shift));
    }
    table
}

/// The irregular filtration of the transform at parameter alpha, per dual
/// window key: F^irr_{alpha+p} at the image of beta is
/// F_{p + floor(alpha - |beta|)} of the source piece, |beta| the total
/// exponent.
pub fn irr_hodge(m: &MonodromicModule, alpha: &Rational, window: Window) -> FiltrationTable {
    let _ = window;
    let mut table = FiltrationTable::new();
    for (key, piece) in m.pieces() {
        let shift = (alpha - &key.total()).floor_i64();
        table.insert(dual_key(key).0, piece.filtration.shifted(-shift));
    }
    table
}

/// Check that applying the transform twice returns the original module up to
/// the expected normalizations: same pieces and nilpotents, boundary maps
/// negated, filtration shifted down by the number of integer axes of each
/// key.
pub fn double_fourier_check(m: &MonodromicModule) -> Result<(), Vec<String>> {
    let mm = fourier_transform(&fourier_transform(m));
    let mut errors = Vec::new();
    if mm.pieces().len() != m.pieces().len() {
        errors.push("double transform changed the set of pieces".to_string());
    }
    for (key, piece) in m.pieces() {
        let Some(dd) = mm.piece(key) else {
            errors.push(format!("double transform lost the piece at {key}"));
            continue;
        };
        if dd.dim != piece.dim {
            errors.push(format!("piece {key}: dimension {} vs {}", dd.dim, piece.dim));
            continue;
        }
        for (axis, n) in piece.nilpotents.iter().enumerate() {
            if &dd.nilpotents[axis] != n {
                errors.push(format!("piece {key}: nilpotent on axis {axis} changed"));
            }
        }
        let ints = key
            .0
            .iter()
            .filter(|c| c.is_integer())
            .count() as i64;
        if dd.filtration != piece.filtration.shifted(-ints) {
            errors.push(format!("piece {key}: filtration not shifted by -{ints}"));
        }
    }
    for ((axis, from), mat) in m.can_entries() {
        if mm.eff_can(*axis, from) != -mat {
            errors.push(format!("can on axis {axis} from {from} not negated"));
        }
    }
    for ((axis, from), mat) in m.var_entries() {
        if mm.eff_var(*axis, from) != -mat {
            errors.push(format!("var on axis {axis} from {from} not negated"));
        }
    }
    if let Err(issues) = mm.validate() {
        errors.extend(issues.into_iter().map(|i| i.to_string()));
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// Compare two filtration tables, reporting every difference.
pub fn compare_tables(a: &FiltrationTable, b: &FiltrationTable) -> Result<(), Vec<String>> {
    let mut errors = Vec::new();
    for (k, fa) in a {
        match b.get(k) {
            None => errors.push(format!("exponent {} only in the first table", crate::filtops::fmt_exponent(k))),
            Some(fb) if fa != fb => errors.push(format!(
                "filtrations differ at {}: jumps {:?} vs {:?}",
                crate::filtops::fmt_exponent(k),
                fa.jump_multiset(),
                fb.jump_multiset()
            )),
            _ => {}
        }
    }
    for k in b.keys() {
        if !a.contains_key(k) {
            errors.push(format!("exponent {} only in the second table", crate::filtops::fmt_exponent(k)));
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::monomod::direct_sum;

    fn key(v: &[i64]) -> ExponentKey {
        ExponentKey::from_i64(v)
    }

    #[test]
    fn transform_of_polynomials_is_delta_type() {
        let mhat = fourier_transform(&corpus::structure_sheaf());
        assert!(mhat.validate().is_ok());
        assert_eq!(mhat.piece_dim(&key(&[-1])), 1);
        assert_eq!(mhat.piece_dim(&key(&[0])), 0);
        assert_eq!(
            mhat.piece(&key(&[-1])).unwrap().filtration.jump_multiset(),
            vec![(0, 1)]
        );
        // and back: the transform of the delta-type module has its jump at -1
        let back = fourier_transform(&corpus::delta());
        assert_eq!(
            back.piece(&key(&[0])).unwrap().filtration.jump_multiset(),
            vec![(-1, 1)]
        );
    }

    #[test]
    fn transform_of_kummer_half() {
        let m = corpus::kummer(Rational::from_frac(1, 2));
        let mhat = fourier_transform(&m);
        assert!(mhat.validate().is_ok());
        let k = ExponentKey::from_strs(&["-1/2"]);
        assert_eq!(mhat.piece_dim(&k), 1);
        assert_eq!(mhat.piece(&k).unwrap().filtration.jump_multiset(), vec![(0, 1)]);
    }

    #[test]
    fn transform_of_log_module_validates() {
        let mhat = fourier_transform(&corpus::log_unipotent());
        assert!(mhat.validate().is_ok(), "{:?}", mhat.validate());
        assert!(fourier_transform(&corpus::nc2()).validate().is_ok());
    }

    #[test]
    fn two_routes_agree_on_corpus() {
        let w = Window::default();
        for m in corpus::all_rank_one() {
            let a = hodge_via_gluing(&m, w);
            let b = hodge_closed_formula(&m, w);
            assert!(compare_tables(&a, &b).is_ok(), "{:?}", compare_tables(&a, &b));
        }
        let m = corpus::nc2();
        let a = hodge_via_gluing(&m, Window::new(-2, 2));
        let b = hodge_closed_formula(&m, Window::new(-2, 2));
        assert!(compare_tables(&a, &b).is_ok(), "{:?}", compare_tables(&a, &b));
    }

    #[test]
    fn routes_detect_corruption() {
        let m = corpus::log_unipotent();
        let w = Window::default();
        let mut mhat = fourier_transform(&m);
        // tamper with one window filtration
        let k = key(&[0]);
        let piece = mhat.piece(&k).unwrap().clone();
        let bad = crate::monomod::GradedPiece::new(
            piece.dim,
            piece.nilpotents.clone(),
            piece.filtration.shifted(1),
        );
        mhat.insert_piece(k, bad);
        let a = hodge_table_from_module(&mhat, w);
        let b = hodge_closed_formula(&m, w);
        assert!(compare_tables(&a, &b).is_err());
    }

    #[test]
    fn double_transform_on_corpus() {
        for m in corpus::all_rank_one() {
            assert!(double_fourier_check(&m).is_ok(), "{:?}", double_fourier_check(&m));
        }
        assert!(double_fourier_check(&corpus::nc2()).is_ok());
    }

    #[test]
    fn transform_commutes_with_sums() {
        let a = corpus::log_unipotent();
        let b = corpus::kummer(Rational::from_frac(2, 3));
        assert_eq!(
            fourier_transform(&direct_sum(&a, &b)),
            direct_sum(&fourier_transform(&a), &fourier_transform(&b))
        );
    }

    #[test]
    fn irr_at_zero_matches_hodge_in_rank_one() {
        let w = Window::default();
        for m in corpus::all_rank_one() {
            let irr = irr_hodge(&m, &Rational::zero(), w);
            let hodge = hodge_closed_formula(&m, w);
            for (k, f) in &irr {
                assert_eq!(Some(f), hodge.get(k), "at {:?}", k);
            }
        }
    }

    #[test]
    fn irr_interpolates_for_kummer() {
        // for the Kummer module at -a, the irregular jump at the dual piece
        // moves by one exactly when alpha crosses -a + integer
        let a = Rational::from_frac(1, 3);
        let m = corpus::kummer(a.clone());
        let w = Window::default();
        let dual = vec![Rational::from_frac(-2, 3)];
        let at = |alpha: &Rational| {
            irr_hodge(&m, alpha, w)[&dual].jump_multiset()
        };
        assert_eq!(at(&Rational::zero()), vec![(0, 1)]); // floor(0 + 1/3) = 0
        assert_eq!(at(&Rational::from_frac(-1, 3)), vec![(0, 1)]);
        assert_eq!(at(&Rational::from_frac(-1, 2)), vec![(1, 1)]);
        assert_eq!(at(&Rational::from_frac(2, 3)), vec![(-1, 1)]);
    }
}
