//! Acceptance gate: one test per acceptance criterion, each reporting a
//! single PASS/FAIL line. Every check is an exact identity; there are no
//! tolerances anywhere.

use mhc_core::corpus;
use mhc_core::eigen::{generalized_eigenspaces, EigenError};
use mhc_core::filtops::Window;
use mhc_core::fourier::{
    compare_tables, double_fourier_check, dual_coord, fourier_transform, hodge_closed_formula,
    hodge_table_from_module, hodge_via_gluing, irr_hodge,
};
use mhc_core::gluing::{beilinson_xi, reconstruct_from_gluing, localize_shriek, localize_star, xi_stable};
use mhc_core::infinity::{
    check_infinity_localization, check_deep_slices, check_infinity_specializability, compare_chart_tables, irr_infinity,
    ladder_exponent_check, table_slice, Chart,
};
use mhc_core::matrix::Matrix;
use mhc_core::monomod::{
    direct_sum, ExponentKey, Filtration, GradedPiece, MonodromicModule, ValidationIssue,
};
use mhc_core::rational::Rational;
use mhc_core::rescale::irr_from_oracle;
use mhc_core::rescale::infinity_oracle;
use mhc_core::subspace::Subspace;

fn report(number: usize, name: &str, errors: Vec<String>) {
    if errors.is_empty() {
        println!("acceptance {number} ({name}): PASS");
    } else {
        println!("acceptance {number} ({name}): FAIL");
        panic!("acceptance {number} ({name}): FAIL\n{}", errors.join("\n"));
    }
}

fn full_corpus() -> Vec<MonodromicModule> {
    let mut v = corpus::all_rank_one();
    v.push(corpus::nc2());
    v
}

#[test]
fn criterion_1_two_route_hodge_equality() {
    let w = Window::default();
    let mut errors = Vec::new();
    for (i, m) in corpus::all_rank_one().iter().enumerate() {
        let gluing = hodge_via_gluing(m, w);
        let formula = hodge_closed_formula(m, w);
        if let Err(e) = compare_tables(&gluing, &formula) {
            errors.extend(e.into_iter().map(|s| format!("module {i}, gluing vs formula: {s}")));
        }
        let irr = irr_hodge(m, &Rational::zero(), w);
        for (k, f) in &irr {
            if formula.get(k) != Some(f) {
                errors.push(format!(
                    "module {i}: irregular filtration at parameter zero differs from the Hodge table at {k:?}"
                ));
            }
        }
    }
    // negative control: a corrupted transform filtration must be reported
    let m = corpus::log_unipotent();
    let mut mhat = fourier_transform(&m);
    let k = ExponentKey::from_i64(&[0]);
    let piece = mhat.piece(&k).unwrap().clone();
    mhat.insert_piece(
        k,
        GradedPiece::new(piece.dim, piece.nilpotents.clone(), piece.filtration.shifted(1)),
    );
    if compare_tables(&hodge_table_from_module(&mhat, w), &hodge_closed_formula(&m, w)).is_ok() {
        errors.push("negative control: corrupted filtration was not detected".to_string());
    }
    report(1, "two-route Hodge equality", errors);
}

#[test]
fn criterion_2_oracle_equality() {
    let mut errors = Vec::new();
    for (i, m) in full_corpus().iter().enumerate() {
        for alpha in corpus::alpha_candidates(m) {
            let oracle = irr_from_oracle(m, &alpha);
            let formula = irr_hodge(m, &alpha, Window::default());
            if oracle != formula {
                errors.push(format!("module {i}, alpha = {alpha}: oracle differs from formula"));
            }
        }
    }
    report(2, "rescaling oracle equality", errors);
}

#[test]
fn criterion_3_infinity_formulas() {
    let w = Window::new(-4, 4);
    let pad = 4;
    let mut errors = Vec::new();
    for (i, m) in corpus::all_rank_one().iter().enumerate() {
        let chart = Chart::new(m);
        for alpha in corpus::alpha_candidates(m) {
            let table = irr_infinity(&chart, &alpha, w, pad);
            for p in -3..=3 {
                let a = table_slice(&table, p);
                let b = infinity_oracle(&chart, &alpha, p, w, pad);
                for e in compare_chart_tables(&a, &b) {
                    errors.push(format!(
                        "module {i}, alpha = {alpha}, level {p}: {e}"
                    ));
                }
            }
            if let Err(e) = check_deep_slices(&chart, &alpha, w, pad, 1) {
                errors.extend(
                    e.into_iter().map(|s| format!("module {i}, alpha = {alpha}: {s}")),
                );
            }
        }
    }
    report(3, "infinity-chart formula agreement", errors);
}

#[test]
fn criterion_4_specializability_and_localization_at_infinity() {
    let w = Window::new(-4, 4);
    let pad = 4;
    let mut errors = Vec::new();
    for (i, m) in full_corpus().iter().enumerate() {
        let chart = Chart::new(m);
        for alpha in corpus::alpha_candidates(m) {
            if let Err(e) = check_infinity_specializability(&chart, &alpha, w, pad, 1) {
                errors.extend(e.into_iter().map(|s| {
                    format!("module {i}, alpha = {alpha}, specializability: {s}")
                }));
            }
            if let Err(e) = check_infinity_localization(&chart, &alpha, w, pad, 1) {
                errors.extend(
                    e.into_iter().map(|s| format!("module {i}, alpha = {alpha}, localization: {s}")),
                );
            }
        }
    }
    report(4, "strict specializability and localization at infinity", errors);
}

#[test]
fn criterion_5_localization_identities() {
    let w = Window::default();
    let mut errors = Vec::new();
    for (i, m) in corpus::all_rank_one().iter().enumerate() {
        let star = localize_star(m, 0);
        let shriek = localize_shriek(m, 0);
        if localize_star(&star, 0) != star {
            errors.push(format!("module {i}: star localization is not idempotent"));
        }
        for e in mhc_core::filtops::realized_exponents(&star, w) {
            let g = &e[0];
            let sp = star.piece_at(&e);
            if *g >= Rational::from_int(-1) && *g < Rational::zero() {
                // the V-slice at [-1, 0) of the localization is the inverse
                // image under z of the V-slice at [0, 1) of the module
                let up = vec![g + &Rational::one()];
                if sp.dim != m.piece_at(&up).dim {
                    errors.push(format!(
                        "module {i}: localized piece at {g} does not match the source piece at {}",
                        &up[0]
                    ));
                }
                let z = &sp.z[0].matrix;
                if z.rows() != z.cols() || z.inverse().is_none() {
                    errors.push(format!(
                        "module {i}: multiplication out of the localized piece at {g} is not invertible"
                    ));
                }
            }
            if *g > Rational::from_int(-1) {
                // strictly above -1 all three modules agree, filtration included
                let mp = m.piece_at(&e);
                let hp = shriek.piece_at(&e);
                if sp.dim != mp.dim || hp.dim != mp.dim {
                    errors.push(format!("module {i}: pieces above -1 differ at {g}"));
                } else if sp.nilpotents != mp.nilpotents
                    || hp.nilpotents != mp.nilpotents
                    || sp.filtration != mp.filtration
                    || hp.filtration != mp.filtration
                {
                    errors.push(format!(
                        "module {i}: structure above -1 differs at {g}"
                    ));
                }
            }
        }
    }
    report(5, "localization identities", errors);
}

#[test]
fn criterion_6_beilinson_reconstruction() {
    let mut errors = Vec::new();
    for (i, m) in corpus::all_rank_one().iter().enumerate() {
        let rec = reconstruct_from_gluing(m);
        let keys: Vec<ExponentKey> = m.pieces().keys().cloned().collect();
        let rkeys: Vec<ExponentKey> = rec.module.pieces().keys().cloned().collect();
        if keys != rkeys {
            errors.push(format!("module {i}: reconstructed support differs"));
            continue;
        }
        for key in keys {
            let a = m.piece(&key).unwrap();
            let b = rec.module.piece(&key).unwrap();
            if a.dim != b.dim {
                errors.push(format!("module {i}: dimension differs at {key}"));
            }
            for axis in 0..m.rank() {
                if a.nilpotents[axis].jordan_type() != b.nilpotents[axis].jordan_type() {
                    errors.push(format!("module {i}: Jordan type differs at {key}"));
                }
            }
            if a.filtration.jump_multiset() != b.filtration.jump_multiset() {
                errors.push(format!("module {i}: filtration jumps differ at {key}"));
            }
        }
        let (k0, stable) = xi_stable(m);
        if k0 > 3 {
            errors.push(format!("module {i}: ladder stabilizes only at {k0}"));
        }
        let next = beilinson_xi(m, k0 + 1);
        for (key, piece) in stable.pieces() {
            if next.piece_dim(key) != piece.dim {
                errors.push(format!(
                    "module {i}: ladder dimensions change after stabilization at {key}"
                ));
            }
        }
    }
    report(6, "maximal-extension reconstruction", errors);
}

#[test]
fn criterion_7_fourier_structure() {
    let w = Window::default();
    let mut errors = Vec::new();
    for (i, m) in full_corpus().iter().enumerate() {
        let mhat = fourier_transform(m);
        for e in mhc_core::filtops::realized_exponents(&mhat, w) {
            let b: Vec<Rational> = e.iter().map(dual_coord).collect();
            if mhat.piece_at(&e).dim != m.piece_at(&b).dim {
                errors.push(format!(
                    "module {i}: transform dimension at {e:?} differs from the source at the dual exponent"
                ));
            }
        }
        if let Err(e) = double_fourier_check(m) {
            errors.extend(e.into_iter().map(|s| format!("module {i}: {s}")));
        }
    }
    let a = corpus::log_unipotent();
    let b = corpus::kummer(Rational::from_frac(2, 3));
    if fourier_transform(&direct_sum(&a, &b))
        != direct_sum(&fourier_transform(&a), &fourier_transform(&b))
    {
        errors.push("transform does not commute with direct sums".to_string());
    }
    report(7, "Fourier structure", errors);
}

#[test]
fn criterion_8_ladder_combinatorics() {
    let rep = ladder_exponent_check(4, 12, 10, 12);
    let mut errors = rep.failures.clone();
    if rep.checked < 100_000 {
        errors.push(format!("sweep too small: {} checks", rep.checked));
    }
    report(8, "ladder exponent combinatorics", errors);
}

#[test]
fn criterion_9_validator_soundness() {
    let mut errors = Vec::new();
    // every shipped corpus file passes
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    for entry in std::fs::read_dir(&dir).expect("corpus directory") {
        let path = entry.expect("corpus entry").path();
        let text = std::fs::read_to_string(&path).expect("readable corpus file");
        match MonodromicModule::from_json(&text) {
            Ok(m) => {
                if m.validate().is_err() {
                    errors.push(format!("corpus file {path:?} fails validation"));
                }
            }
            Err(e) => errors.push(format!("corpus file {path:?} does not parse: {e}")),
        }
    }

    let expect_issue = |label: &str, m: &MonodromicModule, pred: &dyn Fn(&ValidationIssue) -> bool,
                        errors: &mut Vec<String>| {
        match m.validate() {
            Ok(()) => errors.push(format!("{label}: mutation not caught")),
            Err(issues) => {
                if !issues.iter().any(pred) {
                    errors.push(format!("{label}: wrong report {issues:?}"));
                }
            }
        }
    };

    // 1: broken nilpotency
    let mut m1 = MonodromicModule::new(1);
    m1.insert_piece(
        ExponentKey::from_i64(&[0]),
        GradedPiece::new(2, vec![Matrix::identity(2)], Filtration::full_at(2, 0)),
    );
    expect_issue("broken nilpotency", &m1, &|i| {
        matches!(i, ValidationIssue::NotNilpotent { .. })
    }, &mut errors);

    // 2: boundary composite no longer equals minus the nilpotent
    let mut m2 = corpus::log_unipotent();
    m2.set_var(0, ExponentKey::from_i64(&[-1]), Matrix::from_i64(&[&[1, 0], &[0, 0]]));
    expect_issue("broken boundary composite", &m2, &|i| {
        matches!(i, ValidationIssue::VarCan { .. } | ValidationIssue::CanVar { .. })
    }, &mut errors);

    // 3: non-commuting axis operators
    let mut m3 = MonodromicModule::new(2);
    m3.insert_piece(
        ExponentKey::from_strs(&["-1/2", "-1/2"]),
        GradedPiece::new(
            2,
            vec![Matrix::from_i64(&[&[0, 1], &[0, 0]]), Matrix::from_i64(&[&[0, 0], &[1, 0]])],
            Filtration::full_at(2, 0),
        ),
    );
    expect_issue("non-commuting axes", &m3, &|i| {
        matches!(i, ValidationIssue::NonCommutingAxes { .. })
    }, &mut errors);

    // 4: filtration that is not an increasing exhaustive chain
    let mut m4 = MonodromicModule::new(1);
    let bad = Filtration::from_steps(
        2,
        vec![
            (0, Subspace::from_vectors(2, &[vec![Rational::one(), Rational::zero()]])),
            (1, Subspace::from_vectors(2, &[vec![Rational::zero(), Rational::one()]])),
        ],
    );
    m4.insert_piece(
        ExponentKey::from_i64(&[0]),
        GradedPiece::new(2, vec![Matrix::zero(2, 2)], bad),
    );
    expect_issue("non-monotone filtration", &m4, &|i| {
        matches!(i, ValidationIssue::BadFiltration { .. })
    }, &mut errors);

    // 5: a grading request with an irrational eigenvalue is refused
    match generalized_eigenspaces(&Matrix::from_i64(&[&[0, 2], &[1, 0]])) {
        Err(EigenError::NonRationalEigenvalue { residual_degree: 2 }) => {}
        other => errors.push(format!("irrational eigenvalue: unexpected result {other:?}")),
    }

    report(9, "validator soundness", errors);
}
