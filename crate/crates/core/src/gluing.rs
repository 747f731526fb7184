//! Localization along an axis, the two-step interpolation modules, and the
//! reconstruction of a module from its localization together with its
//! vanishing data.

use crate::matrix::Matrix;
use crate::monomod::{ExponentKey, Filtration, GradedPiece, MonodromicModule};
use crate::rational::Rational;
use crate::subspace::{QuotientSpace, Subspace};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalizeMode {
    Star,
    Shriek,
}

/// Localize along one axis. The exponent -1 slice is replaced by a copy of
/// the exponent 0 slice; in star mode `var` becomes the identity and `can`
/// becomes -N, in shriek mode `can` becomes the identity, `var` becomes -N
/// and the copied filtration is shifted up by one level. Where the 0 slice
/// is empty the -1 slice is deleted.
pub fn localize(m: &MonodromicModule, axis: usize, mode: LocalizeMode) -> MonodromicModule {
    assert!(axis < m.rank());
    let minus_one = Rational::from_int(-1);
    let mut out = MonodromicModule::new(m.rank());

    for (key, piece) in m.pieces() {
        if key.0[axis] == minus_one {
            continue; // replaced by copies below
        }
        out.insert_piece(key.clone(), piece.clone());
        if key.0[axis].is_zero() {
            let copy_key = key.with_coord(axis, minus_one.clone());
            let filtration = match mode {
                LocalizeMode::Star => piece.filtration.clone(),
                LocalizeMode::Shriek => piece.filtration.shifted(1),
            };
            out.insert_piece(
                copy_key,
                GradedPiece::new(piece.dim, piece.nilpotents.clone(), filtration),
            );
        }
    }

    // boundary maps away from the localized axis
    for ((a, from), mat) in m.can_entries() {
        if *a != axis && from.0[axis] != minus_one {
            out.set_can(*a, from.clone(), mat.clone());
            if from.0[axis].is_zero() {
                // the copied -1 slice inherits the same maps
                out.set_can(*a, from.with_coord(axis, minus_one.clone()), mat.clone());
            }
        }
    }
    for ((a, from), mat) in m.var_entries() {
        if *a != axis && from.0[axis] != minus_one {
            out.set_var(*a, from.clone(), mat.clone());
            if from.0[axis].is_zero() {
                out.set_var(*a, from.with_coord(axis, minus_one.clone()), mat.clone());
            }
        }
    }

    // the localized axis itself
    for (key, piece) in m.pieces() {
        if !key.0[axis].is_zero() {
            continue;
        }
        let copy_key = key.with_coord(axis, minus_one.clone());
        let n = &piece.nilpotents[axis];
        match mode {
            LocalizeMode::Star => {
                out.set_can(axis, key.clone(), -n);
                out.set_var(axis, copy_key, Matrix::identity(piece.dim));
            }
            LocalizeMode::Shriek => {
                out.set_can(axis, key.clone(), Matrix::identity(piece.dim));
                out.set_var(axis, copy_key, -n);
            }
        }
    }
    out
}

pub fn localize_star(m: &MonodromicModule, axis: usize) -> MonodromicModule {
    localize(m, axis, LocalizeMode::Star)
}

pub fn localize_shriek(m: &MonodromicModule, axis: usize) -> MonodromicModule {
    localize(m, axis, LocalizeMode::Shriek)
}

/// The natural morphism from the shriek to the star localization along an
/// axis: the identity except on the copied -1 slice, where it is -N.
/// Returned per window key of the shriek localization.
pub fn shriek_to_star(m: &MonodromicModule, axis: usize) -> BTreeMap<ExponentKey, Matrix> {
    let shriek = localize_shriek(m, axis);
    let minus_one = Rational::from_int(-1);
    let mut out = BTreeMap::new();
    for (key, piece) in shriek.pieces() {
        let mat = if key.0[axis] == minus_one {
            -&piece.nilpotents[axis]
        } else {
            Matrix::identity(piece.dim)
        };
        out.insert(key.clone(), mat);
    }
    out
}

/// Gluing data of a rank-one module: its nearby slices (exponents in
/// (-1, 0]), the vanishing piece at -1, and the two boundary maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingData {
    pub nearby: BTreeMap<Rational, GradedPiece>,
    pub vanishing: Option<GradedPiece>,
    /// nearby slice at 0 -> vanishing piece
    pub can: Matrix,
    /// vanishing piece -> nearby slice at 0
    pub var: Matrix,
}

pub fn to_gluing(m: &MonodromicModule) -> GluingData {
    assert_eq!(m.rank(), 1, "gluing data is taken along a single axis");
    let mut nearby = BTreeMap::new();
    let mut vanishing = None;
    for (key, piece) in m.pieces() {
        if key.0[0] == Rational::from_int(-1) {
            vanishing = Some(piece.clone());
        } else {
            nearby.insert(key.0[0].clone(), piece.clone());
        }
    }
    let key0 = ExponentKey::from_i64(&[0]);
    let key1 = ExponentKey::from_i64(&[-1]);
    GluingData {
        nearby,
        vanishing,
        can: m.eff_can(0, &key0),
        var: m.eff_var(0, &key1),
    }
}

pub fn from_gluing(g: &GluingData) -> MonodromicModule {
    let mut m = MonodromicModule::new(1);
    for (beta, piece) in &g.nearby {
        m.insert_piece(ExponentKey(vec![beta.clone()]), piece.clone());
    }
    if let Some(piece) = &g.vanishing {
        m.insert_piece(ExponentKey::from_i64(&[-1]), piece.clone());
    }
    m.set_can(0, ExponentKey::from_i64(&[0]), g.can.clone());
    m.set_var(0, ExponentKey::from_i64(&[-1]), g.var.clone());
    m
}

/// The k-th interpolation module of a star-localized rank-one module. The
/// pieces away from -1 agree with the input; the -1 piece is the space of
/// ladder vectors (w_0, ..., w_k) with N w_j + w_{j+1} = 0 for j >= 1 (and
/// N w_k = 0), with can the inclusion of the e_0 slot and var = -N_total.
pub fn beilinson_xi(m: &MonodromicModule, k: usize) -> MonodromicModule {
    assert_eq!(m.rank(), 1);
    assert!(k >= 1);
    let key0 = ExponentKey::from_i64(&[0]);
    let key1 = ExponentKey::from_i64(&[-1]);

    let mut out = MonodromicModule::new(1);
    for (key, piece) in m.pieces() {
        if *key != key1 {
            out.insert_piece(key.clone(), piece.clone());
        }
    }
    let Some(p0) = m.piece(&key0) else {
        return out; // no chain through the integers
    };
    let w = p0.dim;
    let n = &p0.nilpotents[0];
    let amb = w * (k + 1);

    // N_total on W (x) I^{0,k}: (N_tot x)_j = N w_j + w_{j+1}
    let mut n_tot = Matrix::zero(amb, amb);
    for j in 0..=k {
        for r in 0..w {
            for c in 0..w {
                n_tot[(j * w + r, j * w + c)] = n[(r, c)].clone();
            }
        }
        if j + 1 <= k {
            for r in 0..w {
                n_tot[(j * w + r, (j + 1) * w + r)] = Rational::one();
            }
        }
    }
    // u . N_total drops the j = 0 block of N_total
    let mut u_ntot = Matrix::zero(w * k, amb);
    for r in 0..w * k {
        for c in 0..amb {
            u_ntot[(r, c)] = n_tot[(w + r, c)].clone();
        }
    }
    let kernel = Subspace::from_columns(&u_ntot.kernel());
    let q = QuotientSpace::new(&kernel, &Subspace::zero(amb));
    let dim = q.dim();
    let n_xi = q.induced_operator(&n_tot);

    // filtration: slot j of the ambient carries F_{p-1+j} of the 0 piece
    let mut levels: Vec<i64> = p0.filtration.steps().iter().map(|(l, _)| *l).collect();
    if let (Some(lo), Some(hi)) = (levels.iter().min().copied(), levels.iter().max().copied()) {
        levels = (lo - k as i64..=hi + 1).collect();
    }
    let mut steps = Vec::new();
    for p in levels {
        let mut amb_f = Subspace::zero(amb);
        for j in 0..=k {
            let fj = p0.filtration.at(p - 1 + j as i64);
            amb_f = amb_f.sum(&crate::monomod::embed_subspace(&fj, j * w, amb));
        }
        steps.push((p, q.project_subspace(&amb_f)));
    }
    out.insert_piece(
        key1.clone(),
        GradedPiece::new(dim, vec![n_xi], Filtration::from_steps(dim, steps)),
    );

    // can: w -> (w, 0, ..., 0); var: x -> -(N w_0 + w_1)
    let mut can = Matrix::zero(dim, w);
    for c in 0..w {
        let mut vec = vec![Rational::zero(); amb];
        vec[c] = Rational::one();
        let coords = q.project(&vec);
        for (r, val) in coords.into_iter().enumerate() {
            can[(r, c)] = val;
        }
    }
    let basis = kernel.basis();
    let mut var = Matrix::zero(w, dim);
    for c in 0..dim {
        let col = basis.column(c);
        let img = n_tot.apply(&col);
        for r in 0..w {
            var[(r, c)] = -&img[r];
        }
    }
    out.set_can(0, key0, can);
    out.set_var(0, key1, var);
    out
}

/// Smallest k at which the interpolation module stops growing, with the
/// stabilized module.
pub fn xi_stable(m: &MonodromicModule) -> (usize, MonodromicModule) {
    let key1 = ExponentKey::from_i64(&[-1]);
    let mut prev = beilinson_xi(m, 1);
    let mut k = 1;
    loop {
        let next = beilinson_xi(m, k + 1);
        if next.piece_dim(&key1) == prev.piece_dim(&key1) {
            return (k, prev);
        }
        prev = next;
        k += 1;
        assert!(k <= 64, "interpolation module failed to stabilize");
    }
}

/// A rank-one module rebuilt from its star localization and its vanishing
/// data, together with the comparison map from the rebuilt -1 piece onto the
/// original one.
pub struct Reconstruction {
    pub module: MonodromicModule,
    /// rebuilt -1 piece -> original -1 piece, (x, phi) |-> phi - can(w_0)
    pub comparison: Matrix,
}

/// Rebuild a rank-one module from localization + vanishing data. The -1
/// piece is the middle cohomology of
///   W --(a, can)--> Xi^{-1} (+) Phi --(-w_1 + var)--> W
/// where W is the 0 piece, Phi the original -1 piece, and a(w) = (w, -Nw).
pub fn reconstruct_from_gluing(m: &MonodromicModule) -> Reconstruction {
    assert_eq!(m.rank(), 1);
    let key0 = ExponentKey::from_i64(&[0]);
    let key1 = ExponentKey::from_i64(&[-1]);
    let mstar = localize_star(m, 0);
    let (_, xi) = xi_stable(&mstar);

    let w = m.piece_dim(&key0);
    let phi_dim = m.piece_dim(&key1);
    let xi1 = xi.piece_dim(&key1);
    let n0 = match m.piece(&key0) {
        Some(p) => p.nilpotents[0].clone(),
        None => Matrix::zero(0, 0),
    };
    let can_m = m.eff_can(0, &key0);
    let var_m = m.eff_var(0, &key1);

    // Express the ladder coordinates of Xi^{-1}: with the stabilized kernel
    // the first two slots (w_0, w_1) are free. Recover them from the kernel
    // basis used by beilinson_xi via the stored can/var: instead, work with
    // the explicit free presentation dim = 2w when w > 0.
    let amb = xi1 + phi_dim;

    let can_xi = xi.eff_can(0, &key0);
    // slot projections reading (w_0, w_1) off a vector of Xi^{-1}
    let (p0m, p1m) = ladder_slots(&mstar, &xi, w);

    // B: ambient -> W, (x, phi) |-> -w_1 + var(phi)
    let mut b = Matrix::zero(w, amb);
    for r in 0..w {
        for c in 0..xi1 {
            b[(r, c)] = -&p1m[(r, c)];
        }
        for c in 0..phi_dim {
            b[(r, xi1 + c)] = var_m[(r, c)].clone();
        }
    }
    // A: W -> ambient, w |-> (a(w), can w) with a(w) = (w, -Nw)
    let mut a = Matrix::zero(amb, w);
    {
        // a(w) in xi coordinates: solve ladder slots
        let a_xi = xi_vector(&xi, &p0m, &p1m, &Matrix::identity(w), &(-&n0));
        for r in 0..xi1 {
            for c in 0..w {
                a[(r, c)] = a_xi[(r, c)].clone();
            }
        }
        for r in 0..phi_dim {
            for c in 0..w {
                a[(xi1 + r, c)] = can_m[(r, c)].clone();
            }
        }
    }
    debug_assert!((&b * &a).is_zero(), "reconstruction complex must compose to zero");

    let kernel = Subspace::from_columns(&b.kernel());
    let image = Subspace::from_columns(&a);
    let q = QuotientSpace::new(&kernel, &image);
    let h_dim = q.dim();

    // middle N: the module nilpotent of Xi on the xi block, zero on the
    // delta-type Phi block
    let n_xi1 = match xi.piece(&key1) {
        Some(p) => p.nilpotents[0].clone(),
        None => Matrix::zero(0, 0),
    };
    let n_mid = crate::monomod::block_diag(&n_xi1, &Matrix::zero(phi_dim, phi_dim));
    let n_h = q.induced_operator(&n_mid);

    // filtration: levelwise F_p(Xi^{-1}) (+) F_p(Phi), projected
    let f_xi = xi
        .piece(&key1)
        .map(|p| p.filtration.clone())
        .unwrap_or_else(|| Filtration::full_at(0, 0));
    let f_phi = m
        .piece(&key1)
        .map(|p| p.filtration.clone())
        .unwrap_or_else(|| Filtration::full_at(0, 0));
    let mut levels: Vec<i64> = f_xi
        .steps()
        .iter()
        .chain(f_phi.steps().iter())
        .map(|(lv, _)| *lv)
        .collect();
    levels.sort_unstable();
    levels.dedup();
    let mut steps = Vec::new();
    for p in levels {
        let amb_f = crate::monomod::embed_subspace(&f_xi.at(p), 0, amb)
            .sum(&crate::monomod::embed_subspace(&f_phi.at(p), xi1, amb));
        steps.push((p, q.project_subspace(&amb_f)));
    }

    // comparison h: (x, phi) |-> phi - can(w_0(x))
    let mut h_amb = Matrix::zero(phi_dim, amb);
    let can_p0 = &can_m * &p0m;
    for r in 0..phi_dim {
        for c in 0..xi1 {
            h_amb[(r, c)] = -&can_p0[(r, c)];
        }
        for c in 0..phi_dim {
            h_amb[(r, xi1 + c)] = if r == c { Rational::one() } else { Rational::zero() };
        }
    }
    let mut comparison = Matrix::zero(phi_dim, h_dim);
    for c in 0..h_dim {
        let mut coords = vec![Rational::zero(); h_dim];
        coords[c] = Rational::one();
        let lifted = q.lift(&coords);
        let img = h_amb.apply(&lifted);
        for r in 0..phi_dim {
            comparison[(r, c)] = img[r].clone();
        }
    }

    // induced boundary maps with the reconstruction sign
    let mut can_h = Matrix::zero(h_dim, w);
    for c in 0..w {
        // can_H(w) = class of (can_xi(w), 0)
        let col = can_xi.column(c);
        let mut vecamb = vec![Rational::zero(); amb];
        vecamb[..xi1].clone_from_slice(&col);
        let coords = q.project(&vecamb);
        for (r, val) in coords.into_iter().enumerate() {
            can_h[(r, c)] = val;
        }
    }
    let mut var_h = Matrix::zero(w, h_dim);
    {
        // var_H([x, phi]) = var_xi(x) = -(N w_0 + w_1)
        let var_amb = {
            let vxi = xi.eff_var(0, &key1);
            let mut mmat = Matrix::zero(w, amb);
            for r in 0..w {
                for c in 0..xi1 {
                    mmat[(r, c)] = vxi[(r, c)].clone();
                }
            }
            mmat
        };
        for c in 0..h_dim {
            let mut coords = vec![Rational::zero(); h_dim];
            coords[c] = Rational::one();
            let lifted = q.lift(&coords);
            let img = var_amb.apply(&lifted);
            for r in 0..w {
                var_h[(r, c)] = img[r].clone();
            }
        }
    }

    let mut out = MonodromicModule::new(1);
    for (key, piece) in m.pieces() {
        if *key != key1 {
            out.insert_piece(key.clone(), piece.clone());
        }
    }
    out.insert_piece(
        key1.clone(),
        GradedPiece::new(h_dim, vec![n_h], Filtration::from_steps(h_dim, steps)),
    );
    out.set_can(0, key0, can_h);
    out.set_var(0, key1, var_h);
    Reconstruction { module: out, comparison }
}

/// Matrices reading off the first two ladder slots (w_0, w_1) of a vector of
/// Xi^{-1} in module coordinates.
fn ladder_slots(mstar: &MonodromicModule, xi: &MonodromicModule, w: usize) -> (Matrix, Matrix) {
    let key0 = ExponentKey::from_i64(&[0]);
    let key1 = ExponentKey::from_i64(&[-1]);
    let xi1 = xi.piece_dim(&key1);
    if w == 0 {
        return (Matrix::zero(0, xi1), Matrix::zero(0, xi1));
    }
    let n = &mstar.piece(&key0).expect("0 piece").nilpotents[0];
    // Rebuild the ambient kernel basis exactly as beilinson_xi does at the
    // stabilized ladder length and read the two leading slots directly; the
    // canonical subspace basis makes the coordinates agree.
    let k = n.nilpotency_order().unwrap_or(1).max(1);
    let amb = w * (k + 1);
    let mut n_tot = Matrix::zero(amb, amb);
    for j in 0..=k {
        for r in 0..w {
            for c in 0..w {
                n_tot[(j * w + r, j * w + c)] = n[(r, c)].clone();
            }
        }
        if j + 1 <= k {
            for r in 0..w {
                n_tot[(j * w + r, (j + 1) * w + r)] = Rational::one();
            }
        }
    }
    let mut u_ntot = Matrix::zero(w * k, amb);
    for r in 0..w * k {
        for c in 0..amb {
            u_ntot[(r, c)] = n_tot[(w + r, c)].clone();
        }
    }
    let kernel = Subspace::from_columns(&u_ntot.kernel());
    assert_eq!(kernel.dim(), xi1, "ladder presentation must match the stabilized module");
    let basis = kernel.basis();
    let mut p0m = Matrix::zero(w, xi1);
    let mut p1m = Matrix::zero(w, xi1);
    for c in 0..xi1 {
        for r in 0..w {
            p0m[(r, c)] = basis[(r, c)].clone();
            p1m[(r, c)] = basis[(w + r, c)].clone();
        }
    }
    (p0m, p1m)
}

/// Coordinates in Xi^{-1} of the vectors with prescribed first two ladder
/// slots (and the forced tail), one column per input column.
fn xi_vector(
    xi: &MonodromicModule,
    p0m: &Matrix,
    p1m: &Matrix,
    w0: &Matrix,
    w1: &Matrix,
) -> Matrix {
    let key1 = ExponentKey::from_i64(&[-1]);
    let xi1 = xi.piece_dim(&key1);
    let cols = w0.cols();
    // solve [p0; p1] x = [w0; w1]
    let lhs = p0m.vcat(p1m);
    let rhs = w0.vcat(w1);
    let aug = lhs.hcat(&rhs);
    let (r, pivots) = aug.rref();
    let mut out = Matrix::zero(xi1, cols);
    for (row, &pc) in pivots.iter().enumerate() {
        if pc >= xi1 {
            continue;
        }
        for c in 0..cols {
            out[(pc, c)] = r[(row, xi1 + c)].clone();
        }
    }
    // verify the solve (the system is consistent by construction)
    debug_assert_eq!(&(&lhs * &out), &rhs.clone());
    out
}
