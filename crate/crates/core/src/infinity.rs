//! The chart at infinity of the transform: the module localized along the
//! reciprocal of the last coordinate, its grading by order of vanishing at
//! infinity, the ladder exponents j_beta, the irregular filtration assembled
//! from ladder chunks, and the strict-specializability and localization
//! checks along the divisor at infinity.

use crate::filtops::{fmt_exponent, realized_exponents, FiltrationTable, Window};
use crate::fourier::{dual_coord, fourier_transform};
use crate::gluing::localize_star;
use crate::matrix::Matrix;
use crate::monomod::{Filtration, MonodromicModule};
use crate::rational::Rational;
use crate::subspace::Subspace;
use std::collections::BTreeMap;

/// Minimal power of the reciprocal coordinate needed to bring the image of a
/// total-degree-beta piece into the non-negative part of the chart:
/// max(ceil(-beta) - n - 1, 0).
pub fn j_beta(beta: &Rational, n: usize) -> usize {
    let v = (-beta).ceil_i64() - n as i64 - 1;
    v.max(0) as usize
}

/// Result of the exhaustive combinatorial sweep over ladder exponents.
#[derive(Debug, Clone)]
pub struct LadderReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl LadderReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exhaustively verify the three combinatorial properties of j_beta over a
/// grid of rational exponents:
/// (i)   for j >= 0:  j + beta + n >= -1  if and only if  j >= j_beta;
/// (ii)  j_beta + beta + n >= -1;
/// (iii) if j_beta + beta + n >= r for an integer r >= 0, then
///       j_{beta - s} = 0 for s = 0, ..., r + 1.
pub fn ladder_exponent_check(
    max_rank: usize,
    max_denominator: i64,
    bound: i64,
    max_power: i64,
) -> LadderReport {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for n in 1..=max_rank {
        for den in 1..=max_denominator {
            for num in -bound * den..=bound * den {
                let beta = Rational::from_frac(num, den);
                let jb = j_beta(&beta, n) as i64;
                let edge = &beta + &Rational::from_int(jb + n as i64);
                // (ii)
                checked += 1;
                if edge < Rational::from_int(-1) {
                    failures.push(format!(
                        "(ii) fails at beta = {beta}, n = {n}: j_beta + beta + n = {edge}"
                    ));
                }
                // (i) as an equivalence over the power grid
                for j in 0..=max_power {
                    checked += 1;
                    let lhs = &beta + &Rational::from_int(j + n as i64) >= Rational::from_int(-1);
                    let rhs = j >= jb;
                    if lhs != rhs {
                        failures.push(format!(
                            "(i) fails at beta = {beta}, n = {n}, j = {j}"
                        ));
                    }
                }
                // (iii) for every non-negative integer threshold it clears
                for r in 0..=max_power {
                    if edge >= Rational::from_int(r) {
                        for s in 0..=r + 1 {
                            checked += 1;
                            if j_beta(&(&beta - &Rational::from_int(s)), n) != 0 {
                                failures.push(format!(
                                    "(iii) fails at beta = {beta}, n = {n}, r = {r}, s = {s}"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    LadderReport { checked, failures }
}

/// The chart at infinity: the transform of a module together with its
/// localization along the last dual coordinate. Chunks of source pieces are
/// realized inside the localized module by composing the boundary-crossing
/// map, powers of the reciprocal coordinate, and reciprocal derivatives.
pub struct Chart {
    pub source: MonodromicModule,
    pub transform: MonodromicModule,
    pub module: MonodromicModule,
}

impl Chart {
    pub fn new(m: &MonodromicModule) -> Chart {
        assert!(m.rank() >= 1, "chart requires at least one axis");
        let transform = fourier_transform(m);
        let module = localize_star(&transform, m.rank() - 1);
        Chart { source: m.clone(), transform, module }
    }

    pub fn rank(&self) -> usize {
        self.source.rank()
    }

    fn last(&self) -> usize {
        self.rank() - 1
    }

    /// Ambient dimension of the localized piece at a realized exponent.
    pub fn piece_dim(&self, e: &[Rational]) -> usize {
        self.module.piece_at(e).dim
    }

    /// Image in the localized module, at the dual exponent, of a subspace of
    /// the source piece realized at `b` (window coordinates on both sides).
    /// When the dual exponent sits on the deleted slice of the localization
    /// the map factors through the boundary map to the retained copy.
    pub fn start_chunk(&self, b: &[Rational], s: &Subspace) -> (Vec<Rational>, Subspace) {
        let d: Vec<Rational> = b.iter().map(dual_coord).collect();
        let wkey = MonodromicModule::window_key(&d);
        let dim = self.module.piece_dim(&wkey);
        if dim == 0 {
            return (d, Subspace::zero(0));
        }
        if wkey.0[self.last()] == Rational::from_int(-1) {
            let v = self.transform.eff_var(self.last(), &wkey);
            (d, s.image(&v))
        } else {
            (d, s.clone())
        }
    }

    /// Multiplication by the reciprocal of the last coordinate: one step
    /// down along the last axis through the inverse of the realized
    /// multiplication map, which the localization makes invertible.
    pub fn zeta_step(&self, e: &[Rational], s: &Subspace) -> (Vec<Rational>, Subspace) {
        let last = self.last();
        let mut down = e.to_vec();
        down[last] = &down[last] - &Rational::one();
        let z = &self.module.piece_at(&down).z[last].matrix;
        let inv = z
            .inverse()
            .expect("multiplication along the localized axis must be invertible");
        let img = if s.ambient() == inv.cols() { s.image(&inv) } else { Subspace::zero(inv.rows()) };
        (down, img)
    }

    /// The derivative along the reciprocal coordinate: minus the last
    /// multiplication map composed with the total Euler operator, one step
    /// up along the last axis.
    pub fn del_step(&self, e: &[Rational], s: &Subspace) -> (Vec<Rational>, Subspace) {
        let p = self.module.piece_at(e);
        let mut total = Rational::zero();
        for c in e {
            total += c;
        }
        let mut euler = Matrix::identity(p.dim).scale(&total);
        for n in &p.nilpotents {
            euler = &euler + n;
        }
        let zm = &p.z[self.last()].matrix;
        let mat = -&(zm * &euler);
        let mut up = e.to_vec();
        up[self.last()] = &e[self.last()] + &Rational::one();
        let img = if s.ambient() == mat.cols() { s.image(&mat) } else { Subspace::zero(mat.rows()) };
        (up, img)
    }

    /// Multiplication by the ratio of coordinate `i` to the last coordinate
    /// (one of the remaining chart coordinates, i < rank - 1).
    pub fn zeta_prime_step(&self, i: usize, e: &[Rational], s: &Subspace) -> (Vec<Rational>, Subspace) {
        assert!(i + 1 < self.rank(), "the last axis is the reciprocal direction");
        let p = self.module.piece_at(e);
        let zi = &p.z[i];
        let mut up = e.to_vec();
        up[i] = &e[i] + &Rational::one();
        let s1 = if s.ambient() == zi.matrix.cols() {
            s.image(&zi.matrix)
        } else {
            Subspace::zero(zi.matrix.rows())
        };
        self.zeta_step(&up, &s1)
    }

    /// Realize the chunk obtained from a subspace of the source piece at `b`
    /// by passing to the chart, applying the reciprocal coordinate j times
    /// and then the reciprocal derivative k times.
    pub fn realize_chunk(
        &self,
        b: &[Rational],
        s: &Subspace,
        j: usize,
        k: usize,
    ) -> (Vec<Rational>, Subspace) {
        let (mut e, mut cur) = self.start_chunk(b, s);
        for _ in 0..j {
            (e, cur) = self.zeta_step(&e, &cur);
        }
        for _ in 0..k {
            (e, cur) = self.del_step(&e, &cur);
        }
        (e, cur)
    }
}

/// A table of subspaces of the localized pieces, keyed by realized exponent.
pub type ChartTable = BTreeMap<Vec<Rational>, Subspace>;

pub fn add_chunk(table: &mut ChartTable, key: Vec<Rational>, s: Subspace) {
    if s.is_zero() {
        return;
    }
    match table.get_mut(&key) {
        Some(t) => *t = t.sum(&s),
        None => {
            table.insert(key, s);
        }
    }
}

fn in_window(e: &[Rational], window: Window) -> bool {
    e.iter().all(|c| {
        *c >= Rational::from_int(window.lo) && *c <= Rational::from_int(window.hi)
    })
}

fn total(e: &[Rational]) -> Rational {
    let mut t = Rational::zero();
    for c in e {
        t += c;
    }
    t
}

/// Realized source exponents whose dual lies in the window box padded by
/// `pad` on each side; chunks are generated from exactly this set on every
/// route so that window truncation is identical everywhere.
pub fn source_exponents(chart: &Chart, window: Window, pad: i64) -> Vec<Vec<Rational>> {
    let lo = -(window.hi + pad) - 1;
    let hi = -(window.lo - pad) - 1;
    realized_exponents(&chart.source, Window::new(lo, hi))
}

/// Group the realized pieces of the localized module by the order of
/// vanishing at infinity (minus the total exponent), reporting the realized
/// keys and dimensions of each graded slice.
pub fn infinity_grading(
    chart: &Chart,
    window: Window,
) -> BTreeMap<Rational, Vec<(Vec<Rational>, usize)>> {
    let mut out: BTreeMap<Rational, Vec<(Vec<Rational>, usize)>> = BTreeMap::new();
    for e in realized_exponents(&chart.module, window) {
        let dim = chart.module.piece_at(&e).dim;
        if dim == 0 {
            continue;
        }
        let deg = -&total(&e);
        out.entry(deg).or_default().push((e, dim));
    }
    out
}

/// One generator of the ladder presentation of the irregular filtration: a
/// subspace of a localized piece realized from a source piece of total
/// exponent `beta` by `power` reciprocal-coordinate steps and `derivative`
/// reciprocal-derivative steps, entering the filtration at `level`.
#[derive(Debug, Clone)]
pub struct LadderChunk {
    pub key: Vec<Rational>,
    pub level: i64,
    pub space: Subspace,
    pub beta: Rational,
    pub power: usize,
    pub derivative: usize,
}

/// All ladder chunks of the irregular filtration at parameter alpha over
/// the window: for every realized source piece of total exponent beta, the
/// filtration steps pushed through powers j >= j_beta of the reciprocal
/// coordinate (entering at the step level shifted by -floor(alpha - beta)),
/// and reciprocal derivatives of the minimal-power chunks (each derivative
/// raising the entry level by one).
pub fn ladder_chunks(chart: &Chart, alpha: &Rational, window: Window, pad: i64) -> Vec<LadderChunk> {
    let n = chart.rank();
    let mut out = Vec::new();
    for b in source_exponents(chart, window, pad) {
        let piece = chart.source.piece_at(&b);
        if piece.dim == 0 {
            continue;
        }
        let beta = total(&b);
        let jb = j_beta(&beta, n);
        let shift = (alpha - &beta).floor_i64();
        let d_last = dual_coord(&b[n - 1]);
        // largest reciprocal power keeping the landing key inside the window
        let jmax = (&d_last - &Rational::from_int(window.lo)).floor_i64();
        if jmax < jb as i64 {
            continue;
        }
        // largest derivative count from the minimal power, same constraint
        let kmax =
            (&Rational::from_int(window.hi) - &(&d_last - &Rational::from_int(jb as i64)))
                .floor_i64();
        for (q, s) in piece.filtration.steps() {
            for j in jb as i64..=jmax {
                let (e, c) = chart.realize_chunk(&b, s, j as usize, 0);
                if in_window(&e, window) && !c.is_zero() {
                    out.push(LadderChunk {
                        key: e,
                        level: q - shift,
                        space: c,
                        beta: beta.clone(),
                        power: j as usize,
                        derivative: 0,
                    });
                }
            }
            for k in 1..=kmax.max(0) {
                let (e, c) = chart.realize_chunk(&b, s, jb, k as usize);
                if in_window(&e, window) && !c.is_zero() {
                    out.push(LadderChunk {
                        key: e,
                        level: q + k - shift,
                        space: c,
                        beta: beta.clone(),
                        power: jb,
                        derivative: k as usize,
                    });
                }
            }
        }
    }
    out
}

/// Assemble leveled chunks into one filtration per realized key.
pub fn assemble_table(chart: &Chart, chunks: &[LadderChunk]) -> FiltrationTable {
    let mut raw: BTreeMap<Vec<Rational>, BTreeMap<i64, Subspace>> = BTreeMap::new();
    for ch in chunks {
        let per_key = raw.entry(ch.key.clone()).or_default();
        match per_key.get_mut(&ch.level) {
            Some(t) => *t = t.sum(&ch.space),
            None => {
                per_key.insert(ch.level, ch.space.clone());
            }
        }
    }
    let mut out = FiltrationTable::new();
    for (key, levels) in raw {
        let ambient = chart.piece_dim(&key);
        if ambient == 0 {
            continue;
        }
        let mut cur = Subspace::zero(ambient);
        let mut steps = Vec::new();
        for (l, s) in levels {
            cur = cur.sum(&s);
            steps.push((l, cur.clone()));
        }
        let f = Filtration::from_steps(ambient, steps);
        if !f.steps().is_empty() {
            out.insert(key, f);
        }
    }
    out
}

/// The irregular filtration of the localized chart module at parameter
/// alpha, as the full two-family ladder sum over the window.
pub fn irr_infinity(chart: &Chart, alpha: &Rational, window: Window, pad: i64) -> FiltrationTable {
    let chunks = ladder_chunks(chart, alpha, window, pad);
    assemble_table(chart, &chunks)
}

/// The slice of the filtration along the reciprocal coordinate spanned by
/// reciprocal powers j >= j_beta of full source pieces; equals the sum of
/// localized pieces of vanishing order >= -1 at infinity.
pub fn v_minus1_infinity(chart: &Chart, window: Window, pad: i64) -> ChartTable {
    ladder_span(chart, window, pad, false)
}

/// The reciprocal-derivative closure of the order >= -1 slice: the whole
/// localized module over the window.
pub fn localized_infinity(chart: &Chart, window: Window, pad: i64) -> ChartTable {
    ladder_span(chart, window, pad, true)
}

fn ladder_span(chart: &Chart, window: Window, pad: i64, derivatives: bool) -> ChartTable {
    let n = chart.rank();
    let mut table = ChartTable::new();
    for b in source_exponents(chart, window, pad) {
        let piece = chart.source.piece_at(&b);
        if piece.dim == 0 {
            continue;
        }
        let beta = total(&b);
        let jb = j_beta(&beta, n);
        let full = Subspace::full(piece.dim);
        let d_last = dual_coord(&b[n - 1]);
        let jmax = (&d_last - &Rational::from_int(window.lo)).floor_i64();
        for j in jb as i64..=jmax {
            let kmax = if derivatives {
                (&Rational::from_int(window.hi)
                    - &(&d_last - &Rational::from_int(j)))
                    .floor_i64()
                    .max(0)
            } else {
                0
            };
            for k in 0..=kmax {
                let (e, c) = chart.realize_chunk(&b, &full, j as usize, k as usize);
                if in_window(&e, window) {
                    add_chunk(&mut table, e, c);
                }
            }
        }
    }
    table
}

/// Close a chart table under multiplication by the remaining chart
/// coordinates (ratios to the last coordinate); a no-op in rank one.
pub fn chart_closure(chart: &Chart, table: &ChartTable, window: Window) -> ChartTable {
    let mut out = table.clone();
    if chart.rank() == 1 {
        return out;
    }
    loop {
        let mut grew = false;
        let snapshot: Vec<(Vec<Rational>, Subspace)> =
            out.iter().map(|(k, s)| (k.clone(), s.clone())).collect();
        for (e, s) in snapshot {
            for i in 0..chart.rank() - 1 {
                let (f, t) = chart.zeta_prime_step(i, &e, &s);
                if !in_window(&f, window) || t.is_zero() {
                    continue;
                }
                match out.get_mut(&f) {
                    Some(prev) => {
                        let merged = prev.sum(&t);
                        if merged != *prev {
                            *prev = merged;
                            grew = true;
                        }
                    }
                    None => {
                        out.insert(f, t);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    out
}

/// The level-p slice of a filtration table as a chart table (zero entries
/// dropped).
pub fn table_slice(table: &FiltrationTable, p: i64) -> ChartTable {
    let mut out = ChartTable::new();
    for (key, f) in table {
        let s = f.at(p);
        if !s.is_zero() {
            out.insert(key.clone(), s);
        }
    }
    out
}

/// Compare two chart tables, treating missing entries as zero.
pub fn compare_chart_tables(a: &ChartTable, b: &ChartTable) -> Vec<String> {
    let mut errors = Vec::new();
    let mut keys: Vec<&Vec<Rational>> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    for key in keys {
        match (a.get(key), b.get(key)) {
            (Some(x), Some(y)) => {
                if x != y {
                    errors.push(format!(
                        "at {}: dimensions {} vs {}",
                        fmt_exponent(key),
                        x.dim(),
                        y.dim()
                    ));
                }
            }
            (Some(x), None) => {
                if !x.is_zero() {
                    errors.push(format!("at {}: present only on the left", fmt_exponent(key)));
                }
            }
            (None, Some(y)) => {
                if !y.is_zero() {
                    errors.push(format!("at {}: present only on the right", fmt_exponent(key)));
                }
            }
            (None, None) => {}
        }
    }
    errors
}

fn level_range(table: &FiltrationTable) -> Option<(i64, i64)> {
    let mut range: Option<(i64, i64)> = None;
    for f in table.values() {
        for (l, _) in f.steps() {
            range = Some(match range {
                None => (*l, *l),
                Some((lo, hi)) => (lo.min(*l), hi.max(*l)),
            });
        }
    }
    range
}

fn slice_at(table: &FiltrationTable, key: &[Rational], p: i64, ambient: usize) -> Subspace {
    match table.get(key) {
        Some(f) => f.at(p),
        None => Subspace::zero(ambient),
    }
}

fn shift_last(e: &[Rational], by: i64) -> Vec<Rational> {
    let mut out = e.to_vec();
    let last = out.len() - 1;
    out[last] = &out[last] + &Rational::from_int(by);
    out
}

/// Verify strict specializability of a filtration table along the
/// reciprocal coordinate: (i) for vanishing order > -1, multiplication by
/// the reciprocal coordinate carries each level onto the level of the next
/// deeper slice; (ii) for vanishing order < -1, each level is the
/// reciprocal-derivative image of the previous level one slice up.
pub fn check_specializability_table(
    chart: &Chart,
    table: &FiltrationTable,
    window: Window,
    margin: i64,
) -> Result<(), Vec<String>> {
    let inner = Window::new(window.lo + margin, window.hi - margin);
    let Some((plo, phi)) = level_range(table) else {
        return Ok(());
    };
    let mut errors = Vec::new();
    for f in realized_exponents(&chart.module, inner) {
        let deg = -&total(&f);
        let dim_f = chart.piece_dim(&f);
        if dim_f == 0 {
            continue;
        }
        // (i): the slice of order deg > 0 is the reciprocal image of the
        // slice of order deg - 1 at the same level.
        if deg > Rational::zero() {
            let e = shift_last(&f, 1);
            if in_window(&e, inner) {
                let dim_e = chart.piece_dim(&e);
                for p in plo - 1..=phi + 1 {
                    let src = slice_at(table, &e, p, dim_e);
                    let (down, img) = chart.zeta_step(&e, &src);
                    debug_assert_eq!(down, f);
                    let tgt = slice_at(table, &f, p, dim_f);
                    if img != tgt {
                        errors.push(format!(
                            "order {} piece at {}: level {}: reciprocal multiplication carries dimension {} but the slice has dimension {}",
                            -&deg + &Rational::one(), fmt_exponent(&f), p, img.dim(), tgt.dim()
                        ));
                    }
                }
            }
        }
        // (ii): the slice of order deg < -1 at level p is the derivative
        // image of the order deg + 1 slice at level p - 1.
        if deg < Rational::from_int(-1) {
            let e = shift_last(&f, -1);
            if in_window(&e, inner) {
                let dim_e = chart.piece_dim(&e);
                for p in plo - 1..=phi + 1 {
                    let src = slice_at(table, &e, p - 1, dim_e);
                    let (up, img) = chart.del_step(&e, &src);
                    debug_assert_eq!(up, f);
                    let tgt = slice_at(table, &f, p, dim_f);
                    if img != tgt {
                        errors.push(format!(
                            "order {} piece at {}: level {}: reciprocal derivative carries dimension {} but the slice has dimension {}",
                            -&deg - &Rational::one(), fmt_exponent(&f), p, img.dim(), tgt.dim()
                        ));
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

/// Strict specializability of the irregular filtration at parameter alpha.
pub fn check_infinity_specializability(
    chart: &Chart,
    alpha: &Rational,
    window: Window,
    pad: i64,
    margin: i64,
) -> Result<(), Vec<String>> {
    let table = irr_infinity(chart, alpha, window, pad);
    check_specializability_table(chart, &table, window, margin)
}

/// Verify that a filtration table is localized along the reciprocal
/// coordinate: (i) the order >= -1 part at each level is the inverse
/// reciprocal image of the order >= 0 part, and (ii) every deeper slice is
/// the sum of iterated reciprocal derivatives of the order >= -1 part with
/// matching level drops.
pub fn check_localized_table(
    chart: &Chart,
    table: &FiltrationTable,
    window: Window,
    margin: i64,
) -> Result<(), Vec<String>> {
    let inner = Window::new(window.lo + margin, window.hi - margin);
    let Some((plo, phi)) = level_range(table) else {
        return Ok(());
    };
    let mut errors = Vec::new();
    for g in realized_exponents(&chart.module, inner) {
        let deg = -&total(&g);
        let dim_g = chart.piece_dim(&g);
        if dim_g == 0 {
            continue;
        }
        if deg >= Rational::from_int(-1) {
            // (i): the order >= -1 slices are reciprocal-inverse images of
            // the order >= 0 slices: equivalently multiplication by the last
            // coordinate carries the next shallower slice onto this one.
            let e = shift_last(&g, -1);
            if !in_window(&e, inner) {
                continue;
            }
            let dim_e = chart.piece_dim(&e);
            for p in plo - 1..=phi + 1 {
                let src = slice_at(table, &e, p, dim_e);
                let z = &chart.module.piece_at(&e).z[chart.rank() - 1].matrix;
                let img = if src.ambient() == z.cols() {
                    src.image(z)
                } else {
                    Subspace::zero(z.rows())
                };
                let tgt = slice_at(table, &g, p, dim_g);
                if img != tgt {
                    errors.push(format!(
                        "localization (i) at {} level {}: image dimension {} vs slice dimension {}",
                        fmt_exponent(&g), p, img.dim(), tgt.dim()
                    ));
                }
            }
        } else {
            // (ii): generation by derivatives out of the order >= -1 part.
            let gamma = deg.clone();
            let kmin = (-&(&gamma + &Rational::one())).ceil_i64().max(1);
            for p in plo - 1..=phi + 1 {
                let mut sum = Subspace::zero(dim_g);
                let mut k = kmin;
                loop {
                    let e = shift_last(&g, -k);
                    if !in_window(&e, window) {
                        break;
                    }
                    let dim_e = chart.piece_dim(&e);
                    let mut cur = slice_at(table, &e, p - k, dim_e);
                    let mut pos = e.clone();
                    for _ in 0..k {
                        let (up, img) = chart.del_step(&pos, &cur);
                        pos = up;
                        cur = img;
                    }
                    debug_assert_eq!(pos, g);
                    sum = sum.sum(&cur);
                    k += 1;
                }
                let tgt = slice_at(table, &g, p, dim_g);
                if sum != tgt {
                    errors.push(format!(
                        "localization (ii) at {} level {}: generated dimension {} vs slice dimension {}",
                        fmt_exponent(&g), p, sum.dim(), tgt.dim()
                    ));
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

/// Localization property of the irregular filtration at parameter alpha.
pub fn check_infinity_localization(
    chart: &Chart,
    alpha: &Rational,
    window: Window,
    pad: i64,
    margin: i64,
) -> Result<(), Vec<String>> {
    let table = irr_infinity(chart, alpha, window, pad);
    check_localized_table(chart, &table, window, margin)
}

/// Verify the closed formulas for the irregular filtration of the deep
/// V-slices: (i) for every order gamma >= -1, the part of the filtration of
/// vanishing order >= gamma equals the span of the reciprocal-power chunks
/// with power + beta + n >= gamma; (ii) for every order gamma < 0, the order
/// gamma slice equals the span of derivative chunks with
/// j_beta + beta + n - k = gamma.
pub fn check_deep_slices(
    chart: &Chart,
    alpha: &Rational,
    window: Window,
    pad: i64,
    margin: i64,
) -> Result<(), Vec<String>> {
    let n = chart.rank();
    let nq = Rational::from_int(n as i64);
    let chunks = ladder_chunks(chart, alpha, window, pad);
    let table = assemble_table(chart, &chunks);
    let inner = Window::new(window.lo + margin, window.hi - margin);
    let mut errors = Vec::new();
    // collect the vanishing orders present in the inner region
    let mut degrees: Vec<Rational> = Vec::new();
    for e in realized_exponents(&chart.module, inner) {
        if chart.piece_dim(&e) > 0 {
            degrees.push(-&total(&e));
        }
    }
    degrees.sort();
    degrees.dedup();
    let inner_keys: Vec<Vec<Rational>> = realized_exponents(&chart.module, inner)
        .into_iter()
        .filter(|e| chart.piece_dim(e) > 0)
        .collect();
    let Some((plo, phi)) = level_range(&table) else {
        return Ok(());
    };
    for gamma in &degrees {
        if *gamma >= Rational::from_int(-1) {
            // (i): V-part of order >= gamma, both ways.
            let selected: Vec<LadderChunk> = chunks
                .iter()
                .filter(|c| {
                    c.derivative == 0
                        && &(&Rational::from_int(c.power as i64) + &c.beta) + &nq >= *gamma
                })
                .cloned()
                .collect();
            let rhs = assemble_table(chart, &selected);
            for key in &inner_keys {
                if -&total(key) < *gamma {
                    continue;
                }
                let ambient = chart.piece_dim(key);
                for p in plo - 1..=phi + 1 {
                    let a = slice_at(&table, key, p, ambient);
                    let b = slice_at(&rhs, key, p, ambient);
                    if a != b {
                        errors.push(format!(
                            "V-slice formula at order {} key {} level {}: {} vs {}",
                            gamma, fmt_exponent(key), p, a.dim(), b.dim()
                        ));
                    }
                }
            }
        }
        if *gamma < Rational::zero() {
            // (ii): the order-exactly-gamma slice from derivative chunks of
            // minimal reciprocal power only.
            let selected: Vec<LadderChunk> = chunks
                .iter()
                .filter(|c| {
                    c.power == j_beta(&c.beta, n)
                        && &(&(&Rational::from_int(c.power as i64) + &c.beta) + &nq)
                            - &Rational::from_int(c.derivative as i64)
                            == *gamma
                })
                .cloned()
                .collect();
            let rhs = assemble_table(chart, &selected);
            for key in &inner_keys {
                if -&total(key) != *gamma {
                    continue;
                }
                let ambient = chart.piece_dim(key);
                for p in plo - 1..=phi + 1 {
                    let a = slice_at(&table, key, p, ambient);
                    let b = slice_at(&rhs, key, p, ambient);
                    if a != b {
                        errors.push(format!(
                            "graded-slice formula at order {} key {} level {}: {} vs {}",
                            gamma, fmt_exponent(key), p, a.dim(), b.dim()
                        ));
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
