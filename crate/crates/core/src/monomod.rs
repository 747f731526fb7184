//! The graded model of monodromic filtered modules.
//!
//! A module of rank n is a finite family of window pieces indexed by
//! exponents in [-1,0]^n. Each piece carries one commuting nilpotent per
//! axis, an exhaustive increasing filtration by subspaces, and boundary maps
//! between pieces whose i-th exponent is 0 resp. -1 (`can` downward, `var`
//! upward). Every other graded piece of the underlying module is a
//! transported copy of a window piece; `piece_at` realizes those copies
//! together with the matrices of the coordinate actions and the transported
//! filtration.

use crate::matrix::Matrix;
use crate::rational::Rational;
use crate::subspace::Subspace;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector of a window piece; every coordinate lies in [-1, 0].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExponentKey(pub Vec<Rational>);

impl ExponentKey {
    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> Rational {
        let mut t = Rational::zero();
        for c in &self.0 {
            t += c;
        }
        t
    }

    pub fn with_coord(&self, axis: usize, value: Rational) -> ExponentKey {
        let mut v = self.0.clone();
        v[axis] = value;
        ExponentKey(v)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        ExponentKey(coords.iter().map(|&c| Rational::from_int(c)).collect())
    }

    pub fn from_strs(coords: &[&str]) -> Self {
        ExponentKey(coords.iter().map(|s| s.parse().expect("bad exponent")).collect())
    }
}

impl fmt::Debug for ExponentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Display for ExponentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Exhaustive increasing filtration of Q^ambient by subspaces, recorded at
/// its jump levels. F_p is the subspace at the largest recorded level <= p
/// (zero below the first level). The last subspace must be all of Q^ambient.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Filtration {
    ambient: usize,
    steps: Vec<(i64, Subspace)>,
}

impl Filtration {
    /// Filtration with a single jump to everything at `level`.
    pub fn full_at(ambient: usize, level: i64) -> Self {
        if ambient == 0 {
            return Filtration { ambient, steps: vec![] };
        }
        Filtration { ambient, steps: vec![(level, Subspace::full(ambient))] }
    }

    pub fn from_steps(ambient: usize, mut steps: Vec<(i64, Subspace)>) -> Self {
        steps.sort_by_key(|(l, _)| *l);
        // Drop steps that do not enlarge the previous subspace.
        let mut out: Vec<(i64, Subspace)> = Vec::new();
        for (l, s) in steps {
            assert_eq!(s.ambient(), ambient, "filtration step ambient mismatch");
            if s.is_zero() {
                continue;
            }
            if out.last().is_none_or(|(_, prev)| s != *prev) {
                out.push((l, s));
            }
        }
        if ambient == 0 {
            out.clear();
        }
        Filtration { ambient, steps: out }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn steps(&self) -> &[(i64, Subspace)] {
        &self.steps
    }

    pub fn at(&self, p: i64) -> Subspace {
        let mut cur = Subspace::zero(self.ambient);
        for (l, s) in &self.steps {
            if *l <= p {
                cur = s.clone();
            } else {
                break;
            }
        }
        if self.ambient == 0 {
            return Subspace::zero(0);
        }
        cur
    }

    /// Shift all jump levels by `s` (new F_p = old F_{p-s}).
    pub fn shifted(&self, s: i64) -> Filtration {
        Filtration {
            ambient: self.ambient,
            steps: self.steps.iter().map(|(l, sp)| (l + s, sp.clone())).collect(),
        }
    }

    pub fn bottom_level(&self) -> Option<i64> {
        self.steps.first().map(|(l, _)| *l)
    }

    pub fn top_level(&self) -> Option<i64> {
        self.steps.last().map(|(l, _)| *l)
    }

    /// Is the filtration valid: strictly increasing subspaces ending at the
    /// full space?
    pub fn is_valid(&self) -> bool {
        if self.ambient == 0 {
            return self.steps.is_empty();
        }
        let mut prev_dim = 0usize;
        let mut prev: Option<&Subspace> = None;
        let mut prev_level: Option<i64> = None;
        for (l, s) in &self.steps {
            if s.ambient() != self.ambient || s.dim() <= prev_dim && prev.is_some() {
                return false;
            }
            if let Some(p) = prev {
                if !s.contains(p) {
                    return false;
                }
            }
            if let Some(pl) = prev_level {
                if *l <= pl {
                    return false;
                }
            }
            prev_dim = s.dim();
            prev = Some(s);
            prev_level = Some(*l);
        }
        self.steps.last().is_some_and(|(_, s)| s.is_full())
    }

    /// Multiset of jump levels with multiplicities (dimension gained).
    pub fn jump_multiset(&self) -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        let mut prev = 0usize;
        for (l, s) in &self.steps {
            if s.dim() > prev {
                out.push((*l, s.dim() - prev));
            }
            prev = s.dim();
        }
        out
    }
}

/// One window piece: dimension, per-axis nilpotents, filtration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedPiece {
    pub dim: usize,
    pub nilpotents: Vec<Matrix>,
    pub filtration: Filtration,
}

impl GradedPiece {
    pub fn new(dim: usize, nilpotents: Vec<Matrix>, filtration: Filtration) -> Self {
        GradedPiece { dim, nilpotents, filtration }
    }

    /// One-dimensional piece with zero nilpotents and a single jump.
    pub fn line(rank: usize, jump: i64) -> Self {
        GradedPiece {
            dim: 1,
            nilpotents: vec![Matrix::zero(1, 1); rank],
            filtration: Filtration::full_at(1, jump),
        }
    }
}

/// Realized action of a coordinate (multiplication or derivative) out of a
/// realized piece.
#[derive(Clone, Debug)]
pub struct RealizedMap {
    /// Matrix in window coordinates, target_dim x source_dim.
    pub matrix: Matrix,
    /// Window key of the target chain position.
    pub target_key: ExponentKey,
}

/// A graded piece at an arbitrary exponent, identified with its window piece
/// via canonical transport.
#[derive(Clone, Debug)]
pub struct RealizedPiece {
    pub exponent: Vec<Rational>,
    pub window_key: ExponentKey,
    pub dim: usize,
    pub nilpotents: Vec<Matrix>,
    /// Realized multiplication by z_i: this piece -> piece at exponent + e_i.
    pub z: Vec<RealizedMap>,
    /// Realized d/dz_i: this piece -> piece at exponent - e_i.
    pub dz: Vec<RealizedMap>,
    pub filtration: Filtration,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationIssue {
    #[error("piece {key}: exponent coordinate {axis} = {value} outside [-1, 0]")]
    ExponentOutOfWindow { key: String, axis: usize, value: String },
    #[error("piece {key}: nilpotent count {found} != rank {rank}")]
    NilpotentCount { key: String, found: usize, rank: usize },
    #[error("piece {key}: axis {axis} matrix is {rows}x{cols}, expected {dim}x{dim}")]
    NilpotentShape { key: String, axis: usize, rows: usize, cols: usize, dim: usize },
    #[error("piece {key}: axis {axis} matrix is not nilpotent")]
    NotNilpotent { key: String, axis: usize },
    #[error("piece {key}: axis {a} and axis {b} nilpotents do not commute")]
    NonCommutingAxes { key: String, a: usize, b: usize },
    #[error("piece {key}: filtration is not strictly increasing and exhaustive")]
    BadFiltration { key: String },
    #[error("piece {key}: axis {axis} nilpotent does not shift the filtration by at most one level")]
    NilpotentFiltration { key: String, axis: usize },
    #[error("{map} map on axis {axis} from {key}: source exponent coordinate must be {expect}")]
    BoundaryWrongSide { map: &'static str, axis: usize, key: String, expect: i64 },
    #[error("{map} map on axis {axis} from {key}: matrix is {rows}x{cols}, expected {trows}x{tcols}")]
    BoundaryShape { map: &'static str, axis: usize, key: String, rows: usize, cols: usize, trows: usize, tcols: usize },
    #[error("piece {key}: var_{axis} . can_{axis} != -N_{axis}")]
    VarCan { key: String, axis: usize },
    #[error("piece {key}: can_{axis} . var_{axis} != -N_{axis}")]
    CanVar { key: String, axis: usize },
    #[error("boundary maps on axes {a} and {b} fail to commute starting from {key}")]
    BoundaryCommute { a: usize, b: usize, key: String },
    #[error("boundary map on axis {axis} from {key} does not commute with N_{other}")]
    BoundaryNilpotent { axis: usize, other: usize, key: String },
    #[error("var_{axis} from {key} does not preserve the filtration")]
    VarFiltration { axis: usize, key: String },
    #[error("can_{axis} from {key} does not shift the filtration by at most one level")]
    CanFiltration { axis: usize, key: String },
    #[error("{map} map on axis {axis} from {key}: key not a window piece")]
    BoundaryOrphan { map: &'static str, axis: usize, key: String },
    #[error("key {key}: length {found} != rank {rank}")]
    KeyRank { key: String, found: usize, rank: usize },
}

/// A monodromic filtered module in window form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonodromicModule {
    rank: usize,
    pieces: BTreeMap<ExponentKey, GradedPiece>,
    can: BTreeMap<(usize, ExponentKey), Matrix>,
    var: BTreeMap<(usize, ExponentKey), Matrix>,
}

impl MonodromicModule {
    pub fn new(rank: usize) -> Self {
        MonodromicModule { rank, pieces: BTreeMap::new(), can: BTreeMap::new(), var: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn insert_piece(&mut self, key: ExponentKey, piece: GradedPiece) {
        assert_eq!(key.rank(), self.rank, "key rank mismatch");
        if piece.dim == 0 {
            return;
        }
        self.pieces.insert(key, piece);
    }

    /// Set can_axis: piece at `from` (coordinate `axis` = 0) -> from - e_axis.
    pub fn set_can(&mut self, axis: usize, from: ExponentKey, m: Matrix) {
        if m.is_zero() {
            self.can.remove(&(axis, from));
        } else {
            self.can.insert((axis, from), m);
        }
    }

    /// Set var_axis: piece at `from` (coordinate `axis` = -1) -> from + e_axis.
    pub fn set_var(&mut self, axis: usize, from: ExponentKey, m: Matrix) {
        if m.is_zero() {
            self.var.remove(&(axis, from));
        } else {
            self.var.insert((axis, from), m);
        }
    }

    pub fn pieces(&self) -> &BTreeMap<ExponentKey, GradedPiece> {
        &self.pieces
    }

    pub fn piece(&self, key: &ExponentKey) -> Option<&GradedPiece> {
        self.pieces.get(key)
    }

    pub fn piece_dim(&self, key: &ExponentKey) -> usize {
        self.pieces.get(key).map_or(0, |p| p.dim)
    }

    pub fn is_zero_module(&self) -> bool {
        self.pieces.is_empty()
    }

    /// can_axis out of the window piece `from` (axis coordinate 0), as a
    /// matrix of the right shape even when absent or when either side is the
    /// zero piece.
    pub fn eff_can(&self, axis: usize, from: &ExponentKey) -> Matrix {
        let target = from.with_coord(axis, Rational::from_int(-1));
        let (tr, sc) = (self.piece_dim(&target), self.piece_dim(from));
        match self.can.get(&(axis, from.clone())) {
            Some(m) if tr > 0 && sc > 0 => m.clone(),
            _ => Matrix::zero(tr, sc),
        }
    }

    pub fn eff_var(&self, axis: usize, from: &ExponentKey) -> Matrix {
        let target = from.with_coord(axis, Rational::zero());
        let (tr, sc) = (self.piece_dim(&target), self.piece_dim(from));
        match self.var.get(&(axis, from.clone())) {
            Some(m) if tr > 0 && sc > 0 => m.clone(),
            _ => Matrix::zero(tr, sc),
        }
    }

    pub fn can_entries(&self) -> &BTreeMap<(usize, ExponentKey), Matrix> {
        &self.can
    }

    pub fn var_entries(&self) -> &BTreeMap<(usize, ExponentKey), Matrix> {
        &self.var
    }

    fn nilpotent(&self, key: &ExponentKey, axis: usize) -> Matrix {
        match self.pieces.get(key) {
            Some(p) => p.nilpotents[axis].clone(),
            None => Matrix::zero(0, 0),
        }
    }

    /// Window representative of a single real exponent coordinate.
    pub fn window_rep(g: &Rational) -> Rational {
        if g.is_integer() {
            if *g >= Rational::zero() {
                Rational::zero()
            } else {
                Rational::from_int(-1)
            }
        } else {
            // unique value in (-1, 0) congruent to g mod Z
            g.frac() - Rational::one()
        }
    }

    /// Window key of an arbitrary exponent vector.
    pub fn window_key(gamma: &[Rational]) -> ExponentKey {
        ExponentKey(gamma.iter().map(Self::window_rep).collect())
    }

    /// Number of descending transport steps from the window anchor, per axis.
    fn descents(g: &Rational) -> i64 {
        let w = Self::window_rep(g);
        let diff = &w - g;
        if diff > Rational::zero() {
            diff.floor_i64()
        } else {
            0
        }
    }

    /// Realize the graded piece at an arbitrary rational exponent vector,
    /// with the matrices of z_i and d/dz_i and the transported filtration.
    pub fn piece_at(&self, gamma: &[Rational]) -> RealizedPiece {
        assert_eq!(gamma.len(), self.rank, "exponent rank mismatch");
        let key = Self::window_key(gamma);
        let dim = self.piece_dim(&key);
        let piece = self.pieces.get(&key);
        let nilpotents: Vec<Matrix> = match piece {
            Some(p) => p.nilpotents.clone(),
            None => vec![Matrix::zero(0, 0); self.rank],
        };

        let mut z = Vec::with_capacity(self.rank);
        let mut dz = Vec::with_capacity(self.rank);
        for axis in 0..self.rank {
            let g = &gamma[axis];
            let n = &nilpotents[axis];
            let one = Rational::one();

            // z_axis: gamma -> gamma + e_axis
            let up_key = {
                let mut up = gamma.to_vec();
                up[axis] = g + &one;
                Self::window_key(&up)
            };
            let zmat = if *g == Rational::from_int(-1) {
                self.eff_var(axis, &key)
            } else if Self::descents(g) > 0 {
                // descending chain: realized z at level g is N + (g + 1)
                n.add_scalar_diag(&(g + &one))
            } else {
                Matrix::identity(dim)
            };
            debug_assert_eq!(zmat.rows(), self.piece_dim(&up_key));
            z.push(RealizedMap { matrix: zmat, target_key: up_key });

            // d/dz_axis: gamma -> gamma - e_axis
            let down_key = {
                let mut down = gamma.to_vec();
                down[axis] = g - &one;
                Self::window_key(&down)
            };
            let dmat = if g.is_zero() {
                -&self.eff_can(axis, &key)
            } else if Self::descents(g) == 0 && *g != Self::window_rep(g) {
                // strictly above the anchor on a chain: realized d/dz is N + g
                n.add_scalar_diag(g)
            } else if g.is_integer() && *g >= Rational::one() {
                n.add_scalar_diag(g)
            } else {
                // at or below the anchor: descending transport is the identity
                Matrix::identity(dim)
            };
            debug_assert_eq!(dmat.rows(), self.piece_dim(&down_key));
            dz.push(RealizedMap { matrix: dmat, target_key: down_key });
        }

        let shift: i64 = gamma.iter().map(Self::descents).sum();
        let filtration = match piece {
            Some(p) => p.filtration.shifted(shift),
            None => Filtration::full_at(0, 0),
        };

        RealizedPiece {
            exponent: gamma.to_vec(),
            window_key: key,
            dim,
            nilpotents,
            z,
            dz,
            filtration,
        }
    }

    /// Group window pieces by total exponent.
    pub fn total_grading(&self) -> TotalGradedView {
        let mut groups: BTreeMap<Rational, Vec<(ExponentKey, usize)>> = BTreeMap::new();
        for (key, piece) in &self.pieces {
            groups.entry(key.total()).or_default().push((key.clone(), piece.dim));
        }
        TotalGradedView { groups }
    }

    /// Validate all structural invariants; returns every violation found.
    pub fn validate(&self) -> Result<(), Vec<ValidationIssue>> {
        let mut issues = Vec::new();
        let zero = Rational::zero();
        let minus_one = Rational::from_int(-1);

        for (key, piece) in &self.pieces {
            let ks = key.to_string();
            if key.rank() != self.rank {
                issues.push(ValidationIssue::KeyRank { key: ks.clone(), found: key.rank(), rank: self.rank });
                continue;
            }
            for (axis, c) in key.0.iter().enumerate() {
                if *c < minus_one || *c > zero {
                    issues.push(ValidationIssue::ExponentOutOfWindow {
                        key: ks.clone(),
                        axis,
                        value: c.to_string(),
                    });
                }
            }
            if piece.nilpotents.len() != self.rank {
                issues.push(ValidationIssue::NilpotentCount {
                    key: ks.clone(),
                    found: piece.nilpotents.len(),
                    rank: self.rank,
                });
                continue;
            }
            for (axis, n) in piece.nilpotents.iter().enumerate() {
                if n.rows() != piece.dim || n.cols() != piece.dim {
                    issues.push(ValidationIssue::NilpotentShape {
                        key: ks.clone(),
                        axis,
                        rows: n.rows(),
                        cols: n.cols(),
                        dim: piece.dim,
                    });
                    continue;
                }
                if n.nilpotency_order().is_none() {
                    issues.push(ValidationIssue::NotNilpotent { key: ks.clone(), axis });
                }
            }
            for a in 0..piece.nilpotents.len() {
                for b in (a + 1)..piece.nilpotents.len() {
                    let (na, nb) = (&piece.nilpotents[a], &piece.nilpotents[b]);
                    if na.rows() == piece.dim && nb.rows() == piece.dim && na.cols() == piece.dim && nb.cols() == piece.dim
                        && &(na * nb) != &(nb * na)
                    {
                        issues.push(ValidationIssue::NonCommutingAxes { key: ks.clone(), a, b });
                    }
                }
            }
            if piece.filtration.ambient() != piece.dim || !piece.filtration.is_valid() {
                issues.push(ValidationIssue::BadFiltration { key: ks.clone() });
            } else {
                for (axis, n) in piece.nilpotents.iter().enumerate() {
                    if n.rows() != piece.dim {
                        continue;
                    }
                    for (l, s) in piece.filtration.steps() {
                        if !piece.filtration.at(l + 1).contains(&s.image(n)) {
                            issues.push(ValidationIssue::NilpotentFiltration { key: ks.clone(), axis });
                            break;
                        }
                    }
                }
            }
        }

        for ((axis, from), m) in &self.can {
            self.check_boundary_entry("can", *axis, from, m, &zero, &mut issues);
        }
        for ((axis, from), m) in &self.var {
            self.check_boundary_entry("var", *axis, from, m, &minus_one, &mut issues);
        }
        if !issues.is_empty() {
            return Err(issues);
        }

        // Composite invariants, using effective (zero-filled) matrices.
        for (key, piece) in &self.pieces {
            let ks = key.to_string();
            for axis in 0..self.rank {
                let n = &piece.nilpotents[axis];
                if key.0[axis] == zero {
                    let down = key.with_coord(axis, minus_one.clone());
                    let c = self.eff_can(axis, key);
                    let v = self.eff_var(axis, &down);
                    if &(&v * &c) != &(-n) {
                        issues.push(ValidationIssue::VarCan { key: ks.clone(), axis });
                    }
                    // filtration compatibility: can shifts by at most one
                    let down_f = match self.pieces.get(&down) {
                        Some(p) => p.filtration.clone(),
                        None => Filtration::full_at(0, 0),
                    };
                    for (l, s) in piece.filtration.steps() {
                        if !down_f.at(l + 1).contains(&s.image(&c)) {
                            issues.push(ValidationIssue::CanFiltration { axis, key: ks.clone() });
                            break;
                        }
                    }
                }
                if key.0[axis] == minus_one {
                    let up = key.with_coord(axis, zero.clone());
                    let v = self.eff_var(axis, key);
                    let c = self.eff_can(axis, &up);
                    if &(&c * &v) != &(-n) {
                        issues.push(ValidationIssue::CanVar { key: ks.clone(), axis });
                    }
                    let up_f = match self.pieces.get(&up) {
                        Some(p) => p.filtration.clone(),
                        None => Filtration::full_at(0, 0),
                    };
                    for (l, s) in piece.filtration.steps() {
                        if !up_f.at(*l).contains(&s.image(&v)) {
                            issues.push(ValidationIssue::VarFiltration { axis, key: ks.clone() });
                            break;
                        }
                    }
                }
            }
            // boundary maps commute with the other-axis nilpotents and with
            // each other
            for axis in 0..self.rank {
                for kind in ["can", "var"] {
                    let (src_val, tgt_val) = if kind == "can" {
                        (zero.clone(), minus_one.clone())
                    } else {
                        (minus_one.clone(), zero.clone())
                    };
                    if key.0[axis] != src_val {
                        continue;
                    }
                    let target = key.with_coord(axis, tgt_val.clone());
                    let m = if kind == "can" { self.eff_can(axis, key) } else { self.eff_var(axis, key) };
                    for other in 0..self.rank {
                        if other == axis {
                            continue;
                        }
                        let n_src = self.nilpotent(key, other);
                        let n_tgt = self.nilpotent(&target, other);
                        if &(&m * &n_src) != &(&n_tgt * &m) {
                            issues.push(ValidationIssue::BoundaryNilpotent { axis, other, key: ks.clone() });
                        }
                        // cross-axis boundary squares
                        for okind in ["can", "var"] {
                            let o_src_val = if okind == "can" { zero.clone() } else { minus_one.clone() };
                            let o_tgt_val = if okind == "can" { minus_one.clone() } else { zero.clone() };
                            if key.0[other] != o_src_val {
                                continue;
                            }
                            let via_other = key.with_coord(other, o_tgt_val.clone());
                            let o_first = if okind == "can" { self.eff_can(other, key) } else { self.eff_var(other, key) };
                            let m_after = if kind == "can" { self.eff_can(axis, &via_other) } else { self.eff_var(axis, &via_other) };
                            let o_after = if okind == "can" {
                                self.eff_can(other, &target)
                            } else {
                                self.eff_var(other, &target)
                            };
                            if &(&m_after * &o_first) != &(&o_after * &m) {
                                issues.push(ValidationIssue::BoundaryCommute { a: axis, b: other, key: ks.clone() });
                            }
                        }
                    }
                }
            }
        }

        issues.sort_by_key(|i| i.to_string());
        issues.dedup();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    fn check_boundary_entry(
        &self,
        map: &'static str,
        axis: usize,
        from: &ExponentKey,
        m: &Matrix,
        expect: &Rational,
        issues: &mut Vec<ValidationIssue>,
    ) {
        let ks = from.to_string();
        if axis >= self.rank || from.rank() != self.rank {
            issues.push(ValidationIssue::BoundaryOrphan { map, axis, key: ks });
            return;
        }
        if from.0[axis] != *expect {
            issues.push(ValidationIssue::BoundaryWrongSide {
                map,
                axis,
                key: ks,
                expect: expect.floor_i64(),
            });
            return;
        }
        if self.pieces.get(from).is_none() {
            issues.push(ValidationIssue::BoundaryOrphan { map, axis, key: ks });
            return;
        }
        let target_coord = if *expect == Rational::zero() { Rational::from_int(-1) } else { Rational::zero() };
        let target = from.with_coord(axis, target_coord);
        let (trows, tcols) = (self.piece_dim(&target), self.piece_dim(from));
        if m.rows() != trows || m.cols() != tcols {
            issues.push(ValidationIssue::BoundaryShape {
                map,
                axis,
                key: ks,
                rows: m.rows(),
                cols: m.cols(),
                trows,
                tcols,
            });
        }
    }
}

/// Pieces grouped by total exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalGradedView {
    pub groups: BTreeMap<Rational, Vec<(ExponentKey, usize)>>,
}

impl TotalGradedView {
    pub fn total_dim(&self, total: &Rational) -> usize {
        self.groups.get(total).map_or(0, |v| v.iter().map(|(_, d)| d).sum())
    }
}

/// Direct sum of two modules of equal rank: block sums of pieces, boundary
/// maps and filtrations.
pub fn direct_sum(a: &MonodromicModule, b: &MonodromicModule) -> MonodromicModule {
    assert_eq!(a.rank(), b.rank(), "direct sum of different ranks");
    let rank = a.rank();
    let mut out = MonodromicModule::new(rank);
    let mut keys: Vec<ExponentKey> = a.pieces.keys().cloned().collect();
    for k in b.pieces.keys() {
        if !keys.contains(k) {
            keys.push(k.clone());
        }
    }
    for key in &keys {
        let da = a.piece_dim(key);
        let db = b.piece_dim(key);
        let dim = da + db;
        if dim == 0 {
            continue;
        }
        let mut nil = Vec::with_capacity(rank);
        for axis in 0..rank {
            nil.push(block_diag(&a.nilpotent(key, axis), &b.nilpotent(key, axis)));
        }
        let fa = a.piece(key).map(|p| p.filtration.clone()).unwrap_or_else(|| Filtration::full_at(0, 0));
        let fb = b.piece(key).map(|p| p.filtration.clone()).unwrap_or_else(|| Filtration::full_at(0, 0));
        let mut levels: Vec<i64> = fa.steps().iter().chain(fb.steps().iter()).map(|(l, _)| *l).collect();
        levels.sort_unstable();
        levels.dedup();
        let steps = levels
            .into_iter()
            .map(|l| (l, block_sum_subspace(&fa.at(l), &fb.at(l), dim)))
            .collect();
        out.insert_piece(key.clone(), GradedPiece::new(dim, nil, Filtration::from_steps(dim, steps)));
    }
    for key in &keys {
        for axis in 0..rank {
            if key.0[axis].is_zero() {
                let m = block_diag(&a.eff_can(axis, key), &b.eff_can(axis, key));
                out.set_can(axis, key.clone(), m);
            }
            if key.0[axis] == Rational::from_int(-1) {
                let m = block_diag(&a.eff_var(axis, key), &b.eff_var(axis, key));
                out.set_var(axis, key.clone(), m);
            }
        }
    }
    out
}

pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let mut m = Matrix::zero(a.rows() + b.rows(), a.cols() + b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            m[(i, j)] = a[(i, j)].clone();
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            m[(a.rows() + i, a.cols() + j)] = b[(i, j)].clone();
        }
    }
    m
}

/// Embed a subspace of Q^d into Q^total at the given coordinate offset.
pub fn embed_subspace(s: &Subspace, offset: usize, total: usize) -> Subspace {
    let b = s.basis();
    let mut m = Matrix::zero(total, b.cols());
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            m[(offset + i, j)] = b[(i, j)].clone();
        }
    }
    Subspace::from_columns(&m)
}

fn block_sum_subspace(sa: &Subspace, sb: &Subspace, total: usize) -> Subspace {
    embed_subspace(sa, 0, total).sum(&embed_subspace(sb, sa.ambient(), total))
}

// ---------------------------------------------------------------------------
// JSON module format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BasisJson {
    Full(String),
    Generators(Vec<Vec<Rational>>),
}

#[derive(Serialize, Deserialize)]
struct FiltrationStepJson {
    level: i64,
    basis: BasisJson,
}

#[derive(Serialize, Deserialize)]
struct PieceJson {
    exponent: Vec<Rational>,
    dim: usize,
    #[serde(rename = "N")]
    nilpotents: Vec<Matrix>,
    filtration: Vec<FiltrationStepJson>,
}

#[derive(Serialize, Deserialize)]
struct BoundaryJson {
    axis: usize,
    from: Vec<Rational>,
    matrix: Matrix,
}

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    rank: usize,
    pieces: Vec<PieceJson>,
    #[serde(default)]
    can: Vec<BoundaryJson>,
    #[serde(default)]
    var: Vec<BoundaryJson>,
}

#[derive(Debug, thiserror::Error)]
pub enum ModuleFormatError {
    #[error("json syntax: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("piece {key}: matrix shape mismatch")]
    Shape { key: String },
    #[error("piece {key}: basis string must be \"full\"")]
    BadBasisTag { key: String },
    #[error("duplicate piece at {key}")]
    DuplicatePiece { key: String },
}

fn resize_empty(m: Matrix, rows: usize, cols: usize) -> Option<Matrix> {
    if m.rows() == rows && m.cols() == cols {
        Some(m)
    } else if m.rows() == 0 || m.cols() == 0 {
        // `[]` stands for any matrix with a zero dimension
        if rows == 0 || cols == 0 || m.is_zero() {
            Some(Matrix::zero(rows, cols))
        } else {
            None
        }
    } else {
        None
    }
}

impl MonodromicModule {
    pub fn to_json(&self) -> String {
        let pieces = self
            .pieces
            .iter()
            .map(|(key, p)| PieceJson {
                exponent: key.0.clone(),
                dim: p.dim,
                nilpotents: p.nilpotents.clone(),
                filtration: p
                    .filtration
                    .steps()
                    .iter()
                    .map(|(l, s)| FiltrationStepJson {
                        level: *l,
                        basis: if s.is_full() {
                            BasisJson::Full("full".to_string())
                        } else {
                            BasisJson::Generators(
                                s.basis_vectors().into_iter().collect(),
                            )
                        },
                    })
                    .collect(),
            })
            .collect();
        let can = self
            .can
            .iter()
            .map(|((axis, from), m)| BoundaryJson { axis: *axis, from: from.0.clone(), matrix: m.clone() })
            .collect();
        let var = self
            .var
            .iter()
            .map(|((axis, from), m)| BoundaryJson { axis: *axis, from: from.0.clone(), matrix: m.clone() })
            .collect();
        let j = ModuleJson { rank: self.rank, pieces, can, var };
        serde_json::to_string_pretty(&j).expect("module serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, ModuleFormatError> {
        let j: ModuleJson = serde_json::from_str(text)?;
        let mut m = MonodromicModule::new(j.rank);
        for pj in j.pieces {
            let key = ExponentKey(pj.exponent);
            let ks = key.to_string();
            if m.pieces.contains_key(&key) {
                return Err(ModuleFormatError::DuplicatePiece { key: ks });
            }
            let mut nil = Vec::with_capacity(pj.nilpotents.len());
            for n in pj.nilpotents {
                nil.push(resize_empty(n, pj.dim, pj.dim).ok_or(ModuleFormatError::Shape { key: ks.clone() })?);
            }
            let mut steps = Vec::new();
            for st in pj.filtration {
                let sub = match st.basis {
                    BasisJson::Full(tag) => {
                        if tag != "full" {
                            return Err(ModuleFormatError::BadBasisTag { key: ks.clone() });
                        }
                        Subspace::full(pj.dim)
                    }
                    BasisJson::Generators(gens) => {
                        if gens.iter().any(|g| g.len() != pj.dim) {
                            return Err(ModuleFormatError::Shape { key: ks.clone() });
                        }
                        Subspace::from_vectors(pj.dim, &gens)
                    }
                };
                steps.push((st.level, sub));
            }
            let piece = GradedPiece::new(pj.dim, nil, Filtration::from_steps(pj.dim, steps));
            // keep pieces as given; validate() reports structural problems
            m.pieces.insert(key, piece);
        }
        for bj in j.can {
            let from = ExponentKey(bj.from);
            let target = if bj.axis < m.rank && from.rank() == m.rank {
                from.with_coord(bj.axis, Rational::from_int(-1))
            } else {
                from.clone()
            };
            let (tr, sc) = (m.piece_dim(&target), m.piece_dim(&from));
            let mat = resize_empty(bj.matrix, tr, sc)
                .ok_or(ModuleFormatError::Shape { key: from.to_string() })?;
            m.can.insert((bj.axis, from), mat);
        }
        for bj in j.var {
            let from = ExponentKey(bj.from);
            let target = if bj.axis < m.rank && from.rank() == m.rank {
                from.with_coord(bj.axis, Rational::zero())
            } else {
                from.clone()
            };
            let (tr, sc) = (m.piece_dim(&target), m.piece_dim(&from));
            let mat = resize_empty(bj.matrix, tr, sc)
                .ok_or(ModuleFormatError::Shape { key: from.to_string() })?;
            m.var.insert((bj.axis, from), mat);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn window_reps() {
        let r = |s: &str| s.parse::<Rational>().unwrap();
        assert_eq!(MonodromicModule::window_rep(&r("3")), r("0"));
        assert_eq!(MonodromicModule::window_rep(&r("0")), r("0"));
        assert_eq!(MonodromicModule::window_rep(&r("-1")), r("-1"));
        assert_eq!(MonodromicModule::window_rep(&r("-5")), r("-1"));
        assert_eq!(MonodromicModule::window_rep(&r("-1/2")), r("-1/2"));
        assert_eq!(MonodromicModule::window_rep(&r("3/2")), r("-1/2"));
        assert_eq!(MonodromicModule::window_rep(&r("-7/2")), r("-1/2"));
        assert_eq!(MonodromicModule::window_rep(&r("-2/3")), r("-2/3"));
        assert_eq!(MonodromicModule::window_rep(&r("4/3")), r("-2/3"));
    }

    #[test]
    fn structure_constants_of_transport() {
        // z . dz = N + gamma and dz . z = N + gamma + 1 at every realized
        // piece of the polynomial-ring module.
        let m = corpus::structure_sheaf();
        for k in -4..4 {
            let gamma = vec![Rational::from_int(k)];
            let p = m.piece_at(&gamma);
            if p.dim == 0 {
                continue;
            }
            let up = m.piece_at(&[Rational::from_int(k + 1)]);
            let down = m.piece_at(&[Rational::from_int(k - 1)]);
            let zd = &down.z[0].matrix * &p.dz[0].matrix;
            let dz = &up.dz[0].matrix * &p.z[0].matrix;
            assert_eq!(zd, p.nilpotents[0].add_scalar_diag(&Rational::from_int(k)), "z.dz at {k}");
            assert_eq!(dz, p.nilpotents[0].add_scalar_diag(&Rational::from_int(k + 1)), "dz.z at {k}");
        }
    }

    #[test]
    fn polynomial_module_realization() {
        let m = corpus::structure_sheaf();
        let p3 = m.piece_at(&[Rational::from_int(3)]);
        assert_eq!(p3.dim, 1);
        assert_eq!(p3.z[0].matrix, Matrix::identity(1));
        assert_eq!(p3.dz[0].matrix, Matrix::from_i64(&[&[3]]));
        // no piece at -1
        let pm1 = m.piece_at(&[Rational::from_int(-1)]);
        assert_eq!(pm1.dim, 0);
    }

    #[test]
    fn kummer_transported_filtration() {
        let m = corpus::kummer(Rational::from_frac(1, 2));
        let p = m.piece_at(&[Rational::from_frac(-3, 2)]);
        assert_eq!(p.dim, 1);
        // one descending step shifts the jump level from 0 to 1
        assert_eq!(p.filtration.jump_multiset(), vec![(1, 1)]);
        let up = m.piece_at(&[Rational::from_frac(5, 2)]);
        assert_eq!(up.filtration.jump_multiset(), vec![(0, 1)]);
    }

    #[test]
    fn delta_realization() {
        let m = corpus::delta();
        let p = m.piece_at(&[Rational::from_int(-1)]);
        assert_eq!(p.dim, 1);
        assert_eq!(p.filtration.jump_multiset(), vec![(0, 1)]);
        let p2 = m.piece_at(&[Rational::from_int(-3)]);
        assert_eq!(p2.filtration.jump_multiset(), vec![(2, 1)]);
        // z out of -1 crosses through var = 0 into the empty 0-piece
        assert_eq!(p.z[0].matrix.rows(), 0);
        // z out of -2 is N + (-1) = -1, an isomorphism
        let pm2 = m.piece_at(&[Rational::from_int(-2)]);
        assert_eq!(pm2.z[0].matrix, Matrix::from_i64(&[&[-1]]));
    }

    #[test]
    fn validate_accepts_corpus_and_locates_breakage() {
        let mut m = corpus::log_unipotent();
        assert!(m.validate().is_ok());
        // break vc = -N
        m.set_var(0, ExponentKey::from_i64(&[-1]), Matrix::from_i64(&[&[1, 0], &[0, 0]]));
        let errs = m.validate().unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, ValidationIssue::VarCan { .. }) || matches!(e, ValidationIssue::CanVar { .. })), "{errs:?}");
    }

    #[test]
    fn total_grading_groups_keys() {
        let m = corpus::nc2();
        let tv = m.total_grading();
        assert_eq!(tv.total_dim(&Rational::from_int(-1)), 2);
        let group = &tv.groups[&Rational::from_int(-1)];
        assert_eq!(group.len(), 2);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        for m in corpus::all_rank_one().iter().chain([corpus::nc2()].iter()) {
            let s1 = m.to_json();
            let back = MonodromicModule::from_json(&s1).unwrap();
            assert_eq!(&back, m);
            let s2 = back.to_json();
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn direct_sum_dims_and_validity() {
        let a = corpus::structure_sheaf();
        let b = corpus::delta();
        let s = direct_sum(&a, &b);
        assert!(s.validate().is_ok());
        assert_eq!(s.piece_dim(&ExponentKey::from_i64(&[0])), 1);
        assert_eq!(s.piece_dim(&ExponentKey::from_i64(&[-1])), 1);
    }
}
