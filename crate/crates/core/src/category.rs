//! Skeletal data of a modular tensor category and its coherence checks.
//!
//! Conventions. A splitting vertex `c -> a ⊗ b` carries a multiplicity index
//! `μ < N_{ab}^c`. The F-move relates the two bracketings of `a ⊗ b ⊗ c`:
//!
//! ```text
//! |((a b)_{e,α} c)_{d,β}> = Σ_{f,γ,δ} [F^{abc}_d]_{(e,α,β),(f,γ,δ)} |(a (b c)_{f,γ})_{d,δ}>
//! ```
//!
//! with `α: e -> ab`, `β: d -> ec`, `γ: f -> bc`, `δ: d -> af`. Rows and
//! columns are enumerated lexicographically in `(channel, first vertex,
//! second vertex)`. The braiding acts on a splitting vertex by
//! `c_{a,b} |a b; c, μ> = Σ_ν [R^{ab}_c]_{μν} |b a; c, ν>`.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{FrobError, Result};
use crate::fusion_ring::{FusionRing, ValidationReport};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Index of an F-matrix row or column: `(channel, first vertex, second vertex)`.
pub type FIndex = (usize, usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct FBlock {
    pub rows: Vec<FIndex>,
    pub cols: Vec<FIndex>,
    pub mat: DMatrix<C64>,
    pub inv: DMatrix<C64>,
    row_pos: HashMap<FIndex, usize>,
    col_pos: HashMap<FIndex, usize>,
}

impl FBlock {
    pub fn row_index(&self, idx: FIndex) -> Option<usize> {
        self.row_pos.get(&idx).copied()
    }

    pub fn col_index(&self, idx: FIndex) -> Option<usize> {
        self.col_pos.get(&idx).copied()
    }
}

/// One nonzero F-symbol entry, addressed by its full index tuple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FEntry {
    pub abcd: [usize; 4],
    pub row: FIndex,
    pub col: FIndex,
    pub value: C64,
}

/// One nonzero R-symbol entry `[R^{ab}_c]_{μν}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct REntry {
    pub abc: [usize; 3],
    pub mu: usize,
    pub nu: usize,
    pub value: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkeletalCategory {
    pub name: String,
    pub source: String,
    ring: FusionRing,
    f: Vec<Option<FBlock>>,
    r: Vec<Option<DMatrix<C64>>>,
    r_inv: Vec<Option<DMatrix<C64>>>,
    theta: Vec<C64>,
    qdim: Vec<f64>,
    pub tolerance: f64,
}

/// Residuals of every coherence check, with the location of the worst one.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceReport {
    pub pentagon: f64,
    pub pentagon_worst: Option<String>,
    pub hexagon: f64,
    pub hexagon_worst: Option<String>,
    pub unit: f64,
    pub ribbon: f64,
    pub dims: f64,
    pub sphericality: f64,
    pub ring: ValidationReport,
}

impl CoherenceReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.ring.is_valid()
            && self.pentagon <= tol
            && self.hexagon <= tol
            && self.unit <= tol
            && self.ribbon <= tol
            && self.dims <= tol
            && self.sphericality <= tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix {
    /// Unnormalized `s̃_{ij}`.
    pub entries: DMatrix<C64>,
    /// `D² = Σ d_i²`.
    pub global_dim_sq: f64,
}

impl SMatrix {
    pub fn global_dim(&self) -> f64 {
        self.global_dim_sq.sqrt()
    }

    /// Unitary normalization `S = s̃ / D`.
    pub fn unitary(&self) -> DMatrix<C64> {
        self.entries.map(|z| z / self.global_dim())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularReport {
    /// `min_λ ||(ST)³ - λ S²||∞` over unit-modulus `λ`.
    pub st_cubed: f64,
    /// Distance of `S²` from the charge-conjugation matrix up to a phase.
    pub s_squared: f64,
    /// `max_i |d_i - PF(N_i)|`.
    pub perron_frobenius: f64,
}

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// Phase `exp(2πi·x)`.
pub fn phase(x: f64) -> C64 {
    cis(2.0 * PI * x)
}

impl SkeletalCategory {
    /// Assembles the category from sparse F and R entries. Entries absent from
    /// the lists are zero.
    pub fn new(
        name: impl Into<String>,
        ring: FusionRing,
        f_entries: &[FEntry],
        r_entries: &[REntry],
        theta: Vec<C64>,
        qdim: Vec<f64>,
        tolerance: f64,
    ) -> Result<Self> {
        let rank = ring.rank();
        if theta.len() != rank || qdim.len() != rank {
            return Err(FrobError::MalformedTable(format!(
                "expected {rank} twists and dimensions, got {} and {}",
                theta.len(),
                qdim.len()
            )));
        }
        if let Some((i, d)) = qdim.iter().enumerate().find(|(_, d)| d.is_nan() || **d <= 0.0) {
            return Err(FrobError::MalformedTable(format!(
                "quantum dimension of label {i} is {d}; spherical data needs d > 0"
            )));
        }
        let mut f: Vec<Option<FBlock>> = vec![None; rank.pow(4)];
        for a in 0..rank {
            for b in 0..rank {
                for c in 0..rank {
                    for d in 0..rank {
                        let rows = f_row_labels(&ring, a, b, c, d);
                        let cols = f_col_labels(&ring, a, b, c, d);
                        if rows.len() != cols.len() {
                            return Err(FrobError::MalformedTable(format!(
                                "F^{{{a}{b}{c}}}_{d}: {} rows vs {} columns",
                                rows.len(),
                                cols.len()
                            )));
                        }
                        if rows.is_empty() {
                            continue;
                        }
                        let n = rows.len();
                        let row_pos = rows.iter().enumerate().map(|(i, r)| (*r, i)).collect();
                        let col_pos = cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
                        f[idx4(rank, a, b, c, d)] = Some(FBlock {
                            rows,
                            cols,
                            mat: DMatrix::zeros(n, n),
                            inv: DMatrix::zeros(n, n),
                            row_pos,
                            col_pos,
                        });
                    }
                }
            }
        }
        for e in f_entries {
            let [a, b, c, d] = e.abcd;
            if a >= rank || b >= rank || c >= rank || d >= rank {
                return Err(FrobError::MalformedTable(format!("F entry {:?} out of range", e.abcd)));
            }
            let block = f[idx4(rank, a, b, c, d)].as_mut().ok_or_else(|| {
                FrobError::MalformedTable(format!("F entry for inadmissible {:?}", e.abcd))
            })?;
            let (Some(i), Some(j)) = (block.row_index(e.row), block.col_index(e.col)) else {
                return Err(FrobError::MalformedTable(format!(
                    "F^{:?} entry {:?} -> {:?} is not an admissible channel pair",
                    e.abcd, e.row, e.col
                )));
            };
            block.mat[(i, j)] = e.value;
        }
        for (pos, block) in f.iter_mut().enumerate() {
            if let Some(block) = block {
                block.inv = block.mat.clone().try_inverse().ok_or_else(|| {
                    let d = pos % rank;
                    let c = (pos / rank) % rank;
                    let b = (pos / rank / rank) % rank;
                    let a = pos / rank / rank / rank;
                    FrobError::MalformedTable(format!("F^{{{a}{b}{c}}}_{d} is singular"))
                })?;
            }
        }

        let mut r: Vec<Option<DMatrix<C64>>> = vec![None; rank.pow(3)];
        for a in 0..rank {
            for b in 0..rank {
                for c in 0..rank {
                    let n = ring.n(a, b, c);
                    if n > 0 {
                        r[idx3(rank, a, b, c)] = Some(DMatrix::zeros(n, n));
                    }
                }
            }
        }
        for e in r_entries {
            let [a, b, c] = e.abc;
            if a >= rank || b >= rank || c >= rank {
                return Err(FrobError::MalformedTable(format!("R entry {:?} out of range", e.abc)));
            }
            let m = r[idx3(rank, a, b, c)].as_mut().ok_or_else(|| {
                FrobError::MalformedTable(format!("R entry for inadmissible {:?}", e.abc))
            })?;
            if e.mu >= m.nrows() || e.nu >= m.ncols() {
                return Err(FrobError::MalformedTable(format!(
                    "R^{:?} multiplicity index ({}, {}) out of range",
                    e.abc, e.mu, e.nu
                )));
            }
            m[(e.mu, e.nu)] = e.value;
        }
        let mut r_inv = vec![None; rank.pow(3)];
        for (pos, m) in r.iter().enumerate() {
            if let Some(m) = m {
                r_inv[pos] = Some(m.clone().try_inverse().ok_or_else(|| {
                    FrobError::MalformedTable(format!("R-symbol block {pos} is singular"))
                })?);
            }
        }
        Ok(SkeletalCategory {
            name: name.into(),
            source: String::new(),
            ring,
            f,
            r,
            r_inv,
            theta,
            qdim,
            tolerance,
        })
    }

    /// Builds the category from closures that supply every admissible F and R
    /// entry; zero values are skipped.
    pub fn from_fn(
        name: impl Into<String>,
        ring: FusionRing,
        f_val: impl Fn([usize; 4], FIndex, FIndex) -> C64,
        r_val: impl Fn([usize; 3], usize, usize) -> C64,
        theta: Vec<C64>,
        qdim: Vec<f64>,
    ) -> Result<Self> {
        let rank = ring.rank();
        let mut fe = Vec::new();
        let mut re = Vec::new();
        for a in 0..rank {
            for b in 0..rank {
                for c in 0..rank {
                    for d in 0..rank {
                        let rows = f_row_labels(&ring, a, b, c, d);
                        let cols = f_col_labels(&ring, a, b, c, d);
                        for &row in &rows {
                            for &col in &cols {
                                let v = f_val([a, b, c, d], row, col);
                                if v != C64::new(0.0, 0.0) {
                                    fe.push(FEntry { abcd: [a, b, c, d], row, col, value: v });
                                }
                            }
                        }
                    }
                    let n = ring.n(a, b, c);
                    for mu in 0..n {
                        for nu in 0..n {
                            let v = r_val([a, b, c], mu, nu);
                            if v != C64::new(0.0, 0.0) {
                                re.push(REntry { abc: [a, b, c], mu, nu, value: v });
                            }
                        }
                    }
                }
            }
        }
        Self::new(name, ring, &fe, &re, theta, qdim, DEFAULT_TOLERANCE)
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.ring.rank()
    }

    pub fn n(&self, i: usize, j: usize, k: usize) -> usize {
        self.ring.n(i, j, k)
    }

    pub fn dual(&self, i: usize) -> usize {
        self.ring.dual(i)
    }

    pub fn theta(&self, i: usize) -> C64 {
        self.theta[i]
    }

    pub fn thetas(&self) -> &[C64] {
        &self.theta
    }

    pub fn qdim(&self, i: usize) -> f64 {
        self.qdim[i]
    }

    pub fn qdims(&self) -> &[f64] {
        &self.qdim
    }

    pub fn global_dim_sq(&self) -> f64 {
        self.qdim.iter().map(|d| d * d).sum()
    }

    pub fn f_block(&self, a: usize, b: usize, c: usize, d: usize) -> Option<&FBlock> {
        self.f[idx4(self.rank(), a, b, c, d)].as_ref()
    }

    /// Single F entry; zero when the indices are inadmissible.
    pub fn f_entry(&self, abcd: [usize; 4], row: FIndex, col: FIndex) -> C64 {
        let [a, b, c, d] = abcd;
        self.f_block(a, b, c, d)
            .and_then(|blk| Some(blk.mat[(blk.row_index(row)?, blk.col_index(col)?)]))
            .unwrap_or_default()
    }

    /// Entry of the inverse F-matrix: rows are F-column labels, columns are
    /// F-row labels.
    pub fn f_inv_entry(&self, abcd: [usize; 4], row: FIndex, col: FIndex) -> C64 {
        let [a, b, c, d] = abcd;
        self.f_block(a, b, c, d)
            .and_then(|blk| Some(blk.inv[(blk.col_index(row)?, blk.row_index(col)?)]))
            .unwrap_or_default()
    }

    pub fn r_block(&self, a: usize, b: usize, c: usize) -> Option<&DMatrix<C64>> {
        self.r[idx3(self.rank(), a, b, c)].as_ref()
    }

    pub fn r_inv_block(&self, a: usize, b: usize, c: usize) -> Option<&DMatrix<C64>> {
        self.r_inv[idx3(self.rank(), a, b, c)].as_ref()
    }

    pub fn r_entry(&self, abc: [usize; 3], mu: usize, nu: usize) -> C64 {
        self.r_block(abc[0], abc[1], abc[2])
            .map(|m| m[(mu, nu)])
            .unwrap_or_default()
    }

    /// `[R'^{ab}_c] = [R^{ba}_c]^{-1}`: the R-symbols of the reverse braiding
    /// `c'_{a,b} = c^{-1}_{b,a}`.
    pub fn r_rev_entry(&self, abc: [usize; 3], mu: usize, nu: usize) -> C64 {
        self.r_inv_block(abc[1], abc[0], abc[2])
            .map(|m| m[(mu, nu)])
            .unwrap_or_default()
    }

    /// All nonzero F entries in canonical order.
    pub fn f_entries(&self) -> Vec<FEntry> {
        let rank = self.rank();
        let mut out = Vec::new();
        for (pos, blk) in self.f.iter().enumerate() {
            let Some(blk) = blk else { continue };
            let abcd = [pos / rank.pow(3), (pos / rank.pow(2)) % rank, (pos / rank) % rank, pos % rank];
            for (i, row) in blk.rows.iter().enumerate() {
                for (j, col) in blk.cols.iter().enumerate() {
                    let v = blk.mat[(i, j)];
                    if v != C64::new(0.0, 0.0) {
                        out.push(FEntry { abcd, row: *row, col: *col, value: v });
                    }
                }
            }
        }
        out
    }

    pub fn r_entries(&self) -> Vec<REntry> {
        let rank = self.rank();
        let mut out = Vec::new();
        for (pos, m) in self.r.iter().enumerate() {
            let Some(m) = m else { continue };
            let abc = [pos / rank.pow(2), (pos / rank) % rank, pos % rank];
            for mu in 0..m.nrows() {
                for nu in 0..m.ncols() {
                    if m[(mu, nu)] != C64::new(0.0, 0.0) {
                        out.push(REntry { abc, mu, nu, value: m[(mu, nu)] });
                    }
                }
            }
        }
        out
    }

    /// Returns a copy with one F entry overwritten.
    pub fn with_f_entry(&self, entry: FEntry) -> Result<Self> {
        let mut entries = self.f_entries();
        entries.retain(|e| !(e.abcd == entry.abcd && e.row == entry.row && e.col == entry.col));
        entries.push(entry);
        let mut c = Self::new(
            self.name.clone(),
            self.ring.clone(),
            &entries,
            &self.r_entries(),
            self.theta.clone(),
            self.qdim.clone(),
            self.tolerance,
        )?;
        c.source = self.source.clone();
        Ok(c)
    }

    /// Returns a copy with one R entry overwritten.
    pub fn with_r_entry(&self, entry: REntry) -> Result<Self> {
        let mut entries = self.r_entries();
        entries.retain(|e| !(e.abc == entry.abc && e.mu == entry.mu && e.nu == entry.nu));
        entries.push(entry);
        let mut c = Self::new(
            self.name.clone(),
            self.ring.clone(),
            &self.f_entries(),
            &entries,
            self.theta.clone(),
            self.qdim.clone(),
            self.tolerance,
        )?;
        c.source = self.source.clone();
        Ok(c)
    }

    /// Maximum pentagon residual with a description of the worst tuple.
    pub fn verify_pentagon(&self) -> (f64, Option<String>) {
        let rank = self.rank();
        let ring = &self.ring;
        let mut worst = 0.0;
        let mut at = None;
        for a in 0..rank {
            for b in 0..rank {
                for c in 0..rank {
                    for d in 0..rank {
                        for e in 0..rank {
                            // input tree (((ab)_f c)_g d)_e, output (a (b (cd)_l)_k)_e
                            for f in ring.channels(a, b) {
                                for g in ring.channels(f, c) {
                                    if ring.n(g, d, e) == 0 {
                                        continue;
                                    }
                                    for l in ring.channels(c, d) {
                                        for k in ring.channels(b, l) {
                                            if ring.n(a, k, e) == 0 {
                                                continue;
                                            }
                                            let r = self.pentagon_residual([a, b, c, d, e], f, g, l, k);
                                            if r > worst {
                                                worst = r;
                                                at = Some(format!(
                                                    "pentagon (a,b,c,d;e)=({},{},{},{};{}) f={} g={} l={} k={}",
                                                    ring.name(a),
                                                    ring.name(b),
                                                    ring.name(c),
                                                    ring.name(d),
                                                    ring.name(e),
                                                    ring.name(f),
                                                    ring.name(g),
                                                    ring.name(l),
                                                    ring.name(k)
                                                ));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        (worst, at)
    }

    fn pentagon_residual(&self, [a, b, c, d, e]: [usize; 5], f: usize, g: usize, l: usize, k: usize) -> f64 {
        let ring = &self.ring;
        let mut worst: f64 = 0.0;
        for alpha in 0..ring.n(a, b, f) {
            for beta in 0..ring.n(f, c, g) {
                for gamma in 0..ring.n(g, d, e) {
                    for delta in 0..ring.n(c, d, l) {
                        for lambda in 0..ring.n(b, l, k) {
                            for mu in 0..ring.n(a, k, e) {
                                let mut lhs = C64::default();
                                for nu in 0..ring.n(f, l, e) {
                                    lhs += self.f_entry([f, c, d, e], (g, beta, gamma), (l, delta, nu))
                                        * self.f_entry([a, b, l, e], (f, alpha, nu), (k, lambda, mu));
                                }
                                let mut rhs = C64::default();
                                for h in ring.channels(b, c) {
                                    for sigma in 0..ring.n(b, c, h) {
                                        for psi in 0..ring.n(a, h, g) {
                                            let f1 = self.f_entry([a, b, c, g], (f, alpha, beta), (h, sigma, psi));
                                            if f1 == C64::default() {
                                                continue;
                                            }
                                            for rho in 0..ring.n(h, d, k) {
                                                rhs += f1
                                                    * self.f_entry([a, h, d, e], (g, psi, gamma), (k, rho, mu))
                                                    * self.f_entry([b, c, d, k], (h, sigma, rho), (l, delta, lambda));
                                            }
                                        }
                                    }
                                }
                                worst = worst.max((lhs - rhs).norm());
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// Maximum residual over both hexagon families (braiding and reverse
    /// braiding).
    pub fn verify_hexagon(&self) -> (f64, Option<String>) {
        let mut worst = 0.0;
        let mut at = None;
        for reverse in [false, true] {
            let (r, loc) = self.hexagon_family(reverse);
            if r > worst {
                worst = r;
                at = loc;
            }
        }
        (worst, at)
    }

    fn hexagon_family(&self, reverse: bool) -> (f64, Option<String>) {
        let rank = self.rank();
        let ring = &self.ring;
        let rr = |abc: [usize; 3], mu: usize, nu: usize| {
            if reverse {
                self.r_rev_entry(abc, mu, nu)
            } else {
                self.r_entry(abc, mu, nu)
            }
        };
        let mut worst = 0.0;
        let mut at = None;
        for a in 0..rank {
            for b in 0..rank {
                for c in 0..rank {
                    for d in 0..rank {
                        for e in ring.channels(a, b) {
                            if ring.n(e, c, d) == 0 {
                                continue;
                            }
                            for g in ring.channels(b, c) {
                                if ring.n(g, a, d) == 0 {
                                    continue;
                                }
                                for alpha in 0..ring.n(a, b, e) {
                                    for beta in 0..ring.n(e, c, d) {
                                        for gamma in 0..ring.n(b, c, g) {
                                            for delta_out in 0..ring.n(g, a, d) {
                                                let mut lhs = C64::default();
                                                for delta in 0..ring.n(a, g, d) {
                                                    lhs += self.f_entry([a, b, c, d], (e, alpha, beta), (g, gamma, delta))
                                                        * rr([a, g, d], delta, delta_out);
                                                }
                                                let mut rhs = C64::default();
                                                for alpha2 in 0..ring.n(b, a, e) {
                                                    let r1 = rr([a, b, e], alpha, alpha2);
                                                    if r1 == C64::default() {
                                                        continue;
                                                    }
                                                    for h in ring.channels(a, c) {
                                                        for kappa in 0..ring.n(a, c, h) {
                                                            for lam in 0..ring.n(b, h, d) {
                                                                let f1 = self.f_entry([b, a, c, d], (e, alpha2, beta), (h, kappa, lam));
                                                                if f1 == C64::default() {
                                                                    continue;
                                                                }
                                                                for kappa2 in 0..ring.n(c, a, h) {
                                                                    rhs += r1
                                                                        * f1
                                                                        * rr([a, c, h], kappa, kappa2)
                                                                        * self.f_inv_entry(
                                                                            [b, c, a, d],
                                                                            (h, kappa2, lam),
                                                                            (g, gamma, delta_out),
                                                                        );
                                                                }
                                                            }
                                                        }
                                                    }
                                                }
                                                let res = (lhs - rhs).norm();
                                                if res > worst {
                                                    worst = res;
                                                    at = Some(format!(
                                                        "{} (a,b,c;d)=({},{},{};{}) e={} g={}",
                                                        if reverse { "reverse hexagon" } else { "hexagon" },
                                                        ring.name(a),
                                                        ring.name(b),
                                                        ring.name(c),
                                                        ring.name(d),
                                                        ring.name(e),
                                                        ring.name(g)
                                                    ));
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        (worst, at)
    }

    /// F-symbols with a unit index and R-symbols with a unit index must be
    /// trivial; the tree basis relies on it.
    pub fn unit_residual(&self) -> f64 {
        let rank = self.rank();
        let mut worst: f64 = 0.0;
        for a in 0..rank {
            for b in 0..rank {
                for c in 0..rank {
                    for d in 0..rank {
                        if !(a == 0 || b == 0 || c == 0) {
                            continue;
                        }
                        if let Some(blk) = self.f_block(a, b, c, d) {
                            let n = blk.rows.len();
                            // with a unit leg the row and column labels pair up in order
                            let id = DMatrix::<C64>::identity(n, n);
                            worst = worst.max((&blk.mat - id).camax());
                        }
                    }
                }
            }
            for c in 0..rank {
                for (x, y) in [(0, a), (a, 0)] {
                    if let Some(m) = self.r_block(x, y, c) {
                        let n = m.nrows();
                        worst = worst.max((m - DMatrix::<C64>::identity(n, n)).camax());
                    }
                }
            }
        }
        worst
    }

    /// `max ||R^{ab}_c R^{ba}_c - θ_c/(θ_a θ_b) 1||`.
    pub fn ribbon_residual(&self) -> f64 {
        let rank = self.rank();
        let mut worst: f64 = 0.0;
        for a in 0..rank {
            for b in 0..rank {
                for c in self.ring.channels(a, b) {
                    let (Some(rab), Some(rba)) = (self.r_block(a, b, c), self.r_block(b, a, c)) else {
                        continue;
                    };
                    let n = rab.nrows();
                    let target = DMatrix::<C64>::identity(n, n) * (self.theta[c] / (self.theta[a] * self.theta[b]));
                    worst = worst.max((rab * rba - target).camax());
                }
            }
        }
        worst
    }

    /// `θ_0 = 1`, `d_0 = 1`, `|θ_i| = 1`, `d_i = d_{dual(i)}`.
    pub fn dims_residual(&self) -> f64 {
        let mut worst: f64 = (self.theta[0] - C64::new(1.0, 0.0)).norm();
        worst = worst.max((self.qdim[0] - 1.0).abs());
        for i in 0..self.rank() {
            worst = worst.max((self.theta[i].norm() - 1.0).abs());
            worst = worst.max((self.qdim[i] - self.qdim[self.dual(i)]).abs());
        }
        worst
    }

    /// Gauge-invariant consistency of the declared dimensions with the
    /// F-symbols: `d_i² [F^{i ī i}_i]_{00} [F^{i ī i}_i]^{-1}_{00} = 1`.
    pub fn sphericality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rank() {
            let ib = self.dual(i);
            let f = self.f_entry([i, ib, i, i], (0, 0, 0), (0, 0, 0));
            let finv = self.f_inv_entry([i, ib, i, i], (0, 0, 0), (0, 0, 0));
            let d = self.qdim[i];
            worst = worst.max((f * finv * d * d - C64::new(1.0, 0.0)).norm());
        }
        worst
    }

    /// Runs every coherence check.
    pub fn verify(&self) -> CoherenceReport {
        let (pentagon, pentagon_worst) = self.verify_pentagon();
        let (hexagon, hexagon_worst) = self.verify_hexagon();
        CoherenceReport {
            pentagon,
            pentagon_worst,
            hexagon,
            hexagon_worst,
            unit: self.unit_residual(),
            ribbon: self.ribbon_residual(),
            dims: self.dims_residual(),
            sphericality: self.sphericality_residual(),
            ring: self.ring.verify(),
        }
    }

    /// `s̃_{ij} = Σ_k N_{ī j}^k θ_k/(θ_i θ_j) d_k`, with a nondegeneracy gate.
    pub fn s_matrix(&self) -> Result<SMatrix> {
        let s = self.s_matrix_unchecked();
        let n = self.rank();
        let det = s.entries.clone().determinant().norm();
        let threshold = self.tolerance * s.global_dim().powi(n as i32);
        if det <= threshold {
            return Err(FrobError::NondegeneracyFailure { det, threshold });
        }
        Ok(s)
    }

    pub fn s_matrix_unchecked(&self) -> SMatrix {
        let n = self.rank();
        let entries = DMatrix::from_fn(n, n, |i, j| {
            let ib = self.dual(i);
            let mut acc = C64::default();
            for k in 0..n {
                let nk = self.n(ib, j, k);
                if nk > 0 {
                    acc += self.theta[k] / (self.theta[i] * self.theta[j]) * (nk as f64 * self.qdim[k]);
                }
            }
            acc
        });
        SMatrix { entries, global_dim_sq: self.global_dim_sq() }
    }

    /// Recovers fusion coefficients from S through the Verlinde formula and
    /// compares them with the stored ring.
    pub fn verlinde_check(&self, s: &SMatrix) -> ValidationReport {
        let n = self.rank();
        let su = s.unitary();
        let mut report = ValidationReport::default();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = C64::default();
                    for m in 0..n {
                        acc += su[(i, m)] * su[(j, m)] * su[(k, m)].conj() / su[(0, m)];
                    }
                    let stored = self.n(i, j, k) as f64;
                    if (acc.re - stored).abs() > 0.5 {
                        report.push(format!(
                            "Verlinde N_({},{})^{} = {:.6} but table has {}",
                            self.ring.name(i),
                            self.ring.name(j),
                            self.ring.name(k),
                            acc.re,
                            stored
                        ));
                    } else if (acc - C64::new(acc.re.round(), 0.0)).norm() > self.tolerance.max(1e-9) {
                        report.push(format!(
                            "Verlinde N_({},{})^{} = {} is not integral",
                            self.ring.name(i),
                            self.ring.name(j),
                            self.ring.name(k),
                            acc
                        ));
                    }
                }
            }
        }
        report
    }

    /// Modular-group relations and Perron-Frobenius consistency of `d_i`.
    pub fn modular_check(&self, s: &SMatrix) -> ModularReport {
        let n = self.rank();
        let su = s.unitary();
        let t = DMatrix::from_fn(n, n, |i, j| if i == j { self.theta[i] } else { C64::default() });
        let st = &su * &t;
        let st3 = &st * &st * &st;
        let s2 = &su * &su;
        let st_cubed = min_over_phase(&st3, &s2);
        let c = DMatrix::from_fn(n, n, |i, j| {
            if i == self.dual(j) {
                C64::new(1.0, 0.0)
            } else {
                C64::default()
            }
        });
        let s_squared = min_over_phase(&s2, &c);
        let perron_frobenius = (0..n)
            .map(|i| (self.qdim[i] - self.ring.perron_frobenius(i)).abs())
            .fold(0.0, f64::max);
        ModularReport { st_cubed, s_squared, perron_frobenius }
    }
}

/// `||a - λ b||∞` for the unit-modulus `λ` that best aligns `a` with `b`.
pub(crate) fn min_over_phase(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let inner: C64 = a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum();
    let lambda = if inner.norm() > 0.0 { inner / inner.norm() } else { C64::new(1.0, 0.0) };
    (a - b * lambda).camax()
}

fn idx4(r: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * r + b) * r + c) * r + d
}

fn idx3(r: usize, a: usize, b: usize, c: usize) -> usize {
    (a * r + b) * r + c
}

/// Row labels of `F^{abc}_d`: `(e, α: e->ab, β: d->ec)`.
pub fn f_row_labels(ring: &FusionRing, a: usize, b: usize, c: usize, d: usize) -> Vec<FIndex> {
    let mut out = Vec::new();
    for e in ring.channels(a, b) {
        for alpha in 0..ring.n(a, b, e) {
            for beta in 0..ring.n(e, c, d) {
                out.push((e, alpha, beta));
            }
        }
    }
    out
}

/// Column labels of `F^{abc}_d`: `(f, γ: f->bc, δ: d->af)`.
pub fn f_col_labels(ring: &FusionRing, a: usize, b: usize, c: usize, d: usize) -> Vec<FIndex> {
    let mut out = Vec::new();
    for f in ring.channels(b, c) {
        for gamma in 0..ring.n(b, c, f) {
            for delta in 0..ring.n(a, f, d) {
                out.push((f, gamma, delta));
            }
        }
    }
    out
}
