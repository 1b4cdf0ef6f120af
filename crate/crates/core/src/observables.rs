//! Torus, defect and annulus coefficients, each an integer obtained from the
//! trace of an averaging projector, plus the consistency certificates.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::SkeletalCategory;
use crate::diagram::Engine;
use crate::error::Result;
use crate::frobenius::FrobeniusAlgebra;
use crate::fusion_ring::FusionRing;
use crate::rep::{
    bimodule_hom_projector, dress_bimodule, list_simple_bimodules, list_simple_modules, module_hom_projector,
    module_times_label, regular_bimodule, tensor_over_a, Bimodule, HomProjector,
};

/// Which label sits to the right of a dressed bimodule for the column `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RightLabel {
    Same,
    Dual,
}

/// Fixed so that the unit algebra yields charge conjugation on every
/// bundled category; `Dual` gives the identity matrix in Z₃ instead.
pub const J_STAR: RightLabel = RightLabel::Same;

fn right_label(cat: &SkeletalCategory, conv: RightLabel, j: usize) -> usize {
    match conv {
        RightLabel::Same => j,
        RightLabel::Dual => cat.dual(j),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TableKind {
    Torus,
    Defect { left: String, right: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionTable {
    pub algebra: String,
    pub kind: TableKind,
    pub z: Vec<Vec<usize>>,
    /// Worst projector idempotency residual and worst distance of a trace
    /// from its integer, over all cells.
    pub residuals: BTreeMap<String, f64>,
}

impl PartitionTable {
    pub fn rank(&self) -> usize {
        self.z.len()
    }

    /// Relabels rows and columns: entry `(p(i), p(j))` of the result is
    /// entry `(i, j)` of `self`.
    pub fn permuted(&self, p: &[usize]) -> Vec<Vec<usize>> {
        let n = self.rank();
        let mut out = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                out[p[i]][p[j]] = self.z[i][j];
            }
        }
        out
    }
}

/// One named check with its measured value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub certificates: Vec<Certificate>,
}

impl CertificateReport {
    fn push(&mut self, name: &str, value: f64, threshold: f64, violations: Vec<String>) {
        let passed = value <= threshold && violations.is_empty();
        self.certificates.push(Certificate { name: name.into(), value, threshold, passed, violations });
    }

    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.name == name)
    }
}

struct Tally {
    idempotency: f64,
    integrality: f64,
}

fn cell(p: &HomProjector) -> Result<(usize, f64, f64)> {
    let d = p.dim()?;
    let t = p.trace();
    Ok((d, p.idempotency_residual(), (t - C64::new(d as f64, 0.0)).norm()))
}

fn collect(cells: Vec<Result<(usize, f64, f64)>>, n: usize) -> Result<(Vec<Vec<usize>>, Tally)> {
    let mut z = vec![vec![0; n]; n];
    let mut tally = Tally { idempotency: 0.0, integrality: 0.0 };
    for (k, c) in cells.into_iter().enumerate() {
        let (d, idem, int) = c?;
        z[k / n][k % n] = d;
        tally.idempotency = tally.idempotency.max(idem);
        tally.integrality = tally.integrality.max(int);
    }
    Ok((z, tally))
}

type Residuals = BTreeMap<String, f64>;

fn residual_map(t: &Tally) -> Residuals {
    BTreeMap::from([
        ("projector_idempotency".to_string(), t.idempotency),
        ("trace_integrality".to_string(), t.integrality),
    ])
}

/// `Z^{B|B'}_{ij} = dim Hom_{A|A}(U_i ⊗ B ⊗ U_{j*}, B')` with an explicit
/// convention for `j*`.
pub fn defect_table_with(
    eng: &Engine,
    alg: &FrobeniusAlgebra,
    b: &Bimodule,
    b2: &Bimodule,
    conv: RightLabel,
) -> Result<(Vec<Vec<usize>>, Residuals)> {
    let cat = eng.category();
    let n = cat.rank();
    let cells: Vec<_> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let dressed = dress_bimodule(eng, alg, alg, i, b, right_label(cat, conv, j))?;
            cell(&bimodule_hom_projector(eng, alg, alg, &dressed, b2)?)
        })
        .collect();
    let (z, tally) = collect(cells, n)?;
    Ok((z, residual_map(&tally)))
}

pub fn torus_partition_function(eng: &Engine, alg: &FrobeniusAlgebra) -> Result<PartitionTable> {
    let reg = regular_bimodule(alg);
    let (z, residuals) = defect_table_with(eng, alg, &reg, &reg, J_STAR)?;
    Ok(PartitionTable { algebra: alg.name.clone(), kind: TableKind::Torus, z, residuals })
}

pub fn defect_partition_function(
    eng: &Engine,
    alg: &FrobeniusAlgebra,
    (left, b): (&str, &Bimodule),
    (right, b2): (&str, &Bimodule),
) -> Result<PartitionTable> {
    let (z, residuals) = defect_table_with(eng, alg, b, b2, J_STAR)?;
    Ok(PartitionTable {
        algebra: alg.name.clone(),
        kind: TableKind::Defect { left: left.into(), right: right.into() },
        z,
        residuals,
    })
}

/// `||SZ - ZS||∞`, the twist-matching condition on nonzero entries, and
/// `Z_00 = 1` when `haploid` is set. For defect tables the twist condition
/// depends on conventions not fixed by the construction.
pub fn check_modular_invariance(cat: &SkeletalCategory, z: &[Vec<usize>], haploid: bool) -> Result<CertificateReport> {
    let n = cat.rank();
    let s = cat.s_matrix()?.unitary();
    let zm = DMatrix::from_fn(n, n, |i, j| C64::new(z[i][j] as f64, 0.0));
    let comm = (&s * &zm - &zm * &s).camax();
    let mut rep = CertificateReport::default();
    rep.push("s_commutator", comm, 1e-8, Vec::new());
    let eps = cat.tolerance.max(1e-12);
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if z[i][j] != 0 {
                let d = (cat.theta(i) - cat.theta(j)).norm();
                worst = worst.max(d);
                if d > eps {
                    bad.push(format!("Z[{},{}] = {} but θ differ by {d:.3e}", cat.ring().name(i), cat.ring().name(j), z[i][j]));
                }
            }
        }
    }
    rep.push("t_condition", worst, eps, bad);
    if haploid {
        let z00 = z.first().and_then(|r| r.first()).copied().unwrap_or(0);
        let v = if z00 == 1 { Vec::new() } else { vec![format!("Z[0,0] = {z00}")] };
        rep.push("vacuum", (z00 as f64 - 1.0).abs(), 0.0, v);
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusTensor {
    pub algebra: String,
    /// Underlying multiplicity vector of each simple module.
    pub modules: Vec<Vec<usize>>,
    /// `a[i][M][N] = dim Hom_A(M ⊗ U_i, N)`.
    pub a: Vec<Vec<Vec<usize>>>,
    pub residuals: BTreeMap<String, f64>,
}

pub fn annulus_coefficients(eng: &Engine, alg: &FrobeniusAlgebra) -> Result<AnnulusTensor> {
    let simples = list_simple_modules(eng, alg)?;
    let n = eng.category().rank();
    let k = simples.len();
    let mut a = Vec::with_capacity(n);
    let mut tally = Tally { idempotency: 0.0, integrality: 0.0 };
    for i in 0..n {
        let cells: Vec<_> = (0..k * k)
            .into_par_iter()
            .map(|c| {
                let mi = module_times_label(eng, &simples[c / k], i);
                cell(&module_hom_projector(eng, alg, &mi, &simples[c % k])?)
            })
            .collect();
        let (m, t) = collect(cells, k)?;
        tally.idempotency = tally.idempotency.max(t.idempotency);
        tally.integrality = tally.integrality.max(t.integrality);
        a.push(m);
    }
    Ok(AnnulusTensor {
        algebra: alg.name.clone(),
        modules: simples.iter().map(|m| m.multiplicities(eng)).collect(),
        a,
        residuals: residual_map(&tally),
    })
}

fn int_mul(x: &[Vec<usize>], y: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let k = x.len();
    (0..k).map(|r| (0..k).map(|c| (0..k).map(|m| x[r][m] * y[m][c]).sum()).collect()).collect()
}

/// `A_i A_j = Σ_k N_ij^k A_k` and `A_0 = id` in exact integer arithmetic.
pub fn check_nimrep(ring: &FusionRing, ann: &AnnulusTensor) -> CertificateReport {
    let n = ring.rank();
    let k = ann.modules.len();
    let mut worst = 0usize;
    let mut bad = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let lhs = int_mul(&ann.a[i], &ann.a[j]);
            let mut dev = 0usize;
            for r in 0..k {
                for c in 0..k {
                    let rhs: usize = (0..n).map(|l| ring.n(i, j, l) * ann.a[l][r][c]).sum();
                    dev = dev.max(lhs[r][c].abs_diff(rhs));
                }
            }
            if dev > 0 {
                bad.push(format!("({}, {}) deviates by {dev}", ring.name(i), ring.name(j)));
            }
            worst = worst.max(dev);
        }
    }
    let mut rep = CertificateReport::default();
    rep.push("nimrep", worst as f64, 0.0, bad);
    let mut unit_bad = Vec::new();
    for r in 0..k {
        for c in 0..k {
            if ann.a[0][r][c] != usize::from(r == c) {
                unit_bad.push(format!("A_0[{r},{c}] = {}", ann.a[0][r][c]));
            }
        }
    }
    rep.push("unit_is_identity", unit_bad.len() as f64, 0.0, unit_bad);
    rep
}

/// Simple `A`-`A` bimodules and the multiplicities of `X_c` in
/// `X_a ⊗_A X_b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectFusion {
    pub algebra: String,
    pub bimodules: Vec<Vec<usize>>,
    /// `table[a][b][c] = dim Hom_{A|A}(X_a ⊗_A X_b, X_c)`.
    pub table: Vec<Vec<Vec<usize>>>,
    pub residuals: BTreeMap<String, f64>,
}

pub fn defect_fusion(eng: &Engine, alg: &FrobeniusAlgebra) -> Result<(DefectFusion, Vec<Bimodule>)> {
    let simples = list_simple_bimodules(eng, alg, alg)?;
    let k = simples.len();
    let cells: Vec<_> = (0..k * k)
        .into_par_iter()
        .map(|ab| -> Result<Vec<(usize, f64, f64)>> {
            let prod = tensor_over_a(eng, alg, alg, alg, &simples[ab / k], &simples[ab % k])?;
            simples.iter().map(|x| cell(&bimodule_hom_projector(eng, alg, alg, &prod, x)?)).collect()
        })
        .collect();
    let mut table = vec![vec![vec![0; k]; k]; k];
    let mut tally = Tally { idempotency: 0.0, integrality: 0.0 };
    for (ab, row) in cells.into_iter().enumerate() {
        for (c, (d, idem, int)) in row?.into_iter().enumerate() {
            table[ab / k][ab % k][c] = d;
            tally.idempotency = tally.idempotency.max(idem);
            tally.integrality = tally.integrality.max(int);
        }
    }
    let fusion = DefectFusion {
        algebra: alg.name.clone(),
        bimodules: simples.iter().map(|b| b.multiplicities(eng)).collect(),
        table,
        residuals: residual_map(&tally),
    };
    Ok((fusion, simples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{cardy_algebra, simple_current_candidate};
    use crate::library;

    fn ones(_: usize, _: usize) -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn cardy_is_charge_conjugation_and_the_dual_convention_is_not() {
        let cat = library::z3().unwrap();
        let eng = Engine::new(&cat);
        let a = cardy_algebra(&eng);
        let z = torus_partition_function(&eng, &a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(z.z[i][j], usize::from(i == cat.dual(j)));
            }
        }
        let reg = regular_bimodule(&a);
        let (alt, _) = defect_table_with(&eng, &a, &reg, &reg, RightLabel::Dual).unwrap();
        assert_eq!(alt[1][1], 1);
        assert_eq!(alt[1][2], 0);
        assert!(check_modular_invariance(&cat, &z.z, true).unwrap().passed());
    }

    #[test]
    fn toric_torus_table() {
        let cat = library::toric_code().unwrap();
        let eng = Engine::new(&cat);
        let a = simple_current_candidate(&eng, &[0, 1], ones).unwrap();
        let z = torus_partition_function(&eng, &a).unwrap();
        let expect = vec![vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![0; 4], vec![0; 4]];
        assert_eq!(z.z, expect);
        assert!(z.residuals["projector_idempotency"] < 1e-8);
        assert!(check_modular_invariance(&cat, &z.z, true).unwrap().passed());
    }

    #[test]
    fn invariance_certificate_rejects_bad_tables() {
        let fib = library::fibonacci().unwrap();
        let rep = check_modular_invariance(&fib, &[vec![1, 1], vec![1, 1]], true).unwrap();
        assert!(!rep.get("t_condition").unwrap().passed);
        let su = library::su2_level(4).unwrap();
        let mut z = vec![vec![0; 5]; 5];
        for (i, j) in [(0, 0), (0, 4), (4, 0), (4, 4)] {
            z[i][j] = 1;
        }
        z[2][2] = 2;
        assert!(check_modular_invariance(&su, &z, true).unwrap().passed());
        z[2][2] = 1;
        assert!(check_modular_invariance(&su, &z, true).unwrap().get("s_commutator").unwrap().value >= 0.1);
    }

    #[test]
    fn annulus_for_unit_is_fusion() {
        let cat = library::ising().unwrap();
        let eng = Engine::new(&cat);
        let ann = annulus_coefficients(&eng, &cardy_algebra(&eng)).unwrap();
        let pos = |l: usize| ann.modules.iter().position(|m| m[l] == 1).unwrap();
        for i in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    assert_eq!(ann.a[i][pos(m)][pos(n)], cat.n(m, i, n));
                }
            }
        }
        assert!(check_nimrep(cat.ring(), &ann).passed());
    }

    #[test]
    fn toric_boundaries_are_exchanged_by_m() {
        let cat = library::toric_code().unwrap();
        let eng = Engine::new(&cat);
        let a = simple_current_candidate(&eng, &[0, 1], ones).unwrap();
        let ann = annulus_coefficients(&eng, &a).unwrap();
        assert_eq!(ann.modules.len(), 2);
        assert_eq!(ann.a[2], vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(ann.a[1], vec![vec![1, 0], vec![0, 1]]);
        assert!(check_nimrep(cat.ring(), &ann).passed());
        let mut bad = ann.clone();
        bad.a[2][0][0] = 1;
        let rep = check_nimrep(cat.ring(), &bad);
        let v = &rep.get("nimrep").unwrap().violations;
        assert!(v.iter().any(|s| s.starts_with("(m, m)")), "{v:?}");
    }

    #[test]
    fn defect_fusion_over_unit_is_the_fusion_ring() {
        let cat = library::fibonacci().unwrap();
        let eng = Engine::new(&cat);
        let a = cardy_algebra(&eng);
        let (fus, simples) = defect_fusion(&eng, &a).unwrap();
        let label = |k: usize| fus.bimodules[k].iter().position(|&x| x == 1).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    assert_eq!(fus.table[x][y][z], cat.n(label(x), label(y), label(z)));
                }
            }
        }
        let tau = (0..2).find(|&k| label(k) == 1).unwrap();
        let t = defect_partition_function(&eng, &a, ("tau", &simples[tau]), ("tau", &simples[tau])).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect: usize = (0..2).map(|k| cat.n(i, 1, k) * cat.n(k, cat.dual(j), 1)).sum();
                assert_eq!(t.z[i][j], expect);
            }
        }
    }
}
