//! Grothendieck-level data: labels, fusion coefficients and duality.
//!
//! Labels are dense indices `0..rank`, with `0` the tensor unit. Names are
//! carried for display only.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{FrobError, Result};

/// A simple object of the ambient category, by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub index: usize,
    pub display_name: String,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_name)
    }
}

/// List of violated identities; empty when everything checks out.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusionRing {
    names: Vec<String>,
    // n[(i * rank + j) * rank + k] = N_{ij}^k
    n: Vec<u8>,
    dual: Vec<usize>,
}

impl FusionRing {
    /// Builds a ring from sparse `(i, j, k, N)` triples. Coefficients above 255
    /// are rejected.
    pub fn from_triples(
        names: Vec<String>,
        triples: &[(usize, usize, usize, u32)],
        dual: Vec<usize>,
    ) -> Result<Self> {
        let rank = names.len();
        if rank == 0 {
            return Err(FrobError::MalformedTable("empty label set".into()));
        }
        if dual.len() != rank {
            return Err(FrobError::MalformedTable(format!(
                "dual map has {} entries for {} labels",
                dual.len(),
                rank
            )));
        }
        if let Some(&d) = dual.iter().find(|&&d| d >= rank) {
            return Err(FrobError::MalformedTable(format!("dual label {d} out of range")));
        }
        let mut n = vec![0u8; rank * rank * rank];
        for &(i, j, k, v) in triples {
            if i >= rank || j >= rank || k >= rank {
                return Err(FrobError::MalformedTable(format!(
                    "fusion entry ({i},{j},{k}) out of range"
                )));
            }
            let v = u8::try_from(v).map_err(|_| {
                FrobError::MalformedTable(format!("fusion coefficient N_{{{i}{j}}}^{k} = {v} overflows"))
            })?;
            n[(i * rank + j) * rank + k] = v;
        }
        Ok(FusionRing { names, n, dual })
    }

    /// Builds a ring from a dense `rank x rank x rank` table.
    pub fn from_table(names: Vec<String>, table: &[Vec<Vec<u32>>], dual: Vec<usize>) -> Result<Self> {
        let rank = names.len();
        if table.len() != rank || table.iter().any(|r| r.len() != rank || r.iter().any(|c| c.len() != rank)) {
            return Err(FrobError::MalformedTable(format!(
                "fusion table is not {rank}x{rank}x{rank}"
            )));
        }
        let mut triples = Vec::new();
        for (i, row) in table.iter().enumerate() {
            for (j, col) in row.iter().enumerate() {
                for (k, &v) in col.iter().enumerate() {
                    if v != 0 {
                        triples.push((i, j, k, v));
                    }
                }
            }
        }
        Self::from_triples(names, &triples, dual)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn n(&self, i: usize, j: usize, k: usize) -> usize {
        let r = self.rank();
        self.n[(i * r + j) * r + k] as usize
    }

    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn label(&self, i: usize) -> Label {
        Label { index: i, display_name: self.names[i].clone() }
    }

    pub fn label_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Channels `k` with `N_{ij}^k > 0`, ascending.
    pub fn channels(&self, i: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rank()).filter(move |&k| self.n(i, j, k) > 0)
    }

    /// Nonzero `(i, j, k, N)` entries in lexicographic order.
    pub fn triples(&self) -> Vec<(usize, usize, usize, u32)> {
        let r = self.rank();
        let mut out = Vec::new();
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let v = self.n(i, j, k);
                    if v > 0 {
                        out.push((i, j, k, v as u32));
                    }
                }
            }
        }
        out
    }

    /// `(N_i)_{jk} = N_{ij}^k`.
    pub fn fusion_matrix(&self, i: usize) -> DMatrix<f64> {
        let r = self.rank();
        DMatrix::from_fn(r, r, |j, k| self.n(i, j, k) as f64)
    }

    /// Largest eigenvalue of `N_i`, by power iteration on `N_i + 1`.
    pub fn perron_frobenius(&self, i: usize) -> f64 {
        let r = self.rank();
        let m = self.fusion_matrix(i).transpose() + DMatrix::<f64>::identity(r, r);
        let mut v = nalgebra::DVector::from_element(r, 1.0);
        let mut lambda = 0.0;
        for _ in 0..2000 {
            let w = &m * &v;
            let norm = w.norm();
            if norm == 0.0 {
                return 0.0;
            }
            let next = w / norm;
            lambda = (&m * &next).dot(&next);
            if (&next - &v).norm() < 1e-15 {
                break;
            }
            v = next;
        }
        lambda - 1.0
    }

    /// Checks associativity, the unit axioms and rigidity in exact integer
    /// arithmetic.
    pub fn verify(&self) -> ValidationReport {
        let r = self.rank();
        let mut report = ValidationReport::default();
        for j in 0..r {
            for k in 0..r {
                let d = usize::from(j == k);
                if self.n(0, j, k) != d || self.n(j, 0, k) != d {
                    report.push(format!(
                        "unit: N_(0,{j})^{k} = {}, N_({j},0)^{k} = {}, expected {d}",
                        self.n(0, j, k),
                        self.n(j, 0, k)
                    ));
                }
            }
        }
        for i in 0..r {
            let di = self.dual[i];
            if self.dual[di] != i {
                report.push(format!("rigidity: dual(dual({i})) = {} != {i}", self.dual[di]));
            }
            for j in 0..r {
                let expected = usize::from(j == di);
                if self.n(i, j, 0) != expected {
                    report.push(format!(
                        "rigidity: N_({i},{j})^0 = {} but dual({i}) = {di}",
                        self.n(i, j, 0)
                    ));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let lhs: usize = (0..r).map(|m| self.n(i, j, m) * self.n(m, k, l)).sum();
                        let rhs: usize = (0..r).map(|m| self.n(j, k, m) * self.n(i, m, l)).sum();
                        if lhs != rhs {
                            report.push(format!(
                                "associativity at ({},{},{},{}): {lhs} != {rhs}",
                                self.names[i], self.names[j], self.names[k], self.names[l]
                            ));
                        }
                    }
                }
            }
        }
        report
    }

    pub fn is_commutative(&self) -> bool {
        let r = self.rank();
        (0..r).all(|i| (0..r).all(|j| (0..r).all(|k| self.n(i, j, k) == self.n(j, i, k))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn fibonacci() -> FusionRing {
        FusionRing::from_triples(
            names(&["1", "tau"]),
            &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 1)],
            vec![0, 1],
        )
        .unwrap()
    }

    fn ising(tamper: Option<(usize, usize, usize)>) -> FusionRing {
        let mut t = vec![
            (0, 0, 0, 1),
            (0, 1, 1, 1),
            (0, 2, 2, 1),
            (1, 0, 1, 1),
            (2, 0, 2, 1),
            (1, 1, 0, 1),
            (1, 1, 2, 1),
            (1, 2, 1, 1),
            (2, 1, 1, 1),
            (2, 2, 0, 1),
        ];
        if let Some((i, j, k)) = tamper {
            t.push((i, j, k, 1));
        }
        FusionRing::from_triples(names(&["1", "sigma", "psi"]), &t, vec![0, 1, 2]).unwrap()
    }

    #[test]
    fn trivial_ring_is_valid() {
        let r = FusionRing::from_triples(names(&["1"]), &[(0, 0, 0, 1)], vec![0]).unwrap();
        assert!(r.verify().is_valid());
        assert_eq!(r.dual(0), 0);
    }

    #[test]
    fn fibonacci_is_valid() {
        let r = fibonacci();
        assert!(r.verify().is_valid(), "{:?}", r.verify());
        assert_eq!(r.dual(1), 1);
        assert!((r.perron_frobenius(1) - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn tampered_ising_reports_associativity() {
        assert!(ising(None).verify().is_valid());
        // σ⊗ψ = σ ⊕ ψ breaks ((σσ)σ) against (σ(σσ)) in channel ψ
        let rep = ising(Some((1, 2, 2))).verify();
        assert!(!rep.is_valid());
        assert!(rep
            .violations
            .iter()
            .any(|v| v.starts_with("associativity at (sigma,sigma,sigma,psi)")));
    }

    #[test]
    fn sigma_in_sigma_sigma_gives_rep_s3() {
        // σ⊗σ = 1 ⊕ ψ ⊕ σ is the fusion ring of Rep(S_3), which is associative
        assert!(ising(Some((1, 1, 1))).verify().is_valid());
    }

    #[test]
    fn z3_duals() {
        let mut t = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                t.push((a, b, (a + b) % 3, 1));
            }
        }
        let r = FusionRing::from_triples(names(&["0", "1", "2"]), &t, vec![0, 2, 1]).unwrap();
        assert!(r.verify().is_valid());
        assert_eq!(r.dual(1), 2);
    }

    #[test]
    fn overflow_and_shape_errors() {
        let e = FusionRing::from_triples(names(&["1"]), &[(0, 0, 0, 300)], vec![0]);
        assert!(matches!(e, Err(FrobError::MalformedTable(_))));
        let e = FusionRing::from_table(names(&["1", "x"]), &[vec![vec![1]]], vec![0, 1]);
        assert!(matches!(e, Err(FrobError::MalformedTable(_))));
    }

    #[test]
    fn wrong_dual_is_reported() {
        let r = FusionRing::from_triples(
            names(&["1", "tau"]),
            &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 1)],
            vec![0, 0],
        )
        .unwrap();
        assert!(r.verify().violations.iter().any(|v| v.starts_with("rigidity")));
    }
}
