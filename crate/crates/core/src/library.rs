//! Bundled chiral data.
//!
//! Each constructor returns a category in a unitary gauge with trivial
//! unit vertices. The files under `data/` are the serialized form of these
//! constructors and are regenerated with `frobcat export`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64 as C64;

use crate::category::{phase, FIndex, SkeletalCategory};
use crate::error::Result;
use crate::fusion_ring::FusionRing;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Names of every bundled category, in a stable order.
pub const BUNDLED: [&str; 7] = ["trivial", "semion", "z3", "fibonacci", "ising", "toric_code", "su2_4"];

pub fn by_name(name: &str) -> Option<SkeletalCategory> {
    let cat = match name {
        "trivial" => trivial(),
        "semion" | "z2" => semion(),
        "z3" => z3(),
        "fibonacci" => fibonacci(),
        "ising" => ising(),
        "toric_code" => toric_code(),
        "su2_4" => su2_level(4),
        _ => return None,
    };
    Some(cat.expect("bundled data is well-formed"))
}

pub fn all() -> Vec<SkeletalCategory> {
    BUNDLED.iter().map(|n| by_name(n).unwrap()).collect()
}

/// Pointed category on a finite abelian group, given its multiplication,
/// 3-cocycle `ω(a,b,c)` (the F-symbol), R-symbols and twists.
pub fn pointed(
    name: &str,
    labels: Vec<String>,
    mul: impl Fn(usize, usize) -> usize,
    omega: impl Fn(usize, usize, usize) -> C64,
    r: impl Fn(usize, usize) -> C64,
    theta: Vec<C64>,
) -> Result<SkeletalCategory> {
    let n = labels.len();
    let mut triples = Vec::new();
    let mut dual = vec![0; n];
    for a in 0..n {
        for b in 0..n {
            let c = mul(a, b);
            triples.push((a, b, c, 1));
            if c == 0 {
                dual[a] = b;
            }
        }
    }
    let ring = FusionRing::from_triples(labels, &triples, dual)?;
    SkeletalCategory::from_fn(
        name,
        ring,
        |[a, b, c, _], _, _| omega(a, b, c),
        |[a, b, _], _, _| r(a, b),
        theta,
        vec![1.0; n],
    )
}

pub fn trivial() -> Result<SkeletalCategory> {
    pointed("trivial", names(&["1"]), |_, _| 0, |_, _, _| one(), |_, _| one(), vec![one()])
}

/// The semion theory: `Z_2` with nontrivial cocycle and `θ = i`.
pub fn semion() -> Result<SkeletalCategory> {
    pointed(
        "semion",
        names(&["1", "s"]),
        |a, b| (a + b) % 2,
        |a, b, c| if a == 1 && b == 1 && c == 1 { -one() } else { one() },
        |a, b| if a == 1 && b == 1 { C64::new(0.0, 1.0) } else { one() },
        vec![one(), C64::new(0.0, 1.0)],
    )
}

/// `Z_3` anyons with `θ_a = exp(2πi a²/3)`.
pub fn z3() -> Result<SkeletalCategory> {
    pointed(
        "z3",
        names(&["0", "1", "2"]),
        |a, b| (a + b) % 3,
        |_, _, _| one(),
        |a, b| phase((a * b) as f64 / 3.0),
        (0..3).map(|a| phase((a * a) as f64 / 3.0)).collect(),
    )
}

/// The toric code `D(Z_2)` with labels `1, e, m, f`.
pub fn toric_code() -> Result<SkeletalCategory> {
    // label bits: e = (1,0), m = (0,1), f = (1,1)
    let bits = |a: usize| (a & 1, a >> 1);
    pointed(
        "toric_code",
        names(&["1", "e", "m", "f"]),
        |a, b| a ^ b,
        |_, _, _| one(),
        move |a, b| {
            let (_, a2) = bits(a);
            let (b1, _) = bits(b);
            if a2 * b1 == 1 {
                -one()
            } else {
                one()
            }
        },
        (0..4).map(|a| if a == 3 { -one() } else { one() }).collect(),
    )
}

pub fn fibonacci() -> Result<SkeletalCategory> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let ring = FusionRing::from_triples(
        names(&["1", "tau"]),
        &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 1)],
        vec![0, 1],
    )?;
    SkeletalCategory::from_fn(
        "fibonacci",
        ring,
        move |abcd, (e, _, _), (f, _, _)| {
            if abcd == [1, 1, 1, 1] {
                let v = match (e, f) {
                    (0, 0) => 1.0 / phi,
                    (1, 1) => -1.0 / phi,
                    _ => phi.powf(-0.5),
                };
                C64::new(v, 0.0)
            } else {
                one()
            }
        },
        |[a, b, c], _, _| match (a, b, c) {
            (1, 1, 0) => phase(-2.0 / 5.0),
            (1, 1, 1) => phase(3.0 / 10.0),
            _ => one(),
        },
        vec![one(), phase(2.0 / 5.0)],
        vec![1.0, phi],
    )
}

/// Ising with labels `1, sigma, psi`.
pub fn ising() -> Result<SkeletalCategory> {
    let ring = FusionRing::from_triples(
        names(&["1", "sigma", "psi"]),
        &[
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
        ],
        vec![0, 1, 2],
    )?;
    SkeletalCategory::from_fn(
        "ising",
        ring,
        |abcd, (e, _, _), (f, _, _)| match abcd {
            [1, 1, 1, 1] => {
                if e == 2 && f == 2 {
                    C64::new(-FRAC_1_SQRT_2, 0.0)
                } else {
                    C64::new(FRAC_1_SQRT_2, 0.0)
                }
            }
            [1, 2, 1, 2] | [2, 1, 2, 1] => -one(),
            _ => one(),
        },
        |[a, b, c], _, _| match (a, b, c) {
            (1, 1, 0) => phase(-1.0 / 16.0),
            (1, 1, 2) => phase(3.0 / 16.0),
            (1, 2, 1) | (2, 1, 1) => C64::new(0.0, -1.0),
            (2, 2, 0) => -one(),
            _ => one(),
        },
        vec![one(), phase(1.0 / 16.0), -one()],
        vec![1.0, SQRT_2, 1.0],
    )
}

/// `su(2)_k` at `q = exp(2πi/(k+2))`, labels are twice the spin.
///
/// F-symbols come from the q-deformed Racah formula in the unitary gauge,
/// `R^{ab}_c = (-1)^{c-a-b} q^{(c(c+1) - a(a+1) - b(b+1))/2}` in spin units.
pub fn su2_level(k: usize) -> Result<SkeletalCategory> {
    let n = k + 1;
    let admissible = |a: usize, b: usize, c: usize| {
        (a + b + c).is_multiple_of(2) && c <= a + b && a <= b + c && b <= a + c && a + b + c <= 2 * k
    };
    let mut triples = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if admissible(a, b, c) {
                    triples.push((a, b, c, 1));
                }
            }
        }
    }
    let labels: Vec<String> = (0..n).map(|a| a.to_string()).collect();
    let ring = FusionRing::from_triples(labels, &triples, (0..n).collect())?;
    let qn = QNumbers::new(k);
    let qdim: Vec<f64> = (0..n).map(|a| qn.num(a as i64 + 1)).collect();
    let theta: Vec<C64> = (0..n)
        .map(|a| phase((a * (a + 2)) as f64 / (4.0 * (k + 2) as f64)))
        .collect();
    SkeletalCategory::from_fn(
        format!("su2_{k}"),
        ring,
        |[a, b, c, d], (e, _, _), (f, _, _): FIndex| {
            let sign = if ((a + b + c + d) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let norm = (qn.num(e as i64 + 1) * qn.num(f as i64 + 1)).sqrt();
            C64::new(sign * norm * qn.six_j([a, b, e, c, d, f]), 0.0)
        },
        |[a, b, c], _, _| {
            let sign = if ((a + b - c) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let casimir = |x: usize| (x * (x + 2)) as f64;
            let ex = (casimir(c) - casimir(a) - casimir(b)) / (8.0 * (k + 2) as f64);
            phase(ex) * sign
        },
        theta,
        qdim,
    )
}

/// q-integers `[n] = sin(nπ/(k+2)) / sin(π/(k+2))` and the quantum 6j symbol.
struct QNumbers {
    k: usize,
}

impl QNumbers {
    fn new(k: usize) -> Self {
        QNumbers { k }
    }

    fn num(&self, n: i64) -> f64 {
        let h = std::f64::consts::PI / (self.k + 2) as f64;
        (n as f64 * h).sin() / h.sin()
    }

    fn fact(&self, n: i64) -> f64 {
        (1..=n).map(|m| self.num(m)).product()
    }

    // doubled-spin arguments
    fn delta(&self, a: usize, b: usize, c: usize) -> f64 {
        let (a, b, c) = (a as i64, b as i64, c as i64);
        (self.fact((a + b - c) / 2) * self.fact((a - b + c) / 2) * self.fact((-a + b + c) / 2)
            / self.fact((a + b + c) / 2 + 1))
            .sqrt()
    }

    /// `{j1 j2 j12; j3 j j23}_q` with doubled-spin arguments.
    fn six_j(&self, [j1, j2, j12, j3, j, j23]: [usize; 6]) -> f64 {
        let pre = self.delta(j1, j2, j12) * self.delta(j12, j3, j) * self.delta(j2, j3, j23) * self.delta(j1, j23, j);
        let t = |x: usize, y: usize, z: usize| ((x + y + z) / 2) as i64;
        let lows = [t(j1, j2, j12), t(j12, j3, j), t(j2, j3, j23), t(j1, j23, j)];
        let highs = [
            ((j1 + j2 + j3 + j) / 2) as i64,
            ((j1 + j12 + j3 + j23) / 2) as i64,
            ((j2 + j12 + j + j23) / 2) as i64,
        ];
        let zmin = *lows.iter().max().unwrap();
        let zmax = *highs.iter().min().unwrap();
        let mut sum = 0.0;
        for z in zmin..=zmax {
            let mut den = 1.0;
            for l in lows {
                den *= self.fact(z - l);
            }
            for h in highs {
                den *= self.fact(h - z);
            }
            let sign = if z % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * self.fact(z + 1) / den;
        }
        pre * sum
    }
}
