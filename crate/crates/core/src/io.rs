//! Text formats for categories, algebras and morphisms.
//!
//! Complex numbers are written as `[re, im]` pairs. Morphisms are stored
//! block by block: for each charge `c` shared by domain and codomain, the
//! matrix from the fusion-tree basis of `Hom(c, dom)` to that of
//! `Hom(c, cod)`, row-major. Trees are left-nested and ordered
//! lexicographically by their `(channel, vertex)` sequence, word by word
//! in the order of the object's summands.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::category::{FEntry, REntry, SkeletalCategory, DEFAULT_TOLERANCE};
use crate::diagram::{Engine, Morphism, Object};
use crate::error::{FrobError, Result};
use crate::frobenius::{AlgebraObject, FrobeniusAlgebra, JandlStructure};
use crate::fusion_ring::FusionRing;
use crate::library;

/// Environment variable overriding the default verification tolerance.
pub const TOLERANCE_ENV: &str = "FROBCAT_TOLERANCE";

/// `FROBCAT_TOLERANCE` if set and parseable, else `fallback`.
pub fn tolerance_from_env(fallback: f64) -> Result<f64> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| FrobError::Parse(format!("{TOLERANCE_ENV}={s:?} is not a positive number"))),
        Err(_) => Ok(fallback),
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub name: String,
    #[serde(default)]
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FRecord {
    /// `[a, b, c, d]` of `F^{abc}_d`.
    pub abcd: [usize; 4],
    /// `(e, α, β)`.
    pub row: [usize; 3],
    /// `(f, γ, δ)`.
    pub col: [usize; 3],
    pub value: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RRecord {
    /// `[a, b, c]` of `R^{ab}_c`.
    pub abc: [usize; 3],
    pub mu: usize,
    pub nu: usize,
    pub value: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryFile {
    pub labels: Vec<String>,
    pub duals: Vec<usize>,
    pub qdims: Vec<f64>,
    pub thetas: Vec<[f64; 2]>,
    /// `[i, j, k, N_ij^k]`, nonzero entries only.
    pub fusion: Vec<[usize; 4]>,
    pub meta: Meta,
    #[serde(rename = "F")]
    pub f: Vec<FRecord>,
    #[serde(rename = "R")]
    pub r: Vec<RRecord>,
}

impl CategoryFile {
    pub fn from_category(cat: &SkeletalCategory) -> Self {
        let ring = cat.ring();
        CategoryFile {
            labels: ring.names().to_vec(),
            duals: ring.duals().to_vec(),
            qdims: cat.qdims().to_vec(),
            thetas: cat.thetas().iter().map(|&z| pair(z)).collect(),
            fusion: ring.triples().into_iter().map(|(i, j, k, n)| [i, j, k, n as usize]).collect(),
            meta: Meta {
                name: cat.name.clone(),
                source: cat.source.clone(),
                tolerance: (cat.tolerance != DEFAULT_TOLERANCE).then_some(cat.tolerance),
            },
            f: cat
                .f_entries()
                .into_iter()
                .map(|e| FRecord {
                    abcd: e.abcd,
                    row: [e.row.0, e.row.1, e.row.2],
                    col: [e.col.0, e.col.1, e.col.2],
                    value: pair(e.value),
                })
                .collect(),
            r: cat
                .r_entries()
                .into_iter()
                .map(|e| RRecord { abc: e.abc, mu: e.mu, nu: e.nu, value: pair(e.value) })
                .collect(),
        }
    }

    /// Builds the category; the tolerance is the file's override, else
    /// `default_tol`.
    pub fn to_category(&self, default_tol: f64) -> Result<SkeletalCategory> {
        let triples: Vec<_> = self
            .fusion
            .iter()
            .map(|&[i, j, k, n]| (i, j, k, u32::try_from(n).unwrap_or(u32::MAX)))
            .collect();
        let ring = FusionRing::from_triples(self.labels.clone(), &triples, self.duals.clone())?;
        let f: Vec<FEntry> = self
            .f
            .iter()
            .map(|e| FEntry {
                abcd: e.abcd,
                row: (e.row[0], e.row[1], e.row[2]),
                col: (e.col[0], e.col[1], e.col[2]),
                value: complex(e.value),
            })
            .collect();
        let r: Vec<REntry> =
            self.r.iter().map(|e| REntry { abc: e.abc, mu: e.mu, nu: e.nu, value: complex(e.value) }).collect();
        let mut cat = SkeletalCategory::new(
            self.meta.name.clone(),
            ring,
            &f,
            &r,
            self.thetas.iter().map(|&p| complex(p)).collect(),
            self.qdims.clone(),
            self.meta.tolerance.unwrap_or(default_tol),
        )?;
        cat.source = self.meta.source.clone();
        Ok(cat)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| FrobError::Parse(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| FrobError::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockData {
    pub charge: usize,
    pub rows: usize,
    pub cols: usize,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MorphismData {
    pub blocks: Vec<BlockData>,
}

impl MorphismData {
    pub fn from_morphism(m: &Morphism) -> Self {
        let blocks = m
            .blocks()
            .iter()
            .map(|(&charge, b)| BlockData {
                charge,
                rows: b.nrows(),
                cols: b.ncols(),
                entries: (0..b.nrows()).flat_map(|r| (0..b.ncols()).map(move |c| (r, c))).map(|rc| pair(b[rc])).collect(),
            })
            .collect();
        MorphismData { blocks }
    }

    /// Rebuilds a morphism between the given objects; block shapes must
    /// match the fusion-tree basis exactly.
    pub fn to_morphism(&self, eng: &Engine, dom: &Object, cod: &Object) -> Result<Morphism> {
        let mut blocks = BTreeMap::new();
        for b in &self.blocks {
            if b.entries.len() != b.rows * b.cols {
                return Err(FrobError::Parse(format!(
                    "block for charge {} declares {}x{} but has {} entries",
                    b.charge,
                    b.rows,
                    b.cols,
                    b.entries.len()
                )));
            }
            if b.charge >= eng.category().rank() {
                return Err(FrobError::Parse(format!("charge {} is not a label", b.charge)));
            }
            let (er, ec) = (eng.count(cod, b.charge), eng.count(dom, b.charge));
            if (b.rows, b.cols) != (er, ec) {
                return Err(FrobError::ShapeMismatch(format!(
                    "block for charge {} is {}x{}, the basis needs {er}x{ec}",
                    b.charge, b.rows, b.cols
                )));
            }
            if blocks.insert(b.charge, DMatrix::from_fn(b.rows, b.cols, |r, c| complex(b.entries[r * b.cols + c]))).is_some() {
                return Err(FrobError::Parse(format!("charge {} appears twice", b.charge)));
            }
        }
        eng.from_blocks(dom, cod, blocks)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    /// Category file, relative to the algebra file, or `bundled:<name>`.
    pub category: String,
    pub multiplicities: Vec<usize>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    pub m: MorphismData,
    pub eta: MorphismData,
    pub delta: MorphismData,
    pub eps: MorphismData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jandl: Option<MorphismData>,
}

impl AlgebraFile {
    pub fn from_algebra(alg: &FrobeniusAlgebra, category: &str, jandl: Option<&JandlStructure>) -> Self {
        AlgebraFile {
            name: alg.name.clone(),
            category: category.to_string(),
            multiplicities: alg.obj().multiplicities().to_vec(),
            note: String::new(),
            m: MorphismData::from_morphism(alg.m()),
            eta: MorphismData::from_morphism(alg.eta()),
            delta: MorphismData::from_morphism(alg.delta()),
            eps: MorphismData::from_morphism(alg.eps()),
            jandl: jandl.map(|j| MorphismData::from_morphism(&j.sigma)),
        }
    }

    pub fn build(&self, eng: &Engine) -> Result<(FrobeniusAlgebra, Option<JandlStructure>)> {
        if self.multiplicities.len() != eng.category().rank() {
            return Err(FrobError::ShapeMismatch(format!(
                "{} multiplicities for a rank-{} category",
                self.multiplicities.len(),
                eng.category().rank()
            )));
        }
        let obj = AlgebraObject::new(self.multiplicities.clone())?;
        let a = obj.object();
        let aa = a.tensor(&a);
        let one = Object::unit();
        let alg = FrobeniusAlgebra::new(
            &self.name,
            obj,
            self.m.to_morphism(eng, &aa, &a)?,
            self.eta.to_morphism(eng, &one, &a)?,
            self.delta.to_morphism(eng, &a, &aa)?,
            self.eps.to_morphism(eng, &a, &one)?,
        )?;
        let jandl = match &self.jandl {
            Some(s) => Some(JandlStructure { sigma: s.to_morphism(eng, &a, &a)? }),
            None => None,
        };
        Ok((alg, jandl))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| FrobError::Parse(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| FrobError::Parse(e.to_string()))
    }
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads a category from a file path or `bundled:<name>`.
pub fn load_category(spec: &str, default_tol: f64) -> Result<SkeletalCategory> {
    if let Some(name) = spec.strip_prefix("bundled:") {
        let mut cat = library::by_name(name).ok_or_else(|| FrobError::Parse(format!("no bundled category {name:?}")))?;
        cat.tolerance = default_tol;
        return Ok(cat);
    }
    let text = fs::read_to_string(spec)?;
    CategoryFile::from_toml(&text)?.to_category(default_tol)
}

/// Reads an algebra file together with the category it refers to, unless
/// `category` overrides it.
pub fn load_algebra(path: &Path, category: Option<&str>, default_tol: f64) -> Result<(SkeletalCategory, AlgebraFile)> {
    let file = AlgebraFile::from_toml(&fs::read_to_string(path)?)?;
    let cat = match category {
        Some(c) => load_category(c, default_tol)?,
        None if file.category.starts_with("bundled:") => load_category(&file.category, default_tol)?,
        None => {
            let base = path.parent().unwrap_or(Path::new("."));
            load_category(&base.join(&file.category).to_string_lossy(), default_tol)?
        }
    };
    Ok((cat, file))
}
