//! Modules and bimodules over Frobenius algebras.
//!
//! Hom spaces of (bi)modules are never solved for directly. For special
//! algebras normalized to `m∘Δ = id`, averaging a plain morphism over the
//! actions,
//!
//! `Ave(f) = ρ_N ∘ (id_A ⊗ f) ∘ (id_A ⊗ ρ_M) ∘ ((Δ∘η) ⊗ id_M)`
//!
//! (and its mirror image for right actions) is an idempotent on `Hom(M, N)`
//! whose image is the space of module maps. Its trace is the dimension, and
//! the distance of that trace from an integer is a health check on the
//! input data.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{Engine, Morphism, Object};
use crate::error::{FrobError, Result};
use crate::frobenius::{AxiomReport, FrobeniusAlgebra};
use crate::linalg::{column_basis, rank};

/// Default seed for random-element splitting.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Allowed distance of a projector trace from an integer.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-6;

const MAX_RESEEDS: u64 = 5;
const EIGENGAP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct LeftModule {
    obj: Object,
    rho: Morphism,
}

/// An `A`-`A'` bimodule.
#[derive(Clone, Debug, PartialEq)]
pub struct Bimodule {
    obj: Object,
    rho_l: Morphism,
    rho_r: Morphism,
}

fn expect_shape(m: &Morphism, dom: &Object, cod: &Object, what: &str) -> Result<()> {
    if m.dom() != dom || m.cod() != cod {
        return Err(FrobError::ShapeMismatch(format!(
            "{what} is {} -> {}, expected {dom} -> {cod}",
            m.dom(),
            m.cod()
        )));
    }
    Ok(())
}

impl LeftModule {
    pub fn new(alg: &FrobeniusAlgebra, obj: Object, rho: Morphism) -> Result<Self> {
        expect_shape(&rho, &alg.object().tensor(&obj), &obj, "action")?;
        Ok(LeftModule { obj, rho })
    }

    pub fn obj(&self) -> &Object {
        &self.obj
    }

    pub fn rho(&self) -> &Morphism {
        &self.rho
    }

    /// Multiplicity of each simple in the underlying object.
    pub fn multiplicities(&self, eng: &Engine) -> Vec<usize> {
        eng.multiplicities(&self.obj)
    }

    /// Same object with a different action; used to probe the axiom checks.
    pub fn with_rho(&self, rho: Morphism) -> Result<Self> {
        expect_shape(&rho, self.rho.dom(), &self.obj, "action")?;
        Ok(LeftModule { obj: self.obj.clone(), rho })
    }
}

impl Bimodule {
    pub fn new(a: &FrobeniusAlgebra, a2: &FrobeniusAlgebra, obj: Object, rho_l: Morphism, rho_r: Morphism) -> Result<Self> {
        expect_shape(&rho_l, &a.object().tensor(&obj), &obj, "left action")?;
        expect_shape(&rho_r, &obj.tensor(&a2.object()), &obj, "right action")?;
        Ok(Bimodule { obj, rho_l, rho_r })
    }

    pub fn obj(&self) -> &Object {
        &self.obj
    }

    pub fn rho_l(&self) -> &Morphism {
        &self.rho_l
    }

    pub fn rho_r(&self) -> &Morphism {
        &self.rho_r
    }

    pub fn multiplicities(&self, eng: &Engine) -> Vec<usize> {
        eng.multiplicities(&self.obj)
    }
}

/// `A` over itself, `ρ = m`.
pub fn regular_module(alg: &FrobeniusAlgebra) -> LeftModule {
    LeftModule { obj: alg.object(), rho: alg.m().clone() }
}

/// `A` as an `A`-`A` bimodule.
pub fn regular_bimodule(alg: &FrobeniusAlgebra) -> Bimodule {
    Bimodule { obj: alg.object(), rho_l: alg.m().clone(), rho_r: alg.m().clone() }
}

pub fn check_module(eng: &Engine, alg: &FrobeniusAlgebra, m: &LeftModule) -> Result<AxiomReport> {
    let mut rep = AxiomReport::default();
    left_axioms(eng, alg, &m.obj, &m.rho, &mut rep, "")?;
    Ok(rep)
}

fn left_axioms(eng: &Engine, alg: &FrobeniusAlgebra, obj: &Object, rho: &Morphism, rep: &mut AxiomReport, prefix: &str) -> Result<()> {
    let id_m = eng.identity(obj);
    let id_a = eng.identity(&alg.object());
    let lhs = eng.compose(rho, &eng.tensor(alg.m(), &id_m))?;
    let rhs = eng.compose(rho, &eng.tensor(&id_a, rho))?;
    rep.push(&format!("{prefix}module_associativity"), lhs.distance(&rhs)?);
    let unit = eng.compose(rho, &eng.tensor(alg.eta(), &id_m))?;
    rep.push(&format!("{prefix}module_unit"), unit.distance(&id_m)?);
    Ok(())
}

fn right_axioms(eng: &Engine, alg: &FrobeniusAlgebra, obj: &Object, rho: &Morphism, rep: &mut AxiomReport) -> Result<()> {
    let id_m = eng.identity(obj);
    let id_a = eng.identity(&alg.object());
    let lhs = eng.compose(rho, &eng.tensor(rho, &id_a))?;
    let rhs = eng.compose(rho, &eng.tensor(&id_m, alg.m()))?;
    rep.push("right_module_associativity", lhs.distance(&rhs)?);
    let unit = eng.compose(rho, &eng.tensor(&id_m, alg.eta()))?;
    rep.push("right_module_unit", unit.distance(&id_m)?);
    Ok(())
}

/// Left and right module axioms plus commutation of the two actions.
pub fn check_bimodule(eng: &Engine, a: &FrobeniusAlgebra, a2: &FrobeniusAlgebra, b: &Bimodule) -> Result<AxiomReport> {
    let mut rep = AxiomReport::default();
    left_axioms(eng, a, &b.obj, &b.rho_l, &mut rep, "left_")?;
    right_axioms(eng, a2, &b.obj, &b.rho_r, &mut rep)?;
    let id_a = eng.identity(&a.object());
    let id_a2 = eng.identity(&a2.object());
    let lr = eng.compose(&b.rho_r, &eng.tensor(&b.rho_l, &id_a2))?;
    let rl = eng.compose(&b.rho_l, &eng.tensor(&id_a, &b.rho_r))?;
    rep.push("actions_commute", lr.distance(&rl)?);
    Ok(rep)
}

/// `A ⊗ X` with action `m ⊗ id_X`.
pub fn induced_from_object(eng: &Engine, alg: &FrobeniusAlgebra, x: &Object) -> LeftModule {
    let rho = eng.tensor(alg.m(), &eng.identity(x));
    LeftModule { obj: alg.object().tensor(x), rho }
}

/// `A ⊗ U_i` with action `m ⊗ id`.
pub fn induced_module(eng: &Engine, alg: &FrobeniusAlgebra, i: usize) -> LeftModule {
    induced_from_object(eng, alg, &Object::label(i))
}

/// `A ⊗ X ⊗ A'` with the free actions.
pub fn induced_bimodule(eng: &Engine, a: &FrobeniusAlgebra, x: &Object, a2: &FrobeniusAlgebra) -> Bimodule {
    let id_x = eng.identity(x);
    let id_a = eng.identity(&a.object());
    let id_a2 = eng.identity(&a2.object());
    let rho_l = eng.tensor(&eng.tensor(a.m(), &id_x), &id_a2);
    let rho_r = eng.tensor(&eng.tensor(&id_a, &id_x), a2.m());
    Bimodule { obj: a.object().tensor(x).tensor(&a2.object()), rho_l, rho_r }
}

/// `M ⊗ U_i` with action `ρ ⊗ id`.
pub fn module_times_label(eng: &Engine, m: &LeftModule, i: usize) -> LeftModule {
    let x = Object::label(i);
    LeftModule { obj: m.obj.tensor(&x), rho: eng.tensor(&m.rho, &eng.identity(&x)) }
}

/// `U_i ⊗ B ⊗ U_j` with both actions passed through inverse braidings:
/// left `(id ⊗ ρ_l ⊗ id) ∘ (c⁻¹_{U_i,A} ⊗ id ⊗ id)`, right
/// `(id ⊗ ρ_r ⊗ id) ∘ (id ⊗ id ⊗ c⁻¹_{A',U_j})`.
pub fn dress_bimodule(
    eng: &Engine,
    a: &FrobeniusAlgebra,
    a2: &FrobeniusAlgebra,
    i: usize,
    b: &Bimodule,
    j: usize,
) -> Result<Bimodule> {
    let ui = Object::label(i);
    let uj = Object::label(j);
    let (oa, oa2) = (a.object(), a2.object());
    let id_i = eng.identity(&ui);
    let id_j = eng.identity(&uj);
    let id_b = eng.identity(&b.obj);
    let cl = eng.braiding_inv(&ui, &oa)?;
    let left = eng.compose(
        &eng.tensor_all(&[&id_i, &b.rho_l, &id_j]),
        &eng.tensor_all(&[&cl, &id_b, &id_j]),
    )?;
    let cr = eng.braiding_inv(&oa2, &uj)?;
    let right = eng.compose(
        &eng.tensor_all(&[&id_i, &b.rho_r, &id_j]),
        &eng.tensor_all(&[&id_i, &id_b, &cr]),
    )?;
    Ok(Bimodule { obj: ui.tensor(&b.obj).tensor(&uj), rho_l: left, rho_r: right })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// One action taken into account by an averaging projector.
struct Act<'a> {
    side: Side,
    alg: &'a FrobeniusAlgebra,
    on_dom: &'a Morphism,
    on_cod: &'a Morphism,
}

/// Matrix of an averaging projector on `Hom(dom, cod)` in the coefficient
/// basis of [`Morphism::to_vector`].
#[derive(Clone, Debug)]
pub struct HomProjector {
    template: Morphism,
    pub matrix: DMatrix<C64>,
}

impl HomProjector {
    /// `||P∘P - P||_F`.
    pub fn idempotency_residual(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).norm()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Rounded trace, rejected when off an integer by more than
    /// [`INTEGRALITY_TOLERANCE`] or when it has an imaginary part.
    pub fn dim(&self) -> Result<usize> {
        let t = self.trace();
        let r = t.re.round();
        if (t - C64::new(r, 0.0)).norm() > INTEGRALITY_TOLERANCE || r < 0.0 {
            return Err(FrobError::NonIntegralTrace { trace: t, tolerance: INTEGRALITY_TOLERANCE });
        }
        Ok(r as usize)
    }

    /// A basis of the image, as morphisms.
    pub fn image_basis(&self) -> Vec<Morphism> {
        let n = self.matrix.nrows();
        if n == 0 {
            return Vec::new();
        }
        let q = column_basis(&self.matrix, 1e-8);
        q.column_iter()
            .map(|col| {
                let v: Vec<C64> = col.iter().copied().collect();
                self.template.with_vector(&v)
            })
            .collect()
    }
}

fn hom_projector(eng: &Engine, dom: &Object, cod: &Object, acts: &[Act]) -> Result<HomProjector> {
    let template = eng.zero(dom, cod);
    let d = template.dim();
    let mut total = DMatrix::<C64>::identity(d, d);
    for act in acts {
        let a = act.alg.object();
        let id_a = eng.identity(&a);
        let edge = act.alg.edge(eng);
        let id_dom = eng.identity(dom);
        let w = match act.side {
            Side::Left => eng.compose(&eng.tensor(&id_a, act.on_dom), &eng.tensor(&edge, &id_dom))?,
            Side::Right => eng.compose(&eng.tensor(act.on_dom, &id_a), &eng.tensor(&id_dom, &edge))?,
        };
        let mut p = DMatrix::<C64>::zeros(d, d);
        let mut e = vec![C64::default(); d];
        for k in 0..d {
            e[k] = C64::new(1.0, 0.0);
            let f = template.with_vector(&e);
            e[k] = C64::default();
            let lifted = match act.side {
                Side::Left => eng.tensor(&id_a, &f),
                Side::Right => eng.tensor(&f, &id_a),
            };
            let img = eng.compose_all(&[&w, &lifted, act.on_cod])?;
            for (r, v) in img.to_vector().into_iter().enumerate() {
                p[(r, k)] = v;
            }
        }
        total = p * total;
    }
    Ok(HomProjector { template, matrix: total })
}

pub fn module_hom_projector(eng: &Engine, alg: &FrobeniusAlgebra, m: &LeftModule, n: &LeftModule) -> Result<HomProjector> {
    hom_projector(eng, &m.obj, &n.obj, &[Act { side: Side::Left, alg, on_dom: &m.rho, on_cod: &n.rho }])
}

pub fn module_hom_dim(eng: &Engine, alg: &FrobeniusAlgebra, m: &LeftModule, n: &LeftModule) -> Result<usize> {
    module_hom_projector(eng, alg, m, n)?.dim()
}

pub fn bimodule_hom_projector(
    eng: &Engine,
    a: &FrobeniusAlgebra,
    a2: &FrobeniusAlgebra,
    b: &Bimodule,
    b2: &Bimodule,
) -> Result<HomProjector> {
    hom_projector(
        eng,
        &b.obj,
        &b2.obj,
        &[
            Act { side: Side::Left, alg: a, on_dom: &b.rho_l, on_cod: &b2.rho_l },
            Act { side: Side::Right, alg: a2, on_dom: &b.rho_r, on_cod: &b2.rho_r },
        ],
    )
}

pub fn bimodule_hom_dim(eng: &Engine, a: &FrobeniusAlgebra, a2: &FrobeniusAlgebra, b: &Bimodule, b2: &Bimodule) -> Result<usize> {
    bimodule_hom_projector(eng, a, a2, b, b2)?.dim()
}

/// Image of an idempotent `p: M -> M` as `⊕ n_c U_c`, with `π∘ι = id` and
/// `ι∘π = p`. Returns `(object, ι, π)`.
pub fn split_idempotent(eng: &Engine, p: &Morphism) -> Result<(Object, Morphism, Morphism)> {
    let p = &purify(eng, p)?;
    let m = p.dom().clone();
    let rank = eng.category().rank();
    let mut mult = vec![0usize; rank];
    let mut frames = Vec::new();
    for (&c, b) in p.blocks() {
        let iota = column_basis(b, 1e-8);
        mult[c] = iota.ncols();
        let pi = iota.adjoint() * b;
        frames.push((c, iota, pi));
    }
    let n = Object::from_multiplicities(&mult);
    if n.is_zero() {
        return Err(FrobError::SplitFailure("idempotent is zero".into()));
    }
    let mut iota = std::collections::BTreeMap::new();
    let mut pi = std::collections::BTreeMap::new();
    for (c, i, q) in frames {
        if mult[c] > 0 {
            iota.insert(c, i);
            pi.insert(c, q);
        }
    }
    let iota = eng.from_blocks(&n, &m, iota)?;
    let pi = eng.from_blocks(&m, &n, pi)?;
    let check = eng.compose(&pi, &iota)?.distance(&eng.identity(&n))?;
    if check > 1e-8 {
        return Err(FrobError::SplitFailure(format!("π∘ι deviates from the identity by {check:e}")));
    }
    Ok((n, iota, pi))
}

/// McWeeny iteration `p ↦ 3p² - 2p³` towards the nearest idempotent. It
/// stays inside any algebra containing `p`.
fn purify(eng: &Engine, p: &Morphism) -> Result<Morphism> {
    let mut p = p.clone();
    for _ in 0..60 {
        let p2 = eng.compose(&p, &p)?;
        if p2.distance(&p)? < 1e-14 * p.norm().max(1.0) {
            break;
        }
        let p3 = eng.compose(&p2, &p)?;
        p = p2.scale(C64::new(3.0, 0.0)).sub(&p3.scale(C64::new(2.0, 0.0)))?;
    }
    let res = eng.compose(&p, &p)?.distance(&p)?;
    if res > 1e-10 * p.norm().max(1.0) {
        return Err(FrobError::SplitFailure(format!("not an idempotent (residual {res:e})")));
    }
    Ok(p)
}

/// A summand of a semisimple object: inclusion and projection.
struct Piece {
    iota: Morphism,
    pi: Morphism,
}

fn random_element(basis: &[Morphism], rng: &mut ChaCha8Rng) -> Morphism {
    let mut x = basis[0].scale(C64::default());
    for b in basis {
        let r = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        x = x.add(&b.scale(r)).expect("basis elements share a shape");
    }
    x
}

fn eigenvalues(m: &Morphism) -> Vec<C64> {
    let mut out = Vec::new();
    for b in m.blocks().values() {
        if b.nrows() == 0 {
            continue;
        }
        let (_, t) = b.clone().schur().unpack();
        out.extend((0..t.nrows()).map(|k| t[(k, k)]));
    }
    out
}

/// Clusters eigenvalues and returns the distinct representatives and the
/// smallest gap between them.
fn cluster(values: &[C64]) -> (Vec<C64>, f64) {
    let mut reps: Vec<(C64, usize)> = Vec::new();
    for &v in values {
        match reps.iter_mut().find(|(r, _)| (*r - v).norm() < 1e-7) {
            Some((r, n)) => {
                *r = (*r * (*n as f64) + v) / (*n as f64 + 1.0);
                *n += 1;
            }
            None => reps.push((v, 1)),
        }
    }
    let mut gap = f64::INFINITY;
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            gap = gap.min((reps[i].0 - reps[j].0).norm());
        }
    }
    (reps.into_iter().map(|(r, _)| r).collect(), gap)
}

fn rank_of(vs: &[Vec<C64>]) -> usize {
    if vs.is_empty() || vs[0].is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(vs[0].len(), vs.len(), |r, c| vs[c][r]);
    rank(&m, 1e-8)
}

/// Splits an object with semisimple endomorphism algebra (basis given)
/// into isotypic pieces: one primitive idempotent per class, with its
/// multiplicity.
fn decompose_generic(eng: &Engine, basis: &[Morphism], seed: u64) -> Result<Vec<(Piece, usize)>> {
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let id = eng.identity(basis[0].dom());
    if basis.len() == 1 {
        let (_, iota, pi) = split_idempotent(eng, &id)?;
        return Ok(vec![(Piece { iota, pi }, 1)]);
    }
    let mut last = String::new();
    for attempt in 0..=MAX_RESEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let x = random_element(basis, &mut rng);
        let (eig, gap) = cluster(&eigenvalues(&x));
        if gap < EIGENGAP {
            last = format!("eigengap {gap:e}");
            continue;
        }
        let mut projs = Vec::with_capacity(eig.len());
        for (k, &lam) in eig.iter().enumerate() {
            let mut p = id.clone();
            for (l, &mu) in eig.iter().enumerate() {
                if l != k {
                    let f = x.sub(&id.scale(mu))?.scale(C64::new(1.0, 0.0) / (lam - mu));
                    p = eng.compose(&f, &p)?;
                }
            }
            projs.push(p);
        }
        // each spectral projector must cut out a one-dimensional corner
        let primitive = projs.iter().all(|p| {
            let corner: Vec<Vec<C64>> = basis
                .iter()
                .map(|b| eng.compose(p, &eng.compose(b, p).unwrap()).unwrap().to_vector())
                .collect();
            rank_of(&corner) == 1
        });
        if !primitive {
            last = "spectral projector is not primitive".into();
            continue;
        }
        let mut class_of: Vec<usize> = Vec::with_capacity(projs.len());
        let mut reps: Vec<usize> = Vec::new();
        for (k, p) in projs.iter().enumerate() {
            let found = reps.iter().position(|&r| {
                basis.iter().any(|b| {
                    let v = eng.compose(&projs[r], &eng.compose(b, p).unwrap()).unwrap();
                    v.norm() > 1e-6
                })
            });
            match found {
                Some(cls) => class_of.push(cls),
                None => {
                    class_of.push(reps.len());
                    reps.push(k);
                }
            }
        }
        let mut out = Vec::with_capacity(reps.len());
        for (cls, &r) in reps.iter().enumerate() {
            let (_, iota, pi) = split_idempotent(eng, &projs[r])?;
            let count = class_of.iter().filter(|&&c| c == cls).count();
            out.push((Piece { iota, pi }, count));
        }
        return Ok(out);
    }
    Err(FrobError::SplitFailure(format!("no generic element after {MAX_RESEEDS} reseeds ({last})")))
}

fn restrict_left(eng: &Engine, alg: &FrobeniusAlgebra, rho: &Morphism, piece: &Piece) -> Result<Morphism> {
    let id_a = eng.identity(&alg.object());
    eng.compose_all(&[&eng.tensor(&id_a, &piece.iota), rho, &piece.pi])
}

fn restrict_right(eng: &Engine, alg: &FrobeniusAlgebra, rho: &Morphism, piece: &Piece) -> Result<Morphism> {
    let id_a = eng.identity(&alg.object());
    eng.compose_all(&[&eng.tensor(&piece.iota, &id_a), rho, &piece.pi])
}

/// Simple summands of a module with multiplicities. Deterministic for a
/// fixed seed; the multiplicities do not depend on it.
pub fn decompose_module(eng: &Engine, alg: &FrobeniusAlgebra, m: &LeftModule, seed: u64) -> Result<Vec<(LeftModule, usize)>> {
    let basis = module_hom_projector(eng, alg, m, m)?.image_basis();
    decompose_generic(eng, &basis, seed)?
        .into_iter()
        .map(|(piece, k)| {
            let rho = restrict_left(eng, alg, &m.rho, &piece)?;
            Ok((LeftModule { obj: piece.pi.cod().clone(), rho }, k))
        })
        .collect()
}

pub fn decompose_bimodule(
    eng: &Engine,
    a: &FrobeniusAlgebra,
    a2: &FrobeniusAlgebra,
    b: &Bimodule,
    seed: u64,
) -> Result<Vec<(Bimodule, usize)>> {
    let basis = bimodule_hom_projector(eng, a, a2, b, b)?.image_basis();
    decompose_generic(eng, &basis, seed)?
        .into_iter()
        .map(|(piece, k)| {
            let rho_l = restrict_left(eng, a, &b.rho_l, &piece)?;
            let rho_r = restrict_right(eng, a2, &b.rho_r, &piece)?;
            Ok((Bimodule { obj: piece.pi.cod().clone(), rho_l, rho_r }, k))
        })
        .collect()
}

/// Simple modules up to isomorphism, found inside the induced modules
/// `A ⊗ U_i` in label order.
pub fn list_simple_modules(eng: &Engine, alg: &FrobeniusAlgebra) -> Result<Vec<LeftModule>> {
    let mut out: Vec<LeftModule> = Vec::new();
    for i in 0..eng.category().rank() {
        for (s, _) in decompose_module(eng, alg, &induced_module(eng, alg, i), DEFAULT_SEED)? {
            let mut seen = false;
            for t in &out {
                if module_hom_dim(eng, alg, &s, t)? > 0 {
                    seen = true;
                    break;
                }
            }
            if !seen {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// Simple `A`-`A'` bimodules up to isomorphism, found inside `A ⊗ U_i ⊗ A'`.
pub fn list_simple_bimodules(eng: &Engine, a: &FrobeniusAlgebra, a2: &FrobeniusAlgebra) -> Result<Vec<Bimodule>> {
    let mut out: Vec<Bimodule> = Vec::new();
    for i in 0..eng.category().rank() {
        let free = induced_bimodule(eng, a, &Object::label(i), a2);
        for (s, _) in decompose_bimodule(eng, a, a2, &free, DEFAULT_SEED)? {
            let mut seen = false;
            for t in &out {
                if bimodule_hom_dim(eng, a, a2, &s, t)? > 0 {
                    seen = true;
                    break;
                }
            }
            if !seen {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// `B ⊗_{A'} B'`: the image of the middle averaging idempotent on `B ⊗ B'`
/// with the outer actions.
pub fn tensor_over_a(
    eng: &Engine,
    a: &FrobeniusAlgebra,
    a2: &FrobeniusAlgebra,
    a3: &FrobeniusAlgebra,
    b: &Bimodule,
    b2: &Bimodule,
) -> Result<Bimodule> {
    let id_b = eng.identity(&b.obj);
    let id_b2 = eng.identity(&b2.obj);
    let mid = eng.compose(
        &eng.tensor(&b.rho_r, &b2.rho_l),
        &eng.tensor_all(&[&id_b, &a2.edge(eng), &id_b2]),
    )?;
    let (obj, iota, pi) = split_idempotent(eng, &mid)?;
    let piece = Piece { iota, pi };
    let left = eng.tensor(&b.rho_l, &id_b2);
    let right = eng.tensor(&id_b, &b2.rho_r);
    let rho_l = restrict_left(eng, a, &left, &piece)?;
    let rho_r = restrict_right(eng, a3, &right, &piece)?;
    Ok(Bimodule { obj, rho_l, rho_r })
}

/// Middle idempotent of `B ⊗ B'`; exposed for the projector checks.
pub fn middle_idempotent(eng: &Engine, a2: &FrobeniusAlgebra, b: &Bimodule, b2: &Bimodule) -> Result<Morphism> {
    let id_b = eng.identity(&b.obj);
    let id_b2 = eng.identity(&b2.obj);
    eng.compose(&eng.tensor(&b.rho_r, &b2.rho_l), &eng.tensor_all(&[&id_b, &a2.edge(eng), &id_b2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{cardy_algebra, simple_current_candidate};
    use crate::library;

    const TOL: f64 = 1e-9;

    fn toric_a(eng: &Engine) -> FrobeniusAlgebra {
        simple_current_candidate(eng, &[0, 1], |_, _| C64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn regular_and_induced_modules_pass() {
        for cat in library::all() {
            let eng = Engine::new(&cat);
            let a = cardy_algebra(&eng);
            assert!(check_module(&eng, &a, &regular_module(&a)).unwrap().passes(TOL));
            for i in 0..cat.rank() {
                assert!(check_module(&eng, &a, &induced_module(&eng, &a, i)).unwrap().passes(TOL));
            }
        }
        let cat = library::toric_code().unwrap();
        let eng = Engine::new(&cat);
        let a = toric_a(&eng);
        for i in 0..4 {
            let m = induced_module(&eng, &a, i);
            assert!(check_module(&eng, &a, &m).unwrap().passes(TOL));
        }
        // e ⊗ m = f
        let m = induced_module(&eng, &a, 2);
        assert_eq!(m.multiplicities(&eng), vec![0, 0, 1, 1]);
    }

    #[test]
    fn tampered_action_is_detected() {
        let cat = library::toric_code().unwrap();
        let eng = Engine::new(&cat);
        let a = toric_a(&eng);
        let m = induced_module(&eng, &a, 0);
        let mut rho = m.rho().clone();
        let c = *rho.blocks().keys().next().unwrap();
        let b = rho.block_mut(c).unwrap();
        let k = b.ncols() - 1;
        let r = (0..b.nrows()).find(|&r| b[(r, k)].norm() > 0.5).unwrap();
        b[(r, k)] = -b[(r, k)];
        let rep = check_module(&eng, &a, &m.with_rho(rho).unwrap()).unwrap();
        assert!(rep.worst().unwrap().1 > 0.1, "{rep:?}");
    }

    #[test]
    fn hom_dims_over_the_unit_are_kronecker() {
        let cat = library::ising().unwrap();
        let eng = Engine::new(&cat);
        let a = cardy_algebra(&eng);
        for i in 0..3 {
            for j in 0..3 {
                let d = module_hom_dim(&eng, &a, &induced_module(&eng, &a, i), &induced_module(&eng, &a, j)).unwrap();
                assert_eq!(d, usize::from(i == j));
            }
        }
    }

    #[test]
    fn regular_module_endomorphisms_match_reciprocity() {
        for (name, h) in [("toric_code", vec![0, 1]), ("su2_4", vec![0, 4]), ("fibonacci", vec![0])] {
            let cat = library::by_name(name).unwrap();
            let eng = Engine::new(&cat);
            let a = simple_current_candidate(&eng, &h, |_, _| C64::new(1.0, 0.0)).unwrap();
            let reg = regular_module(&a);
            let p = module_hom_projector(&eng, &a, &reg, &reg).unwrap();
            assert!(p.idempotency_residual() < 1e-8);
            assert_eq!(p.dim().unwrap(), a.obj().unit_multiplicity());
        }
    }

    #[test]
    fn decompose_two_copies_over_unit() {
        let cat = library::fibonacci().unwrap();
        let eng = Engine::new(&cat);
        let a = cardy_algebra(&eng);
        let m = induced_from_object(&eng, &a, &Object::from_multiplicities(&[0, 2]));
        let parts = decompose_module(&eng, &a, &m, DEFAULT_SEED).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, 2);
        assert_eq!(parts[0].0.multiplicities(&eng), vec![0, 1]);
        assert!(check_module(&eng, &a, &parts[0].0).unwrap().passes(TOL));
        let again = decompose_module(&eng, &a, &m, 12345).unwrap();
        assert_eq!(again[0].1, 2);
    }

    #[test]
    fn simple_module_counts() {
        let fib = library::fibonacci().unwrap();
        let eng = Engine::new(&fib);
        assert_eq!(list_simple_modules(&eng, &cardy_algebra(&eng)).unwrap().len(), 2);
        let ising = library::ising().unwrap();
        let eng = Engine::new(&ising);
        assert_eq!(list_simple_modules(&eng, &cardy_algebra(&eng)).unwrap().len(), 3);
        let toric = library::toric_code().unwrap();
        let eng = Engine::new(&toric);
        let a = toric_a(&eng);
        let simples = list_simple_modules(&eng, &a).unwrap();
        assert_eq!(simples.len(), 2);
        for s in &simples {
            assert!(check_module(&eng, &a, s).unwrap().passes(TOL));
        }
        let m0 = decompose_module(&eng, &a, &induced_module(&eng, &a, 0), DEFAULT_SEED).unwrap();
        assert_eq!(m0.len(), 1);
        assert_eq!(m0[0].1, 1);
        assert_eq!(m0[0].0.multiplicities(&eng), vec![1, 1, 0, 0]);
    }

    #[test]
    fn dressing_toric_passes_and_torus_entry() {
        let cat = library::toric_code().unwrap();
        let eng = Engine::new(&cat);
        let a = toric_a(&eng);
        let reg = regular_bimodule(&a);
        assert!(check_bimodule(&eng, &a, &a, &reg).unwrap().passes(TOL));
        let d = dress_bimodule(&eng, &a, &a, 1, &reg, 0).unwrap();
        let rep = check_bimodule(&eng, &a, &a, &d).unwrap();
        assert!(rep.passes(TOL), "{rep:?}");
        let d0 = dress_bimodule(&eng, &a, &a, 0, &reg, 0).unwrap();
        let p = bimodule_hom_projector(&eng, &a, &a, &d0, &reg).unwrap();
        assert!(p.idempotency_residual() < 1e-8);
        assert_eq!(p.dim().unwrap(), 1);
    }

    #[test]
    fn tensor_over_unit_is_fusion() {
        let cat = library::fibonacci().unwrap();
        let eng = Engine::new(&cat);
        let a = cardy_algebra(&eng);
        let simples = list_simple_bimodules(&eng, &a, &a).unwrap();
        assert_eq!(simples.len(), 2);
        let tt = tensor_over_a(&eng, &a, &a, &a, &simples[1], &simples[1]).unwrap();
        assert!(check_bimodule(&eng, &a, &a, &tt).unwrap().passes(TOL));
        assert_eq!(tt.multiplicities(&eng), vec![1, 1]);
    }

    #[test]
    fn unit_bimodule_is_neutral() {
        let cat = library::toric_code().unwrap();
        let eng = Engine::new(&cat);
        let a = toric_a(&eng);
        let reg = regular_bimodule(&a);
        for b in list_simple_bimodules(&eng, &a, &a).unwrap() {
            let ba = tensor_over_a(&eng, &a, &a, &a, &b, &reg).unwrap();
            assert_eq!(bimodule_hom_dim(&eng, &a, &a, &ba, &b).unwrap(), 1);
            assert_eq!(ba.multiplicities(&eng), b.multiplicities(&eng));
        }
    }
}
