//! Morphisms of the ribbon category in a left-nested fusion-tree basis.
//!
//! An [`Object`] is a direct sum of tensor words of simple labels. For every
//! total charge `c`, `Hom(c, X)` has a basis of left-nested splitting trees
//! `((…(x₁ x₂)_{e₂} x₃)_{e₃} …)_c`, one block of trees per summand, summands
//! in order. Within a word the trees are ordered lexicographically by
//! `(e₂, μ₂, e₃, μ₃, …)`. A [`Morphism`] `X -> Y` stores one matrix per
//! charge acting on these spaces by post-composition.
//!
//! Everything nonadjacent is reduced to elementary F- and R-moves: tensor
//! products go through the split basis `(tree of X) ⊗ (tree of X')` and its
//! expansion into left-nested trees of the concatenated word.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::category::SkeletalCategory;
use crate::error::{FrobError, Result};

/// Ordered list of labels; the empty word is the tensor unit.
pub type TensorWord = Vec<usize>;

/// Vertices of a left-nested tree after the first letter: `(charge, multiplicity)`.
pub type Tree = Vec<(usize, usize)>;

/// Direct sum of tensor words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Object {
    summands: Vec<TensorWord>,
}

impl Object {
    pub fn new(summands: Vec<TensorWord>) -> Self {
        Object { summands }
    }

    /// The tensor unit (one empty word).
    pub fn unit() -> Self {
        Object { summands: vec![Vec::new()] }
    }

    pub fn word(w: TensorWord) -> Self {
        Object { summands: vec![w] }
    }

    pub fn label(i: usize) -> Self {
        Object { summands: vec![vec![i]] }
    }

    /// `⊕ n_i U_i`, summands in label order.
    pub fn from_multiplicities(mult: &[usize]) -> Self {
        let summands = mult
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat_n(vec![i], n))
            .collect();
        Object { summands }
    }

    pub fn summands(&self) -> &[TensorWord] {
        &self.summands
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    /// Summand pairs in `(a, b)` lexicographic order, words concatenated.
    pub fn tensor(&self, other: &Object) -> Object {
        let mut summands = Vec::with_capacity(self.summands.len() * other.summands.len());
        for x in &self.summands {
            for y in &other.summands {
                let mut w = x.clone();
                w.extend_from_slice(y);
                summands.push(w);
            }
        }
        Object { summands }
    }

    pub fn direct_sum(&self, other: &Object) -> Object {
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        Object { summands }
    }

    /// Dual object: each word reversed with every label dualized.
    pub fn dual(&self, cat: &SkeletalCategory) -> Object {
        Object {
            summands: self
                .summands
                .iter()
                .map(|w| w.iter().rev().map(|&i| cat.dual(i)).collect())
                .collect(),
        }
    }

    /// The object with every summand stripped of its last letter, provided all
    /// summands end in the same label.
    pub fn split_last(&self) -> Option<(Object, usize)> {
        let last = *self.summands.first()?.last()?;
        let mut out = Vec::with_capacity(self.summands.len());
        for w in &self.summands {
            if w.last() != Some(&last) {
                return None;
            }
            out.push(w[..w.len() - 1].to_vec());
        }
        Some((Object { summands: out }, last))
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .summands
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    w.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("⊗")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

#[derive(Debug, Default)]
struct Sector {
    trees: Vec<Tree>,
    index: HashMap<Tree, usize>,
}

#[derive(Debug, Default)]
struct WordBasis {
    sectors: BTreeMap<usize, Sector>,
}

impl WordBasis {
    fn count(&self, c: usize) -> usize {
        self.sectors.get(&c).map_or(0, |s| s.trees.len())
    }
}

/// A linear map `Hom(c, dom) -> Hom(c, cod)` for every charge `c` at which
/// both spaces are nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Morphism {
    dom: Object,
    cod: Object,
    blocks: BTreeMap<usize, DMatrix<C64>>,
}

impl Morphism {
    pub fn dom(&self) -> &Object {
        &self.dom
    }

    pub fn cod(&self) -> &Object {
        &self.cod
    }

    pub fn blocks(&self) -> &BTreeMap<usize, DMatrix<C64>> {
        &self.blocks
    }

    pub fn block(&self, c: usize) -> Option<&DMatrix<C64>> {
        self.blocks.get(&c)
    }

    pub fn block_mut(&mut self, c: usize) -> Option<&mut DMatrix<C64>> {
        self.blocks.get_mut(&c)
    }

    fn same_shape(&self, other: &Morphism) -> Result<()> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(FrobError::ShapeMismatch(format!(
                "{} -> {} vs {} -> {}",
                self.dom, self.cod, other.dom, other.cod
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        self.same_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .map(|(c, m)| (*c, m + &other.blocks[c]))
            .collect();
        Ok(Morphism { dom: self.dom.clone(), cod: self.cod.clone(), blocks })
    }

    pub fn sub(&self, other: &Morphism) -> Result<Morphism> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Morphism {
        Morphism {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            blocks: self.blocks.iter().map(|(c, m)| (*c, m * s)).collect(),
        }
    }

    /// Largest Frobenius norm over charge blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.values().map(|m| m.norm()).fold(0.0, f64::max)
    }

    /// `max_c ||self_c - other_c||_F`; shapes must agree.
    pub fn distance(&self, other: &Morphism) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Scalar value of an endomorphism of the unit.
    pub fn scalar(&self) -> Option<C64> {
        if self.blocks.len() == 1 {
            let m = self.blocks.get(&0)?;
            if m.nrows() == 1 && m.ncols() == 1 {
                return Some(m[(0, 0)]);
            }
        }
        None
    }

    /// Flattened coefficients in block order (charge ascending, column-major).
    pub fn to_vector(&self) -> Vec<C64> {
        self.blocks.values().flat_map(|m| m.iter().copied()).collect()
    }

    /// Inverse of [`Morphism::to_vector`] for a morphism of the same shape.
    pub fn with_vector(&self, v: &[C64]) -> Morphism {
        let mut out = self.clone();
        let mut pos = 0;
        for m in out.blocks.values_mut() {
            for x in m.iter_mut() {
                *x = v[pos];
                pos += 1;
            }
        }
        out
    }

    /// Total number of coefficients.
    pub fn dim(&self) -> usize {
        self.blocks.values().map(|m| m.len()).sum()
    }

    /// Blockwise inverse; fails on singular blocks or non-square shapes.
    pub fn inverse(&self) -> Result<Morphism> {
        let mut blocks = BTreeMap::new();
        for (c, m) in &self.blocks {
            let inv = m.clone().try_inverse().ok_or_else(|| {
                FrobError::ShapeMismatch(format!("block {c} of {} -> {} is not invertible", self.dom, self.cod))
            })?;
            blocks.insert(*c, inv);
        }
        Ok(Morphism { dom: self.cod.clone(), cod: self.dom.clone(), blocks })
    }
}

type SplitKey = (TensorWord, TensorWord, usize);

/// Split basis of a word pair `(x, y)` at one charge: entries `(e, f, μ, i, j)`
/// with `i` indexing the trees of `x` into `e` and `j` those of `y` into `f`,
/// plus the change of basis to left-nested trees of `x·y` and its inverse.
struct SplitBasis {
    entries: Vec<(usize, usize, usize, usize, usize)>,
    to_nested: DMatrix<C64>,
    from_nested: DMatrix<C64>,
}

/// Evaluates morphisms over a fixed category. Holds read-mostly caches of
/// tree bases and basis changes; safe to share between threads.
pub struct Engine<'c> {
    cat: &'c SkeletalCategory,
    words: RwLock<HashMap<TensorWord, Arc<WordBasis>>>,
    splits: RwLock<HashMap<SplitKey, Arc<SplitBasis>>>,
}

impl<'c> Engine<'c> {
    pub fn new(cat: &'c SkeletalCategory) -> Self {
        Engine { cat, words: RwLock::new(HashMap::new()), splits: RwLock::new(HashMap::new()) }
    }

    pub fn category(&self) -> &'c SkeletalCategory {
        self.cat
    }

    fn word_basis(&self, w: &[usize]) -> Arc<WordBasis> {
        if let Some(b) = self.words.read().unwrap().get(w) {
            return b.clone();
        }
        let basis = Arc::new(self.build_word_basis(w));
        self.words.write().unwrap().insert(w.to_vec(), basis.clone());
        basis
    }

    fn build_word_basis(&self, w: &[usize]) -> WordBasis {
        let mut sectors: BTreeMap<usize, Sector> = BTreeMap::new();
        let mut push = |c: usize, t: Tree| {
            let s = sectors.entry(c).or_default();
            s.index.insert(t.clone(), s.trees.len());
            s.trees.push(t);
        };
        match w.len() {
            0 => push(0, Vec::new()),
            1 => push(w[0], Vec::new()),
            _ => {
                // depth-first in lexicographic vertex order
                let mut stack: Vec<(usize, Tree)> = vec![(w[0], Vec::new())];
                let mut out: Vec<(usize, Tree)> = Vec::new();
                while let Some((e, t)) = stack.pop() {
                    let k = t.len() + 1;
                    if k == w.len() {
                        out.push((e, t));
                        continue;
                    }
                    let mut next = Vec::new();
                    for f in self.cat.ring().channels(e, w[k]) {
                        for mu in 0..self.cat.n(e, w[k], f) {
                            let mut t2 = t.clone();
                            t2.push((f, mu));
                            next.push((f, t2));
                        }
                    }
                    stack.extend(next.into_iter().rev());
                }
                for (c, t) in out {
                    push(c, t);
                }
            }
        }
        WordBasis { sectors }
    }

    /// Number of trees of `obj` into `c`.
    pub fn count(&self, obj: &Object, c: usize) -> usize {
        obj.summands().iter().map(|w| self.word_basis(w).count(c)).sum()
    }

    /// Multiplicity of each simple in `obj`.
    pub fn multiplicities(&self, obj: &Object) -> Vec<usize> {
        (0..self.cat.rank()).map(|c| self.count(obj, c)).collect()
    }

    pub fn charges(&self, obj: &Object) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for w in obj.summands() {
            out.extend(self.word_basis(w).sectors.keys().copied());
        }
        out
    }

    /// Start offset of each summand's trees inside `Hom(c, obj)`.
    pub fn offsets(&self, obj: &Object, c: usize) -> Vec<usize> {
        let mut acc = 0;
        obj.summands()
            .iter()
            .map(|w| {
                let o = acc;
                acc += self.word_basis(w).count(c);
                o
            })
            .collect()
    }

    /// Trees of a single word into `c`, in basis order.
    pub fn trees(&self, w: &[usize], c: usize) -> Vec<Tree> {
        self.word_basis(w).sectors.get(&c).map(|s| s.trees.clone()).unwrap_or_default()
    }

    fn tree_index(&self, w: &[usize], c: usize, t: &Tree) -> usize {
        self.word_basis(w).sectors[&c].index[t]
    }

    /// `Σ_c (#trees of X into c)(#trees of Y into c)`.
    pub fn dim_hom(&self, x: &Object, y: &Object) -> usize {
        self.charges(x).into_iter().map(|c| self.count(x, c) * self.count(y, c)).sum()
    }

    pub fn zero(&self, dom: &Object, cod: &Object) -> Morphism {
        let blocks = self
            .charges(dom)
            .intersection(&self.charges(cod))
            .map(|&c| (c, DMatrix::zeros(self.count(cod, c), self.count(dom, c))))
            .collect();
        Morphism { dom: dom.clone(), cod: cod.clone(), blocks }
    }

    /// Builds a morphism from explicit blocks, checking every shape. Missing
    /// charges are zero.
    pub fn from_blocks(&self, dom: &Object, cod: &Object, blocks: BTreeMap<usize, DMatrix<C64>>) -> Result<Morphism> {
        let mut m = self.zero(dom, cod);
        for (c, b) in blocks {
            match m.blocks.get_mut(&c) {
                Some(slot) if slot.shape() == b.shape() => *slot = b,
                Some(slot) => {
                    return Err(FrobError::ShapeMismatch(format!(
                        "charge {c}: block is {:?}, expected {:?}",
                        b.shape(),
                        slot.shape()
                    )))
                }
                None if b.iter().all(|z| z.norm() == 0.0) => {}
                None => {
                    return Err(FrobError::ShapeMismatch(format!(
                        "charge {c} is not shared by {dom} and {cod}"
                    )))
                }
            }
        }
        Ok(m)
    }

    pub fn identity(&self, obj: &Object) -> Morphism {
        let mut m = self.zero(obj, obj);
        for b in m.blocks.values_mut() {
            b.fill_with_identity();
        }
        m
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &Morphism, f: &Morphism) -> Result<Morphism> {
        if g.dom != f.cod {
            return Err(FrobError::ShapeMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                g.dom, g.cod, f.dom, f.cod
            )));
        }
        let mut out = self.zero(&f.dom, &g.cod);
        for (c, b) in out.blocks.iter_mut() {
            if let (Some(gb), Some(fb)) = (g.blocks.get(c), f.blocks.get(c)) {
                *b = gb * fb;
            }
        }
        Ok(out)
    }

    /// Composes a chain given in application order: `chain[last] ∘ … ∘ chain[0]`.
    pub fn compose_all(&self, chain: &[&Morphism]) -> Result<Morphism> {
        let (first, rest) = chain
            .split_first()
            .ok_or_else(|| FrobError::ShapeMismatch("empty composition".into()))?;
        let mut acc = (*first).clone();
        for m in rest {
            acc = self.compose(m, &acc)?;
        }
        Ok(acc)
    }

    /// Expansion of the split state `(t1: x -> e) ⊗ (t2: y -> f)` fused by
    /// `μ: c -> e f` into left-nested trees of `x·y`.
    #[allow(clippy::too_many_arguments)]
    fn split_to_nested(
        &self,
        x: &[usize],
        t1: &Tree,
        e: usize,
        y: &[usize],
        t2: &Tree,
        f: usize,
        mu: usize,
        c: usize,
    ) -> Vec<(Tree, C64)> {
        if y.is_empty() {
            return vec![(t1.clone(), C64::new(1.0, 0.0))];
        }
        if x.is_empty() {
            return vec![(t2.clone(), C64::new(1.0, 0.0))];
        }
        if y.len() == 1 {
            let mut t = t1.clone();
            t.push((c, mu));
            return vec![(t, C64::new(1.0, 0.0))];
        }
        let z = y[y.len() - 1];
        let y_head = &y[..y.len() - 1];
        let (_, nu) = t2[t2.len() - 1];
        let t2_head: Tree = t2[..t2.len() - 1].to_vec();
        let g = t2_head.last().map_or(y_head[0], |v| v.0);
        let Some(blk) = self.cat.f_block(e, g, z, c) else {
            return Vec::new();
        };
        let Some(col) = blk.col_index((f, nu, mu)) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (ri, &(h, kappa, lambda)) in blk.rows.iter().enumerate() {
            let coef = blk.inv[(col, ri)];
            if coef.norm() == 0.0 {
                continue;
            }
            for (mut t, w) in self.split_to_nested(x, t1, e, y_head, &t2_head, g, kappa, h) {
                t.push((c, lambda));
                out.push((t, coef * w));
            }
        }
        out
    }

    fn split_basis(&self, x: &[usize], y: &[usize], c: usize) -> Arc<SplitBasis> {
        let key = (x.to_vec(), y.to_vec(), c);
        if let Some(s) = self.splits.read().unwrap().get(&key) {
            return s.clone();
        }
        let s = Arc::new(self.build_split_basis(x, y, c));
        self.splits.write().unwrap().insert(key, s.clone());
        s
    }

    fn build_split_basis(&self, x: &[usize], y: &[usize], c: usize) -> SplitBasis {
        let xy: TensorWord = x.iter().chain(y).copied().collect();
        let n = self.word_basis(&xy).count(c);
        let mut entries = Vec::with_capacity(n);
        let mut to_nested = DMatrix::zeros(n, n);
        let xb = self.word_basis(x);
        let yb = self.word_basis(y);
        for (&e, xs) in &xb.sectors {
            for (&f, ys) in &yb.sectors {
                for mu in 0..self.cat.n(e, f, c) {
                    for (i, t1) in xs.trees.iter().enumerate() {
                        for (j, t2) in ys.trees.iter().enumerate() {
                            let col = entries.len();
                            entries.push((e, f, mu, i, j));
                            for (t, v) in self.split_to_nested(x, t1, e, y, t2, f, mu, c) {
                                to_nested[(self.tree_index(&xy, c, &t), col)] += v;
                            }
                        }
                    }
                }
            }
        }
        debug_assert_eq!(entries.len(), n);
        let from_nested = to_nested
            .clone()
            .try_inverse()
            .expect("split-to-nested basis change is invertible for coherent data");
        SplitBasis { entries, to_nested, from_nested }
    }

    /// Summand pairs `(dom, cod)` on which `m` has a nonzero block.
    fn support(&self, m: &Morphism) -> Vec<(usize, usize)> {
        let nd = m.dom.summands().len();
        let nc = m.cod.summands().len();
        let mut hit = vec![false; nd * nc];
        for (&c, b) in &m.blocks {
            let doff = self.offsets(&m.dom, c);
            let coff = self.offsets(&m.cod, c);
            for a in 0..nd {
                let dn = self.word_basis(&m.dom.summands()[a]).count(c);
                if dn == 0 {
                    continue;
                }
                for z in 0..nc {
                    if hit[a * nc + z] {
                        continue;
                    }
                    let cn = self.word_basis(&m.cod.summands()[z]).count(c);
                    if cn > 0 && b.view((coff[z], doff[a]), (cn, dn)).iter().any(|v| v.norm() != 0.0) {
                        hit[a * nc + z] = true;
                    }
                }
            }
        }
        (0..nd * nc).filter(|k| hit[*k]).map(|k| (k / nc, k % nc)).collect()
    }

    /// `f ⊗ g`, computed summand pair by summand pair through the split basis.
    pub fn tensor(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let dom = f.dom.tensor(&g.dom);
        let cod = f.cod.tensor(&g.cod);
        let mut out = self.zero(&dom, &cod);
        let sf = self.support(f);
        let sg = self.support(g);
        let ngd = g.dom.summands().len();
        let ngc = g.cod.summands().len();
        let mut offs: HashMap<(u8, usize), Vec<usize>> = HashMap::new();
        let mut off = |which: u8, c: usize| -> Vec<usize> {
            offs.entry((which, c))
                .or_insert_with(|| {
                    let obj = match which {
                        0 => &f.dom,
                        1 => &f.cod,
                        2 => &g.dom,
                        3 => &g.cod,
                        4 => &dom,
                        _ => &cod,
                    };
                    self.offsets(obj, c)
                })
                .clone()
        };
        for (&c, block) in out.blocks.iter_mut() {
            let dom_off = off(4, c);
            let cod_off = off(5, c);
            for &(a, a2) in &sf {
                for &(b, b2) in &sg {
                    let (x, xp) = (&f.dom.summands()[a], &g.dom.summands()[b]);
                    let (y, yp) = (&f.cod.summands()[a2], &g.cod.summands()[b2]);
                    let sd = self.split_basis(x, xp, c);
                    let sc = self.split_basis(y, yp, c);
                    if sd.entries.is_empty() || sc.entries.is_empty() {
                        continue;
                    }
                    let mut mid = DMatrix::<C64>::zeros(sc.entries.len(), sd.entries.len());
                    let mut nonzero = false;
                    for (col, &(e, fc, mu, i, j)) in sd.entries.iter().enumerate() {
                        let (Some(fb), Some(gb)) = (f.blocks.get(&e), g.blocks.get(&fc)) else {
                            continue;
                        };
                        let (fd, fcod) = (off(0, e)[a], off(1, e)[a2]);
                        let (gd, gcod) = (off(2, fc)[b], off(3, fc)[b2]);
                        for (row, &(e2, f2, mu2, i2, j2)) in sc.entries.iter().enumerate() {
                            if (e2, f2, mu2) == (e, fc, mu) {
                                let v = fb[(fcod + i2, fd + i)] * gb[(gcod + j2, gd + j)];
                                nonzero |= v.norm() != 0.0;
                                mid[(row, col)] = v;
                            }
                        }
                    }
                    if !nonzero {
                        continue;
                    }
                    let sub = &sc.to_nested * mid * &sd.from_nested;
                    let (r0, c0) = (cod_off[a2 * ngc + b2], dom_off[a * ngd + b]);
                    block.view_mut((r0, c0), sub.shape()).copy_from(&sub);
                }
            }
        }
        out
    }

    /// Tensor product of several morphisms, left to right.
    pub fn tensor_all(&self, parts: &[&Morphism]) -> Morphism {
        let mut acc = self.identity(&Object::unit());
        for p in parts {
            acc = self.tensor(&acc, p);
        }
        acc
    }

    fn charges_along(&self, w: &[usize], t: &Tree) -> Vec<usize> {
        let mut e = Vec::with_capacity(w.len());
        e.push(w[0]);
        e.extend(t.iter().map(|v| v.0));
        e
    }

    /// Image of one tree under the crossing of letters `pos, pos+1`.
    fn braid_tree(&self, w: &[usize], t: &Tree, pos: usize, reverse: bool) -> Vec<(Tree, C64)> {
        let cat = self.cat;
        let r = |abc: [usize; 3], mu, nu| {
            if reverse {
                cat.r_rev_entry(abc, mu, nu)
            } else {
                cat.r_entry(abc, mu, nu)
            }
        };
        let (a, b) = (w[pos], w[pos + 1]);
        let mut out = Vec::new();
        if pos == 0 {
            let (e2, mu) = t[0];
            for nu in 0..cat.n(b, a, e2) {
                let v = r([a, b, e2], mu, nu);
                if v.norm() != 0.0 {
                    let mut t2 = t.clone();
                    t2[0] = (e2, nu);
                    out.push((t2, v));
                }
            }
            return out;
        }
        let charges = self.charges_along(w, t);
        let e = charges[pos - 1];
        let (f, alpha) = t[pos - 1];
        let (g, beta) = t[pos];
        let Some(fwd) = cat.f_block(e, a, b, g) else { return out };
        let Some(back) = cat.f_block(e, b, a, g) else { return out };
        let row = fwd.row_index((f, alpha, beta)).expect("tree vertex is admissible");
        for (ci, &(h, gamma, delta)) in fwd.cols.iter().enumerate() {
            let c1 = fwd.mat[(row, ci)];
            if c1.norm() == 0.0 {
                continue;
            }
            for gamma2 in 0..cat.n(b, a, h) {
                let c2 = r([a, b, h], gamma, gamma2);
                if c2.norm() == 0.0 {
                    continue;
                }
                let Some(bc) = back.col_index((h, gamma2, delta)) else { continue };
                for (ri, &(f2, alpha2, beta2)) in back.rows.iter().enumerate() {
                    let c3 = back.inv[(bc, ri)];
                    if c3.norm() == 0.0 {
                        continue;
                    }
                    let mut t2 = t.clone();
                    t2[pos - 1] = (f2, alpha2);
                    t2[pos] = (g, beta2);
                    out.push((t2, c1 * c2 * c3));
                }
            }
        }
        out
    }

    fn word_braid(&self, w: &[usize], pos: usize, reverse: bool) -> Result<Morphism> {
        if w.len() < 2 || pos + 1 >= w.len() {
            return Err(FrobError::IndexOutOfRange { index: pos, len: w.len() });
        }
        let mut sw = w.to_vec();
        sw.swap(pos, pos + 1);
        let dom = Object::word(w.to_vec());
        let cod = Object::word(sw.clone());
        let mut out = self.zero(&dom, &cod);
        for (&c, block) in out.blocks.iter_mut() {
            for (j, t) in self.trees(w, c).iter().enumerate() {
                for (t2, v) in self.braid_tree(w, t, pos, reverse) {
                    block[(self.tree_index(&sw, c, &t2), j)] += v;
                }
            }
        }
        Ok(out)
    }

    /// Applies a per-summand word morphism builder to every summand of `obj`,
    /// producing a block-diagonal morphism into the object of images.
    fn summandwise(
        &self,
        obj: &Object,
        build: impl Fn(&[usize]) -> Result<Morphism>,
    ) -> Result<Morphism> {
        let parts: Vec<Morphism> = obj.summands().iter().map(|w| build(w)).collect::<Result<_>>()?;
        let cod = Object::new(parts.iter().flat_map(|m| m.cod.summands().to_vec()).collect());
        let pairs: Vec<(usize, usize, &Morphism)> = parts.iter().enumerate().map(|(i, m)| (i, i, m)).collect();
        self.assemble(obj, &cod, &pairs)
    }

    /// Places word-level morphisms `(dom summand, cod summand, map)` into a
    /// morphism between sum objects. Each map must have a single-summand
    /// domain and codomain matching the addressed summands.
    pub fn assemble(&self, dom: &Object, cod: &Object, parts: &[(usize, usize, &Morphism)]) -> Result<Morphism> {
        let mut out = self.zero(dom, cod);
        for (&c, block) in out.blocks.iter_mut() {
            let doff = self.offsets(dom, c);
            let coff = self.offsets(cod, c);
            for &(a, b, m) in parts {
                if m.dom.summands() != [dom.summands()[a].clone()] || m.cod.summands() != [cod.summands()[b].clone()] {
                    return Err(FrobError::ShapeMismatch(format!(
                        "part {} -> {} does not match summands {a} -> {b}",
                        m.dom, m.cod
                    )));
                }
                if let Some(mb) = m.blocks.get(&c) {
                    block
                        .view_mut((coff[b], doff[a]), (mb.nrows(), mb.ncols()))
                        .copy_from(mb);
                }
            }
        }
        Ok(out)
    }

    /// Elementary crossing `c_{x_pos, x_pos+1}` on every summand of `obj`.
    pub fn braid(&self, obj: &Object, pos: usize) -> Result<Morphism> {
        self.summandwise(obj, |w| self.word_braid(w, pos, false))
    }

    /// Inverse crossing `c^{-1}_{x_pos+1, x_pos}`: from `obj` to the object
    /// with letters `pos, pos+1` swapped.
    pub fn braid_inv(&self, obj: &Object, pos: usize) -> Result<Morphism> {
        self.summandwise(obj, |w| self.word_braid(w, pos, true))
    }

    /// Braiding of words `c_{x,y}: x·y -> y·x` by elementary crossings.
    fn word_braiding(&self, x: &[usize], y: &[usize], reverse: bool) -> Result<Morphism> {
        let mut w: Vec<usize> = x.iter().chain(y).copied().collect();
        let mut acc = self.identity(&Object::word(w.clone()));
        for s in (0..x.len()).rev() {
            for pos in s..s + y.len() {
                let b = self.word_braid(&w, pos, reverse)?;
                w.swap(pos, pos + 1);
                acc = self.compose(&b, &acc)?;
            }
        }
        Ok(acc)
    }

    /// `c_{X,Y}: X ⊗ Y -> Y ⊗ X`.
    pub fn braiding(&self, x: &Object, y: &Object) -> Result<Morphism> {
        self.object_braiding(x, y, false)
    }

    /// `c^{-1}_{X,Y}: Y ⊗ X -> X ⊗ Y`.
    pub fn braiding_inv(&self, x: &Object, y: &Object) -> Result<Morphism> {
        // c^{-1}_{X,Y} equals the reverse braiding c'_{Y,X}
        self.object_braiding(y, x, true)
    }

    fn object_braiding(&self, x: &Object, y: &Object, reverse: bool) -> Result<Morphism> {
        let dom = x.tensor(y);
        let cod = y.tensor(x);
        let nx = x.summands().len();
        let ny = y.summands().len();
        let mut parts = Vec::new();
        for (a, xw) in x.summands().iter().enumerate() {
            for (b, yw) in y.summands().iter().enumerate() {
                parts.push((a * ny + b, b * nx + a, self.word_braiding(xw, yw, reverse)?));
            }
        }
        let refs: Vec<(usize, usize, &Morphism)> = parts.iter().map(|(a, b, m)| (*a, *b, m)).collect();
        self.assemble(&dom, &cod, &refs)
    }

    /// Twist `θ_X`, acting by `θ_c` on the charge-`c` sector.
    pub fn twist(&self, obj: &Object) -> Morphism {
        let mut m = self.identity(obj);
        for (c, b) in m.blocks.iter_mut() {
            *b *= self.cat.theta(*c);
        }
        m
    }

    fn f00(&self, i: usize) -> (C64, C64) {
        let ib = self.cat.dual(i);
        (
            self.cat.f_entry([i, ib, i, i], (0, 0, 0), (0, 0, 0)),
            self.cat.f_inv_entry([i, ib, i, i], (0, 0, 0), (0, 0, 0)),
        )
    }

    fn unit_map(&self, dom: TensorWord, cod: TensorWord, v: C64) -> Morphism {
        let mut m = self.zero(&Object::word(dom), &Object::word(cod));
        if let Some(b) = m.blocks.get_mut(&0) {
            b[(0, 0)] = v;
        }
        m
    }

    /// `coev_i: 1 -> i ⊗ ī`, normalized to 1 on the unique tree.
    pub fn cup(&self, i: usize) -> Morphism {
        self.unit_map(vec![], vec![i, self.cat.dual(i)], C64::new(1.0, 0.0))
    }

    /// `ev_i: ī ⊗ i -> 1`, fixed by the zig-zag with [`Engine::cup`].
    pub fn cap_right(&self, i: usize) -> Morphism {
        let (f, _) = self.f00(i);
        self.unit_map(vec![self.cat.dual(i), i], vec![], C64::new(1.0, 0.0) / f)
    }

    /// `coev'_i: 1 -> ī ⊗ i`, normalized so that `cap_right(i) ∘ cup_right(i) = d_i`.
    pub fn cup_right(&self, i: usize) -> Morphism {
        let (f, _) = self.f00(i);
        self.unit_map(vec![], vec![self.cat.dual(i), i], f * self.cat.qdim(i))
    }

    /// `ev'_i: i ⊗ ī -> 1`, fixed by the zig-zag with [`Engine::cup_right`].
    pub fn cap(&self, i: usize) -> Morphism {
        let (f, finv) = self.f00(i);
        self.unit_map(vec![i, self.cat.dual(i)], vec![], C64::new(1.0, 0.0) / (f * self.cat.qdim(i) * finv))
    }

    /// `coev_X: 1 -> X ⊗ X^∨` for an object whose summands are single labels.
    pub fn cup_object(&self, x: &Object) -> Result<Morphism> {
        self.object_pairing(x, false, true)
    }

    /// `coev'_X: 1 -> X^∨ ⊗ X` for an object whose summands are single labels.
    pub fn cup_right_object(&self, x: &Object) -> Result<Morphism> {
        self.object_pairing(x, true, true)
    }

    /// `ev'_X: X ⊗ X^∨ -> 1`.
    pub fn cap_object(&self, x: &Object) -> Result<Morphism> {
        self.object_pairing(x, false, false)
    }

    /// `ev_X: X^∨ ⊗ X -> 1`.
    pub fn cap_right_object(&self, x: &Object) -> Result<Morphism> {
        self.object_pairing(x, true, false)
    }

    fn object_pairing(&self, x: &Object, right: bool, cup: bool) -> Result<Morphism> {
        if x.summands().iter().any(|w| w.len() != 1) {
            return Err(FrobError::ShapeMismatch(format!("duality maps need single-label summands, got {x}")));
        }
        let xd = x.dual(self.cat);
        let pair = if right { xd.tensor(x) } else { x.tensor(&xd) };
        let n = x.summands().len();
        let mut parts = Vec::new();
        for (a, w) in x.summands().iter().enumerate() {
            let i = w[0];
            let m = match (right, cup) {
                (false, true) => self.cup(i),
                (true, true) => self.cup_right(i),
                (false, false) => self.cap(i),
                (true, false) => self.cap_right(i),
            };
            parts.push((a * n + a, m));
        }
        let unit = Object::unit();
        let refs: Vec<(usize, usize, &Morphism)> = parts
            .iter()
            .map(|(p, m)| if cup { (0, *p, m) } else { (*p, 0, m) })
            .collect();
        if cup {
            self.assemble(&unit, &pair, &refs)
        } else {
            self.assemble(&pair, &unit, &refs)
        }
    }

    /// Right partial trace over the last letter shared by every summand of
    /// domain and codomain: `(id_Y ⊗ ev'_i) ∘ (f ⊗ id_ī) ∘ (id_X ⊗ coev_i)`.
    pub fn partial_trace_last(&self, f: &Morphism) -> Result<Morphism> {
        let (x, i) = f
            .dom
            .split_last()
            .ok_or_else(|| FrobError::ShapeMismatch(format!("domain {} has no common last factor", f.dom)))?;
        let (y, j) = f
            .cod
            .split_last()
            .ok_or_else(|| FrobError::ShapeMismatch(format!("codomain {} has no common last factor", f.cod)))?;
        if i != j {
            return Err(FrobError::ShapeMismatch(format!("last factors {i} and {j} differ")));
        }
        let ib = Object::label(self.cat.dual(i));
        let open = self.tensor(&self.identity(&x), &self.cup(i));
        let mid = self.tensor(f, &self.identity(&ib));
        let close = self.tensor(&self.identity(&y), &self.cap(i));
        self.compose_all(&[&open, &mid, &close])
    }

    /// Quantum trace of an endomorphism: `Σ_c d_c Tr(f_c)`.
    pub fn trace(&self, f: &Morphism) -> Result<C64> {
        if f.dom != f.cod {
            return Err(FrobError::ShapeMismatch(format!("trace of non-endomorphism {} -> {}", f.dom, f.cod)));
        }
        Ok(f.blocks.iter().map(|(c, m)| m.trace() * self.cat.qdim(*c)).sum())
    }

    /// Quantum trace computed by closing strands one at a time with cups and
    /// caps. Only defined when every summand has the same length.
    pub fn trace_by_closure(&self, f: &Morphism) -> Result<C64> {
        let mut g = f.clone();
        while g.dom.summands().iter().any(|w| !w.is_empty()) {
            g = self.partial_trace_last(&g)?;
        }
        // a sum of empty words is a multiple of the unit
        Ok(g.blocks.get(&0).map_or(C64::default(), |m| m.trace()))
    }
}
