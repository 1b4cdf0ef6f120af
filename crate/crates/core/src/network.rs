//! Planar networks of algebra generators, evaluated as morphisms.
//!
//! A network starts from `inputs` parallel `A` strands and applies layers
//! left to right. Each layer acts on adjacent strands at a position:
//! an edge inserts `Δ∘η` (two new strands), a vertex closes three strands
//! with `ε∘m∘(m⊗id)` and a pair closes two with `ε∘m`. When every strand is
//! closed the result is a morphism `A^{⊗inputs} -> 1`; a closed network
//! (`inputs = 0`) is a scalar.

use num_complex::Complex64 as C64;

use crate::diagram::{Engine, Morphism, Object};
use crate::error::{FrobError, Result};
use crate::frobenius::FrobeniusAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Edge(usize),
    Vertex(usize),
    Pair(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    pub name: String,
    pub inputs: usize,
    pub layers: Vec<Layer>,
}

impl NetworkSpec {
    pub fn new(name: &str, inputs: usize, layers: Vec<Layer>) -> Self {
        NetworkSpec { name: name.to_string(), inputs, layers }
    }

    /// Strand count after every layer, or the first malformed layer.
    pub fn strand_counts(&self) -> Result<Vec<usize>> {
        let mut n = self.inputs;
        let mut out = Vec::with_capacity(self.layers.len());
        for (k, l) in self.layers.iter().enumerate() {
            let (at, width, added) = match *l {
                Layer::Edge(at) => (at, 0, 2),
                Layer::Vertex(at) => (at, 3, 0),
                Layer::Pair(at) => (at, 2, 0),
            };
            if at + width > n {
                return Err(FrobError::ShapeMismatch(format!(
                    "{}: layer {k} ({l:?}) needs strands {at}..{} of {n}",
                    self.name,
                    at + width
                )));
            }
            n = n - width + added;
            out.push(n);
        }
        Ok(out)
    }
}

fn power(a: &Object, k: usize) -> Object {
    (0..k).fold(Object::unit(), |acc, _| acc.tensor(a))
}

/// Evaluates a network to a morphism `A^{⊗inputs} -> 1`.
pub fn evaluate_patch(eng: &Engine, alg: &FrobeniusAlgebra, net: &NetworkSpec) -> Result<Morphism> {
    let counts = net.strand_counts()?;
    if counts.last().copied().unwrap_or(net.inputs) != 0 {
        return Err(FrobError::ShapeMismatch(format!("{}: network leaves open strands", net.name)));
    }
    let a = alg.object();
    let edge = alg.edge(eng);
    let vertex = alg.vertex(eng);
    let pair = alg.pairing(eng);
    let mut n = net.inputs;
    let mut acc = eng.identity(&power(&a, n));
    for l in &net.layers {
        let (at, width, g) = match *l {
            Layer::Edge(at) => (at, 0, &edge),
            Layer::Vertex(at) => (at, 3, &vertex),
            Layer::Pair(at) => (at, 2, &pair),
        };
        let left = eng.identity(&power(&a, at));
        let right = eng.identity(&power(&a, n - at - width));
        let step = eng.tensor(&eng.tensor(&left, g), &right);
        acc = eng.compose(&step, &acc)?;
        n = n - width + g.cod().summands()[0].len();
    }
    Ok(acc)
}

/// Scalar value of a closed network.
pub fn evaluate_algebra_network(eng: &Engine, alg: &FrobeniusAlgebra, net: &NetworkSpec) -> Result<C64> {
    if net.inputs != 0 {
        return Err(FrobError::ShapeMismatch(format!("{} has {} open inputs", net.name, net.inputs)));
    }
    let m = evaluate_patch(eng, alg, net)?;
    Ok(m.scalar().unwrap_or_default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PachnerMove {
    TwoTwo,
    OneThree,
}

/// Two networks related by one local move.
#[derive(Clone, Debug)]
pub struct PachnerCase {
    pub name: String,
    pub kind: PachnerMove,
    pub before: NetworkSpec,
    pub after: NetworkSpec,
}

fn shifted(layers: &[Layer], by: usize) -> Vec<Layer> {
    layers
        .iter()
        .map(|l| match *l {
            Layer::Edge(a) => Layer::Edge(a + by),
            Layer::Vertex(a) => Layer::Vertex(a + by),
            Layer::Pair(a) => Layer::Pair(a + by),
        })
        .collect()
}

/// Two triangles glued along one edge, legs `a b c d`, split as `(ab)(cd)`.
fn square_s(at: usize) -> Vec<Layer> {
    shifted(&[Layer::Edge(2), Layer::Vertex(0), Layer::Vertex(0)], at)
}

/// The flipped diagonal, split as `(bc)(da)`.
fn square_t(at: usize) -> Vec<Layer> {
    shifted(&[Layer::Edge(3), Layer::Vertex(1), Layer::Vertex(0)], at)
}

/// A vertex on legs `a b c` replaced by three vertices around a triangle.
fn subdivided_vertex(at: usize) -> Vec<Layer> {
    shifted(
        &[Layer::Edge(1), Layer::Edge(2), Layer::Vertex(0), Layer::Edge(3), Layer::Vertex(1), Layer::Vertex(0)],
        at,
    )
}

fn concat(parts: &[Vec<Layer>]) -> Vec<Layer> {
    parts.concat()
}

/// Edges producing `2k` strands nested as `x_1 … x_k x_k' … x_1'`.
fn nested_edges(k: usize) -> Vec<Layer> {
    (0..k).map(Layer::Edge).collect()
}

/// The bubble `(ε∘m)∘(Δ∘η)`.
pub fn bubble() -> NetworkSpec {
    NetworkSpec::new("bubble", 0, vec![Layer::Edge(0), Layer::Pair(0)])
}

/// Sphere from two triangles.
pub fn theta() -> NetworkSpec {
    NetworkSpec::new("theta", 0, concat(&[nested_edges(3), vec![Layer::Vertex(0), Layer::Vertex(0)]]))
}

/// Sphere from four triangles (the tetrahedron).
pub fn tetrahedron() -> NetworkSpec {
    NetworkSpec::new(
        "tetrahedron",
        0,
        concat(&[nested_edges(3), subdivided_vertex(0), vec![Layer::Vertex(0)]]),
    )
}

/// Closed networks used as examples.
pub fn net_library() -> Vec<NetworkSpec> {
    vec![
        bubble(),
        theta(),
        tetrahedron(),
        NetworkSpec::new("pillow", 0, concat(&[nested_edges(4), square_s(0), square_s(0)])),
        NetworkSpec::new("octahedron_like", 0, concat(&[nested_edges(3), subdivided_vertex(0), subdivided_vertex(0)])),
    ]
}

/// Pairs of networks related by one Pachner move, open and closed.
pub fn pachner_library() -> Vec<PachnerCase> {
    let case = |name: &str, kind, inputs, before: Vec<Layer>, after: Vec<Layer>| PachnerCase {
        name: name.to_string(),
        kind,
        before: NetworkSpec::new(&format!("{name}/before"), inputs, before),
        after: NetworkSpec::new(&format!("{name}/after"), inputs, after),
    };
    use PachnerMove::*;
    vec![
        case("square_flip", TwoTwo, 4, square_s(0), square_t(0)),
        case("vertex_subdivision", OneThree, 3, vec![Layer::Vertex(0)], subdivided_vertex(0)),
        case(
            "square_with_subdivision",
            OneThree,
            4,
            square_s(0),
            concat(&[vec![Layer::Edge(2)], subdivided_vertex(0), vec![Layer::Vertex(0)]]),
        ),
        case(
            "theta_to_tetrahedron",
            OneThree,
            0,
            theta().layers,
            tetrahedron().layers,
        ),
        case(
            "tetrahedron_second_vertex",
            OneThree,
            0,
            tetrahedron().layers,
            concat(&[nested_edges(3), subdivided_vertex(0), subdivided_vertex(0)]),
        ),
        case(
            "pillow_flip",
            TwoTwo,
            0,
            concat(&[nested_edges(4), square_s(0), square_s(0)]),
            concat(&[nested_edges(4), square_t(0), square_s(0)]),
        ),
        case(
            "pillow_double_flip",
            TwoTwo,
            0,
            concat(&[nested_edges(4), square_t(0), square_s(0)]),
            concat(&[nested_edges(4), square_t(0), square_t(0)]),
        ),
    ]
}

/// Residual of one Pachner case: the distance between both sides.
pub fn pachner_residual(eng: &Engine, alg: &FrobeniusAlgebra, case: &PachnerCase) -> Result<f64> {
    let before = evaluate_patch(eng, alg, &case.before)?;
    let after = evaluate_patch(eng, alg, &case.after)?;
    before.distance(&after)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{cardy_algebra, simple_current_candidate};
    use crate::library;

    #[test]
    fn library_nets_are_well_formed() {
        for net in net_library() {
            assert_eq!(net.strand_counts().unwrap().last(), Some(&0), "{}", net.name);
        }
        for case in pachner_library() {
            assert_eq!(case.before.strand_counts().unwrap().last(), Some(&0));
            assert_eq!(case.after.strand_counts().unwrap().last(), Some(&0));
        }
        let bad = NetworkSpec::new("bad", 0, vec![Layer::Vertex(0)]);
        assert!(matches!(bad.strand_counts(), Err(FrobError::ShapeMismatch(_))));
    }

    #[test]
    fn cardy_nets_are_one() {
        let cat = library::ising().unwrap();
        let eng = Engine::new(&cat);
        let a = cardy_algebra(&eng);
        for net in net_library() {
            let v = evaluate_algebra_network(&eng, &a, &net).unwrap();
            assert!((v - 1.0).norm() < 1e-12, "{}: {v}", net.name);
        }
    }

    #[test]
    fn toric_spheres_evaluate_to_dim() {
        let cat = library::toric_code().unwrap();
        let eng = Engine::new(&cat);
        let a = simple_current_candidate(&eng, &[0, 1], |_, _| C64::new(1.0, 0.0)).unwrap();
        for net in net_library() {
            let v = evaluate_algebra_network(&eng, &a, &net).unwrap();
            assert!((v - 2.0).norm() < 1e-9, "{}: {v}", net.name);
        }
        for case in pachner_library() {
            assert!(pachner_residual(&eng, &a, &case).unwrap() < 1e-9, "{}", case.name);
        }
    }

    #[test]
    fn open_inputs_are_not_scalars() {
        let cat = library::trivial().unwrap();
        let eng = Engine::new(&cat);
        let a = cardy_algebra(&eng);
        let net = NetworkSpec::new("v", 3, vec![Layer::Vertex(0)]);
        assert!(evaluate_algebra_network(&eng, &a, &net).is_err());
        assert!(evaluate_patch(&eng, &a, &net).is_ok());
    }
}
