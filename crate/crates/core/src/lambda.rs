//! The last subconstituent Λ as a concrete graph.
//!
//! A vertex is the row space of a ν×(2ν+2) matrix `(A  I  Z)` with
//! `A + Aᵗ + ZΔZᵗ = 0`. Writing `A = X − ½ZΔZᵗ` with `X` alternate gives the
//! canonical coordinate pair `(X, Z)` used everywhere in the crate: the pair
//! is uniquely recoverable from the subspace, composes cleanly under the
//! group actions, and indexes the vertex set lexicographically.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::Fe;
use crate::geometry::OrthoSpace;
use crate::mat::{hconcat, vconcat, Mat};

/// A vertex of Λ in `(X, Z)` coordinates: `X` alternate ν×ν, `Z` ν×2.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Vertex {
    x: Mat,
    z: Mat,
}

impl Vertex {
    pub fn new(space: &OrthoSpace, x: Mat, z: Mat) -> Result<Vertex> {
        let nu = space.nu();
        if x.rows() != nu || x.cols() != nu {
            return Err(Error::Dim("X must be ν×ν".into()));
        }
        if z.rows() != nu || z.cols() != space.delta() {
            return Err(Error::Dim("Z must be ν×δ".into()));
        }
        if !x.is_alternate() {
            return Err(Error::NotAlternate);
        }
        Ok(Vertex { x, z })
    }

    /// The base vertex `(0  I  0)`, i.e. `X = 0`, `Z = 0`.
    pub fn base(space: &OrthoSpace) -> Vertex {
        Vertex {
            x: Mat::zero(space.gf(), space.nu(), space.nu()),
            z: Mat::zero(space.gf(), space.nu(), space.delta()),
        }
    }

    pub fn x(&self) -> &Mat {
        &self.x
    }
    pub fn z(&self) -> &Mat {
        &self.z
    }

    /// The realized subspace matrix `(X − ½ZΔZᵗ  I  Z)`.
    pub fn realize(&self, space: &OrthoSpace) -> Mat {
        let gf = space.gf();
        let half = gf.half();
        let zdz = self
            .z
            .mul(space.delta_mat())
            .unwrap()
            .mul(&self.z.transpose())
            .unwrap();
        let a = self.x.sub(&zdz.scale(half)).unwrap();
        hconcat(&[a, Mat::identity(gf, space.nu()), self.z.clone()]).unwrap()
    }

    /// The alternate part of the realized matrix, `A = X − ½ZΔZᵗ`.
    pub fn realized_a(&self, space: &OrthoSpace) -> Mat {
        let half = space.gf().half();
        let zdz = self
            .z
            .mul(space.delta_mat())
            .unwrap()
            .mul(&self.z.transpose())
            .unwrap();
        self.x.sub(&zdz.scale(half)).unwrap()
    }

    /// Recovers the canonical `(X, Z)` pair from any matrix representation
    /// of a Λ-vertex. Fails when the subspace is not totally isotropic of
    /// rank ν or its middle block is singular (i.e. it is not at maximal
    /// distance from the base subspace).
    pub fn from_matrix(space: &OrthoSpace, m: &Mat) -> Result<Vertex> {
        let nu = space.nu();
        if m.rows() != nu || m.cols() != space.dim() {
            return Err(Error::Dim("vertex matrix must be ν×(2ν+δ)".into()));
        }
        if !space.is_totally_isotropic(m) {
            return Err(Error::NotInLambda("not totally isotropic".into()));
        }
        let mid = m.submatrix(0, nu, nu, 2 * nu);
        let mid_inv = mid
            .inverse()
            .map_err(|_| Error::NotInLambda("middle block is singular".into()))?;
        let normalized = mid_inv.mul(m)?;
        let a = normalized.submatrix(0, nu, 0, nu);
        let z = normalized.submatrix(0, nu, 2 * nu, space.dim());
        let half = space.gf().half();
        let zdz = z.mul(space.delta_mat())?.mul(&z.transpose())?;
        let x = a.add(&zdz.scale(half))?;
        debug_assert!(x.is_alternate());
        Vertex::new(space, x, z)
    }

    /// The lexicographic enumeration index of this vertex: the free
    /// coordinates of `X` above the diagonal (row-major) followed by `Z`
    /// row-major, read as big-endian base-q digits.
    pub fn index(&self, space: &OrthoSpace) -> u64 {
        let q = space.gf().q() as u128;
        let mut acc: u128 = 0;
        let nu = space.nu();
        for i in 0..nu {
            for j in i + 1..nu {
                acc = acc * q + self.x[(i, j)] as u128;
            }
        }
        for i in 0..nu {
            for j in 0..space.delta() {
                acc = acc * q + self.z[(i, j)] as u128;
            }
        }
        u64::try_from(acc).expect("vertex index fits in u64 at desk scale")
    }

    pub fn from_index(space: &OrthoSpace, index: u64) -> Vertex {
        let gf = space.gf();
        let q = gf.q() as u64;
        let nu = space.nu();
        let free = nu * (nu - 1) / 2 + nu * space.delta();
        let mut digits = vec![0 as Fe; free];
        let mut rem = index;
        for slot in digits.iter_mut().rev() {
            *slot = (rem % q) as Fe;
            rem /= q;
        }
        assert_eq!(rem, 0, "vertex index out of range");
        let mut it = digits.into_iter();
        let mut x = Mat::zero(gf, nu, nu);
        for i in 0..nu {
            for j in i + 1..nu {
                let v = it.next().unwrap();
                x[(i, j)] = v;
                x[(j, i)] = gf.neg(v);
            }
        }
        let mut z = Mat::zero(gf, nu, space.delta());
        for i in 0..nu {
            for j in 0..space.delta() {
                z[(i, j)] = it.next().unwrap();
            }
        }
        Vertex { x, z }
    }

    /// Compact JSON encoding `{"X": [...], "Z": [...]}` with row-major
    /// entries.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "X": self.x.entries(), "Z": self.z.entries() })
    }

    pub fn from_json(space: &OrthoSpace, value: &serde_json::Value) -> Result<Vertex> {
        let nu = space.nu();
        let parse = |key: &str, rows: usize, cols: usize| -> Result<Mat> {
            let arr = value
                .get(key)
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::InvalidParameter(format!("missing array field {key}")))?;
            let entries: Option<Vec<Fe>> = arr
                .iter()
                .map(|v| v.as_u64().and_then(|x| u32::try_from(x).ok()))
                .collect();
            let entries =
                entries.ok_or_else(|| Error::InvalidParameter(format!("bad entries in {key}")))?;
            Mat::new(space.gf(), rows, cols, entries)
        };
        let x = parse("X", nu, nu)?;
        let z = parse("Z", nu, space.delta())?;
        Vertex::new(space, x, z)
    }
}

/// `|Λ| = q^{ν(ν+3)/2}` for δ = 2.
pub fn vertex_count(q: u128, nu: usize) -> u128 {
    q.pow((nu * (nu + 3) / 2) as u32)
}

/// All vertices in canonical (index) order.
pub fn vertices(space: &OrthoSpace) -> impl Iterator<Item = Vertex> + '_ {
    assert_eq!(space.delta(), 2, "vertex enumeration requires delta = 2");
    let n = vertex_count(space.gf().q() as u128, space.nu());
    let n = u64::try_from(n).expect("vertex count fits in u64 at desk scale");
    (0..n).map(move |i| Vertex::from_index(space, i))
}

#[cfg(test)]
pub fn random_vertex(space: &OrthoSpace, rng: &mut impl rand::Rng) -> Vertex {
    let n = vertex_count(space.gf().q() as u128, space.nu()) as u64;
    Vertex::from_index(space, rng.random_range(0..n))
}

/// Adjacency: `(A − A₁  Z − Z₁)` has rank 1.
pub fn adjacent(space: &OrthoSpace, u: &Vertex, v: &Vertex) -> bool {
    let da = u.realized_a(space).sub(&v.realized_a(space)).unwrap();
    let dz = u.z().sub(v.z()).unwrap();
    hconcat(&[da, dz]).unwrap().rank() == 1
}

/// All rank-1 ν×2 matrices, each exactly once: `D = D₀ (x y)` with the first
/// nonzero coordinate of `D₀` normalized to 1 and `(x, y) ≠ (0, 0)`.
fn rank_one_directions(space: &OrthoSpace) -> Vec<Mat> {
    let gf = space.gf();
    let nu = space.nu();
    let q = gf.q() as u64;
    let mut columns = Vec::new();
    // Normalized nonzero columns, i.e. projective points of F_q^ν.
    for lead in 0..nu {
        let tail = nu - lead - 1;
        let count = q.pow(tail as u32);
        for mut rem in 0..count {
            let mut col = vec![0 as Fe; nu];
            col[lead] = 1;
            for slot in col.iter_mut().skip(lead + 1) {
                *slot = (rem % q) as Fe;
                rem /= q;
            }
            columns.push(col);
        }
    }
    let mut out = Vec::with_capacity(columns.len() * (q as usize * q as usize - 1));
    for col in &columns {
        for x in gf.elements() {
            for y in gf.elements() {
                if x == 0 && y == 0 {
                    continue;
                }
                let mut d = Mat::zero(gf, nu, 2);
                for (i, &c) in col.iter().enumerate() {
                    d[(i, 0)] = gf.mul(c, x);
                    d[(i, 1)] = gf.mul(c, y);
                }
                out.push(d);
            }
        }
    }
    out
}

/// The neighborhood of `v`, generated directly from rank-1 difference
/// matrices rather than by scanning Λ: exactly `(q^ν − 1)(q + 1)` vertices.
pub fn neighbors(space: &OrthoSpace, v: &Vertex) -> Vec<Vertex> {
    let gf = space.gf();
    let half = gf.half();
    let c = v.z();
    let mut out = Vec::new();
    for d in rank_one_directions(space) {
        // X' = X + ½(CΔDᵗ − DΔCᵗ), Z' = C + D.
        let cdt = c
            .mul(space.delta_mat())
            .unwrap()
            .mul(&d.transpose())
            .unwrap();
        let skew = cdt.sub(&cdt.transpose()).unwrap().scale(half);
        let x = v.x().add(&skew).unwrap();
        let z = c.add(&d).unwrap();
        out.push(Vertex::new(space, x, z).unwrap());
    }
    out
}

/// `dim(P + Q)`: the rank of the stacked matrix representations.
pub fn joint_dim(space: &OrthoSpace, u: &Vertex, v: &Vertex) -> usize {
    vconcat(&[u.realize(space), v.realize(space)]).unwrap().rank()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Dimacs,
    Json,
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<GraphFormat> {
        match s {
            "edgelist" => Ok(GraphFormat::EdgeList),
            "dimacs" => Ok(GraphFormat::Dimacs),
            "json" => Ok(GraphFormat::Json),
            other => Err(Error::InvalidParameter(format!(
                "unknown graph format {other:?} (expected edgelist, dimacs or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GraphSummary {
    pub vertices: u64,
    pub edges: u64,
}

/// Writes the whole graph; each undirected edge appears once with endpoint
/// indices in enumeration order.
pub fn export_graph(
    space: &OrthoSpace,
    format: GraphFormat,
    out: &mut dyn Write,
) -> Result<GraphSummary> {
    let n = u64::try_from(vertex_count(space.gf().q() as u128, space.nu()))
        .map_err(|_| Error::CapExceeded("vertex count exceeds u64".into()))?;
    let mut edges: Vec<(u64, u64)> = Vec::new();
    for u in vertices(space) {
        let ui = u.index(space);
        for w in neighbors(space, &u) {
            let wi = w.index(space);
            if ui < wi {
                edges.push((ui, wi));
            }
        }
    }
    edges.sort_unstable();
    let m = edges.len() as u64;
    match format {
        GraphFormat::EdgeList => {
            writeln!(out, "{} {}", n, m)?;
            for (u, v) in &edges {
                writeln!(out, "{} {}", u, v)?;
            }
        }
        GraphFormat::Dimacs => {
            writeln!(out, "p edge {} {}", n, m)?;
            for (u, v) in &edges {
                writeln!(out, "e {} {}", u + 1, v + 1)?;
            }
        }
        GraphFormat::Json => {
            let vs: Vec<serde_json::Value> = vertices(space).map(|v| v.to_json()).collect();
            let doc = serde_json::json!({
                "q": space.gf().q(),
                "nu": space.nu(),
                "vertices": vs,
                "edges": edges.iter().map(|&(u, v)| vec![u, v]).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap())?;
        }
    }
    Ok(GraphSummary {
        vertices: n,
        edges: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Gf;
    use crate::mat::{alt2, basis_vector, block_diag};

    fn space(q: u64, nu: usize) -> OrthoSpace {
        OrthoSpace::standard(&Gf::new(q).unwrap(), nu).unwrap()
    }

    fn phi1_1(space: &OrthoSpace) -> Vertex {
        let gf = space.gf();
        let nu = space.nu();
        let x = block_diag(&[alt2(gf), Mat::zero(gf, nu - 2, nu - 2)]).unwrap();
        Vertex::new(space, x, Mat::zero(gf, nu, 2)).unwrap()
    }

    fn phi2_00(space: &OrthoSpace) -> Vertex {
        let gf = space.gf();
        let nu = space.nu();
        let mut z = Mat::zero(gf, nu, 2);
        z.set_block(0, 0, &basis_vector(gf, nu, 1));
        Vertex::new(space, Mat::zero(gf, nu, nu), z).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(vertex_count(3, 2), 243);
        assert_eq!(vertex_count(3, 1), 9);
        assert_eq!(vertex_count(5, 2), 3125);
    }

    #[test]
    fn enumeration_basics() {
        let s = space(3, 2);
        let all: Vec<Vertex> = vertices(&s).collect();
        assert_eq!(all.len(), 243);
        assert_eq!(all[0], Vertex::base(&s));
        for (i, v) in all.iter().enumerate() {
            assert_eq!(v.index(&s), i as u64);
            assert!(s.is_totally_isotropic(&v.realize(&s)));
            assert_eq!(Vertex::from_matrix(&s, &v.realize(&s)).unwrap(), *v);
        }
    }

    #[test]
    fn from_matrix_rejects() {
        let s = space(3, 2);
        // P0 has a zero middle block.
        assert!(matches!(
            Vertex::from_matrix(&s, &s.p0()),
            Err(Error::NotInLambda(_))
        ));
        // A non-isotropic matrix.
        let mut m = s.p1_matrix();
        m[(0, 0)] = 1;
        m[(0, 2)] = 1;
        assert!(Vertex::from_matrix(&s, &m).is_err());
    }

    #[test]
    fn from_matrix_normalizes_row_space() {
        let s = space(3, 2);
        let v = phi1_1(&s);
        let realized = v.realize(&s);
        // Scramble by an invertible row operation; same row space.
        let u = Mat::new(s.gf(), 2, 2, vec![1, 1, 0, 2]).unwrap();
        let scrambled = u.mul(&realized).unwrap();
        assert_eq!(Vertex::from_matrix(&s, &scrambled).unwrap(), v);
    }

    #[test]
    fn adjacency_examples() {
        let s = space(3, 2);
        let p1 = Vertex::base(&s);
        assert!(!adjacent(&s, &p1, &p1));
        assert!(adjacent(&s, &p1, &phi2_00(&s)));
        assert!(!adjacent(&s, &p1, &phi1_1(&s)));
        // Symmetric and irreflexive over the whole graph.
        let all: Vec<Vertex> = vertices(&s).collect();
        for u in &all {
            assert!(!adjacent(&s, u, u));
        }
        for u in all.iter().take(40) {
            for v in all.iter().take(40) {
                assert_eq!(adjacent(&s, u, v), adjacent(&s, v, u));
            }
        }
    }

    #[test]
    fn neighbor_counts_and_oracle_equivalence() {
        let s = space(3, 2);
        let k = (3u64.pow(2) - 1) * 4;
        assert_eq!(k, 32);
        let all: Vec<Vertex> = vertices(&s).collect();
        for v in &all {
            let ns = neighbors(&s, v);
            assert_eq!(ns.len(), 32);
            let mut idx: Vec<u64> = ns.iter().map(|u| u.index(&s)).collect();
            idx.sort_unstable();
            idx.dedup();
            assert_eq!(idx.len(), 32);
            for u in &ns {
                assert!(adjacent(&s, v, u));
            }
        }
        // Full-scan equivalence for every vertex.
        for v in &all {
            let mut by_scan: Vec<u64> = all
                .iter()
                .filter(|u| adjacent(&s, u, v))
                .map(|u| u.index(&s))
                .collect();
            by_scan.sort_unstable();
            let mut by_gen: Vec<u64> = neighbors(&s, v).iter().map(|u| u.index(&s)).collect();
            by_gen.sort_unstable();
            assert_eq!(by_gen, by_scan);
        }
    }

    #[test]
    fn nu_one_is_a_clique() {
        let s = space(3, 1);
        let all: Vec<Vertex> = vertices(&s).collect();
        assert_eq!(all.len(), 9);
        for v in &all {
            assert_eq!(neighbors(&s, v).len(), 8);
        }
        for u in &all {
            for v in &all {
                if u != v {
                    assert!(adjacent(&s, u, v));
                }
            }
        }
    }

    #[test]
    fn joint_dimension() {
        let s = space(3, 2);
        let p1 = Vertex::base(&s);
        assert_eq!(joint_dim(&s, &p1, &p1), 2);
        assert_eq!(joint_dim(&s, &p1, &phi1_1(&s)), 4);
        assert_eq!(joint_dim(&s, &p1, &phi2_00(&s)), 3);
    }

    #[test]
    fn export_formats() {
        let s = space(3, 2);
        let mut buf = Vec::new();
        let summary = export_graph(&s, GraphFormat::EdgeList, &mut buf).unwrap();
        assert_eq!(
            summary,
            GraphSummary {
                vertices: 243,
                edges: 3888
            }
        );
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("243 3888\n"));
        assert_eq!(text.lines().count(), 3889);

        let s1 = space(3, 1);
        let mut buf = Vec::new();
        let summary = export_graph(&s1, GraphFormat::Dimacs, &mut buf).unwrap();
        assert_eq!(summary.vertices, 9);
        assert_eq!(summary.edges, 36);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("p edge 9 36\n"));
        assert!(text.contains("e 1 2"));

        let mut buf = Vec::new();
        export_graph(&s1, GraphFormat::Json, &mut buf).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc["q"], 3);
        assert_eq!(doc["edges"].as_array().unwrap().len(), 36);

        assert!("nonsense".parse::<GraphFormat>().is_err());
    }

    #[test]
    fn vertex_json_round_trip() {
        let s = space(3, 2);
        let v = phi2_00(&s);
        let j = v.to_json();
        assert_eq!(Vertex::from_json(&s, &j).unwrap(), v);
        assert!(Vertex::from_json(&s, &serde_json::json!({"X": [0,0,0,0]})).is_err());
        // Non-alternate X rejected.
        let bad = serde_json::json!({"X": [1,0,0,0], "Z": [0,0,0,0]});
        assert!(Vertex::from_json(&s, &bad).is_err());
    }
}
