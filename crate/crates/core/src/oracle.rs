//! Independent brute-force ground truth.
//!
//! Everything here works by plain breadth-first closure under explicit
//! generator sets, deliberately sharing no logic with the constructive
//! classifier it certifies. Orbit partitions of Λ under the two-point
//! stabilizer, of alternate matrices under the block-triangular subgroups,
//! and of Λ × Λ under the base-point stabilizer are computed exhaustively
//! at desk scale and compared against every closed formula.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};
use crate::geometry::{GroupElement0, GroupElement01, OrthoSpace};
use crate::lambda::{self, Vertex};
use crate::mat::Mat;
use crate::scheme;
use crate::suborbits::{self, SuborbitLabel};

/// An orbit partition of an indexed point set.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitPartition {
    pub points: u64,
    /// Orbits in discovery order; members ascending.
    pub classes: Vec<Vec<u64>>,
    /// Class id of every point.
    #[serde(skip)]
    pub class_of: Vec<u32>,
}

impl OrbitPartition {
    fn from_closure(n: u64, mut step: impl FnMut(u64) -> Vec<u64>) -> OrbitPartition {
        let mut class_of = vec![u32::MAX; n as usize];
        let mut classes: Vec<Vec<u64>> = Vec::new();
        for start in 0..n {
            if class_of[start as usize] != u32::MAX {
                continue;
            }
            let id = classes.len() as u32;
            let mut members = vec![start];
            class_of[start as usize] = id;
            let mut queue = vec![start];
            while let Some(p) = queue.pop() {
                for img in step(p) {
                    if class_of[img as usize] == u32::MAX {
                        class_of[img as usize] = id;
                        members.push(img);
                        queue.push(img);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        OrbitPartition {
            points: n,
            classes,
            class_of,
        }
    }

    pub fn sizes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.classes.iter().map(|c| c.len() as u64).collect();
        v.sort_unstable();
        v
    }
}

/// Generators of `GL_n(F_q)` as matrices: the elementary transvections
/// `I + βE_{ij}` (with β ranging over an additive basis of the field) and
/// one primitive-scalar dilation.
pub fn gl_generators(gf: &Gf, n: usize) -> Vec<Mat> {
    let mut gens = Vec::new();
    if n == 0 {
        return gens;
    }
    let mut betas = vec![1 as Fe];
    if gf.extension_degree() > 1 {
        let g = gf.primitive_element();
        let mut b = 1 as Fe;
        for _ in 1..gf.extension_degree() {
            b = gf.mul(b, g);
            betas.push(b);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for &beta in &betas {
                let mut t = Mat::identity(gf, n);
                t[(i, j)] = beta;
                gens.push(t);
            }
        }
    }
    let mut d = Mat::identity(gf, n);
    d[(0, 0)] = gf.primitive_element();
    gens.push(d);
    gens
}

/// Generators of the two-point stabilizer: `GL_ν` generators as the `T`
/// factor, plus every Δ-isometry as the `S` factor.
pub fn g01_generators(space: &OrthoSpace) -> Vec<GroupElement01> {
    let gf = space.gf();
    let nu = space.nu();
    let mut out = Vec::new();
    for t in gl_generators(gf, nu) {
        out.push(GroupElement01::new(space, t, Mat::identity(gf, 2)).unwrap());
    }
    for s in space.o2_elements() {
        out.push(GroupElement01::new(space, Mat::identity(gf, nu), s.clone()).unwrap());
    }
    out
}

/// Multiplicative closure of a matrix generating set (breadth first).
pub fn group_closure(gens: &[Mat], cap: usize) -> Result<Vec<Mat>> {
    let first = gens.first().ok_or_else(|| Error::InvalidParameter("no generators".into()))?;
    let id = Mat::identity(first.gf(), first.rows());
    let mut seen = std::collections::HashSet::new();
    let mut elements = vec![id.clone()];
    seen.insert(id);
    let mut frontier = 0;
    while frontier < elements.len() {
        let cur = elements[frontier].clone();
        frontier += 1;
        for g in gens {
            let next = cur.mul(g).unwrap();
            if seen.insert(next.clone()) {
                if elements.len() >= cap {
                    return Err(Error::CapExceeded(format!(
                        "group closure exceeded cap {cap}"
                    )));
                }
                elements.push(next);
            }
        }
    }
    Ok(elements)
}

/// Exhaustive orbit partition of Λ under the two-point stabilizer.
pub fn orbits_on_lambda(space: &OrthoSpace, cap: u64) -> Result<OrbitPartition> {
    let n = lambda::vertex_count(space.gf().q() as u128, space.nu());
    let n = u64::try_from(n).map_err(|_| Error::CapExceeded("vertex count".into()))?;
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "orbit computation needs {n} vertices, cap is {cap}"
        )));
    }
    let gens = g01_generators(space);
    Ok(OrbitPartition::from_closure(n, |p| {
        let v = Vertex::from_index(space, p);
        gens.iter()
            .map(|g| g.act(space, &v).index(space))
            .collect()
    }))
}

fn alt_count(gf: &Gf, nu: usize) -> u64 {
    (gf.q() as u64).pow((nu * (nu - 1) / 2) as u32)
}

fn alt_from_index(gf: &Gf, nu: usize, index: u64) -> Mat {
    let q = gf.q() as u64;
    let free = nu * (nu - 1) / 2;
    let mut digits = vec![0 as Fe; free];
    let mut rem = index;
    for slot in digits.iter_mut().rev() {
        *slot = (rem % q) as Fe;
        rem /= q;
    }
    let mut it = digits.into_iter();
    let mut x = Mat::zero(gf, nu, nu);
    for i in 0..nu {
        for j in i + 1..nu {
            let v = it.next().unwrap();
            x[(i, j)] = v;
            x[(j, i)] = gf.neg(v);
        }
    }
    x
}

fn alt_index(gf: &Gf, x: &Mat) -> u64 {
    let q = gf.q() as u64;
    let mut acc = 0u64;
    for i in 0..x.rows() {
        for j in i + 1..x.cols() {
            acc = acc * q + x[(i, j)] as u64;
        }
    }
    acc
}

/// Generators of the block-lower-triangular subgroup of `GL_ν` with
/// invertible leading `head×head` block.
pub fn block_stab_generators(gf: &Gf, nu: usize, head: usize) -> Vec<Mat> {
    let mut gens = Vec::new();
    for g in gl_generators(gf, head) {
        let mut t = Mat::identity(gf, nu);
        t.set_block(0, 0, &g);
        gens.push(t);
    }
    for g in gl_generators(gf, nu - head) {
        let mut t = Mat::identity(gf, nu);
        t.set_block(head, head, &g);
        gens.push(t);
    }
    for i in head..nu {
        for j in 0..head {
            let mut t = Mat::identity(gf, nu);
            t[(i, j)] = 1;
            gens.push(t);
        }
    }
    gens
}

/// Exhaustive orbit partition of the alternate ν×ν matrices under the
/// head-`i` block subgroup acting by congruence.
pub fn orbits_on_alt(gf: &Gf, nu: usize, head: usize, cap: u64) -> Result<OrbitPartition> {
    assert!(head == 1 || head == 2);
    let n = alt_count(gf, nu);
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "alternate-orbit computation needs {n} points, cap is {cap}"
        )));
    }
    let gens = block_stab_generators(gf, nu, head);
    Ok(OrbitPartition::from_closure(n, |p| {
        let x = alt_from_index(gf, nu, p);
        gens.iter()
            .map(|t| alt_index(gf, &t.transpose().mul(&x).unwrap().mul(t).unwrap()))
            .collect()
    }))
}

/// Generators for the base-point stabilizer acting on pairs: the two-point
/// stabilizer generators plus the transporters of all nontrivial suborbit
/// representatives (these supply elements with nonzero `T₂₁` and `T₂₃`).
/// Sufficiency is certified by the pair-orbit count.
pub fn g0_generators(space: &OrthoSpace) -> Vec<GroupElement0> {
    let mut out: Vec<GroupElement0> = g01_generators(space)
        .iter()
        .map(|g| GroupElement0::from_g01(space, g))
        .collect();
    for label in suborbits::all_labels(space.gf(), space.nu()) {
        if label == SuborbitLabel::Phi0 {
            continue;
        }
        let rep = suborbits::representative(space, label).unwrap();
        out.push(scheme::transporter_to_basepoint(space, &rep));
    }
    out
}

/// Exhaustive orbit partition of Λ × Λ under the base-point stabilizer.
pub fn pair_orbits(space: &OrthoSpace, cap_pairs: u64) -> Result<OrbitPartition> {
    let n = lambda::vertex_count(space.gf().q() as u128, space.nu());
    let n = u64::try_from(n).map_err(|_| Error::CapExceeded("vertex count".into()))?;
    let pairs = n
        .checked_mul(n)
        .ok_or_else(|| Error::CapExceeded("pair count".into()))?;
    if pairs > cap_pairs {
        return Err(Error::CapExceeded(format!(
            "pair-orbit computation needs {pairs} pairs, cap is {cap_pairs}"
        )));
    }
    let gens = g0_generators(space);
    Ok(OrbitPartition::from_closure(pairs, |p| {
        let (ui, vi) = (p / n, p % n);
        let u = Vertex::from_index(space, ui);
        let v = Vertex::from_index(space, vi);
        gens.iter()
            .map(|g| {
                let gu = g.act(space, &u).index(space);
                let gv = g.act(space, &v).index(space);
                gu * n + gv
            })
            .collect()
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossReport {
    pub q: u64,
    pub nu: usize,
    pub assertions: Vec<Assertion>,
}

impl CrossReport {
    pub fn pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

/// Certifies the suborbit machinery against the brute-force partition:
/// (a) orbit count equals the rank formula; (b) orbit sizes equal the
/// closed-form multiset; (c) the classifier is constant on every orbit and
/// distinct across orbits; (d) each representative lies in the orbit its
/// label claims.
pub fn cross_validate(space: &OrthoSpace, cap: u64) -> Result<CrossReport> {
    let gf = space.gf();
    let nu = space.nu();
    let partition = orbits_on_lambda(space, cap)?;
    let mut assertions = Vec::new();

    let rank = suborbits::rank_g0(gf.q() as u64, nu);
    assertions.push(Assertion {
        name: "orbit count equals rank".into(),
        pass: partition.classes.len() as u128 == rank,
        detail: format!("{} orbits, rank {}", partition.classes.len(), rank),
    });

    let labels = suborbits::all_labels(gf, nu);
    let mut formula_sizes: Vec<u64> = labels
        .iter()
        .map(|&l| suborbits::suborbit_size(gf, nu, l).unwrap() as u64)
        .collect();
    formula_sizes.sort_unstable();
    let observed = partition.sizes();
    assertions.push(Assertion {
        name: "orbit sizes equal formula multiset".into(),
        pass: formula_sizes == observed,
        detail: format!("observed {:?}, formulas {:?}", observed, formula_sizes),
    });

    // Classifier constancy/injectivity over orbits.
    let mut class_label: Vec<Option<SuborbitLabel>> = vec![None; partition.classes.len()];
    let mut constant = true;
    for (idx, members) in partition.classes.iter().enumerate() {
        for &m in members {
            let v = Vertex::from_index(space, m);
            let (label, _) = suborbits::classify(space, &v);
            match class_label[idx] {
                None => class_label[idx] = Some(label),
                Some(prev) if prev != label => {
                    constant = false;
                }
                _ => {}
            }
        }
    }
    assertions.push(Assertion {
        name: "classifier constant on each orbit".into(),
        pass: constant,
        detail: String::new(),
    });
    let mut seen: Vec<SuborbitLabel> = class_label.iter().flatten().copied().collect();
    seen.sort();
    let distinct = {
        let mut s = seen.clone();
        s.dedup();
        s.len() == partition.classes.len()
    };
    assertions.push(Assertion {
        name: "classifier distinct across orbits".into(),
        pass: distinct,
        detail: String::new(),
    });

    // Representatives land in the orbits the classifier says, with the
    // formula size.
    let mut reps_ok = true;
    let mut detail = String::new();
    for &label in &labels {
        let rep = suborbits::representative(space, label).unwrap();
        let class = partition.class_of[rep.index(space) as usize] as usize;
        let size = partition.classes[class].len() as u128;
        let formula = suborbits::suborbit_size(gf, nu, label).unwrap();
        if class_label[class] != Some(label) || size != formula {
            reps_ok = false;
            detail = format!("label {label}: orbit size {size}, formula {formula}");
        }
    }
    assertions.push(Assertion {
        name: "representatives lie in their own orbits at formula size".into(),
        pass: reps_ok,
        detail,
    });

    Ok(CrossReport {
        q: gf.q() as u64,
        nu,
        assertions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{order_gl, order_o};

    fn space(q: u64, nu: usize) -> OrthoSpace {
        OrthoSpace::standard(&Gf::new(q).unwrap(), nu).unwrap()
    }

    #[test]
    fn generator_counts_and_isometry() {
        let s = space(3, 2);
        let gens = g01_generators(&s);
        assert_eq!(gens.len(), 3 + 8);
        for g in &gens {
            assert!(s.is_isometry(g.full()).unwrap());
        }
    }

    #[test]
    fn g01_closure_has_full_order() {
        let s = space(3, 2);
        let mats: Vec<Mat> = g01_generators(&s).iter().map(|g| g.full().clone()).collect();
        let group = group_closure(&mats, 10_000).unwrap();
        assert_eq!(group.len() as u128, order_gl(2, 3) * order_o(2, 3));
        assert_eq!(group.len(), 384);
    }

    #[test]
    fn gl_generators_generate() {
        for (q, n) in [(3u64, 2usize), (5, 2), (9, 2)] {
            let gf = Gf::new(q).unwrap();
            let gens = gl_generators(&gf, n);
            let group = group_closure(&gens, 1_000_000).unwrap();
            assert_eq!(group.len() as u128, order_gl(n, q as u128));
        }
    }

    #[test]
    fn lambda_orbits_q3_nu2() {
        let s = space(3, 2);
        let part = orbits_on_lambda(&s, 20_000).unwrap();
        assert_eq!(part.classes.len(), 8);
        assert_eq!(part.sizes(), vec![1, 2, 16, 16, 32, 32, 48, 96]);
    }

    #[test]
    fn lambda_orbits_q3_nu1() {
        let s = space(3, 1);
        let part = orbits_on_lambda(&s, 20_000).unwrap();
        assert_eq!(part.sizes(), vec![1, 4, 4]);
    }

    #[test]
    fn orbit_cap_respected() {
        let s = space(3, 3);
        assert!(orbits_on_lambda(&s, 100).is_err());
    }

    #[test]
    fn alt_orbits_match_canonical_forms() {
        // Exhaustive inventories for ν ∈ {2, 3, 4} at q = 3, both heads.
        for nu in [2usize, 3, 4] {
            let gf = Gf::new(3).unwrap();
            for head in [1usize, 2] {
                if nu < head {
                    continue;
                }
                let part = orbits_on_alt(&gf, nu, head, 100_000).unwrap();
                let forms = suborbits::forms_for_head(nu, head);
                assert_eq!(
                    part.classes.len(),
                    forms.len(),
                    "nu={nu} head={head}: orbit count vs form inventory"
                );
                // Each orbit is the full preimage of one canonical form.
                let canon = |idx: u64| {
                    let x = alt_from_index(&gf, nu, idx);
                    let (_, form) = if head == 1 {
                        suborbits::o1_canonicalize(&x).unwrap()
                    } else {
                        suborbits::o2_canonicalize(&x).unwrap()
                    };
                    form
                };
                for members in &part.classes {
                    let first = canon(members[0]);
                    assert!(forms.contains(&first));
                    for &m in members {
                        assert_eq!(canon(m), first);
                    }
                    // The realized form lies in this orbit.
                    let realized = first.realize(&gf, nu);
                    assert_eq!(
                        part.class_of[alt_index(&gf, &realized) as usize],
                        part.class_of[members[0] as usize]
                    );
                }
            }
        }
    }

    #[test]
    fn alt_orbits_nu2_head2_is_full_gl() {
        // At ν = 2 the head-2 subgroup is all of GL₂: orbits are {0} and
        // the rank-2 class.
        let gf = Gf::new(3).unwrap();
        let part = orbits_on_alt(&gf, 2, 2, 1000).unwrap();
        assert_eq!(part.sizes(), vec![1, 2]);
    }

    #[test]
    fn cross_validate_q3_nu2() {
        let s = space(3, 2);
        let report = cross_validate(&s, 20_000).unwrap();
        assert!(report.pass(), "{:#?}", report.assertions);
    }

    #[test]
    fn cross_validate_extension_field() {
        // End-to-end over F_9: the machinery is not prime-specific.
        let s = space(9, 1);
        let report = cross_validate(&s, 20_000).unwrap();
        assert!(report.pass(), "{:#?}", report.assertions);
        let part = orbits_on_lambda(&s, 20_000).unwrap();
        assert_eq!(part.sizes(), vec![1, 40, 40]);
    }

    #[test]
    fn pair_orbits_match_relations() {
        let s = space(3, 2);
        let part = pair_orbits(&s, 100_000).unwrap();
        // Transitivity on Λ plus point-stabilizer orbit count: the number of
        // pair orbits equals the rank. This also certifies the generator
        // set for the base-point stabilizer.
        assert_eq!(part.classes.len() as u128, suborbits::rank_g0(3, 2));
        // Grouping all 59049 pairs by relation label reproduces the
        // partition exactly.
        let rels = scheme::relation_matrix(&s, 300).unwrap();
        let n = 243u64;
        for members in &part.classes {
            let first = rels[(members[0] / n) as usize][(members[0] % n) as usize];
            for &m in members {
                assert_eq!(rels[(m / n) as usize][(m % n) as usize], first);
            }
        }
        // Distinct orbits carry distinct relation labels.
        let mut seen: Vec<u8> = part
            .classes
            .iter()
            .map(|c| rels[(c[0] / n) as usize][(c[0] % n) as usize])
            .collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), part.classes.len());
    }
}
