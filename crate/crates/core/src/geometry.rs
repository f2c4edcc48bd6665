//! The orthogonal space `F_q^{2ν+δ}`, its Gram matrix, the point and
//! two-point stabilizer groups of the base flags, and the classical group
//! order formulas.
//!
//! The Gram matrix is laid out as anti-diagonal identity blocks plus a
//! definite δ×δ block Δ:
//!
//! ```text
//!         ( 0    I(ν)      )
//!   S  =  ( I(ν)  0        )          Δ = (1), (z), or diag(1, -z)
//!         (            Δ   )
//! ```
//!
//! with `z` the field's distinguished non-square. For δ ∈ {1,2} the block Δ
//! is definite: `xΔxᵗ = 0` forces `x = 0`.

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};
use crate::lambda::Vertex;
use crate::mat::{block_diag, Mat};

/// Choice of the 1×1 block for δ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaVariant {
    One,
    NonSquare,
}

#[derive(Clone)]
pub struct OrthoSpace {
    gf: Gf,
    nu: usize,
    delta: usize,
    variant: DeltaVariant,
    gram: Mat,
    delta_mat: Mat,
    /// All elements of the 2×2 isometry group of Δ, in a fixed order
    /// (populated only for δ = 2).
    o2: Vec<Mat>,
}

impl std::fmt::Debug for OrthoSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "OrthoSpace(q={}, nu={}, delta={})",
            self.gf.q(),
            self.nu,
            self.delta
        )
    }
}

impl OrthoSpace {
    pub fn new(gf: &Gf, nu: usize, delta: usize, variant: DeltaVariant) -> Result<OrthoSpace> {
        if nu < 1 {
            return Err(Error::InvalidParameter("nu must be at least 1".into()));
        }
        if delta > 2 {
            return Err(Error::InvalidParameter("delta must be 0, 1 or 2".into()));
        }
        let delta_mat = match delta {
            0 => Mat::zero(gf, 0, 0),
            1 => match variant {
                DeltaVariant::One => Mat::scalar(gf, 1),
                DeltaVariant::NonSquare => Mat::scalar(gf, gf.z()),
            },
            _ => Mat::diag(gf, &[1, gf.neg(gf.z())]),
        };
        // Definiteness of Δ, checked exhaustively.
        if delta > 0 {
            let qd = (gf.q() as u64).pow(delta as u32);
            for idx in 1..qd {
                let mut rem = idx;
                let mut x = Mat::zero(gf, 1, delta);
                for j in 0..delta {
                    x[(0, j)] = (rem % gf.q() as u64) as Fe;
                    rem /= gf.q() as u64;
                }
                let v = x.mul(&delta_mat).unwrap().mul(&x.transpose()).unwrap();
                if v[(0, 0)] == 0 {
                    return Err(Error::InvalidParameter(
                        "delta block is not definite".into(),
                    ));
                }
            }
        }
        // Assemble ((0 I 0), (I 0 0), (0 0 Δ)).
        let id = Mat::identity(gf, nu);
        let n = 2 * nu + delta;
        let mut gram = Mat::zero(gf, n, n);
        gram.set_block(0, nu, &id);
        gram.set_block(nu, 0, &id);
        gram.set_block(2 * nu, 2 * nu, &delta_mat);

        let mut space = OrthoSpace {
            gf: gf.clone(),
            nu,
            delta,
            variant,
            gram,
            delta_mat,
            o2: vec![],
        };
        if delta == 2 {
            space.o2 = enumerate_o2_inner(&space);
        }
        Ok(space)
    }

    /// Shorthand for the δ = 2 space, the main object of the crate.
    pub fn standard(gf: &Gf, nu: usize) -> Result<OrthoSpace> {
        OrthoSpace::new(gf, nu, 2, DeltaVariant::One)
    }

    pub fn gf(&self) -> &Gf {
        &self.gf
    }
    pub fn nu(&self) -> usize {
        self.nu
    }
    pub fn delta(&self) -> usize {
        self.delta
    }
    pub fn variant(&self) -> DeltaVariant {
        self.variant
    }
    pub fn gram(&self) -> &Mat {
        &self.gram
    }
    pub fn delta_mat(&self) -> &Mat {
        &self.delta_mat
    }
    pub fn dim(&self) -> usize {
        2 * self.nu + self.delta
    }

    /// The base maximal totally isotropic subspace `(I 0 0)`.
    pub fn p0(&self) -> Mat {
        let mut m = Mat::zero(&self.gf, self.nu, self.dim());
        for i in 0..self.nu {
            m[(i, i)] = 1;
        }
        m
    }

    /// The opposite base subspace `(0 I 0)`, the base vertex of Λ.
    pub fn p1_matrix(&self) -> Mat {
        let mut m = Mat::zero(&self.gf, self.nu, self.dim());
        for i in 0..self.nu {
            m[(i, self.nu + i)] = 1;
        }
        m
    }

    pub fn is_isometry(&self, m: &Mat) -> Result<bool> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::Dim("isometry test: wrong size".into()));
        }
        Ok(m.mul(&self.gram)?.mul(&m.transpose())? == self.gram)
    }

    pub fn is_totally_isotropic(&self, p: &Mat) -> bool {
        if p.cols() != self.dim() {
            return false;
        }
        p.mul(&self.gram).unwrap().mul(&p.transpose()).unwrap().is_zero()
            && p.rank() == p.rows()
    }

    /// All `2(q+1)` isometries of the 2×2 block Δ, in a fixed enumeration
    /// order. Requires δ = 2.
    pub fn o2_elements(&self) -> &[Mat] {
        assert_eq!(self.delta, 2, "o2 enumeration requires delta = 2");
        &self.o2
    }

    /// Whether `s` is an isometry of the Δ block.
    pub fn is_delta_isometry(&self, s: &Mat) -> bool {
        s.rows() == self.delta
            && s.cols() == self.delta
            && s.mul(&self.delta_mat).unwrap().mul(&s.transpose()).unwrap() == self.delta_mat
    }

    /// Finds `S` in the Δ-isometry group carrying the line through `(a, b)`
    /// to the line through `(1, 0)` or `(1, 1)`, according to whether
    /// `a² - zb²` is a square; returns `(S, type)` with type 0 or 1.
    pub fn normalize_delta_line(&self, a: Fe, b: Fe) -> Result<(Mat, u8)> {
        assert_eq!(self.delta, 2);
        if a == 0 && b == 0 {
            return Err(Error::InvalidParameter(
                "cannot normalize the zero vector".into(),
            ));
        }
        let gf = &self.gf;
        let norm = gf.sub(gf.mul(a, a), gf.mul(gf.z(), gf.mul(b, b)));
        let label = if gf.is_square(norm) { 0u8 } else { 1u8 };
        let row = Mat::new(gf, 1, 2, vec![a, b])?;
        for s in &self.o2 {
            let image = row.mul(s)?;
            let (x, y) = (image[(0, 0)], image[(0, 1)]);
            let hit = match label {
                0 => y == 0,
                _ => x == y && x != 0,
            };
            if hit {
                return Ok((s.clone(), label));
            }
        }
        unreachable!("every line is equivalent to (1,0) or (1,1)")
    }

    /// The exact order of the full isometry group of this space, for
    /// δ = 2 spaces.
    pub fn group_order(&self) -> u128 {
        assert_eq!(self.delta, 2);
        order_o(2 * self.nu + 2, self.gf.q() as u128)
    }
}

fn enumerate_o2_inner(space: &OrthoSpace) -> Vec<Mat> {
    let gf = space.gf();
    let z = gf.z();
    let mut out = Vec::with_capacity(2 * (gf.q() as usize + 1));
    for x in gf.elements() {
        for y in gf.elements() {
            let lhs = gf.sub(gf.mul(x, x), gf.mul(z, gf.mul(y, y)));
            if lhs != 1 {
                continue;
            }
            let yz = gf.mul(y, z);
            out.push(Mat::new(gf, 2, 2, vec![x, y, yz, x]).unwrap());
            out.push(Mat::new(gf, 2, 2, vec![x, y, gf.neg(yz), gf.neg(x)]).unwrap());
        }
    }
    debug_assert!(out.iter().all(|s| space.is_delta_isometry(s)));
    out
}

/// `|GL_ν(F_q)| = q^{ν(ν−1)/2} ∏_{i=1}^{ν} (q^i − 1)`, with `|GL_0| = 1`.
pub fn order_gl(nu: usize, q: u128) -> u128 {
    let mut v = q.pow((nu * nu.saturating_sub(1) / 2) as u32);
    for i in 1..=nu {
        v *= q.pow(i as u32) - 1;
    }
    v
}

/// `|Sp_{2ν}(F_q)| = q^{ν²} ∏_{i=1}^{ν} (q^{2i} − 1)`; by convention 1 for
/// `ν ≤ 0` (the argument is `2ν`, and negative or zero arguments yield 1).
pub fn order_sp(two_nu: i64, q: u128) -> u128 {
    if two_nu <= 0 {
        return 1;
    }
    assert!(two_nu % 2 == 0, "symplectic groups have even degree");
    let m = (two_nu / 2) as usize;
    let mut v = q.pow((m * m) as u32);
    for i in 1..=m {
        v *= q.pow(2 * i as u32) - 1;
    }
    v
}

/// `|O_{2ν+2,Δ}(F_q)| = q^{ν(ν+1)} ∏_{i=1}^{ν} (q^i − 1) ∏_{i=0}^{ν+1} (q^i + 1)`;
/// the argument is `2ν + 2`.
pub fn order_o(two_nu_plus_2: usize, q: u128) -> u128 {
    assert!(
        two_nu_plus_2 >= 2 && two_nu_plus_2 % 2 == 0,
        "degree must be 2ν+2"
    );
    let nu = (two_nu_plus_2 - 2) / 2;
    let mut v = q.pow((nu * (nu + 1)) as u32);
    for i in 1..=nu {
        v *= q.pow(i as u32) - 1;
    }
    for i in 0..=nu + 1 {
        v *= q.pow(i as u32) + 1;
    }
    v
}

/// An element `[T, (Tᵗ)⁻¹, S]` of the stabilizer of both base subspaces.
#[derive(Clone, Debug)]
pub struct GroupElement01 {
    t: Mat,
    s: Mat,
    full: Mat,
}

impl serde::Serialize for GroupElement01 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GroupElement01", 3)?;
        st.serialize_field("full", &self.full)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("s", &self.s)?;
        st.end()
    }
}

impl GroupElement01 {
    pub fn new(space: &OrthoSpace, t: Mat, s: Mat) -> Result<GroupElement01> {
        if t.rows() != space.nu() || t.cols() != space.nu() {
            return Err(Error::Dim("T must be ν×ν".into()));
        }
        let t_inv_tr = t.inverse().map_err(|_| Error::Singular)?.transpose();
        if !space.is_delta_isometry(&s) {
            return Err(Error::InvalidParameter(
                "S is not an isometry of the delta block".into(),
            ));
        }
        let full = block_diag(&[t.clone(), t_inv_tr, s.clone()])?;
        debug_assert!(space.is_isometry(&full).unwrap());
        Ok(GroupElement01 { t, s, full })
    }

    pub fn identity(space: &OrthoSpace) -> GroupElement01 {
        GroupElement01::new(
            space,
            Mat::identity(space.gf(), space.nu()),
            Mat::identity(space.gf(), space.delta()),
        )
        .unwrap()
    }

    pub fn t(&self) -> &Mat {
        &self.t
    }
    pub fn s(&self) -> &Mat {
        &self.s
    }
    pub fn full(&self) -> &Mat {
        &self.full
    }

    pub fn inverse(&self, space: &OrthoSpace) -> GroupElement01 {
        GroupElement01::new(
            space,
            self.t.inverse().unwrap(),
            self.s.inverse().unwrap(),
        )
        .unwrap()
    }

    pub fn compose(&self, space: &OrthoSpace, other: &GroupElement01) -> GroupElement01 {
        GroupElement01::new(
            space,
            self.t.mul(&other.t).unwrap(),
            self.s.mul(&other.s).unwrap(),
        )
        .unwrap()
    }

    /// The right action on Λ in vertex coordinates:
    /// `(X, Z) ↦ (TᵗXT, TᵗZS)`.
    pub fn act(&self, space: &OrthoSpace, v: &Vertex) -> Vertex {
        let tt = self.t.transpose();
        let x = tt.mul(v.x()).unwrap().mul(&self.t).unwrap();
        let z = tt.mul(v.z()).unwrap().mul(&self.s).unwrap();
        Vertex::new(space, x, z).unwrap()
    }
}

/// An element of the stabilizer of the base subspace `(I 0 0)`, in its
/// block form `((T₁₁ 0 0), (T₂₁ (T₁₁ᵗ)⁻¹ T₂₃), (−SΔT₂₃ᵗT₁₁ 0 S))`.
#[derive(Clone, Debug)]
pub struct GroupElement0 {
    t11: Mat,
    t21: Mat,
    t23: Mat,
    s: Mat,
    full: Mat,
}

impl serde::Serialize for GroupElement0 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GroupElement0", 5)?;
        st.serialize_field("full", &self.full)?;
        st.serialize_field("t11", &self.t11)?;
        st.serialize_field("t21", &self.t21)?;
        st.serialize_field("t23", &self.t23)?;
        st.serialize_field("s", &self.s)?;
        st.end()
    }
}

impl GroupElement0 {
    pub fn new(space: &OrthoSpace, t11: Mat, t21: Mat, t23: Mat, s: Mat) -> Result<GroupElement0> {
        let nu = space.nu();
        let d = space.delta();
        if t11.rows() != nu || t11.cols() != nu || t21.rows() != nu || t21.cols() != nu {
            return Err(Error::Dim("T11, T21 must be ν×ν".into()));
        }
        if t23.rows() != nu || t23.cols() != d {
            return Err(Error::Dim("T23 must be ν×δ".into()));
        }
        if !space.is_delta_isometry(&s) {
            return Err(Error::InvalidParameter(
                "S is not an isometry of the delta block".into(),
            ));
        }
        let t11_inv = t11.inverse().map_err(|_| Error::Singular)?;
        // (T₁₁ᵗ)⁻¹ T₂₁ᵗ + T₂₁ T₁₁⁻¹ + T₂₃ Δ T₂₃ᵗ = 0
        let c1 = t11_inv.transpose().mul(&t21.transpose())?;
        let c2 = t21.mul(&t11_inv)?;
        let c3 = t23.mul(space.delta_mat())?.mul(&t23.transpose())?;
        if !c1.add(&c2)?.add(&c3)?.is_zero() {
            return Err(Error::InvalidParameter(
                "stabilizer constraint violated".into(),
            ));
        }
        let n = space.dim();
        let mut full = Mat::zero(space.gf(), n, n);
        full.set_block(0, 0, &t11);
        full.set_block(nu, 0, &t21);
        full.set_block(nu, nu, &t11_inv.transpose());
        full.set_block(nu, 2 * nu, &t23);
        let low = s
            .mul(space.delta_mat())?
            .mul(&t23.transpose())?
            .mul(&t11)?
            .neg();
        full.set_block(2 * nu, 0, &low);
        full.set_block(2 * nu, 2 * nu, &s);
        debug_assert!(space.is_isometry(&full).unwrap());
        debug_assert!(space
            .p0()
            .row_space_equal(&space.p0().mul(&full).unwrap())
            .unwrap());
        Ok(GroupElement0 {
            t11,
            t21,
            t23,
            s,
            full,
        })
    }

    /// Reconstructs the factor blocks from a full matrix known to lie in the
    /// stabilizer of `(I 0 0)`.
    pub fn from_matrix(space: &OrthoSpace, m: &Mat) -> Result<GroupElement0> {
        let nu = space.nu();
        let d = space.delta();
        let t11 = m.submatrix(0, nu, 0, nu);
        let t21 = m.submatrix(nu, 2 * nu, 0, nu);
        let t23 = m.submatrix(nu, 2 * nu, 2 * nu, 2 * nu + d);
        let s = m.submatrix(2 * nu, 2 * nu + d, 2 * nu, 2 * nu + d);
        let g = GroupElement0::new(space, t11, t21, t23, s)?;
        if g.full != *m {
            return Err(Error::InvalidParameter(
                "matrix is not in the base-point stabilizer block form".into(),
            ));
        }
        Ok(g)
    }

    pub fn from_g01(space: &OrthoSpace, g: &GroupElement01) -> GroupElement0 {
        GroupElement0::new(
            space,
            g.t().clone(),
            Mat::zero(space.gf(), space.nu(), space.nu()),
            Mat::zero(space.gf(), space.nu(), space.delta()),
            g.s().clone(),
        )
        .unwrap()
    }

    pub fn t11(&self) -> &Mat {
        &self.t11
    }
    pub fn t21(&self) -> &Mat {
        &self.t21
    }
    pub fn t23(&self) -> &Mat {
        &self.t23
    }
    pub fn s(&self) -> &Mat {
        &self.s
    }
    pub fn full(&self) -> &Mat {
        &self.full
    }

    pub fn compose(&self, space: &OrthoSpace, other: &GroupElement0) -> Result<GroupElement0> {
        GroupElement0::from_matrix(space, &self.full.mul(&other.full)?)
    }

    /// Applies the element to a Λ-vertex and renormalizes.
    pub fn act(&self, space: &OrthoSpace, v: &Vertex) -> Vertex {
        let image = v.realize(space).mul(&self.full).unwrap();
        Vertex::from_matrix(space, &image)
            .expect("the base-point stabilizer preserves the last subconstituent")
    }
}
