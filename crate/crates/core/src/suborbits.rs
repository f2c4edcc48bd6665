//! Suborbit classification on Λ.
//!
//! The two-point stabilizer acts on vertex coordinates by
//! `(X, Z) ↦ (TᵗXT, TᵗZS)`. Its orbits fall into nine families `φ₀ … φ₈`
//! with explicit representatives. This module provides:
//!
//! * canonical forms of alternate matrices under the block-lower-triangular
//!   subgroups `O₁`, `O₂` of `GL_ν` (those preserving the span of the last
//!   `ν−i` coordinates), with an explicit transforming element;
//! * the suborbit representative for every label;
//! * `classify`, the constructive reduction of an arbitrary vertex to its
//!   representative, returning the label together with a witness group
//!   element carrying the representative back to the input;
//! * exact closed-form suborbit lengths and the rank of the action.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};
use crate::geometry::{order_gl, order_sp, GroupElement01, OrthoSpace};
use crate::lambda::Vertex;
use crate::mat::{
    alt2, alt_k, alt_normalize, alt_y, basis_vector, block_diag, extend_to_invertible,
    std_alternate, Mat,
};

/// A suborbit label: family plus parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SuborbitLabel {
    /// The trivial orbit of the base vertex.
    Phi0,
    /// `X = [𝒜_{2r}, 0]`, `Z = 0`.
    Phi1 { r: usize },
    /// `X = [0, 𝒜_{2r}, 0]`, `Z = (E₁ aE₁)`.
    Phi2 { r: usize, a: u8 },
    /// `X = [𝒜_{2r}, 0]`, `Z = (E₁ aE₁)`.
    Phi3 { r: usize, a: u8 },
    /// `X = [0, 𝒜_{2r}, 0]`, `Z = (E₁ E₂)`.
    Phi4 { r: usize },
    /// `X = [Y, 𝒜_{2r−2}, 0]`, `Z = (E₁ E₂)`.
    Phi5 { r: usize },
    /// `X = [0⁽²⁾, 𝒜_{2r}, 0]`, `Z = (E₁ E₂)`.
    Phi6 { r: usize },
    /// `X = [b𝒜₂, 𝒜_{2r−2}, 0]`, `Z = (E₁ E₂)`, `b ∈ Ω`.
    Phi7 { r: usize, b: Fe },
    /// `X = [𝒦, 𝒜_{2r−4}, 0]`, `Z = (E₁ E₂)`.
    Phi8 { r: usize },
}

impl fmt::Display for SuborbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SuborbitLabel::Phi0 => write!(f, "phi0"),
            SuborbitLabel::Phi1 { r } => write!(f, "phi1({r})"),
            SuborbitLabel::Phi2 { r, a } => write!(f, "phi2({r};a={a})"),
            SuborbitLabel::Phi3 { r, a } => write!(f, "phi3({r};a={a})"),
            SuborbitLabel::Phi4 { r } => write!(f, "phi4({r})"),
            SuborbitLabel::Phi5 { r } => write!(f, "phi5({r})"),
            SuborbitLabel::Phi6 { r } => write!(f, "phi6({r})"),
            SuborbitLabel::Phi7 { r, b } => write!(f, "phi7({r};b={b})"),
            SuborbitLabel::Phi8 { r } => write!(f, "phi8({r})"),
        }
    }
}

impl serde::Serialize for SuborbitLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl SuborbitLabel {
    pub fn is_valid(&self, gf: &Gf, nu: usize) -> bool {
        match *self {
            SuborbitLabel::Phi0 => nu >= 1,
            SuborbitLabel::Phi1 { r } => (1..=nu / 2).contains(&r),
            SuborbitLabel::Phi2 { r, a } => a <= 1 && r <= nu.saturating_sub(1) / 2,
            SuborbitLabel::Phi3 { r, a } => a <= 1 && (1..=nu / 2).contains(&r),
            SuborbitLabel::Phi4 { r } => nu >= 2 && r <= (nu - 1) / 2,
            SuborbitLabel::Phi5 { r } => nu >= 3 && (1..=(nu - 1) / 2).contains(&r),
            SuborbitLabel::Phi6 { r } => nu >= 4 && (1..=(nu - 2) / 2).contains(&r),
            SuborbitLabel::Phi7 { r, b } => {
                nu >= 2 && (1..=nu / 2).contains(&r) && gf.omega().contains(&b)
            }
            SuborbitLabel::Phi8 { r } => nu >= 4 && (2..=nu / 2).contains(&r),
        }
    }
}

/// Canonical forms of alternate matrices under `O₁` (kinds `Zero`,
/// `OffsetOne`, `FullStart`) and `O₂` (all five kinds).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AltForm {
    Zero,
    /// `[0, 𝒜_{2r}, 0^{ν−2r−1}]`, `r ≥ 1`.
    OffsetOne { r: usize },
    /// `[0⁽²⁾, 𝒜_{2r}, 0^{ν−2r−2}]`, `r ≥ 1`.
    OffsetTwo { r: usize },
    /// `[𝒜_{2r}, 0^{ν−2r}]`, `r ≥ 1`.
    FullStart { r: usize },
    /// `[𝒦, 𝒜_{2r−4}, 0^{ν−2r}]`, `r ≥ 2`.
    KBlock { r: usize },
}

impl AltForm {
    pub fn realize(&self, gf: &Gf, nu: usize) -> Mat {
        let z = |n: usize| Mat::zero(gf, n, n);
        match *self {
            AltForm::Zero => z(nu),
            AltForm::OffsetOne { r } => {
                block_diag(&[z(1), std_alternate(gf, r), z(nu - 1 - 2 * r)]).unwrap()
            }
            AltForm::OffsetTwo { r } => {
                block_diag(&[z(2), std_alternate(gf, r), z(nu - 2 - 2 * r)]).unwrap()
            }
            AltForm::FullStart { r } => block_diag(&[std_alternate(gf, r), z(nu - 2 * r)]).unwrap(),
            AltForm::KBlock { r } => {
                block_diag(&[alt_k(gf), std_alternate(gf, r - 2), z(nu - 2 * r)]).unwrap()
            }
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            AltForm::Zero => 0,
            AltForm::OffsetOne { r }
            | AltForm::OffsetTwo { r }
            | AltForm::FullStart { r }
            | AltForm::KBlock { r } => 2 * r,
        }
    }
}

fn is_block_lower(t: &Mat, head: usize) -> bool {
    for i in 0..head {
        for j in head..t.cols() {
            if t[(i, j)] != 0 {
                return false;
            }
        }
    }
    true
}

/// Permutation pulling the listed old coordinates to the positions directly
/// after the head, preserving the relative order of everything else. It
/// fixes the head coordinates, so it lies in the relevant block subgroup.
fn head_pull_permutation(gf: &Gf, nu: usize, head: usize, pulled: &[usize]) -> Mat {
    let mut order: Vec<usize> = (0..head).collect();
    order.extend_from_slice(pulled);
    for i in head..nu {
        if !pulled.contains(&i) {
            order.push(i);
        }
    }
    let mut p = Mat::zero(gf, nu, nu);
    for (new, &old) in order.iter().enumerate() {
        p[(old, new)] = 1;
    }
    p
}

/// Shared reduction for both head sizes. Returns `(T, form)` with `T` in the
/// block-lower-triangular subgroup for the given head and `TᵗXT` equal to
/// the realized form.
fn canonicalize_with_head(x: &Mat, head: usize) -> Result<(Mat, AltForm)> {
    if !x.is_alternate() {
        return Err(Error::NotAlternate);
    }
    let gf = x.gf().clone();
    let nu = x.rows();
    assert!(nu >= head, "matrix smaller than head block");
    if x.is_zero() {
        return Ok((Mat::identity(&gf, nu), AltForm::Zero));
    }

    let mut t_acc = Mat::identity(&gf, nu);
    let mut cur = x.clone();
    let apply = |t_acc: &mut Mat, cur: &mut Mat, t: &Mat| {
        *cur = t.transpose().mul(cur).unwrap().mul(t).unwrap();
        *t_acc = t_acc.mul(t).unwrap();
    };

    // Normalize the tail block to [𝒜_{2r₂}, 0].
    let x_tt = cur.submatrix(head, nu, head, nu);
    let (t_inner, r2) = alt_normalize(&x_tt)?;
    let u1 = block_diag(&[Mat::identity(&gf, head), t_inner])?;
    apply(&mut t_acc, &mut cur, &u1);

    // Shear away the coupling of the head with the 𝒜 part:
    // v = −𝒜_{2r₂} Y₁₂ᵗ placed below the head block.
    if r2 > 0 {
        let y12 = cur.submatrix(0, head, head, head + 2 * r2);
        let v = std_alternate(&gf, r2).mul(&y12.transpose())?.neg();
        let mut shear = Mat::identity(&gf, nu);
        shear.set_block(head, 0, &v);
        apply(&mut t_acc, &mut cur, &shear);
    }

    let m = nu - head - 2 * r2;
    let y13 = cur.submatrix(0, head, head + 2 * r2, nu);

    let form;
    if head == 1 {
        if y13.is_zero() {
            debug_assert!(r2 >= 1);
            form = AltForm::OffsetOne { r: r2 };
        } else {
            // Y₁₃ is a nonzero row: send it to e₁ᵗ, then pull the coupled
            // coordinate next to the head to assemble an 𝒜₂ pair.
            let t13 = extend_to_invertible(&gf, m, &[y13.row(0).to_vec()])?
                .inverse()?
                .transpose();
            let fix = block_diag(&[Mat::identity(&gf, 1 + 2 * r2), t13])?;
            apply(&mut t_acc, &mut cur, &fix);
            let perm = head_pull_permutation(&gf, nu, 1, &[1 + 2 * r2]);
            apply(&mut t_acc, &mut cur, &perm);
            form = AltForm::FullStart { r: r2 + 1 };
        }
    } else {
        let x1 = cur[(0, 1)];
        match y13.rank() {
            0 => {
                if x1 == 0 {
                    debug_assert!(r2 >= 1);
                    form = AltForm::OffsetTwo { r: r2 };
                } else {
                    let mut scale = Mat::identity(&gf, nu);
                    scale[(0, 0)] = gf.inv(x1)?;
                    apply(&mut t_acc, &mut cur, &scale);
                    form = AltForm::FullStart { r: r2 + 1 };
                }
            }
            1 => {
                // Y₁₃ = κ·w; send κ to e₂ and w to e₁ᵗ.
                let (kappa, w) = if !y13.row(0).iter().all(|&v| v == 0) {
                    let w = y13.row(0).to_vec();
                    let k = y13.row(0).iter().position(|&v| v != 0).expect("nonzero row");
                    let factor = gf.mul(y13[(1, k)], gf.inv(y13[(0, k)])?);
                    (vec![1, factor], w)
                } else {
                    (vec![0, 1], y13.row(1).to_vec())
                };
                let swap = Mat::new(&gf, 2, 2, vec![0, 1, 1, 0])?;
                let t12 = swap.mul(&extend_to_invertible(&gf, 2, &[kappa])?.inverse()?)?;
                let t13 = extend_to_invertible(&gf, m, &[w])?.inverse()?.transpose();
                let fix = block_diag(&[t12.transpose(), Mat::identity(&gf, 2 * r2), t13])?;
                apply(&mut t_acc, &mut cur, &fix);
                debug_assert_eq!(cur[(1, 2 + 2 * r2)], 1);
                let perm = head_pull_permutation(&gf, nu, 2, &[2 + 2 * r2]);
                apply(&mut t_acc, &mut cur, &perm);
                // Clear the residual pairing of the two head coordinates.
                let x2 = cur[(0, 1)];
                if x2 != 0 {
                    let mut shear = Mat::identity(&gf, nu);
                    shear[(2, 0)] = x2;
                    apply(&mut t_acc, &mut cur, &shear);
                }
                form = AltForm::OffsetOne { r: r2 + 1 };
            }
            _ => {
                // Y₁₃ has rank 2: send it to (I⁽²⁾ 0).
                let c1 = y13.row(0).to_vec();
                let c2 = y13.row(1).to_vec();
                let t14 = extend_to_invertible(&gf, m, &[c1, c2])?.inverse()?.transpose();
                let fix = block_diag(&[Mat::identity(&gf, 2 + 2 * r2), t14])?;
                apply(&mut t_acc, &mut cur, &fix);
                let perm = head_pull_permutation(&gf, nu, 2, &[2 + 2 * r2, 3 + 2 * r2]);
                apply(&mut t_acc, &mut cur, &perm);
                let x1 = cur[(0, 1)];
                if x1 != 0 {
                    let mut shear = Mat::identity(&gf, nu);
                    shear[(2, 1)] = gf.neg(x1);
                    apply(&mut t_acc, &mut cur, &shear);
                }
                form = AltForm::KBlock { r: r2 + 2 };
            }
        }
    }

    debug_assert!(is_block_lower(&t_acc, head));
    debug_assert_eq!(cur, form.realize(&gf, nu));
    Ok((t_acc, form))
}

/// Canonical form under the subgroup of `GL_ν` with invertible leading 1×1
/// block (block lower triangular).
pub fn o1_canonicalize(x: &Mat) -> Result<(Mat, AltForm)> {
    canonicalize_with_head(x, 1)
}

/// Canonical form under the subgroup of `GL_ν` with invertible leading 2×2
/// block (block lower triangular). Requires ν ≥ 2.
pub fn o2_canonicalize(x: &Mat) -> Result<(Mat, AltForm)> {
    canonicalize_with_head(x, 2)
}

/// The complete inventory of canonical forms for the given head, i.e. the
/// orbit representatives of the head-`i` subgroup on alternate matrices.
pub fn forms_for_head(nu: usize, head: usize) -> Vec<AltForm> {
    let mut out = vec![AltForm::Zero];
    for r in 1..=nu.saturating_sub(1) / 2 {
        out.push(AltForm::OffsetOne { r });
    }
    for r in 1..=nu / 2 {
        out.push(AltForm::FullStart { r });
    }
    if head == 2 {
        for r in 1..=nu.saturating_sub(2) / 2 {
            out.push(AltForm::OffsetTwo { r });
        }
        for r in 2..=nu / 2 {
            out.push(AltForm::KBlock { r });
        }
    }
    out
}

/// The `Z` block `(E₁ aE₁)`.
fn z_rank1(space: &OrthoSpace, a: u8) -> Mat {
    let gf = space.gf();
    let nu = space.nu();
    let e1 = basis_vector(gf, nu, 1);
    let mut z = Mat::zero(gf, nu, 2);
    z.set_block(0, 0, &e1);
    if a == 1 {
        z.set_block(0, 1, &e1);
    }
    z
}

/// The `Z` block `(E₁ E₂)`.
fn z_rank2(space: &OrthoSpace) -> Mat {
    let gf = space.gf();
    let nu = space.nu();
    let mut z = Mat::zero(gf, nu, 2);
    z.set_block(0, 0, &basis_vector(gf, nu, 1));
    z.set_block(0, 1, &basis_vector(gf, nu, 2));
    z
}

/// The exact displayed representative of a suborbit, as a vertex.
pub fn representative(space: &OrthoSpace, label: SuborbitLabel) -> Result<Vertex> {
    let gf = space.gf();
    let nu = space.nu();
    if !label.is_valid(gf, nu) {
        return Err(Error::InvalidLabel {
            label: label.to_string(),
            q: gf.q() as u64,
            nu,
        });
    }
    let z0 = |n: usize| Mat::zero(gf, n, n);
    let (x, z) = match label {
        SuborbitLabel::Phi0 => (z0(nu), Mat::zero(gf, nu, 2)),
        SuborbitLabel::Phi1 { r } => (AltForm::FullStart { r }.realize(gf, nu), Mat::zero(gf, nu, 2)),
        SuborbitLabel::Phi2 { r, a } => {
            let x = if r == 0 { z0(nu) } else { AltForm::OffsetOne { r }.realize(gf, nu) };
            (x, z_rank1(space, a))
        }
        SuborbitLabel::Phi3 { r, a } => (AltForm::FullStart { r }.realize(gf, nu), z_rank1(space, a)),
        SuborbitLabel::Phi4 { r } => {
            let x = if r == 0 { z0(nu) } else { AltForm::OffsetOne { r }.realize(gf, nu) };
            (x, z_rank2(space))
        }
        SuborbitLabel::Phi5 { r } => (
            block_diag(&[alt_y(gf), std_alternate(gf, r - 1), z0(nu - 1 - 2 * r)])?,
            z_rank2(space),
        ),
        SuborbitLabel::Phi6 { r } => (AltForm::OffsetTwo { r }.realize(gf, nu), z_rank2(space)),
        SuborbitLabel::Phi7 { r, b } => (
            block_diag(&[alt2(gf).scale(b), std_alternate(gf, r - 1), z0(nu - 2 * r)])?,
            z_rank2(space),
        ),
        SuborbitLabel::Phi8 { r } => (AltForm::KBlock { r }.realize(gf, nu), z_rank2(space)),
    };
    Vertex::new(space, x, z)
}

/// Running state of the constructive reduction: the vertex coordinates
/// together with the accumulated group element, so that
/// `input · [t_acc, (t_accᵗ)⁻¹, s_acc] = (x, z)` at all times.
struct Reduction<'a> {
    space: &'a OrthoSpace,
    x: Mat,
    z: Mat,
    t_acc: Mat,
    s_acc: Mat,
}

impl<'a> Reduction<'a> {
    fn new(space: &'a OrthoSpace, v: &Vertex) -> Reduction<'a> {
        Reduction {
            space,
            x: v.x().clone(),
            z: v.z().clone(),
            t_acc: Mat::identity(space.gf(), space.nu()),
            s_acc: Mat::identity(space.gf(), 2),
        }
    }

    fn apply(&mut self, t: &Mat, s: &Mat) {
        debug_assert!(self.space.is_delta_isometry(s));
        let tt = t.transpose();
        self.x = tt.mul(&self.x).unwrap().mul(t).unwrap();
        self.z = tt.mul(&self.z).unwrap().mul(s).unwrap();
        self.t_acc = self.t_acc.mul(t).unwrap();
        self.s_acc = self.s_acc.mul(s).unwrap();
    }

    fn apply_t(&mut self, t: &Mat) {
        let id = Mat::identity(self.space.gf(), 2);
        self.apply(t, &id);
    }

    fn apply_s(&mut self, s: &Mat) {
        let id = Mat::identity(self.space.gf(), self.space.nu());
        self.apply(&id, s);
    }

    fn diag_t(&self, entries: &[(usize, Fe)]) -> Mat {
        let mut t = Mat::identity(self.space.gf(), self.space.nu());
        for &(i, v) in entries {
            t[(i, i)] = v;
        }
        t
    }
}

/// Classifies a vertex into its suborbit, returning the label and a witness
/// `g` with `g.act(representative(label)) == v` exactly.
pub fn classify(space: &OrthoSpace, v: &Vertex) -> (SuborbitLabel, GroupElement01) {
    assert_eq!(space.delta(), 2, "classification requires delta = 2");
    let gf = space.gf().clone();
    let nu = space.nu();
    let mut red = Reduction::new(space, v);

    let label = match red.z.rank() {
        0 => {
            if red.x.is_zero() {
                SuborbitLabel::Phi0
            } else {
                let (t, r) = alt_normalize(&red.x).unwrap();
                red.apply_t(&t);
                SuborbitLabel::Phi1 { r }
            }
        }
        1 => {
            // Z = D₀(x y); send D₀ to E₁ by a GL factor.
            let col0 = red.z.col(0);
            let d0 = if col0.iter().any(|&v| v != 0) {
                col0
            } else {
                red.z.col(1)
            };
            let s_gl = extend_to_invertible(&gf, nu, &[d0])
                .unwrap()
                .inverse()
                .unwrap()
                .transpose();
            red.apply_t(&s_gl);
            let (t, form) = o1_canonicalize(&red.x).unwrap();
            red.apply_t(&t);
            // Normalize the line (x', y') in the Δ plane to (1, 0) or (1, 1).
            let (s11, a) = space
                .normalize_delta_line(red.z[(0, 0)], red.z[(0, 1)])
                .unwrap();
            red.apply_s(&s11);
            let b = red.z[(0, 0)];
            debug_assert_ne!(b, 0);
            red.apply_t(&red.diag_t(&[(0, gf.inv(b).unwrap())]));
            match form {
                AltForm::Zero => SuborbitLabel::Phi2 { r: 0, a },
                AltForm::OffsetOne { r } => SuborbitLabel::Phi2 { r, a },
                AltForm::FullStart { r } => {
                    red.apply_t(&red.diag_t(&[(1, b)]));
                    SuborbitLabel::Phi3 { r, a }
                }
                _ => unreachable!("head-1 reduction yields only these forms"),
            }
        }
        _ => {
            // Z has rank 2; send it to (E₁ E₂) by a GL factor.
            let s_gl = extend_to_invertible(&gf, nu, &[red.z.col(0), red.z.col(1)])
                .unwrap()
                .inverse()
                .unwrap()
                .transpose();
            red.apply_t(&s_gl);
            let (t, form) = o2_canonicalize(&red.x).unwrap();
            let t11 = t.submatrix(0, 2, 0, 2);
            red.apply_t(&t);
            red.apply_t(
                &block_diag(&[t11.inverse().unwrap(), Mat::identity(&gf, nu - 2)]).unwrap(),
            );
            debug_assert_eq!(red.z, z_rank2(space));
            match form {
                AltForm::Zero => SuborbitLabel::Phi4 { r: 0 },
                AltForm::OffsetTwo { r } => SuborbitLabel::Phi6 { r },
                AltForm::OffsetOne { r } => {
                    let u = red.x[(0, 2)];
                    let w = red.x[(1, 2)];
                    if u == 0 {
                        red.apply_t(&red.diag_t(&[(2, gf.inv(w).unwrap())]));
                        SuborbitLabel::Phi4 { r }
                    } else {
                        red.apply_t(&red.diag_t(&[(2, gf.inv(u).unwrap())]));
                        let c = red.x[(1, 2)];
                        let z = gf.z();
                        let c2z = gf.sub(gf.mul(c, c), z);
                        if gf.is_square(c2z) {
                            // c² − z = s²: rotate the head coupling away.
                            let s = gf.sqrt(c2z).unwrap();
                            let si = gf.inv(s).unwrap();
                            let a11 = Mat::new(
                                &gf,
                                2,
                                2,
                                vec![
                                    gf.mul(si, c),
                                    gf.mul(si, gf.neg(z)),
                                    gf.mul(si, gf.neg(1)),
                                    gf.mul(si, c),
                                ],
                            )
                            .unwrap();
                            let t_gl = block_diag(&[
                                a11.clone(),
                                Mat::scalar(&gf, si),
                                Mat::identity(&gf, nu - 3),
                            ])
                            .unwrap();
                            let s_o = a11.transpose().inverse().unwrap();
                            red.apply(&t_gl, &s_o);
                            SuborbitLabel::Phi4 { r }
                        } else {
                            // s²(c² − z) = 1 − z: reduce to the coupled form Y.
                            let ratio = gf.div(gf.sub(1, z), c2z).unwrap();
                            let s = gf.sqrt(ratio).unwrap();
                            let denom = gf.inv(gf.mul(s, c2z)).unwrap();
                            let b11 = Mat::new(
                                &gf,
                                2,
                                2,
                                vec![
                                    gf.mul(denom, gf.sub(c, z)),
                                    gf.mul(denom, gf.mul(z, gf.sub(c, 1))),
                                    gf.mul(denom, gf.sub(c, 1)),
                                    gf.mul(denom, gf.sub(c, z)),
                                ],
                            )
                            .unwrap();
                            let t_gl = block_diag(&[
                                b11.clone(),
                                Mat::scalar(&gf, s),
                                Mat::identity(&gf, nu - 3),
                            ])
                            .unwrap();
                            let s_o = b11.transpose().inverse().unwrap();
                            red.apply(&t_gl, &s_o);
                            SuborbitLabel::Phi5 { r }
                        }
                    }
                }
                AltForm::FullStart { r } => {
                    let b = red.x[(0, 1)];
                    let b = if gf.omega().contains(&b) {
                        b
                    } else {
                        // Flip the sign of b while fixing Z.
                        let flip_t = red.diag_t(&[(0, gf.neg(1))]);
                        let flip_s = Mat::diag(&gf, &[gf.neg(1), 1]);
                        red.apply(&flip_t, &flip_s);
                        gf.neg(b)
                    };
                    SuborbitLabel::Phi7 { r, b }
                }
                AltForm::KBlock { r } => {
                    let u = red.x.submatrix(0, 2, 2, 4);
                    let fix = block_diag(&[
                        Mat::identity(&gf, 2),
                        u.inverse().unwrap(),
                        Mat::identity(&gf, nu - 4),
                    ])
                    .unwrap();
                    red.apply_t(&fix);
                    SuborbitLabel::Phi8 { r }
                }
            }
        }
    };

    let rep = representative(space, label).expect("classification yields a valid label");
    debug_assert_eq!(
        (&red.x, &red.z),
        (rep.x(), rep.z()),
        "reduction must land exactly on the representative"
    );
    let witness = GroupElement01::new(
        space,
        red.t_acc.inverse().unwrap(),
        red.s_acc.inverse().unwrap(),
    )
    .unwrap();
    (label, witness)
}

fn checked_pow(q: u128, e: usize) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc
            .checked_mul(q)
            .ok_or_else(|| Error::CapExceeded("order formula overflows u128".into()))?;
    }
    Ok(acc)
}

fn exact_div(num: u128, den: u128) -> u128 {
    debug_assert_eq!(num % den, 0, "suborbit length must divide exactly");
    num / den
}

/// Exact suborbit length.
///
/// Three denominators differ from naive readings of the closed forms and are
/// pinned by direct orbit-stabilizer counts, cross-checked against the
/// brute-force orbit oracle and the partition identity Σ|φ| = |Λ|:
/// `|φ₄(0)| = |GL_ν| / (q^{2(ν−2)}|GL_{ν−2}|)`, `|φ₅(r)| = |φ₄(r)|` for
/// `r ≥ 1`, and φ₈ divides by `|Sp_{2r−4}|` (the 𝒦 block consumes two
/// hyperbolic pairs, leaving `𝒜_{2r−4}` free).
pub fn suborbit_size(gf: &Gf, nu: usize, label: SuborbitLabel) -> Result<u128> {
    if !label.is_valid(gf, nu) {
        return Err(Error::InvalidLabel {
            label: label.to_string(),
            q: gf.q() as u64,
            nu,
        });
    }
    let q = gf.q() as u128;
    let gl = |m: usize| order_gl(m, q);
    let sp = |two_m: i64| order_sp(two_m, q);

    let phi4 = |r: usize| -> Result<u128> {
        if r == 0 {
            let den = checked_pow(q, 2 * (nu - 2))? * gl(nu - 2);
            Ok(exact_div(gl(nu), den))
        } else {
            let num = (q + 1) * gl(nu);
            let den = sp(2 * r as i64 - 2)
                * gl(nu - 2 * r - 1)
                * 2
                * checked_pow(q, (2 * r + 1) * (nu - 2 * r) - 2)?;
            Ok(exact_div(num, den))
        }
    };

    let size = match label {
        SuborbitLabel::Phi0 => 1,
        SuborbitLabel::Phi1 { r } => {
            let den = sp(2 * r as i64) * gl(nu - 2 * r) * checked_pow(q, 2 * r * (nu - 2 * r))?;
            exact_div(gl(nu), den)
        }
        SuborbitLabel::Phi2 { r, .. } => {
            let num = (q + 1) * gl(nu);
            let den = sp(2 * r as i64)
                * gl(nu - 2 * r - 1)
                * 2
                * checked_pow(q, (2 * r + 1) * (nu - 2 * r - 1))?;
            exact_div(num, den)
        }
        SuborbitLabel::Phi3 { r, .. } => {
            let num = (q + 1) * gl(nu);
            let den = sp(2 * r as i64 - 2)
                * gl(nu - 2 * r)
                * 2
                * checked_pow(q, 2 * r * (nu - 2 * r) + 2 * r - 1)?;
            exact_div(num, den)
        }
        SuborbitLabel::Phi4 { r } | SuborbitLabel::Phi5 { r } => phi4(r)?,
        SuborbitLabel::Phi6 { r } => {
            let den = sp(2 * r as i64)
                * gl(nu - 2 * r - 2)
                * checked_pow(q, (2 * r + 2) * (nu - 2 * r - 2))?;
            exact_div(gl(nu), den)
        }
        SuborbitLabel::Phi7 { r, .. } => {
            let den =
                sp(2 * r as i64 - 2) * gl(nu - 2 * r) * checked_pow(q, 2 * r * (nu - 2 * r))?;
            exact_div(2 * gl(nu), den)
        }
        SuborbitLabel::Phi8 { r } => {
            let den = sp(2 * r as i64 - 4)
                * gl(nu - 2 * r)
                * checked_pow(q, 2 * r * (nu - 2 * r) + 4 * r - 5)?;
            exact_div(gl(nu), den)
        }
    };
    Ok(size)
}

/// Every valid label for `(q, ν)`, in report order: φ₀ first, then families
/// in index order, `r` ascending, `a` ascending, `b` in Ω order.
pub fn all_labels(gf: &Gf, nu: usize) -> Vec<SuborbitLabel> {
    let mut out = vec![SuborbitLabel::Phi0];
    for r in 1..=nu / 2 {
        out.push(SuborbitLabel::Phi1 { r });
    }
    for r in 0..=nu.saturating_sub(1) / 2 {
        for a in 0..=1u8 {
            out.push(SuborbitLabel::Phi2 { r, a });
        }
    }
    for r in 1..=nu / 2 {
        for a in 0..=1u8 {
            out.push(SuborbitLabel::Phi3 { r, a });
        }
    }
    if nu >= 2 {
        for r in 0..=(nu - 1) / 2 {
            out.push(SuborbitLabel::Phi4 { r });
        }
        for r in 1..=(nu - 1) / 2 {
            out.push(SuborbitLabel::Phi5 { r });
        }
        for r in 1..=nu.saturating_sub(2) / 2 {
            out.push(SuborbitLabel::Phi6 { r });
        }
        for r in 1..=nu / 2 {
            for &b in gf.omega() {
                out.push(SuborbitLabel::Phi7 { r, b });
            }
        }
        for r in 2..=nu / 2 {
            out.push(SuborbitLabel::Phi8 { r });
        }
    }
    debug_assert!(out.iter().all(|l| l.is_valid(gf, nu)));
    out
}

/// The number of suborbits: `(q+7)/2·⌊ν/2⌋ + 4⌊(ν−1)/2⌋ + ⌊(ν−2)/2⌋ + 3`,
/// with each floor term clamped at zero so the display also covers ν = 1.
pub fn rank_g0(q: u64, nu: usize) -> u128 {
    let t1 = (nu / 2) as u128;
    let t2 = (nu.saturating_sub(1) / 2) as u128;
    let t3 = (nu.saturating_sub(2) / 2) as u128;
    ((q as u128 + 7) / 2) * t1 + 4 * t2 + t3 + 3
}
