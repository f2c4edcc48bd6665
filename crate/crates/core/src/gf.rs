//! Arithmetic in the finite field `F_q` of odd order.
//!
//! Elements are canonical integer indices in `[0, q)`. For a prime field the
//! index is the residue; for `q = p^e` with `e > 1` it is the base-`p`
//! evaluation of the coefficient vector of the element's polynomial
//! representative, reduced modulo a fixed irreducible modulus.
//!
//! Besides the ring operations the field carries two distinguished pieces of
//! data used throughout the crate:
//!
//! * `z` — the smallest non-square such that `1 - z` is also a non-square,
//! * `Ω` (omega) — a set of representatives for `F_q* / {±1}`, namely the
//!   member of each pair `{a, -a}` with the smaller index.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Canonical index of a field element.
pub type Fe = u32;

#[derive(Debug)]
struct GfData {
    q: u32,
    p: u32,
    e: u32,
    /// Coefficients of the monic irreducible modulus, degree `e`, lowest
    /// degree first, including the leading 1. Empty when `e == 1`.
    modulus: Vec<u32>,
    z: Fe,
    omega: Vec<Fe>,
    is_square: Vec<bool>,
    inverse: Vec<Fe>,
}

/// A handle to an immutable field description; cheap to clone and safe to
/// share across threads.
#[derive(Clone)]
pub struct Gf(Arc<GfData>);

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf({})", self.0.q)
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.0.q == other.0.q
    }
}
impl Eq for Gf {}

fn factor_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut m = q;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            return if m == 1 { Some((p, e)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

// Polynomial helpers over F_p, coefficients lowest degree first.
fn poly_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for i in 0..=dm {
            let idx = shift + i;
            let sub = (lead as u64 * m[i] as u64) % p as u64;
            r[idx] = ((r[idx] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn index_to_poly(mut idx: u32, p: u32, e: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(e as usize);
    for _ in 0..e {
        v.push(idx % p);
        idx /= p;
    }
    poly_trim(&mut v);
    v
}

fn poly_to_index(v: &[u32], p: u32) -> u32 {
    let mut idx = 0u64;
    for &c in v.iter().rev() {
        idx = idx * p as u64 + c as u64;
    }
    idx as u32
}

/// The monic irreducible of degree `e` over `F_p` whose non-leading
/// coefficient vector has the smallest base-`p` index.
fn least_irreducible(p: u32, e: u32) -> Vec<u32> {
    let tail_count = (p as u64).pow(e);
    'cand: for t in 0..tail_count {
        let mut m = index_to_poly(t as u32, p, e);
        m.resize(e as usize, 0);
        m.push(1);
        // Reducible iff divisible by some monic polynomial of degree 1..=e/2.
        for d in 1..=(e / 2).max(1) {
            if d > e / 2 {
                break;
            }
            let div_count = (p as u64).pow(d);
            for t2 in 0..div_count {
                let mut g = index_to_poly(t2 as u32, p, d);
                g.resize(d as usize, 0);
                g.push(1);
                if poly_rem(&m, &g, p).is_empty() {
                    continue 'cand;
                }
            }
        }
        return m;
    }
    unreachable!("an irreducible of every degree exists over F_p")
}

impl Gf {
    /// Builds the field of order `q`, selecting `z` and `Ω` deterministically.
    pub fn new(q: u64) -> Result<Gf> {
        let (p, e) = factor_prime_power(q).ok_or_else(|| Error::InvalidField {
            q,
            reason: "not a prime power".into(),
        })?;
        if p == 2 {
            return Err(Error::InvalidField {
                q,
                reason: "even characteristic is not supported".into(),
            });
        }
        if q < 3 {
            return Err(Error::InvalidField {
                q,
                reason: "order must be at least 3".into(),
            });
        }
        if q > (1 << 20) {
            return Err(Error::InvalidField {
                q,
                reason: "order beyond desk scale".into(),
            });
        }
        let q32 = q as u32;
        let p32 = p as u32;
        let modulus = if e > 1 { least_irreducible(p32, e) } else { vec![] };

        let mut gf = GfData {
            q: q32,
            p: p32,
            e,
            modulus,
            z: 0,
            omega: vec![],
            is_square: vec![],
            inverse: vec![],
        };

        // Raw multiplication before tables exist.
        let raw_mul = |gf: &GfData, a: Fe, b: Fe| -> Fe {
            if gf.e == 1 {
                ((a as u64 * b as u64) % gf.q as u64) as Fe
            } else {
                let prod = poly_mul(
                    &index_to_poly(a, gf.p, gf.e),
                    &index_to_poly(b, gf.p, gf.e),
                    gf.p,
                );
                poly_to_index(&poly_rem(&prod, &gf.modulus, gf.p), gf.p)
            }
        };
        let raw_pow = |gf: &GfData, a: Fe, mut n: u64| -> Fe {
            let mut base = a;
            let mut acc: Fe = 1;
            while n > 0 {
                if n & 1 == 1 {
                    acc = raw_mul(gf, acc, base);
                }
                base = raw_mul(gf, base, base);
                n >>= 1;
            }
            acc
        };

        let mut is_square = vec![false; q as usize];
        is_square[0] = true;
        for a in 1..q32 {
            is_square[a as usize] = raw_pow(&gf, a, (q - 1) / 2) == 1;
        }
        gf.is_square = is_square;

        let mut inverse = vec![0 as Fe; q as usize];
        for a in 1..q32 {
            inverse[a as usize] = raw_pow(&gf, a, q - 2);
        }
        gf.inverse = inverse;

        // Smallest non-square z with 1 - z also a non-square.
        let neg = |gf: &GfData, a: Fe| -> Fe {
            if gf.e == 1 {
                if a == 0 {
                    0
                } else {
                    gf.q - a
                }
            } else {
                let v: Vec<u32> = index_to_poly(a, gf.p, gf.e)
                    .iter()
                    .map(|&c| (gf.p - c) % gf.p)
                    .collect();
                poly_to_index(&v, gf.p)
            }
        };
        let add = |gf: &GfData, a: Fe, b: Fe| -> Fe {
            if gf.e == 1 {
                ((a as u64 + b as u64) % gf.q as u64) as Fe
            } else {
                let pa = index_to_poly(a, gf.p, gf.e);
                let pb = index_to_poly(b, gf.p, gf.e);
                let n = pa.len().max(pb.len());
                let mut v = vec![0u32; n];
                for (i, slot) in v.iter_mut().enumerate() {
                    let x = pa.get(i).copied().unwrap_or(0);
                    let y = pb.get(i).copied().unwrap_or(0);
                    *slot = (x + y) % gf.p;
                }
                poly_to_index(&v, gf.p)
            }
        };

        let mut z = None;
        for cand in 1..q32 {
            let one_minus = add(&gf, 1, neg(&gf, cand));
            if !gf.is_square[cand as usize] && !gf.is_square[one_minus as usize] {
                z = Some(cand);
                break;
            }
        }
        gf.z = z.ok_or_else(|| Error::InvalidField {
            q,
            reason: "no non-square z with 1-z also a non-square".into(),
        })?;

        let mut omega = Vec::with_capacity((q as usize - 1) / 2);
        for a in 1..q32 {
            if a < neg(&gf, a) {
                omega.push(a);
            }
        }
        gf.omega = omega;

        Ok(Gf(Arc::new(gf)))
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn characteristic(&self) -> u32 {
        self.0.p
    }
    pub fn extension_degree(&self) -> u32 {
        self.0.e
    }
    /// Modulus coefficients (lowest degree first, monic), empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }
    /// The distinguished non-square `z` (with `1 - z` also a non-square).
    pub fn z(&self) -> Fe {
        self.0.z
    }
    /// The half-set Ω: for every `a ≠ 0`, exactly one of `a, -a` is in Ω.
    pub fn omega(&self) -> &[Fe] {
        &self.0.omega
    }
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.0.q
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let d = &self.0;
        if d.e == 1 {
            let s = a + b;
            if s >= d.q {
                s - d.q
            } else {
                s
            }
        } else {
            let pa = index_to_poly(a, d.p, d.e);
            let pb = index_to_poly(b, d.p, d.e);
            let n = pa.len().max(pb.len());
            let mut v = vec![0u32; n];
            for (i, slot) in v.iter_mut().enumerate() {
                *slot = (pa.get(i).copied().unwrap_or(0) + pb.get(i).copied().unwrap_or(0)) % d.p;
            }
            poly_to_index(&v, d.p)
        }
    }

    pub fn neg(&self, a: Fe) -> Fe {
        let d = &self.0;
        if d.e == 1 {
            if a == 0 {
                0
            } else {
                d.q - a
            }
        } else {
            let v: Vec<u32> = index_to_poly(a, d.p, d.e)
                .iter()
                .map(|&c| (d.p - c) % d.p)
                .collect();
            poly_to_index(&v, d.p)
        }
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let d = &self.0;
        if d.e == 1 {
            ((a as u64 * b as u64) % d.q as u64) as Fe
        } else {
            let prod = poly_mul(&index_to_poly(a, d.p, d.e), &index_to_poly(b, d.p, d.e), d.p);
            poly_to_index(&poly_rem(&prod, &d.modulus, d.p), d.p)
        }
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.0.inverse[a as usize])
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut n: u64) -> Fe {
        let mut base = a;
        let mut acc: Fe = 1;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// The multiplicative inverse of 2; ubiquitous in the vertex encoding.
    pub fn half(&self) -> Fe {
        self.inv(self.add(1, 1)).expect("odd characteristic")
    }

    /// True iff `a` is a square (0 counts as a square).
    pub fn is_square(&self, a: Fe) -> bool {
        self.0.is_square[a as usize]
    }

    /// The square root of smaller canonical index; errors on non-squares.
    pub fn sqrt(&self, a: Fe) -> Result<Fe> {
        for b in 0..self.0.q {
            if self.mul(b, b) == a {
                return Ok(b);
            }
        }
        Err(Error::NotASquare(a))
    }

    /// A generator of the multiplicative group, the smallest by index.
    pub fn primitive_element(&self) -> Fe {
        let q = self.0.q as u64;
        'outer: for g in 2..self.0.q {
            let mut x: Fe = 1;
            for _ in 0..q - 2 {
                x = self.mul(x, g);
                if x == 1 {
                    continue 'outer;
                }
            }
            return g;
        }
        unreachable!("F_q* is cyclic")
    }

    /// The Ω-representative of a nonzero element: `a` itself when `a ∈ Ω`,
    /// otherwise `-a`.
    pub fn omega_rep(&self, a: Fe) -> Fe {
        let n = self.neg(a);
        if a < n {
            a
        } else {
            n
        }
    }
}
