//! Truncated valuation rings `F[t]/(t^N)` and the two involutions.
//!
//! The uniformizer is `t` with `t^N = 0`. An inert extension is modeled as
//! `F_{q^2}[t]/(t^N)` with the involution acting coefficientwise by the
//! q-power Frobenius and fixing `t`; its fixed ring is `F_q[t]/(t^N)`. A
//! split "extension" is the pair ring: elements are ordered pairs over
//! `F_q[t]/(t^N)` and the involution swaps the components.

use crate::ff::FieldSpec;
use crate::{Error, Guards, Result};
use std::sync::Arc;

/// `F[t]/(t^N)` over a concrete finite field. Elements are coefficient
/// vectors of length `N`, low power first.
#[derive(Debug, Clone)]
pub struct TruncRing {
    pub field: Arc<FieldSpec>,
    pub n: usize,
}

pub type RingElem = Vec<u16>;

impl PartialEq for TruncRing {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.field == other.field
    }
}

impl TruncRing {
    pub fn new(field: Arc<FieldSpec>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("truncation level must be >= 1".into()));
        }
        Ok(TruncRing { field, n })
    }

    pub fn size(&self) -> u64 {
        (self.field.size() as u64).pow(self.n as u32)
    }

    pub fn zero(&self) -> RingElem {
        vec![0; self.n]
    }

    pub fn one(&self) -> RingElem {
        let mut v = vec![0; self.n];
        v[0] = 1;
        v
    }

    /// `t^k`, which is zero when `k >= N`.
    pub fn t_pow(&self, k: usize) -> RingElem {
        let mut v = vec![0; self.n];
        if k < self.n {
            v[k] = 1;
        }
        v
    }

    fn check(&self, x: &RingElem) -> Result<()> {
        if x.len() != self.n || x.iter().any(|&c| c as usize >= self.field.size()) {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, x: &RingElem, y: &RingElem) -> Result<RingElem> {
        self.check(x)?;
        self.check(y)?;
        Ok(x.iter()
            .zip(y)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect())
    }

    pub fn neg(&self, x: &RingElem) -> Result<RingElem> {
        self.check(x)?;
        Ok(x.iter().map(|&a| self.field.neg(a)).collect())
    }

    pub fn mul(&self, x: &RingElem, y: &RingElem) -> Result<RingElem> {
        self.check(x)?;
        self.check(y)?;
        let mut out = vec![0u16; self.n];
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.n - i {
                if y[j] != 0 {
                    let prod = self.field.mul(x[i], y[j]);
                    out[i + j] = self.field.add(out[i + j], prod);
                }
            }
        }
        Ok(out)
    }

    /// t-adic valuation; `None` for zero.
    pub fn valuation(&self, x: &RingElem) -> Option<usize> {
        x.iter().position(|&c| c != 0)
    }

    /// All ring elements, guarded by [`Guards::max_ring_elements`].
    pub fn enumerate(&self, guards: &Guards) -> Result<Vec<RingElem>> {
        let total = self.size();
        if total > guards.max_ring_elements {
            return Err(Error::GuardExceeded(format!(
                "ring has {} elements, guard {}",
                total, guards.max_ring_elements
            )));
        }
        let s = self.field.size() as u16;
        let mut out = Vec::with_capacity(total as usize);
        let mut cur = self.zero();
        loop {
            out.push(cur.clone());
            let mut k = 0;
            loop {
                if k == self.n {
                    return Ok(out);
                }
                cur[k] += 1;
                if cur[k] < s {
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
        }
    }
}

/// Which quadratic etale algebra sits over the base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InvolutionKind {
    /// Unramified field extension; involution is the q-power Frobenius on
    /// coefficients, fixing `t`.
    Inert,
    /// Split quadratic algebra; elements are ordered pairs and the involution
    /// swaps them.
    Split,
}

/// The quadratic etale algebra `O'/t^N` over the base `O/t^N = F_q[t]/(t^N)`,
/// together with its involution.
#[derive(Debug, Clone)]
pub struct HermRing {
    pub kind: InvolutionKind,
    /// Component ring: `F_{q^2}[t]/(t^N)` when inert, `F_q[t]/(t^N)` when
    /// split (each pair component).
    pub ring: TruncRing,
    /// Residue size of the base field.
    pub q: u64,
    /// Inert only: the involution on coefficients is `x -> x^{p^frob_m}`.
    frob_m: usize,
}

/// Element of a [`HermRing`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HermElem {
    Inert(RingElem),
    Split(RingElem, RingElem),
}

impl HermRing {
    /// Build the inert extension of residue size `q = p^m`: requires odd `p`
    /// (the Hermitian theory here assumes odd residue characteristic).
    pub fn inert(p: u64, m: u32, n: usize, guards: &Guards) -> Result<Self> {
        if p == 2 {
            return Err(Error::NonOddPrime(2));
        }
        let ext = FieldSpec::new(p, 2 * m, guards)?;
        Ok(HermRing {
            kind: InvolutionKind::Inert,
            ring: TruncRing::new(ext, n)?,
            q: p.pow(m),
            frob_m: m as usize,
        })
    }

    /// Build the split double of residue size `q = p^m`.
    pub fn split(p: u64, m: u32, n: usize, guards: &Guards) -> Result<Self> {
        let base = FieldSpec::new(p, m, guards)?;
        Ok(HermRing {
            kind: InvolutionKind::Split,
            ring: TruncRing::new(base, n)?,
            q: p.pow(m),
            frob_m: 0,
        })
    }

    pub fn size(&self) -> u64 {
        match self.kind {
            InvolutionKind::Inert => self.ring.size(),
            InvolutionKind::Split => self.ring.size() * self.ring.size(),
        }
    }

    pub fn zero(&self) -> HermElem {
        match self.kind {
            InvolutionKind::Inert => HermElem::Inert(self.ring.zero()),
            InvolutionKind::Split => HermElem::Split(self.ring.zero(), self.ring.zero()),
        }
    }

    pub fn one(&self) -> HermElem {
        match self.kind {
            InvolutionKind::Inert => HermElem::Inert(self.ring.one()),
            InvolutionKind::Split => HermElem::Split(self.ring.one(), self.ring.one()),
        }
    }

    pub fn add(&self, x: &HermElem, y: &HermElem) -> Result<HermElem> {
        match (x, y) {
            (HermElem::Inert(a), HermElem::Inert(b)) => Ok(HermElem::Inert(self.ring.add(a, b)?)),
            (HermElem::Split(a1, a2), HermElem::Split(b1, b2)) => Ok(HermElem::Split(
                self.ring.add(a1, b1)?,
                self.ring.add(a2, b2)?,
            )),
            _ => Err(Error::RingMismatch),
        }
    }

    pub fn neg(&self, x: &HermElem) -> Result<HermElem> {
        match x {
            HermElem::Inert(a) => Ok(HermElem::Inert(self.ring.neg(a)?)),
            HermElem::Split(a1, a2) => {
                Ok(HermElem::Split(self.ring.neg(a1)?, self.ring.neg(a2)?))
            }
        }
    }

    pub fn mul(&self, x: &HermElem, y: &HermElem) -> Result<HermElem> {
        match (x, y) {
            (HermElem::Inert(a), HermElem::Inert(b)) => Ok(HermElem::Inert(self.ring.mul(a, b)?)),
            (HermElem::Split(a1, a2), HermElem::Split(b1, b2)) => Ok(HermElem::Split(
                self.ring.mul(a1, b1)?,
                self.ring.mul(a2, b2)?,
            )),
            _ => Err(Error::RingMismatch),
        }
    }

    /// The involution: coefficientwise `x -> x^q` fixing `t` (inert), or the
    /// component swap (split).
    pub fn sigma(&self, x: &HermElem) -> HermElem {
        match x {
            HermElem::Inert(a) => HermElem::Inert(
                a.iter()
                    .map(|&c| self.ring.field.frobenius_pow(c, self.frob_m))
                    .collect(),
            ),
            HermElem::Split(a1, a2) => HermElem::Split(a2.clone(), a1.clone()),
        }
    }

    /// `x * sigma(x)`, which lands in the fixed subring.
    pub fn norm(&self, x: &HermElem) -> Result<HermElem> {
        let s = self.sigma(x);
        self.mul(x, &s)
    }

    /// True when the element is fixed by the involution.
    pub fn is_fixed(&self, x: &HermElem) -> bool {
        self.sigma(x) == *x
    }

    /// All elements, guarded.
    pub fn enumerate(&self, guards: &Guards) -> Result<Vec<HermElem>> {
        if self.size() > guards.max_ring_elements {
            return Err(Error::GuardExceeded(format!(
                "ring has {} elements, guard {}",
                self.size(),
                guards.max_ring_elements
            )));
        }
        match self.kind {
            InvolutionKind::Inert => Ok(self
                .ring
                .enumerate(guards)?
                .into_iter()
                .map(HermElem::Inert)
                .collect()),
            InvolutionKind::Split => {
                let comps = self.ring.enumerate(guards)?;
                let mut out = Vec::with_capacity(comps.len() * comps.len());
                for a in &comps {
                    for b in &comps {
                        out.push(HermElem::Split(a.clone(), b.clone()));
                    }
                }
                Ok(out)
            }
        }
    }
}
