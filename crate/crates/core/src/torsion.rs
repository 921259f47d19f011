//! Hermitian torsion modules over truncated valuation rings.
//!
//! A module of Jordan type `λ = (λ_1 >= ... >= λ_k)` is `⊕_c O'/t^{λ_c}`
//! where `O' = F[t]` for the work field `F` (`F_{q^2}` at an inert place; in
//! the split case the pair picture is collapsed to a single module over
//! `F_q[t]`). Elements are coefficient vectors over `F` in the basis
//! `t^j e_c`, `0 <= j < λ_c`, so a module of type `λ` is an `F`-space of
//! dimension `|λ|` with a nilpotent `t`-action. Submodules are `F`-subspaces
//! closed under `t`; for prime `q` that is the same as closure under addition
//! and `t`-multiplication.
//!
//! The standard Hermitian pairing is `⟨e_i, e_j⟩ = δ_{ij} t^{-λ_i}`, stored
//! as the scaled numerator `t^{λ_1}⟨x, y⟩` in `F[t]/(t^{λ_1})`. Scaling by
//! the largest part is lossless and avoids encoding `F'/O'`-valued pairings.

use crate::ff::FieldSpec;
use crate::partition::Partition;
use crate::truncring::InvolutionKind;
use crate::{Error, Guards, Result};
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

/// Element of a [`JordanModule`]: work-field coefficients in the flat basis.
pub type ModElem = Vec<u16>;

pub(crate) fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("{} is not a prime power", q)));
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut m = 0;
            let mut rest = q;
            while rest % p == 0 {
                rest /= p;
                m += 1;
            }
            if rest != 1 {
                return Err(Error::InvalidInput(format!("{} is not a prime power", q)));
            }
            return Ok((p, m));
        }
        p += 1;
    }
    Ok((q, 1))
}

/// Explicit finite torsion module with the standard diagonal Hermitian form.
pub struct JordanModule {
    pub lambda: Partition,
    pub kind: InvolutionKind,
    /// Residue size of the base field at the place.
    pub q: u64,
    /// Work field: `F_{q^2}` (inert) or `F_q` (split, collapsed picture).
    pub field: Arc<FieldSpec>,
    /// Inert: the involution on coefficients is `x -> x^{p^frob_m}`.
    frob_m: usize,
    /// `F`-dimension, equal to `|λ|`.
    pub dim: usize,
    /// Per coordinate: (start slot, part).
    blocks: Vec<(usize, u32)>,
    /// Largest part: pairing scale and `t`-nilpotency level.
    pub n1: usize,
}

impl JordanModule {
    pub fn new(
        lambda: Partition,
        kind: InvolutionKind,
        q: u64,
        guards: &Guards,
    ) -> Result<JordanModule> {
        let (p, m) = prime_power(q)?;
        let field = match kind {
            InvolutionKind::Inert => {
                if p == 2 {
                    return Err(Error::NonOddPrime(2));
                }
                FieldSpec::new(p, 2 * m, guards)?
            }
            InvolutionKind::Split => FieldSpec::new(p, m, guards)?,
        };
        let dim = lambda.size();
        let mut blocks = Vec::with_capacity(lambda.num_parts());
        let mut start = 0usize;
        for &part in lambda.parts() {
            blocks.push((start, part));
            start += part as usize;
        }
        let n1 = lambda.max_part() as usize;
        let module = JordanModule {
            lambda,
            kind,
            q,
            field,
            frob_m: if kind == InvolutionKind::Inert { m as usize } else { 0 },
            dim,
            blocks,
            n1,
        };
        if kind == InvolutionKind::Inert {
            // Nondegeneracy: nothing pairs trivially with the whole module.
            let full: Vec<ModElem> = (0..module.dim).map(|i| module.basis_vec(i)).collect();
            let kernel = module.pairing_kernel(&full);
            if kernel.rank() != 0 {
                return Err(Error::InvalidInput(
                    "standard Hermitian pairing is degenerate".into(),
                ));
            }
        }
        Ok(module)
    }

    pub fn size(&self) -> u128 {
        (self.field.size() as u128).pow(self.dim as u32)
    }

    pub fn zero(&self) -> ModElem {
        vec![0; self.dim]
    }

    fn basis_vec(&self, slot: usize) -> ModElem {
        let mut v = self.zero();
        v[slot] = 1;
        v
    }

    pub fn add(&self, x: &ModElem, y: &ModElem) -> ModElem {
        x.iter().zip(y).map(|(&a, &b)| self.field.add(a, b)).collect()
    }

    pub fn scale(&self, alpha: u16, x: &ModElem) -> ModElem {
        x.iter().map(|&a| self.field.mul(alpha, a)).collect()
    }

    /// The `t`-action: shifts coefficients up one power inside each block.
    pub fn t_mul(&self, x: &ModElem) -> ModElem {
        let mut out = self.zero();
        for &(start, part) in &self.blocks {
            for j in 1..part as usize {
                out[start + j] = x[start + j - 1];
            }
        }
        out
    }

    /// Scaled Hermitian pairing `t^{λ_1}⟨x, y⟩` in `F[t]/(t^{λ_1})`, linear
    /// in `x` and twisted by the involution in `y`. Inert only.
    pub fn pair(&self, x: &ModElem, y: &ModElem) -> ModElem {
        debug_assert_eq!(self.kind, InvolutionKind::Inert);
        let mut out = vec![0u16; self.n1];
        for &(start, part) in &self.blocks {
            let offset = self.n1 - part as usize;
            for j in 0..part as usize {
                let a = x[start + j];
                if a == 0 {
                    continue;
                }
                for jp in 0..part as usize {
                    let k = offset + j + jp;
                    if k >= self.n1 {
                        break;
                    }
                    let b = self.field.frobenius_pow(y[start + jp], self.frob_m);
                    if b != 0 {
                        out[k] = self.field.add(out[k], self.field.mul(a, b));
                    }
                }
            }
        }
        out
    }

    /// Mixed-radix code of an element (valid under the module-size guard).
    pub fn encode(&self, x: &ModElem) -> u64 {
        let s = self.field.size() as u64;
        let mut code = 0u64;
        for &c in x.iter().rev() {
            code = code * s + c as u64;
        }
        code
    }

    pub fn decode(&self, mut code: u64) -> ModElem {
        let s = self.field.size() as u64;
        let mut v = self.zero();
        for slot in v.iter_mut() {
            *slot = (code % s) as u16;
            code /= s;
        }
        v
    }

    /// All module elements (guarded).
    pub fn enumerate(&self, guards: &Guards) -> Result<Vec<ModElem>> {
        if self.size() > guards.max_module_elements as u128 {
            return Err(Error::GuardExceeded(format!(
                "module has {} elements, guard {}",
                self.size(),
                guards.max_module_elements
            )));
        }
        Ok((0..self.size() as u64).map(|c| self.decode(c)).collect())
    }

    /// Kernel of pairing against the given vectors, as an echelon basis of
    /// `{z : ⟨z, g⟩ = 0 for all g}`. Inert only.
    fn pairing_kernel(&self, gens: &[ModElem]) -> Echelon {
        // Constraint matrix: for each generator and each t-component, a
        // linear functional in z. Row-reduce the transposed system.
        let mut constraints: Vec<Vec<u16>> = Vec::new();
        for g in gens {
            // ⟨z, g⟩ component k as a functional: coefficient of z[slot].
            let mut per_k: Vec<Vec<u16>> = vec![vec![0; self.dim]; self.n1];
            for &(start, part) in &self.blocks {
                let offset = self.n1 - part as usize;
                for j in 0..part as usize {
                    for jp in 0..part as usize {
                        let k = offset + j + jp;
                        if k >= self.n1 {
                            break;
                        }
                        let b = self.field.frobenius_pow(g[start + jp], self.frob_m);
                        if b != 0 {
                            per_k[k][start + j] = self.field.add(per_k[k][start + j], b);
                        }
                    }
                }
            }
            constraints.extend(per_k);
        }
        nullspace(&constraints, self.dim, &self.field)
    }
}

/// Reduced row echelon basis of an `F`-subspace.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pub rows: Vec<ModElem>,
    pivots: Vec<usize>,
    dim: usize,
}

impl Echelon {
    pub fn new(dim: usize) -> Echelon {
        Echelon {
            rows: vec![],
            pivots: vec![],
            dim,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the rows in place.
    pub fn reduce(&self, v: &mut ModElem, f: &FieldSpec) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for i in p..self.dim {
                    if row[i] != 0 {
                        v[i] = f.sub(v[i], f.mul(c, row[i]));
                    }
                }
            }
        }
    }

    pub fn contains(&self, v: &ModElem, f: &FieldSpec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w, f);
        w.iter().all(|&c| c == 0)
    }

    /// Insert a vector; returns false if it was already in the span.
    pub fn insert(&mut self, v: ModElem, f: &FieldSpec) -> bool {
        let mut w = v;
        self.reduce(&mut w, f);
        let Some(p) = w.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = f.inv(w[p]);
        for c in w.iter_mut() {
            *c = f.mul(inv, *c);
        }
        // Clear the new pivot column in existing rows.
        for row in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                for i in 0..self.dim {
                    if w[i] != 0 {
                        row[i] = f.sub(row[i], f.mul(c, w[i]));
                    }
                }
            }
        }
        let pos = self.pivots.partition_point(|&x| x < p);
        self.pivots.insert(pos, p);
        self.rows.insert(pos, w);
        true
    }

    /// Canonical byte key of the RREF (rows in pivot order).
    pub fn key(&self) -> Vec<u16> {
        let mut k = Vec::with_capacity(self.rows.len() * self.dim + 1);
        k.push(self.rows.len() as u16);
        for row in &self.rows {
            k.extend_from_slice(row);
        }
        k
    }

    /// All vectors in the span (`|F|^rank` of them).
    pub fn span_elements(&self, f: &FieldSpec) -> Vec<ModElem> {
        let s = f.size() as u16;
        let mut out = vec![vec![0u16; self.dim]];
        for row in &self.rows {
            let mut next = Vec::with_capacity(out.len() * s as usize);
            for v in &out {
                for c in 0..s {
                    if c == 0 {
                        next.push(v.clone());
                    } else {
                        let mut w = v.clone();
                        for i in 0..self.dim {
                            if row[i] != 0 {
                                w[i] = f.add(w[i], f.mul(c, row[i]));
                            }
                        }
                        next.push(w);
                    }
                }
            }
            out = next;
        }
        out
    }
}

/// Nullspace of the linear system given by `constraints` (each a functional
/// on `F^dim`), as an echelon basis.
fn nullspace(constraints: &[Vec<u16>], dim: usize, f: &FieldSpec) -> Echelon {
    // Row-reduce the constraint matrix, then read off free columns.
    let mut ech: Vec<Vec<u16>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for c in constraints {
        let mut v = c.clone();
        for (row, &p) in ech.iter().zip(&pivots) {
            let coeff = v[p];
            if coeff != 0 {
                for i in 0..dim {
                    if row[i] != 0 {
                        v[i] = f.sub(v[i], f.mul(coeff, row[i]));
                    }
                }
            }
        }
        if let Some(p) = v.iter().position(|&x| x != 0) {
            let inv = f.inv(v[p]);
            for x in v.iter_mut() {
                *x = f.mul(inv, *x);
            }
            for row in ech.iter_mut() {
                let coeff = row[p];
                if coeff != 0 {
                    for i in 0..dim {
                        if v[i] != 0 {
                            row[i] = f.sub(row[i], f.mul(coeff, v[i]));
                        }
                    }
                }
            }
            let pos = pivots.partition_point(|&x| x < p);
            pivots.insert(pos, p);
            ech.insert(pos, v);
        }
    }
    let mut kernel = Echelon::new(dim);
    for free in 0..dim {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0u16; dim];
        v[free] = 1;
        for (row, &p) in ech.iter().zip(&pivots) {
            if row[free] != 0 {
                v[p] = f.neg(row[free]);
            }
        }
        kernel.insert(v, f);
    }
    kernel
}

/// Submodule: canonical sorted element list plus a minimal generator list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submodule {
    pub elements: Vec<u64>,
    pub generators: Vec<ModElem>,
}

impl Submodule {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // 0 is always a member
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.elements.binary_search(&code).is_ok()
    }

    /// True when every element of `self` lies in `other`.
    pub fn subset_of(&self, other: &Submodule) -> bool {
        self.elements.iter().all(|c| other.contains_code(*c))
    }
}

impl JordanModule {
    /// `t`-closed span of the given vectors, as an echelon basis.
    pub(crate) fn t_closed_span(&self, gens: &[ModElem]) -> Echelon {
        let mut ech = Echelon::new(self.dim);
        let mut queue: Vec<ModElem> = gens.to_vec();
        while let Some(v) = queue.pop() {
            if ech.insert(v.clone(), &self.field) {
                queue.push(self.t_mul(&v));
            }
        }
        ech
    }

    fn submodule_from_echelon(&self, ech: &Echelon) -> Submodule {
        let mut codes: Vec<u64> = ech
            .span_elements(&self.field)
            .iter()
            .map(|v| self.encode(v))
            .collect();
        codes.sort_unstable();
        // Minimal generators: lift a basis of X/tX (rows independent mod tX
        // generate by Nakayama). tX is spanned by t of the rows since X is
        // t-closed.
        let mut span = Echelon::new(self.dim);
        for row in &ech.rows {
            span.insert(self.t_mul(row), &self.field);
        }
        let mut gens = Vec::new();
        for row in &ech.rows {
            if span.insert(row.clone(), &self.field) {
                gens.push(row.clone());
            }
        }
        Submodule {
            elements: codes,
            generators: gens,
        }
    }

    /// Every submodule exactly once, by breadth-first closure: start from 0,
    /// repeatedly adjoin one element and close under addition, `t`, and
    /// field scalars; deduplicate by the canonical element set.
    pub fn enumerate_submodules(&self, guards: &Guards) -> Result<Vec<Submodule>> {
        let elements = self.enumerate(guards)?;
        let mut seen: HashSet<Vec<u16>> = HashSet::new();
        let mut out: Vec<Echelon> = Vec::new();
        let zero = Echelon::new(self.dim);
        seen.insert(zero.key());
        out.push(zero);
        let mut frontier = 0usize;
        while frontier < out.len() {
            let current = out[frontier].clone();
            frontier += 1;
            for e in &elements {
                if current.contains(e, &self.field) {
                    continue;
                }
                let mut gens: Vec<ModElem> = current.rows.clone();
                gens.push(e.clone());
                let closed = self.t_closed_span(&gens);
                if seen.insert(closed.key()) {
                    out.push(closed);
                }
            }
        }
        let mut subs: Vec<Submodule> = out
            .iter()
            .map(|ech| self.submodule_from_echelon(ech))
            .collect();
        subs.sort_by(|a, b| a.elements.len().cmp(&b.elements.len()).then(a.elements.cmp(&b.elements)));
        Ok(subs)
    }

    /// True iff the scaled pairing of every generator pair vanishes. Inert
    /// only.
    pub fn is_isotropic(&self, sub: &Submodule) -> Result<bool> {
        if self.kind != InvolutionKind::Inert {
            return Err(Error::InvalidInput(
                "isotropy applies to the inert Hermitian pairing; split data are collapsed".into(),
            ));
        }
        for g in &sub.generators {
            for h in &sub.generators {
                if self.pair(g, h).iter().any(|&c| c != 0) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `{z : ⟨z, g⟩ = 0 for all generators g of I}`. Inert only.
    pub fn orthogonal_complement(&self, sub: &Submodule, guards: &Guards) -> Result<Submodule> {
        if self.kind != InvolutionKind::Inert {
            return Err(Error::InvalidInput(
                "orthogonal complements apply to the inert Hermitian pairing".into(),
            ));
        }
        if self.size() > guards.max_module_elements as u128 {
            return Err(Error::GuardExceeded(format!(
                "module has {} elements, guard {}",
                self.size(),
                guards.max_module_elements
            )));
        }
        let kernel = self.pairing_kernel(&sub.generators);
        Ok(self.submodule_from_echelon(&kernel))
    }

    /// For `A ⊆ B`: `(ℓ', t')` of the quotient `B/A` over the work field
    /// (residue `q^2` inert, `q` split, matching the paper's normalization
    /// for each case).
    pub fn quotient_invariants(&self, a: &Submodule, b: &Submodule) -> Result<(usize, usize)> {
        if !a.subset_of(b) {
            return Err(Error::NotASubmodule);
        }
        let eb = self.t_closed_span(&b.generators);
        let ea = self.t_closed_span(&a.generators);
        let fsize = self.field.size() as u128;
        if fsize.pow(eb.rank() as u32) != b.elements.len() as u128
            || fsize.pow(ea.rank() as u32) != a.elements.len() as u128
        {
            return Err(Error::NonIntegralLog(
                "generator span does not match element list".into(),
            ));
        }
        let ell = eb.rank() - ea.rank();
        // t' = dim B/(tB + A).
        let mut tba = ea.clone();
        for row in &eb.rows {
            tba.insert(self.t_mul(row), &self.field);
        }
        let t_prime = eb.rank() - tba.rank();
        Ok((ell, t_prime))
    }

    /// Jordan type of a submodule, recovered from the rank filtration
    /// `dim t^{k-1}X - dim t^k X = #parts >= k`.
    pub fn jordan_type(&self, sub: &Submodule) -> Result<Partition> {
        let mut current = self.t_closed_span(&sub.generators);
        let mut mults: Vec<usize> = Vec::new();
        while current.rank() > 0 {
            let mut next = Echelon::new(self.dim);
            for row in &current.rows {
                next.insert(self.t_mul(row), &self.field);
            }
            mults.push(current.rank() - next.rank());
            current = next;
        }
        // mults[k-1] = #parts >= k; conjugate to get the parts.
        let mut parts: Vec<u32> = Vec::new();
        for (k, &m) in mults.iter().enumerate() {
            let next_m = mults.get(k + 1).copied().unwrap_or(0);
            debug_assert!(m >= next_m, "rank filtration must be monotone");
            for _ in 0..m - next_m {
                parts.push(k as u32 + 1);
            }
        }
        parts.sort_unstable_by(|x, y| y.cmp(x));
        Partition::new(parts)
    }

    /// The whole module as a [`Submodule`] (guarded).
    pub fn full_submodule(&self, guards: &Guards) -> Result<Submodule> {
        if self.size() > guards.max_module_elements as u128 {
            return Err(Error::GuardExceeded(format!(
                "module has {} elements, guard {}",
                self.size(),
                guards.max_module_elements
            )));
        }
        let gens: Vec<ModElem> = (0..self.dim).map(|i| self.basis_vec(i)).collect();
        let ech = self.t_closed_span(&gens);
        Ok(self.submodule_from_echelon(&ech))
    }

    /// The zero submodule.
    pub fn zero_submodule(&self) -> Submodule {
        Submodule {
            elements: vec![0],
            generators: vec![],
        }
    }
}

/// Data of one isotropic submodule in the inert density sum.
#[derive(Debug, Clone, Copy)]
pub(crate) struct IsotropicDatum {
    /// `ℓ'(I)`: length of `I` over `O'`.
    pub ell: usize,
    /// `t'(I^⊥/I)`.
    pub t_prime: usize,
}

/// Enumerate every isotropic submodule of an inert module, returning
/// `(ℓ'(I), t'(I^⊥/I))` per submodule. Works on echelon bases throughout;
/// breadth-first over isotropic `t`-closed subspaces, extending each `I` by
/// one self-isotropic line of `I^⊥`.
pub(crate) fn isotropic_data(module: &JordanModule, guards: &Guards) -> Result<Vec<IsotropicDatum>> {
    debug_assert_eq!(module.kind, InvolutionKind::Inert);
    if module.size() > guards.max_module_elements as u128 {
        return Err(Error::GuardExceeded(format!(
            "module has {} elements, guard {}",
            module.size(),
            guards.max_module_elements
        )));
    }
    let f = &module.field;
    let mut seen: HashSet<Vec<u16>> = HashSet::new();
    let mut queue: Vec<Echelon> = Vec::new();
    let zero = Echelon::new(module.dim);
    seen.insert(zero.key());
    queue.push(zero);
    let mut data = Vec::new();
    let mut frontier = 0usize;
    while frontier < queue.len() {
        let current = queue[frontier].clone();
        frontier += 1;

        let kernel = module.pairing_kernel(&current.rows);
        // t'(I^⊥/I) = dim I^⊥ - dim(t I^⊥ + I).
        let mut t_plus = current.clone();
        for row in &kernel.rows {
            t_plus.insert(module.t_mul(row), f);
        }
        data.push(IsotropicDatum {
            ell: current.rank(),
            t_prime: kernel.rank() - t_plus.rank(),
        });

        // Extend by one line of I^⊥: monic combinations of the kernel basis
        // (leading coefficient 1, zeros before it) hit each line exactly once.
        let kdim = kernel.rank();
        let s = f.size() as u64;
        for lead in 0..kdim {
            let tail = kdim - lead - 1;
            let combos = s.pow(tail as u32);
            for mut code in 0..combos {
                let mut z = kernel.rows[lead].clone();
                for row in &kernel.rows[lead + 1..] {
                    let c = (code % s) as u16;
                    code /= s;
                    if c != 0 {
                        for i in 0..module.dim {
                            if row[i] != 0 {
                                z[i] = f.add(z[i], f.mul(c, row[i]));
                            }
                        }
                    }
                }
                if module.pair(&z, &z).iter().any(|&c| c != 0) {
                    continue;
                }
                if current.contains(&z, f) {
                    continue;
                }
                let mut gens = current.rows.clone();
                gens.push(z);
                let closed = module.t_closed_span(&gens);
                if seen.insert(closed.key()) {
                    queue.push(closed);
                }
            }
        }
    }
    Ok(data)
}

/// Data of one chain `I_1 ⊆ I_2 ⊆ Q` in the split density sum.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ChainDatum {
    /// `ℓ(I_1)`.
    pub ell_lower: usize,
    /// `ℓ(Q/I_2)`.
    pub ell_upper: usize,
    /// `t(I_2/I_1)`.
    pub t_mid: usize,
}

/// Enumerate all submodule chains `I_1 ⊆ I_2` of a split collapsed module.
pub(crate) fn split_chain_data(module: &JordanModule, guards: &Guards) -> Result<Vec<ChainDatum>> {
    debug_assert_eq!(module.kind, InvolutionKind::Split);
    if module.size() > guards.max_module_elements as u128 {
        return Err(Error::GuardExceeded(format!(
            "module has {} elements, guard {}",
            module.size(),
            guards.max_module_elements
        )));
    }
    let f = &module.field;
    // All t-closed subspaces, by the same BFS as the isotropic walk but
    // extending by arbitrary lines.
    let mut seen: HashSet<Vec<u16>> = HashSet::new();
    let mut subs: Vec<Echelon> = Vec::new();
    let zero = Echelon::new(module.dim);
    seen.insert(zero.key());
    subs.push(zero);
    let mut frontier = 0usize;
    while frontier < subs.len() {
        let current = subs[frontier].clone();
        frontier += 1;
        // Candidates: monic vectors of the ambient space.
        let total = module.size() as u64;
        for code in 1..total {
            let z = module.decode(code);
            let lead = z.iter().position(|&c| c != 0).unwrap();
            if z[lead] != 1 {
                continue;
            }
            if current.contains(&z, f) {
                continue;
            }
            let mut gens = current.rows.clone();
            gens.push(z);
            let closed = module.t_closed_span(&gens);
            if seen.insert(closed.key()) {
                subs.push(closed);
            }
        }
    }
    let total_dim = module.dim;
    let mut out = Vec::new();
    for i2 in &subs {
        for i1 in &subs {
            if i1.rank() > i2.rank() {
                continue;
            }
            if !i1.rows.iter().all(|r| i2.contains(r, f)) {
                continue;
            }
            // t(I_2/I_1) = dim I_2 - dim(t I_2 + I_1).
            let mut t_plus = i1.clone();
            for row in &i2.rows {
                t_plus.insert(module.t_mul(row), f);
            }
            out.push(ChainDatum {
                ell_lower: i1.rank(),
                ell_upper: total_dim - i2.rank(),
                t_mid: i2.rank() - t_plus.rank(),
            });
        }
    }
    Ok(out)
}

/// Count submodules by naive subset closure, as an independent oracle for
/// the breadth-first enumeration. Exponential; for tiny modules only.
pub fn count_submodules_naive(module: &JordanModule, guards: &Guards) -> Result<usize> {
    let elements = module.enumerate(guards)?;
    if elements.len() > 64 {
        return Err(Error::GuardExceeded(
            "naive subset closure limited to 64 elements".into(),
        ));
    }
    // Closure of a subset under +, t, and scalars, as a bitmask over codes.
    let code_of: HashMap<u64, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (module.encode(e), i))
        .collect();
    let n = elements.len();
    let close = |start: u64| -> u64 {
        let mut mask = start | 1; // 0 is element index 0 (code 0 decodes to 0)
        loop {
            let mut next = mask;
            for i in 0..n {
                if mask >> i & 1 == 0 {
                    continue;
                }
                let ti = code_of[&module.encode(&module.t_mul(&elements[i]))];
                next |= 1 << ti;
                for c in 1..module.field.size() as u16 {
                    let sc = code_of[&module.encode(&module.scale(c, &elements[i]))];
                    next |= 1 << sc;
                }
                for j in 0..n {
                    if mask >> j & 1 == 1 {
                        let sum = code_of[&module.encode(&module.add(&elements[i], &elements[j]))];
                        next |= 1 << sum;
                    }
                }
            }
            if next == mask {
                return mask;
            }
            mask = next;
        }
    };
    let mut seen: HashSet<u64> = HashSet::new();
    // Every submodule is the closure of some subset; closures of singletons
    // iterated to saturation reach them all.
    let mut masks: Vec<u64> = vec![close(0)];
    seen.insert(masks[0]);
    let mut frontier = 0;
    while frontier < masks.len() {
        let m = masks[frontier];
        frontier += 1;
        for i in 0..n {
            if m >> i & 1 == 0 {
                let ext = close(m | 1 << i);
                if seen.insert(ext) {
                    masks.push(ext);
                }
            }
        }
    }
    Ok(seen.len())
}
