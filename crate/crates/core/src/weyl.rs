//! The hyperoctahedral group `W_d = (Z/2)^d ⋊ S_d` and its characters.
//!
//! Elements are signed permutations: permutations of `{±1, ..., ±d}`
//! commuting with negation, stored as the images of `1..d`. Conjugacy
//! classes are labelled by bipartitions `(λ⁺, λ⁻)`: the multiset of positive
//! bicycle lengths and of negative cycle half-lengths. Class sizes come from
//! exhaustive orbit counting, not from a closed formula.
//!
//! Induced characters use the elementwise formula
//! `Tr(g, Ind_H^G φ) = |H|^{-1} Σ_{x ∈ G, x^{-1}gx ∈ H} φ(x^{-1}gx)`,
//! summed over the whole group; the division is asserted exact.

use crate::{Error, Guards, Result};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// Signed permutation of `{1, .., d}`: `img[i]` is the image of `i + 1`,
/// a value in `{±1, .., ±d}`; the image of `-(i+1)` is `-img[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPerm {
    img: Vec<i32>,
}

impl SignedPerm {
    pub fn identity(d: usize) -> SignedPerm {
        SignedPerm {
            img: (1..=d as i32).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.img.len()
    }

    /// Image of a signed letter.
    pub fn apply(&self, x: i32) -> i32 {
        if x > 0 {
            self.img[(x - 1) as usize]
        } else {
            -self.img[(-x - 1) as usize]
        }
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        SignedPerm {
            img: other.img.iter().map(|&y| self.apply(y)).collect(),
        }
    }

    pub fn inverse(&self) -> SignedPerm {
        let mut img = vec![0i32; self.d()];
        for (i, &y) in self.img.iter().enumerate() {
            let x = i as i32 + 1;
            if y > 0 {
                img[(y - 1) as usize] = x;
            } else {
                img[(-y - 1) as usize] = -x;
            }
        }
        SignedPerm { img }
    }

    /// Number of letters sent to negative values.
    pub fn neg_count(&self) -> usize {
        self.img.iter().filter(|&&y| y < 0).count()
    }

    /// The element of `W_len` induced on letters `start+1 ..= start+len`
    /// (which must be stable as a signed set).
    fn restrict(&self, start: usize, len: usize) -> SignedPerm {
        let img = (0..len)
            .map(|i| {
                let y = self.img[start + i];
                if y > 0 {
                    y - start as i32
                } else {
                    y + start as i32
                }
            })
            .collect();
        SignedPerm { img }
    }
}

/// Class label: positive bicycle lengths and negative cycle half-lengths,
/// both sorted decreasing.
pub type Bipartition = (Vec<u32>, Vec<u32>);

/// Decompose into positive bicycles and negative cycles.
///
/// A cycle `c` of the underlying permutation of `{±1, .., ±d}` either equals
/// its negation pointwise as a set (a negative cycle, of even length `2ℓ`)
/// or is disjoint from it (with `-c`, a positive bicycle of length `|c|`).
pub fn cycle_signature(g: &SignedPerm) -> Bipartition {
    let d = g.d();
    let mut seen = vec![false; 2 * d];
    let idx = |x: i32| -> usize {
        if x > 0 {
            (x - 1) as usize
        } else {
            (d as i32 - 1 - x - 1) as usize + 1
        }
    };
    let mut pos: Vec<u32> = Vec::new();
    let mut neg: Vec<u32> = Vec::new();
    for start in 1..=d as i32 {
        for s in [start, -start] {
            if seen[idx(s)] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = s;
            loop {
                seen[idx(x)] = true;
                cycle.push(x);
                x = g.apply(x);
                if x == s {
                    break;
                }
            }
            let negated_in_cycle = cycle.contains(&-s);
            if negated_in_cycle {
                neg.push((cycle.len() / 2) as u32);
            } else {
                // Mark the partner cycle as seen and record one bicycle.
                for &y in &cycle {
                    seen[idx(-y)] = true;
                }
                pos.push(cycle.len() as u32);
            }
        }
    }
    pos.sort_unstable_by(|a, b| b.cmp(a));
    neg.sort_unstable_by(|a, b| b.cmp(a));
    (pos, neg)
}

/// Conjugacy data of `W_d`, built once per rank and cached.
pub struct ClassTable {
    pub d: usize,
    pub elements: Vec<SignedPerm>,
    pub labels: Vec<Bipartition>,
    pub sizes: Vec<u64>,
    pub reps: Vec<SignedPerm>,
    label_index: BTreeMap<Bipartition, usize>,
}

impl ClassTable {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn class_of(&self, g: &SignedPerm) -> usize {
        self.label_index[&cycle_signature(g)]
    }
}

fn build_class_table(d: usize) -> ClassTable {
    // All elements: permutations of 1..=d times sign vectors.
    fn permutations(letters: Vec<i32>) -> Vec<Vec<i32>> {
        if letters.len() <= 1 {
            return vec![letters];
        }
        let mut out = Vec::new();
        for i in 0..letters.len() {
            let mut rest = letters.clone();
            let x = rest.remove(i);
            for mut sub in permutations(rest) {
                sub.insert(0, x);
                out.push(sub);
            }
        }
        out
    }
    let perms = permutations((1..=d as i32).collect());
    let mut elements = Vec::with_capacity(perms.len() << d);
    for perm in &perms {
        for signs in 0..1u32 << d {
            let img = perm
                .iter()
                .enumerate()
                .map(|(i, &y)| if signs >> i & 1 == 1 { -y } else { y })
                .collect();
            elements.push(SignedPerm { img });
        }
    }
    let mut label_index: BTreeMap<Bipartition, usize> = BTreeMap::new();
    let mut labels = Vec::new();
    let mut sizes: Vec<u64> = Vec::new();
    let mut reps: Vec<SignedPerm> = Vec::new();
    for g in &elements {
        let sig = cycle_signature(g);
        match label_index.get(&sig) {
            Some(&i) => sizes[i] += 1,
            None => {
                label_index.insert(sig.clone(), labels.len());
                labels.push(sig);
                sizes.push(1);
                reps.push(g.clone());
            }
        }
    }
    ClassTable {
        d,
        elements,
        labels,
        sizes,
        reps,
        label_index,
    }
}

static CLASS_TABLES: Mutex<Option<HashMap<usize, Arc<ClassTable>>>> = Mutex::new(None);

/// The cached class table of `W_d`; enumeration is guarded by
/// [`Guards::max_weyl_rank`].
pub fn class_table(d: usize, guards: &Guards) -> Result<Arc<ClassTable>> {
    if d > guards.max_weyl_rank {
        return Err(Error::GuardExceeded(format!(
            "W_{} exceeds the rank guard {}",
            d, guards.max_weyl_rank
        )));
    }
    let mut cache = CLASS_TABLES.lock().unwrap();
    let map = cache.get_or_insert_with(HashMap::new);
    if let Some(t) = map.get(&d) {
        return Ok(t.clone());
    }
    let table = Arc::new(build_class_table(d));
    map.insert(d, table.clone());
    Ok(table)
}

/// All elements of `W_d`.
pub fn enumerate_group(d: usize, guards: &Guards) -> Result<Vec<SignedPerm>> {
    Ok(class_table(d, guards)?.elements.clone())
}

/// Integer class function on `W_d`, stored on class representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFunction {
    pub d: usize,
    pub values: Vec<i64>,
}

impl ClassFunction {
    pub fn dim(&self) -> i64 {
        // The identity has signature ((1,..,1), ()), a class we always have.
        self.values[0]
    }

    pub fn add(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction {
            d: self.d,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction {
            d: self.d,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// `⟨f, h⟩ = |G|^{-1} Σ_classes size · f · h` for integer (hence real)
/// class functions; the division must be exact for virtual characters.
pub fn inner_product(f: &ClassFunction, h: &ClassFunction, table: &ClassTable) -> Result<i64> {
    let mut total: i128 = 0;
    for ((a, b), &size) in f.values.iter().zip(&h.values).zip(&table.sizes) {
        total += *a as i128 * *b as i128 * size as i128;
    }
    let order = table.order() as i128;
    if total % order != 0 {
        return Err(Error::NonIntegralLog(format!(
            "inner product {}/{} is not integral",
            total, order
        )));
    }
    Ok((total / order) as i64)
}

/// One block of a standard subgroup: `S_a` on unsigned letters or `W_b` on
/// signed ones. Blocks occupy consecutive letter ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Sym(usize),
    Hyper(usize),
}

impl Block {
    fn len(&self) -> usize {
        match *self {
            Block::Sym(a) | Block::Hyper(a) => a,
        }
    }

    fn order(&self) -> u64 {
        let fact = |k: usize| (1..=k as u64).product::<u64>();
        match *self {
            Block::Sym(a) => fact(a),
            Block::Hyper(b) => (1u64 << b) * fact(b),
        }
    }
}

/// Character of one block. `SgnBar` is the sign of the underlying
/// permutation (the inflation of sgn through `W_b -> S_b`); `Chi` is the
/// product of the signs (nontrivial on every `Z/2`, trivial on the `S`-part)
/// and only makes sense on `Hyper` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockChar {
    Trivial,
    SgnBar,
    Chi,
}

/// A parabolic-type subgroup `B_1 x ... x B_k` of `W_d` on consecutive
/// letter blocks, with a character per block.
#[derive(Debug, Clone)]
pub struct SubgroupSpec {
    pub blocks: Vec<(Block, BlockChar)>,
}

impl SubgroupSpec {
    pub fn new(blocks: Vec<(Block, BlockChar)>) -> Result<SubgroupSpec> {
        for &(b, c) in &blocks {
            if c == BlockChar::Chi && matches!(b, Block::Sym(_)) {
                return Err(Error::InvalidInput(
                    "Chi lives on signed blocks only".into(),
                ));
            }
        }
        Ok(SubgroupSpec { blocks })
    }

    pub fn total(&self) -> usize {
        self.blocks.iter().map(|(b, _)| b.len()).sum()
    }

    pub fn order(&self) -> u64 {
        self.blocks.iter().map(|(b, _)| b.order()).product()
    }

    /// Membership and character value: `None` when `g` is outside the
    /// subgroup.
    pub fn eval(&self, g: &SignedPerm) -> Option<i64> {
        let mut start = 0usize;
        let mut value = 1i64;
        for &(block, ch) in &self.blocks {
            let len = block.len();
            let lo = start as i32 + 1;
            let hi = (start + len) as i32;
            for i in start..start + len {
                let y = g.img[i];
                if y.abs() < lo || y.abs() > hi {
                    return None;
                }
                if matches!(block, Block::Sym(_)) && y < 0 {
                    return None;
                }
            }
            match ch {
                BlockChar::Trivial => {}
                BlockChar::Chi => {
                    let negs = (start..start + len).filter(|&i| g.img[i] < 0).count();
                    if negs % 2 == 1 {
                        value = -value;
                    }
                }
                BlockChar::SgnBar => {
                    // Parity of the underlying permutation of the block.
                    let mut perm: Vec<usize> = (start..start + len)
                        .map(|i| (g.img[i].unsigned_abs() as usize) - 1 - start)
                        .collect();
                    let mut seen = vec![false; len];
                    let mut transpositions = 0usize;
                    for i in 0..len {
                        if seen[i] {
                            continue;
                        }
                        let mut j = i;
                        let mut cycle_len = 0;
                        while !seen[j] {
                            seen[j] = true;
                            j = perm[j];
                            cycle_len += 1;
                        }
                        transpositions += cycle_len - 1;
                    }
                    perm.clear();
                    if transpositions % 2 == 1 {
                        value = -value;
                    }
                }
            }
            start += len;
        }
        Some(value)
    }
}

/// Induce a function given by `phi` (returning `None` off the subgroup of
/// order `h_order`) up to `W_d`, by the elementwise sum formula.
pub fn induce(
    d: usize,
    h_order: u64,
    phi: &dyn Fn(&SignedPerm) -> Option<i64>,
    guards: &Guards,
) -> Result<ClassFunction> {
    let table = class_table(d, guards)?;
    let mut values = Vec::with_capacity(table.num_classes());
    for rep in &table.reps {
        let mut total: i128 = 0;
        for x in &table.elements {
            let conj = x.inverse().compose(rep).compose(x);
            if let Some(v) = phi(&conj) {
                total += v as i128;
            }
        }
        if total % h_order as i128 != 0 {
            return Err(Error::NonIntegralLog(format!(
                "induced trace {}/{} is not integral",
                total, h_order
            )));
        }
        values.push((total / h_order as i128) as i64);
    }
    Ok(ClassFunction { d, values })
}

/// `Tr(g, Ind_H^{W_d} φ)` for a standard block subgroup with block
/// characters.
pub fn induced_character(d: usize, spec: &SubgroupSpec, guards: &Guards) -> Result<ClassFunction> {
    if spec.total() != d {
        return Err(Error::BadBlockSizes);
    }
    induce(d, spec.order(), &|g| spec.eval(g), guards)
}

/// The character `χ_d(g) = (-1)^{#negative entries}`, equal to `(-1)^{#
/// negative cycles}` on each class.
pub fn chi_character(d: usize, guards: &Guards) -> Result<ClassFunction> {
    let table = class_table(d, guards)?;
    let values = table
        .reps
        .iter()
        .map(|g| if g.neg_count() % 2 == 1 { -1 } else { 1 })
        .collect();
    Ok(ClassFunction { d, values })
}

/// The trivial character.
pub fn trivial_character(d: usize, guards: &Guards) -> Result<ClassFunction> {
    let table = class_table(d, guards)?;
    Ok(ClassFunction {
        d,
        values: vec![1; table.num_classes()],
    })
}

/// `ρ_i = Ind_{W_i x W_{d-i}}^{W_d}(χ_i ⊠ 1)`, an irreducible character of
/// dimension `C(d, i)`.
pub fn rho(d: usize, i: usize, guards: &Guards) -> Result<ClassFunction> {
    if i > d {
        return Err(Error::IndexOutOfRange(format!("rho: i = {} > d = {}", i, d)));
    }
    let spec = SubgroupSpec::new(vec![
        (Block::Hyper(i), BlockChar::Chi),
        (Block::Hyper(d - i), BlockChar::Trivial),
    ])?;
    induced_character(d, &spec, guards)
}

/// Graded virtual character: one class function per `T`-power `0..=d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedVirtualCharacter {
    pub grades: Vec<ClassFunction>,
}

/// Grades of the intersection-side sheaf: grade `i` is `ρ_i`.
pub fn k_int_character(d: usize, guards: &Guards) -> Result<GradedVirtualCharacter> {
    let grades = (0..=d).map(|i| rho(d, i, guards)).collect::<Result<_>>()?;
    Ok(GradedVirtualCharacter { grades })
}

/// Grades of the Eisenstein-side sheaf: grade `i` is
/// `Σ_{j=0}^i (-1)^j Ind_{S_{i-j} x W_j x W_{d-i}}^{W_d}(1 ⊠ sgn̄_j ⊠ 1)`.
pub fn k_eis_character(d: usize, guards: &Guards) -> Result<GradedVirtualCharacter> {
    let table = class_table(d, guards)?;
    let mut grades = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let mut acc = ClassFunction {
            d,
            values: vec![0; table.num_classes()],
        };
        for j in 0..=i {
            let spec = SubgroupSpec::new(vec![
                (Block::Sym(i - j), BlockChar::Trivial),
                (Block::Hyper(j), BlockChar::SgnBar),
                (Block::Hyper(d - i), BlockChar::Trivial),
            ])?;
            let ind = induced_character(d, &spec, guards)?;
            acc = if j % 2 == 0 { acc.add(&ind) } else { acc.sub(&ind) };
        }
        grades.push(acc);
    }
    Ok(GradedVirtualCharacter { grades })
}

/// Outcome of one of the character verifications.
#[derive(Debug, Clone)]
pub struct WeylReport {
    pub d: usize,
    pub pass: bool,
    pub detail: String,
}

/// `Ind_{S_d}^{W_d} 1 = ⊕_i ρ_i` with `⟨ρ_i, ρ_j⟩ = δ_{ij}`.
pub fn verify_rho_decomposition(d: usize, guards: &Guards) -> Result<WeylReport> {
    let table = class_table(d, guards)?;
    let spec = SubgroupSpec::new(vec![(Block::Sym(d), BlockChar::Trivial)])?;
    let lhs = induced_character(d, &spec, guards)?;
    let rhos: Vec<ClassFunction> = (0..=d).map(|i| rho(d, i, guards)).collect::<Result<_>>()?;
    let mut sum = ClassFunction {
        d,
        values: vec![0; table.num_classes()],
    };
    for r in &rhos {
        sum = sum.add(r);
    }
    if sum != lhs {
        return Ok(WeylReport {
            d,
            pass: false,
            detail: "Ind_{S_d}^{W_d} 1 differs from Σ ρ_i".into(),
        });
    }
    for (i, ri) in rhos.iter().enumerate() {
        for (j, rj) in rhos.iter().enumerate() {
            let ip = inner_product(ri, rj, &table)?;
            let want = if i == j { 1 } else { 0 };
            if ip != want {
                return Ok(WeylReport {
                    d,
                    pass: false,
                    detail: format!("⟨ρ_{}, ρ_{}⟩ = {} (want {})", i, j, ip, want),
                });
            }
        }
    }
    Ok(WeylReport {
        d,
        pass: true,
        detail: format!("Ind 1 = ⊕ ρ_i with orthonormal ρ_i, d = {}", d),
    })
}

/// `χ_d = Σ_{j=0}^d (-1)^j Ind_{S_{d-j} x W_j}^{W_d}(1 ⊠ sgn̄_j)`.
pub fn verify_chi_lemma(d: usize, guards: &Guards) -> Result<WeylReport> {
    let table = class_table(d, guards)?;
    let chi = chi_character(d, guards)?;
    let mut acc = ClassFunction {
        d,
        values: vec![0; table.num_classes()],
    };
    for j in 0..=d {
        let spec = SubgroupSpec::new(vec![
            (Block::Sym(d - j), BlockChar::Trivial),
            (Block::Hyper(j), BlockChar::SgnBar),
        ])?;
        let ind = induced_character(d, &spec, guards)?;
        acc = if j % 2 == 0 { acc.add(&ind) } else { acc.sub(&ind) };
    }
    let pass = acc == chi;
    Ok(WeylReport {
        d,
        pass,
        detail: if pass {
            format!("alternating induction sum equals χ_{}", d)
        } else {
            format!("mismatch: {:?} vs {:?}", acc.values, chi.values)
        },
    })
}

/// The grade-by-grade identity between the two graded characters.
pub fn verify_main_identity(d: usize, guards: &Guards) -> Result<WeylReport> {
    let int = k_int_character(d, guards)?;
    let eis = k_eis_character(d, guards)?;
    let table = class_table(d, guards)?;
    for (grade, (a, b)) in int.grades.iter().zip(&eis.grades).enumerate() {
        if a != b {
            let class = a
                .values
                .iter()
                .zip(&b.values)
                .position(|(x, y)| x != y)
                .unwrap();
            return Ok(WeylReport {
                d,
                pass: false,
                detail: format!(
                    "grade {} differs first at class {:?}",
                    grade, table.labels[class]
                ),
            });
        }
    }
    Ok(WeylReport {
        d,
        pass: true,
        detail: format!("graded characters agree for d = {}", d),
    })
}
