//! The small quantum cohomology ring `QH*(Gr(r, r+s))` over `Z[q, q^-1]`.
//!
//! Basis products are generated from quantum Pieri (multiplication by the
//! special classes `σ_k`) together with the Giambelli determinant, then
//! memoized in a [`StructureTable`]. All other products go through the table.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::laurent::LaurentInt;
use crate::partitions::{enumerate_partitions, BoxContext, Partition};

/// A `Z[q, q^-1]`-linear combination of Schubert classes.
#[derive(Clone, PartialEq, Eq)]
pub struct QClass {
    ctx: BoxContext,
    coeffs: BTreeMap<Partition, LaurentInt>,
}

impl QClass {
    pub fn zero(ctx: BoxContext) -> Self {
        Self { ctx, coeffs: BTreeMap::new() }
    }

    /// The unit `σ_∅`.
    pub fn one(ctx: BoxContext) -> Self {
        Self::basis(ctx, ctx.empty())
    }

    /// The point class `σ_{s^r}`.
    pub fn point(ctx: BoxContext) -> Self {
        Self::basis(ctx, ctx.full())
    }

    /// `σ_a`. The partition must belong to `ctx`.
    pub fn basis(ctx: BoxContext, a: Partition) -> Self {
        debug_assert!(ctx.contains(&a));
        let mut coeffs = BTreeMap::new();
        coeffs.insert(a, LaurentInt::one());
        Self { ctx, coeffs }
    }

    pub fn try_basis(ctx: BoxContext, a: Partition) -> Result<Self> {
        if !ctx.contains(&a) {
            return Err(Error::InvalidPartition { parts: a.parts().to_vec(), r: ctx.r(), s: ctx.s() });
        }
        Ok(Self::basis(ctx, a))
    }

    /// `c · σ_a`.
    pub fn monomial(ctx: BoxContext, a: Partition, c: LaurentInt) -> Self {
        let mut out = Self::zero(ctx);
        out.add_term(a, &c);
        out
    }

    pub fn ctx(&self) -> BoxContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, a: &Partition) -> LaurentInt {
        self.coeffs.get(a).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &LaurentInt)> + '_ {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, a: Partition, c: &LaurentInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(a.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&a);
        }
    }

    pub fn add(&self, other: &QClass) -> Result<QClass> {
        check_same(self.ctx, other.ctx)?;
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(a.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &QClass) -> Result<QClass> {
        check_same(self.ctx, other.ctx)?;
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(a.clone(), &-c);
        }
        Ok(out)
    }

    /// Multiply every coefficient by a scalar Laurent polynomial.
    pub fn scale(&self, c: &LaurentInt) -> QClass {
        let mut out = QClass::zero(self.ctx);
        for (a, x) in &self.coeffs {
            out.add_term(a.clone(), &(x * c));
        }
        out
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i64) -> QClass {
        QClass {
            ctx: self.ctx,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), c.shift(k))).collect(),
        }
    }

    /// The coefficient of the point class.
    pub fn counit(&self) -> LaurentInt {
        self.coeff(&self.ctx.full())
    }

    /// Specialization `q = 1`.
    pub fn at_one(&self) -> BTreeMap<Partition, BigInt> {
        self.coeffs
            .iter()
            .map(|(a, c)| (a.clone(), c.at_one()))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

/// `counit(x)`: the `σ_{s^r}` coefficient.
pub fn counit(x: &QClass) -> LaurentInt {
    x.counit()
}

fn check_same(a: BoxContext, b: BoxContext) -> Result<()> {
    if a != b {
        return Err(Error::ContextMismatch(a.r(), a.s(), b.r(), b.s()));
    }
    Ok(())
}

impl fmt::Display for QClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "s{a}")?;
            } else if c.len() == 1 {
                write!(f, "{c}*s{a}")?;
            } else {
                write!(f, "({c})*s{a}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QClass[{}x{}]({self})", self.ctx.r(), self.ctx.s())
    }
}

#[derive(Serialize, Deserialize)]
struct QClassRecord {
    partition: Partition,
    laurent: LaurentInt,
}

/// Serialized as a list of `{partition, laurent}` records in canonical order.
impl Serialize for QClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for (a, c) in &self.coeffs {
            seq.serialize_element(&QClassRecordRef { partition: a, laurent: c })?;
        }
        seq.end()
    }
}

#[derive(Serialize)]
struct QClassRecordRef<'a> {
    partition: &'a Partition,
    laurent: &'a LaurentInt,
}

impl QClass {
    /// Parse the serialized record list against a known context.
    pub fn from_records<'de, D: Deserializer<'de>>(ctx: BoxContext, deserializer: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<QClassRecord>::deserialize(deserializer)?;
        let mut out = QClass::zero(ctx);
        for rec in records {
            if !ctx.contains(&rec.partition) {
                return Err(serde::de::Error::custom(format!(
                    "partition {} outside the {}x{} box",
                    rec.partition,
                    ctx.r(),
                    ctx.s()
                )));
            }
            out.add_term(rec.partition, &rec.laurent);
        }
        Ok(out)
    }
}

/// `σ_k * σ_a` by the quantum Pieri rule.
///
/// Classical terms: `s ≥ b_1 ≥ a_1 ≥ b_2 ≥ … ≥ b_r ≥ a_r`, `|b| = |a| + k`.
/// Quantum terms (times `q`): `a_1 − 1 ≥ c_1 ≥ a_2 − 1 ≥ … ≥ a_r − 1 ≥ c_r ≥ 0`,
/// `|c| = |a| + k − (r + s)`.
pub fn quantum_pieri(ctx: BoxContext, k: usize, a: &Partition) -> Result<QClass> {
    if k == 0 || k > ctx.s() {
        return Err(Error::OutOfRange(format!("Pieri index {k} not in [1, {}]", ctx.s())));
    }
    if !ctx.contains(a) {
        return Err(Error::InvalidPartition { parts: a.parts().to_vec(), r: ctx.r(), s: ctx.s() });
    }
    let mut out = QClass::zero(ctx);
    for (b, e) in pieri_terms(ctx, k, a) {
        out.add_term(b, &LaurentInt::q_pow(e));
    }
    Ok(out)
}

/// Raw Pieri terms `(label, q exponent)`; every coefficient is 1.
fn pieri_terms(ctx: BoxContext, k: usize, a: &Partition) -> Vec<(Partition, i64)> {
    let r = ctx.r();
    let parts = a.parts();
    let mut out = Vec::new();

    let target = a.size() + k;
    let mut lo = Vec::with_capacity(r);
    let mut hi = Vec::with_capacity(r);
    for i in 0..r {
        lo.push(parts[i] as isize);
        hi.push(if i == 0 { ctx.s() as isize } else { parts[i - 1] as isize });
    }
    interlace(&lo, &hi, target as isize, &mut Vec::with_capacity(r), &mut |b| {
        out.push((Partition::from_parts_unchecked(b.iter().map(|&x| x as usize).collect()), 0));
    });

    if target >= ctx.n() {
        let target = (target - ctx.n()) as isize;
        let mut lo = Vec::with_capacity(r);
        let mut hi = Vec::with_capacity(r);
        for i in 0..r {
            hi.push(parts[i] as isize - 1);
            lo.push(if i + 1 < r { parts[i + 1] as isize - 1 } else { 0 }.max(0));
        }
        interlace(&lo, &hi, target, &mut Vec::with_capacity(r), &mut |c| {
            out.push((Partition::from_parts_unchecked(c.iter().map(|&x| x as usize).collect()), 1));
        });
    }
    out
}

/// Enumerates integer tuples with `lo[i] ≤ x[i] ≤ hi[i]` summing to `target`.
fn interlace(lo: &[isize], hi: &[isize], target: isize, cur: &mut Vec<isize>, emit: &mut dyn FnMut(&[isize])) {
    let i = cur.len();
    if i == lo.len() {
        if target == 0 {
            emit(cur);
        }
        return;
    }
    let rest_lo: isize = lo[i + 1..].iter().sum();
    let rest_hi: isize = hi[i + 1..].iter().sum();
    let from = lo[i].max(target - rest_hi);
    let to = hi[i].min(target - rest_lo);
    for x in from..=to {
        cur.push(x);
        interlace(lo, hi, target - x, cur, emit);
        cur.pop();
    }
}

/// One signed product of special classes in the Giambelli expansion.
/// `factors[i]` is the index `m` of `σ_m` (with `σ_0 = 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GiambelliTerm {
    pub sign: i8,
    pub factors: Vec<usize>,
}

/// Expansion of `det(σ_{a_i + j − i})_{1≤i,j≤r}`; entries with index outside
/// `[0, s]` vanish and their permutations are skipped.
pub fn giambelli_expand(ctx: BoxContext, a: &Partition) -> Vec<GiambelliTerm> {
    let r = ctx.r();
    let s = ctx.s() as isize;
    let parts = a.parts();
    let mut out = Vec::new();
    let mut used = vec![false; r];
    let mut perm = Vec::with_capacity(r);
    let mut factors = Vec::with_capacity(r);

    #[allow(clippy::too_many_arguments)]
    fn walk(
        row: usize,
        r: usize,
        s: isize,
        parts: &[usize],
        used: &mut [bool],
        perm: &mut Vec<usize>,
        factors: &mut Vec<usize>,
        out: &mut Vec<GiambelliTerm>,
    ) {
        if row == r {
            let inversions = (0..r)
                .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            out.push(GiambelliTerm {
                sign: if inversions % 2 == 0 { 1 } else { -1 },
                factors: factors.clone(),
            });
            return;
        }
        for col in 0..r {
            if used[col] {
                continue;
            }
            let m = parts[row] as isize + col as isize - row as isize;
            if !(0..=s).contains(&m) {
                continue;
            }
            used[col] = true;
            perm.push(col);
            factors.push(m as usize);
            walk(row + 1, r, s, parts, used, perm, factors, out);
            factors.pop();
            perm.pop();
            used[col] = false;
        }
    }

    walk(0, r, s, parts, &mut used, &mut perm, &mut factors, &mut out);
    out
}

/// Dense `Vec<LaurentInt>` helper indexed by canonical basis position.
struct DenseBasis {
    basis: Vec<Partition>,
    /// pieri[k-1][i] = terms of σ_k * σ_{basis[i]} as (index, q exponent).
    pieri: Vec<Vec<Vec<(usize, i64)>>>,
}

impl DenseBasis {
    fn new(ctx: BoxContext) -> Self {
        let basis = enumerate_partitions(ctx);
        let pieri = (1..=ctx.s())
            .map(|k| {
                basis
                    .iter()
                    .map(|a| {
                        pieri_terms(ctx, k, a)
                            .into_iter()
                            .map(|(b, e)| (basis.binary_search(&b).expect("Pieri term in box"), e))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { basis, pieri }
    }

    fn apply_special(&self, k: usize, x: &[LaurentInt]) -> Vec<LaurentInt> {
        if k == 0 {
            return x.to_vec();
        }
        let mut out = vec![LaurentInt::zero(); x.len()];
        for (i, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(j, e) in &self.pieri[k - 1][i] {
                out[j] += &c.shift(e);
            }
        }
        out
    }

    /// `σ_a * σ_b` with `σ_a` expanded by Giambelli.
    fn product(&self, ctx: BoxContext, a: usize, b: usize) -> Vec<LaurentInt> {
        let n = self.basis.len();
        let mut acc = vec![LaurentInt::zero(); n];
        for term in giambelli_expand(ctx, &self.basis[a]) {
            let mut cur = vec![LaurentInt::zero(); n];
            cur[b] = LaurentInt::one();
            for &m in &term.factors {
                cur = self.apply_special(m, &cur);
            }
            for (slot, c) in acc.iter_mut().zip(cur.iter()) {
                if term.sign > 0 {
                    *slot += c;
                } else {
                    *slot -= c;
                }
            }
        }
        acc
    }
}

/// `σ_a * σ_b` computed from scratch (Giambelli on `a`, Pieri on `b`),
/// without the memoized table.
pub fn direct_basis_product(ctx: BoxContext, a: &Partition, b: &Partition) -> Result<QClass> {
    for p in [a, b] {
        if !ctx.contains(p) {
            return Err(Error::InvalidPartition { parts: p.parts().to_vec(), r: ctx.r(), s: ctx.s() });
        }
    }
    let dense = DenseBasis::new(ctx);
    let ia = dense.basis.binary_search(a).expect("validated");
    let ib = dense.basis.binary_search(b).expect("validated");
    let v = dense.product(ctx, ia, ib);
    let mut out = QClass::zero(ctx);
    for (p, c) in dense.basis.iter().zip(v.iter()) {
        out.add_term(p.clone(), c);
    }
    Ok(out)
}

/// All basis products `σ_a * σ_b = Σ_c c(a,b→c) σ_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTable {
    ctx: BoxContext,
    basis: Vec<Partition>,
    /// Row-major over (a, b); each cell lists nonzero (c, coefficient).
    cells: Vec<Vec<(usize, LaurentInt)>>,
}

/// One flattened table coefficient, as persisted by caches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRecord {
    pub a: Partition,
    pub b: Partition,
    pub c: Partition,
    pub q_exp: i64,
    pub coeff: BigInt,
}

impl StructureTable {
    pub fn build(ctx: BoxContext) -> Self {
        let dense = DenseBasis::new(ctx);
        let n = dense.basis.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
        let upper: Vec<((usize, usize), Vec<(usize, LaurentInt)>)> = pairs
            .into_par_iter()
            .map(|(a, b)| {
                let v = dense.product(ctx, a, b);
                let cell = v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
                ((a, b), cell)
            })
            .collect();
        let mut cells = vec![Vec::new(); n * n];
        for ((a, b), cell) in upper {
            if a != b {
                cells[b * n + a] = cell.clone();
            }
            cells[a * n + b] = cell;
        }
        Self { ctx, basis: dense.basis, cells }
    }

    pub fn ctx(&self) -> BoxContext {
        self.ctx
    }

    pub fn basis(&self) -> &[Partition] {
        &self.basis
    }

    pub fn index_of(&self, a: &Partition) -> Option<usize> {
        self.basis.binary_search(a).ok()
    }

    pub fn cell(&self, a: usize, b: usize) -> &[(usize, LaurentInt)] {
        &self.cells[a * self.basis.len() + b]
    }

    /// `c(a, b → c)`.
    pub fn coefficient(&self, a: &Partition, b: &Partition, c: &Partition) -> LaurentInt {
        match (self.index_of(a), self.index_of(b), self.index_of(c)) {
            (Some(ia), Some(ib), Some(ic)) => self
                .cell(ia, ib)
                .iter()
                .find(|(j, _)| *j == ic)
                .map(|(_, v)| v.clone())
                .unwrap_or_default(),
            _ => LaurentInt::zero(),
        }
    }

    /// Every nonzero coefficient, flattened in canonical order.
    pub fn records(&self) -> Vec<TableRecord> {
        let n = self.basis.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for (c, v) in self.cell(a, b) {
                    for (e, coeff) in v.terms() {
                        out.push(TableRecord {
                            a: self.basis[a].clone(),
                            b: self.basis[b].clone(),
                            c: self.basis[*c].clone(),
                            q_exp: e,
                            coeff: coeff.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    /// Rebuilds a table from flattened records.
    pub fn from_records(ctx: BoxContext, records: impl IntoIterator<Item = TableRecord>) -> Result<Self> {
        let basis = enumerate_partitions(ctx);
        let n = basis.len();
        let mut dense: Vec<BTreeMap<usize, LaurentInt>> = vec![BTreeMap::new(); n * n];
        for rec in records {
            let idx = |p: &Partition| {
                basis.binary_search(p).map_err(|_| Error::InvalidPartition {
                    parts: p.parts().to_vec(),
                    r: ctx.r(),
                    s: ctx.s(),
                })
            };
            let (a, b, c) = (idx(&rec.a)?, idx(&rec.b)?, idx(&rec.c)?);
            dense[a * n + b].entry(c).or_default().add_term(rec.q_exp, &rec.coeff);
        }
        let cells = dense
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Ok(Self { ctx, basis, cells })
    }
}

/// `QH*(Gr(r, r+s))` with a lazily built, shared structure table.
pub struct QuantumRing {
    ctx: BoxContext,
    table: OnceLock<StructureTable>,
}

impl QuantumRing {
    pub fn new(ctx: BoxContext) -> Self {
        Self { ctx, table: OnceLock::new() }
    }

    /// A ring backed by a table loaded from elsewhere (e.g. a cache file).
    pub fn with_table(table: StructureTable) -> Self {
        let ctx = table.ctx;
        let cell = OnceLock::new();
        let _ = cell.set(table);
        Self { ctx, table: cell }
    }

    pub fn ctx(&self) -> BoxContext {
        self.ctx
    }

    /// The memoized table; built once on first use.
    pub fn structure_table(&self) -> &StructureTable {
        self.table.get_or_init(|| StructureTable::build(self.ctx))
    }

    pub fn basis(&self) -> &[Partition] {
        self.structure_table().basis()
    }

    pub fn basis_product(&self, a: &Partition, b: &Partition) -> Result<QClass> {
        let t = self.structure_table();
        let ia = t.index_of(a).ok_or_else(|| self.invalid(a))?;
        let ib = t.index_of(b).ok_or_else(|| self.invalid(b))?;
        let mut out = QClass::zero(self.ctx);
        for (c, v) in t.cell(ia, ib) {
            out.add_term(t.basis[*c].clone(), v);
        }
        Ok(out)
    }

    fn invalid(&self, a: &Partition) -> Error {
        Error::InvalidPartition { parts: a.parts().to_vec(), r: self.ctx.r(), s: self.ctx.s() }
    }

    /// Bilinear extension of the table.
    pub fn quantum_product(&self, x: &QClass, y: &QClass) -> Result<QClass> {
        check_same(self.ctx, x.ctx)?;
        check_same(self.ctx, y.ctx)?;
        let t = self.structure_table();
        let n = t.basis.len();
        let mut acc = vec![LaurentInt::zero(); n];
        for (a, ca) in x.terms() {
            let ia = t.index_of(a).ok_or_else(|| self.invalid(a))?;
            for (b, cb) in y.terms() {
                let ib = t.index_of(b).ok_or_else(|| self.invalid(b))?;
                let coeff = ca * cb;
                for (c, v) in t.cell(ia, ib) {
                    acc[*c].add_product(&coeff, v);
                }
            }
        }
        let mut out = QClass::zero(self.ctx);
        for (c, v) in acc.into_iter().enumerate() {
            out.add_term(t.basis[c].clone(), &v);
        }
        Ok(out)
    }

    pub fn power(&self, x: &QClass, k: u32) -> Result<QClass> {
        let mut acc = QClass::one(self.ctx);
        for _ in 0..k {
            acc = self.quantum_product(&acc, x)?;
        }
        Ok(acc)
    }

    /// Product of a sequence of classes (the unit when empty).
    pub fn product_all<'a>(&self, xs: impl IntoIterator<Item = &'a QClass>) -> Result<QClass> {
        let mut acc = QClass::one(self.ctx);
        for x in xs {
            acc = self.quantum_product(&acc, x)?;
        }
        Ok(acc)
    }

    /// Poincaré pairing `counit(x * y)`.
    pub fn poincare_pair(&self, x: &QClass, y: &QClass) -> Result<LaurentInt> {
        Ok(self.quantum_product(x, y)?.counit())
    }

    /// The `q = 1` matrix of multiplication by `σ_a`: `m[c][b]` is the
    /// `σ_c` coefficient of `σ_a * σ_b`.
    pub fn multiplication_matrix_at_one(&self, a: &Partition) -> Result<Vec<Vec<BigInt>>> {
        let t = self.structure_table();
        let ia = t.index_of(a).ok_or_else(|| self.invalid(a))?;
        let n = t.basis.len();
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for b in 0..n {
            for (c, v) in t.cell(ia, b) {
                m[*c][b] = v.at_one();
            }
        }
        Ok(m)
    }

    pub fn unit(&self) -> QClass {
        QClass::one(self.ctx)
    }

    pub fn sigma(&self, a: &Partition) -> Result<QClass> {
        QClass::try_basis(self.ctx, a.clone())
    }
}

impl fmt::Debug for QuantumRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantumRing")
            .field("ctx", &self.ctx)
            .field("table_built", &self.table.get().is_some())
            .finish()
    }
}

/// `σ_{1^r}`.
pub fn column_class(ctx: BoxContext) -> QClass {
    QClass::basis(ctx, ctx.column())
}

/// `σ_s = σ_{(s, 0, …, 0)}`.
pub fn row_class(ctx: BoxContext) -> QClass {
    QClass::basis(ctx, ctx.row(ctx.s()).expect("s fits in the box"))
}
