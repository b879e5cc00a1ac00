//! Shift extension of a base endomorphism to the countable product `G^∞`.
//!
//! For `φ: G → G` the extension is
//! `Φ(g_0, g_1, g_2, …) = (φ(g_0)·g_1, g_2, g_3, …)` with right-shift section
//! `Ψ(g_0, g_1, …) = (e, g_0, g_1, …)`, and the product carries the metric
//! `ρ(g, h) = Σ_i d(g_i, h_i) / 2^i` for a base metric `d` bounded by 1.
//!
//! Only finitely supported sequences are represented. They are kept in a
//! canonical form: coordinate 0 is always stored and trailing identities after
//! it are dropped, so structural equality is sequence equality.
//!
//! `Φ` is an endomorphism only when the base is abelian, and the witness set
//! `C̃` needs inverses, so the base must be an abelian group.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::TorusPoint;
use crate::endo::EndoMap;
use crate::error::{Error, Result};
use crate::mixing::criterion::CriterionSystem;
use crate::rational::{half_pow, ratio_str};

/// A metrizable group with a distinguished endomorphism `φ`.
pub trait BaseGroup: Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn validate(&self, a: &Self::Elem) -> Result<()>;
    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` when `a` has no inverse (semigroup bases).
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Whether the base is an abelian group.
    fn is_abelian_group(&self) -> bool;
    fn dist(&self, a: &Self::Elem, b: &Self::Elem) -> BigRational;
    /// Upper bound of [`dist`](Self::dist); at most 1.
    fn metric_bound(&self) -> BigRational;
    /// The base endomorphism `φ`.
    fn endo(&self, a: &Self::Elem) -> Self::Elem;
}

/// `T^d` with an endomorphism given by an [`EndoMap`], metric = max circle distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusBase {
    map: EndoMap,
}

impl TorusBase {
    pub fn new(map: EndoMap) -> Self {
        TorusBase { map }
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn map(&self) -> &EndoMap {
        &self.map
    }
}

impl BaseGroup for TorusBase {
    type Elem = TorusPoint;

    fn validate(&self, a: &TorusPoint) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        Ok(())
    }

    fn identity(&self) -> TorusPoint {
        TorusPoint::identity(self.dim())
    }

    fn op(&self, a: &TorusPoint, b: &TorusPoint) -> TorusPoint {
        a.mul(b).expect("validated dimension")
    }

    fn inverse(&self, a: &TorusPoint) -> Option<TorusPoint> {
        Some(a.inv())
    }

    fn is_abelian_group(&self) -> bool {
        true
    }

    fn dist(&self, a: &TorusPoint, b: &TorusPoint) -> BigRational {
        a.dist(b).expect("validated dimension")
    }

    fn metric_bound(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(2))
    }

    fn endo(&self, a: &TorusPoint) -> TorusPoint {
        self.map.apply(a).expect("validated dimension")
    }
}

/// A finitely supported element `(g_0, …, g_k, e, e, …)` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct FiniteSupportSeq<E> {
    entries: Vec<E>,
}

impl<E> FiniteSupportSeq<E> {
    /// Stored entries; always at least coordinate 0.
    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    /// Number of stored coordinates (support length, at least 1).
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }
}

impl<'de> Deserialize<'de> for FiniteSupportSeq<TorusPoint> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(FiniteSupportSeq {
            entries: Vec::<TorusPoint>::deserialize(d)?,
        })
    }
}

/// Result of bounding `ρ(Ψ^k(Φ^k(h)), ẽ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShrinkBound {
    pub k: u64,
    #[serde(with = "ratio_str")]
    pub value: BigRational,
    /// `1/2^k`, the bound for any base metric bounded by 1.
    #[serde(with = "ratio_str")]
    pub bound: BigRational,
    /// `metric_bound/2^k`, the bound for this base's metric.
    #[serde(with = "ratio_str")]
    pub tight_bound: BigRational,
    pub within_bound: bool,
    pub within_tight_bound: bool,
}

/// The shift extension `Φ` over a base group.
#[derive(Clone, Debug)]
pub struct ShiftExtension<B> {
    base: B,
}

impl<B: BaseGroup> ShiftExtension<B> {
    pub fn new(base: B) -> Result<Self> {
        if !base.is_abelian_group() {
            return Err(Error::Precondition(
                "the shift extension needs an abelian group base: Φ is a homomorphism only for \
                 commuting factors and the witness set uses inverses"
                    .into(),
            ));
        }
        if base.metric_bound() > BigRational::one() {
            return Err(Error::Precondition("base metric must be bounded by 1".into()));
        }
        Ok(ShiftExtension { base })
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    fn normalize(&self, mut entries: Vec<B::Elem>) -> FiniteSupportSeq<B::Elem> {
        let e = self.base.identity();
        while entries.len() > 1 && entries.last() == Some(&e) {
            entries.pop();
        }
        if entries.is_empty() {
            entries.push(e);
        }
        FiniteSupportSeq { entries }
    }

    /// Validates the entries and brings them to canonical form.
    pub fn seq(&self, entries: Vec<B::Elem>) -> Result<FiniteSupportSeq<B::Elem>> {
        for a in &entries {
            self.base.validate(a)?;
        }
        Ok(self.normalize(entries))
    }

    /// Re-checks and re-normalizes a sequence obtained from outside.
    pub fn canonical(&self, g: FiniteSupportSeq<B::Elem>) -> Result<FiniteSupportSeq<B::Elem>> {
        self.seq(g.entries)
    }

    /// `ẽ = (e, e, …)`.
    pub fn identity(&self) -> FiniteSupportSeq<B::Elem> {
        self.normalize(Vec::new())
    }

    pub fn is_identity(&self, g: &FiniteSupportSeq<B::Elem>) -> bool {
        *g == self.identity()
    }

    /// Coordinate `i`, the identity past the stored support.
    pub fn coord(&self, g: &FiniteSupportSeq<B::Elem>, i: usize) -> B::Elem {
        g.entries.get(i).cloned().unwrap_or_else(|| self.base.identity())
    }

    /// Projection to coordinate 0.
    pub fn project0(&self, g: &FiniteSupportSeq<B::Elem>) -> B::Elem {
        g.entries[0].clone()
    }

    /// Componentwise product.
    pub fn mul(&self, g: &FiniteSupportSeq<B::Elem>, h: &FiniteSupportSeq<B::Elem>) -> FiniteSupportSeq<B::Elem> {
        let len = g.entries.len().max(h.entries.len());
        self.normalize(
            (0..len)
                .map(|i| self.base.op(&self.coord(g, i), &self.coord(h, i)))
                .collect(),
        )
    }

    /// Componentwise inverse.
    pub fn inv(&self, g: &FiniteSupportSeq<B::Elem>) -> FiniteSupportSeq<B::Elem> {
        self.normalize(
            g.entries
                .iter()
                .map(|a| self.base.inverse(a).expect("abelian group base"))
                .collect(),
        )
    }

    /// `Φ(g) = (φ(g_0)·g_1, g_2, g_3, …)`.
    pub fn phi(&self, g: &FiniteSupportSeq<B::Elem>) -> FiniteSupportSeq<B::Elem> {
        let head = self.base.op(&self.base.endo(&g.entries[0]), &self.coord(g, 1));
        let mut entries = Vec::with_capacity(g.entries.len().max(1));
        entries.push(head);
        entries.extend(g.entries.iter().skip(2).cloned());
        self.normalize(entries)
    }

    /// `Ψ(g) = (e, g_0, g_1, …)`.
    pub fn psi(&self, g: &FiniteSupportSeq<B::Elem>) -> FiniteSupportSeq<B::Elem> {
        let mut entries = Vec::with_capacity(g.entries.len() + 1);
        entries.push(self.base.identity());
        entries.extend(g.entries.iter().cloned());
        self.normalize(entries)
    }

    pub fn phi_pow(&self, g: &FiniteSupportSeq<B::Elem>, k: u64) -> FiniteSupportSeq<B::Elem> {
        (0..k).fold(g.clone(), |acc, _| self.phi(&acc))
    }

    pub fn psi_pow(&self, g: &FiniteSupportSeq<B::Elem>, k: u64) -> FiniteSupportSeq<B::Elem> {
        if self.is_identity(g) {
            return g.clone();
        }
        let mut entries = vec![self.base.identity(); k as usize];
        entries.extend(g.entries.iter().cloned());
        self.normalize(entries)
    }

    /// `ρ(g, h) = Σ_i d(g_i, h_i) / 2^i`, a finite sum over the joint support.
    pub fn metric(&self, g: &FiniteSupportSeq<B::Elem>, h: &FiniteSupportSeq<B::Elem>) -> BigRational {
        let len = g.entries.len().max(h.entries.len());
        (0..len).fold(BigRational::zero(), |acc, i| {
            acc + self.base.dist(&self.coord(g, i), &self.coord(h, i)) * half_pow(i as u64)
        })
    }

    fn check_support(&self, h: &FiniteSupportSeq<B::Elem>, k: u64) -> Result<()> {
        if h.entries.len() as u64 > k + 1 {
            return Err(Error::Precondition(format!(
                "support length {} exceeds k + 1 = {}",
                h.entries.len(),
                k + 1
            )));
        }
        Ok(())
    }

    /// `Φ^k(h) = (φ^k(h_0)·φ^{k-1}(h_1)⋯φ(h_{k-1})·h_k, e, …)` for support at most `k + 1`.
    pub fn phi_iterate_closed_form(&self, h: &FiniteSupportSeq<B::Elem>, k: u64) -> Result<FiniteSupportSeq<B::Elem>> {
        self.check_support(h, k)?;
        let mut head = self.base.identity();
        for (i, hi) in h.entries.iter().enumerate() {
            let mut term = hi.clone();
            for _ in 0..(k - i as u64) {
                term = self.base.endo(&term);
            }
            head = self.base.op(&head, &term);
        }
        Ok(self.normalize(vec![head]))
    }

    /// Evaluates `ρ(Ψ^k(Φ^k(h)), ẽ)` and compares it with `1/2^k` and with
    /// `metric_bound/2^k`.
    pub fn shrink_bound_check(&self, h: &FiniteSupportSeq<B::Elem>, k: u64) -> Result<ShrinkBound> {
        let collapsed = self.phi_iterate_closed_form(h, k)?;
        let value = self.metric(&self.psi_pow(&collapsed, k), &self.identity());
        let bound = half_pow(k);
        let tight_bound = self.base.metric_bound() * &bound;
        Ok(ShrinkBound {
            k,
            within_bound: value <= bound,
            within_tight_bound: value <= tight_bound,
            value,
            bound,
            tight_bound,
        })
    }

    /// `g · (Ψ^n(Φ^n(g)))^{-1}`, an element annihilated by `Φ^n`.
    pub fn c_tilde_element(&self, g: &FiniteSupportSeq<B::Elem>, n: u64) -> Result<FiniteSupportSeq<B::Elem>> {
        self.check_support(g, n)?;
        let shifted = self.psi_pow(&self.phi_pow(g, n), n);
        Ok(self.mul(g, &self.inv(&shifted)))
    }

    /// The first `count` elements of `D̃` with support length at most
    /// `support_len`, entries drawn from `h`, in mixed-radix order
    /// (coordinate 0 varies fastest).
    pub fn dense_sample_d_tilde(
        &self,
        h: &[B::Elem],
        support_len: usize,
        count: usize,
    ) -> Result<Vec<FiniteSupportSeq<B::Elem>>> {
        self.dense_sample_d_tilde_seeded(h, support_len, count, 0)
    }

    /// Like [`dense_sample_d_tilde`](Self::dense_sample_d_tilde) but walks the
    /// index space `seed, seed + s, seed + 2s, …` modulo its size, with a stride
    /// `s` coprime to the size derived from the seed. Seed 0 is the plain order.
    pub fn dense_sample_d_tilde_seeded(
        &self,
        h: &[B::Elem],
        support_len: usize,
        count: usize,
        seed: u64,
    ) -> Result<Vec<FiniteSupportSeq<B::Elem>>> {
        if support_len < 1 {
            return Err(Error::Precondition("support length must be at least 1".into()));
        }
        if h.is_empty() {
            return Err(Error::Precondition("base sampler produced no points".into()));
        }
        for a in h {
            self.base.validate(a)?;
        }
        let radix = BigInt::from(h.len());
        let total = num_traits::Pow::pow(&radix, support_len as u32);
        let start = BigInt::from(seed) % &total;
        let stride = if seed == 0 {
            BigInt::one()
        } else {
            let mut s = (BigInt::from(seed) * BigInt::from(2_654_435_761u64)) % &total;
            while s.is_zero() || !s.gcd(&total).is_one() {
                s += 1u32;
                s %= &total;
            }
            s
        };
        let take = if total < BigInt::from(count) {
            usize::try_from(&total).expect("below count")
        } else {
            count
        };
        let mut out = Vec::with_capacity(take);
        let mut idx = start;
        for _ in 0..take {
            let mut rest = idx.clone();
            let mut entries = Vec::with_capacity(support_len);
            for _ in 0..support_len {
                let (q, r) = rest.div_rem(&radix);
                let r = usize::try_from(&r).expect("digit below radix");
                entries.push(h[r].clone());
                rest = q;
            }
            out.push(self.normalize(entries));
            idx = (idx + &stride) % &total;
        }
        Ok(out)
    }

    /// Samples of `C̃`: `c_tilde_element(g, n)` for `g` from
    /// [`dense_sample_d_tilde_seeded`](Self::dense_sample_d_tilde_seeded) with
    /// support `n + 1`, cycling `n` through `1..=max_n`.
    pub fn c_tilde_samples(
        &self,
        h: &[B::Elem],
        max_n: u64,
        per_n: usize,
        seed: u64,
    ) -> Result<Vec<FiniteSupportSeq<B::Elem>>> {
        let mut out = Vec::new();
        for n in 1..=max_n {
            for g in self.dense_sample_d_tilde_seeded(h, n as usize + 1, per_n, seed.wrapping_add(n))? {
                out.push(self.c_tilde_element(&g, n)?);
            }
        }
        Ok(out)
    }
}

/// `Φ` with sections `ψ_n = Ψ^n`; `Φ^n ∘ Ψ^n` is the identity.
impl<B: BaseGroup> CriterionSystem for ShiftExtension<B> {
    type Point = FiniteSupportSeq<B::Elem>;

    fn validate(&self, p: &Self::Point) -> Result<()> {
        for a in &p.entries {
            self.base.validate(a)?;
        }
        if p.entries.is_empty() || *p != self.normalize(p.entries.clone()) {
            return Err(Error::Precondition("sequence is not in canonical form".into()));
        }
        Ok(())
    }

    fn identity(&self) -> Self::Point {
        ShiftExtension::identity(self)
    }

    fn step(&self, p: &Self::Point) -> Self::Point {
        self.phi(p)
    }

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> BigRational {
        self.metric(a, b)
    }

    fn section(&self, n: u64, p: &Self::Point) -> Self::Point {
        self.psi_pow(p, n)
    }
}

/// Shift extension over a torus map.
pub type TorusShift = ShiftExtension<TorusBase>;

pub fn torus_shift(map: EndoMap) -> Result<TorusShift> {
    ShiftExtension::new(TorusBase::new(map))
}
