//! Constructive hard-instance generators.
//!
//! Three families, each self-verified at build time:
//!
//! * bucket-hitting streams over a three-letter alphabet that place an
//!   exact product in any requested bucket `B_j` (for `j` up to
//!   `floor(n b / delta)`) using at most `2n` elements;
//! * strided selections of those streams whose products are pairwise
//!   mutually unapproximable (the reason a product approximator must
//!   remember which stream it saw);
//! * a consecutive-prime-fraction family of `B^n` words with pairwise
//!   distinct products and telescoping suffixes, on which any
//!   threshold decider that confuses two prefixes provably answers one
//!   continuation wrong (a pigeonhole witness, checked mechanically by
//!   [`fooling_check`]).

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::buckets::{
    bucket_boundary_exact, bucket_of_value, floor_div_delta, floor_mul_delta_div,
};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::rational::{ceil_log2, exact_product, Rational, RationalProbability};
use crate::sampling;
use crate::streaming::{run_stream, StreamingAutomaton};

/// Smallest `k >= 3` with `1/k <= eps <= 1/(k-1)` and `k <= 2^b`.
pub fn choose_k(eps: &Rational, b: u64) -> Result<u64> {
    if eps.is_zero() || eps.numer() * 2u8 > *eps.denom() {
        return Err(Error::EpsilonOutOfRange(format!(
            "{}/{}",
            eps.numer(),
            eps.denom()
        )));
    }
    // ceil(1/eps), exactly
    let ceil_inv = (eps.denom() + eps.numer() - 1u8) / eps.numer();
    let k = ceil_inv.to_u64().unwrap_or(u64::MAX).max(3);
    let fits = b < 64 && k <= (1u64 << b) || b >= 64;
    let lower_ok = BigUint::from(k) * eps.numer() >= *eps.denom();
    let upper_ok = BigUint::from(k - 1) * eps.numer() <= *eps.denom();
    if !(fits && lower_ok && upper_ok) {
        return Err(Error::Precondition(format!(
            "no k in [3, 2^{b}] with 1/k <= {} <= 1/(k-1)",
            ratio_str(eps)
        )));
    }
    Ok(k)
}

fn ratio_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Configuration of the bucket-hitting generator: the three-letter
/// alphabet, the deepest reachable bucket `y = floor(n b / delta)`, and the
/// validated preconditions.
#[derive(Debug, Clone)]
pub struct BucketStreamConfig {
    eps: Rational,
    b: u64,
    n: u64,
    k: u64,
    base: Rational,
    alphabet: [RationalProbability; 3],
    y: u64,
}

impl BucketStreamConfig {
    /// Validates, exactly: `eps >= 2^-b` and `b < delta * n` (certified as
    /// `(1-eps)^n 2^b < 1`), plus the covering inequality
    /// `eps >= 1/(k-1)^2` the case analysis relies on.
    pub fn new(eps: Rational, b: u64, n: u64) -> Result<Self> {
        if b == 0 || n == 0 {
            return Err(Error::Precondition("b and n must be positive".into()));
        }
        let k = choose_k(&eps, b)?;
        // eps >= 2^-b  <=>  2^b * eps_num >= eps_den
        if (eps.numer() << b) < *eps.denom() {
            return Err(Error::Precondition(format!(
                "-log2(eps) <= b violated: eps = {} < 2^-{b}",
                ratio_str(&eps)
            )));
        }
        let base: Rational = Ratio::one() - eps.clone();
        // b < delta n  <=>  (1-eps)^n * 2^b < 1
        let lhs = pow_big(base.numer(), n) << b;
        if lhs >= pow_big(base.denom(), n) {
            return Err(Error::Precondition(format!(
                "b < n * delta violated for eps = {}, b = {b}, n = {n}",
                ratio_str(&eps)
            )));
        }
        // covering inequality: eps >= 1/(k-1)^2
        let km1_sq = BigUint::from(k - 1) * (k - 1);
        if eps.numer() * km1_sq < *eps.denom() {
            return Err(Error::Precondition(format!(
                "eps < 1/(k-1)^2 for k = {k}"
            )));
        }
        let alphabet = [
            RationalProbability::from_u64(k - 1, k)?,
            RationalProbability::from_u64(k - 2, k - 1)?,
            RationalProbability::new(BigUint::one(), BigUint::one() << b)?,
        ];
        for q in &alphabet {
            debug_assert!(q.bit_size() <= b);
        }
        let y = floor_div_delta(n.checked_mul(b).expect("n*b fits u64"), &base)?;
        Ok(Self {
            eps,
            b,
            n,
            k,
            base,
            alphabet,
            y,
        })
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `1 - eps`, the bucket base of this construction.
    pub fn base(&self) -> &Rational {
        &self.base
    }

    /// `{(k-1)/k, (k-2)/(k-1), 2^-b}`.
    pub fn alphabet(&self) -> &[RationalProbability; 3] {
        &self.alphabet
    }

    /// Deepest reachable bucket index, `floor(n b / delta)`.
    pub fn y(&self) -> u64 {
        self.y
    }
}

/// Build a stream over the config's alphabet whose exact product lies in
/// bucket `B_j` under base `1 - eps`, using at most `2n` elements.
///
/// First `floor(j delta / b)` copies of `2^-b` land in some bucket `B_s`
/// with `j - n <= s <= j`; then each round multiplies by `(k-1)/k` when the
/// product sits in the lower part of its bucket (preferring this case when
/// both apply) and by `(k-2)/(k-1)` otherwise, advancing exactly one bucket
/// per element.  Every claim is re-verified by exact comparison before the
/// stream is returned.
pub fn gen_bucket_stream(cfg: &BucketStreamConfig, j: u64) -> Result<Vec<RationalProbability>> {
    if j > cfg.y {
        return Err(Error::IndexOutOfRange {
            what: "bucket target j",
            got: j.to_string(),
            bound: format!("0..={}", cfg.y),
        });
    }
    let m = floor_mul_delta_div(j, &cfg.base, cfg.b)?;
    let mut stream: Vec<RationalProbability> =
        std::iter::repeat_n(cfg.alphabet[2].clone(), m as usize).collect();
    let mut product: Rational = Ratio::new(BigUint::one(), BigUint::one() << (cfg.b * m));
    let s = bucket_of_value(&product, &cfg.base)?
        .to_u64()
        .expect("desk-scale bucket index");
    debug_assert!(s <= j && j - s <= cfg.n, "start bucket out of range");

    let case1 = cfg.alphabet[0].as_ratio().clone(); // (k-1)/k
    let case2 = cfg.alphabet[1].as_ratio().clone(); // (k-2)/(k-1)
    let k = cfg.k;
    let mut cur = s;
    // boundary = base^(cur+1), maintained incrementally
    let mut boundary = bucket_boundary_exact(&BigUint::from(cur + 1), &cfg.base)?;
    while cur < j {
        // Case 1 iff product <= k/(k-1) * base^(cur+1); when both cases
        // apply this is the one taken, making generation deterministic.
        let case1_cut = Ratio::new(
            boundary.numer() * k,
            boundary.denom() * (k - 1),
        );
        if product <= case1_cut {
            product *= &case1;
            stream.push(cfg.alphabet[0].clone());
        } else {
            // Case 2 must cover the rest: product > (k-1)/(k-2) * base^(cur+2)
            let case2_cut = Ratio::new(
                boundary.numer() * cfg.base.numer() * (k - 1),
                boundary.denom() * cfg.base.denom() * (k - 2),
            );
            assert!(
                product > case2_cut,
                "case analysis does not cover bucket {cur} for j = {j}"
            );
            product *= &case2;
            stream.push(cfg.alphabet[1].clone());
        }
        cur += 1;
        boundary *= &cfg.base;
        // progress: the product advanced into exactly the next bucket
        let upper = Ratio::new(
            boundary.numer() * cfg.base.denom(),
            boundary.denom() * cfg.base.numer(),
        );
        assert!(product > boundary && product <= upper, "lost bucket {cur}");
    }

    assert!(stream.len() as u64 <= 2 * cfg.n, "stream too long");
    let check = bucket_of_value(&exact_product(&stream), &cfg.base)?;
    assert_eq!(check.to_u64(), Some(j), "product missed bucket {j}");
    Ok(stream)
}

/// Streams hitting the strided buckets `B_(stride*j)`, pairwise mutually
/// unapproximable for strides of at least three.
#[derive(Debug, Clone)]
pub struct FoolingStreams {
    pub stride: u64,
    pub streams: Vec<Vec<RationalProbability>>,
    pub products: Vec<Rational>,
    /// Exact pairwise separation `a_j / (1-eps) < (1-eps) a_i` held for
    /// every `i < j`; only claimed (and then verified) for stride >= 3.
    pub separation_verified: bool,
}

impl FoolingStreams {
    pub fn len(&self) -> usize {
        self.streams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streams.is_empty()
    }
}

pub fn gen_app_fooling_streams(cfg: &BucketStreamConfig, stride: u64) -> Result<FoolingStreams> {
    if stride == 0 {
        return Err(Error::Precondition("stride must be positive".into()));
    }
    let count = cfg.y / stride;
    let mut streams = Vec::with_capacity(count as usize + 1);
    let mut products = Vec::with_capacity(count as usize + 1);
    for j in 0..=count {
        let s = gen_bucket_stream(cfg, stride * j)?;
        products.push(exact_product(&s));
        streams.push(s);
    }
    let mut separation_verified = false;
    if stride >= 3 {
        // a_j / (1-eps) < (1-eps) a_i  <=>  a_j < (1-eps)^2 a_i
        let base_sq_num = cfg.base.numer() * cfg.base.numer();
        let base_sq_den = cfg.base.denom() * cfg.base.denom();
        for i in 0..products.len() {
            for j in (i + 1)..products.len() {
                let lhs = products[j].numer() * &base_sq_den * products[i].denom();
                let rhs = products[j].denom() * &base_sq_num * products[i].numer();
                if lhs >= rhs {
                    return Err(Error::Precondition(format!(
                        "fooling separation failed for pair ({i}, {j})"
                    )));
                }
            }
        }
        separation_verified = true;
    }
    Ok(FoolingStreams {
        stride,
        streams,
        products,
        separation_verified,
    })
}

/// Default cap on exhaustively materialized family sizes.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 16;

/// The consecutive-prime-fraction fooling family: `n` disjoint blocks of
/// `B = 2^b` fractions of consecutive primes, a telescoping threshold
/// `t = p_1 / p_(nB+n+1)`, and per-block suffix numbers multiplying out to
/// exactly `t`.
#[derive(Debug, Clone)]
pub struct PrimeFoolingFamily {
    n: u64,
    b: u64,
    big_b: u64,
    primes: PrimeTable,
    blocks: Vec<Vec<RationalProbability>>,
    threshold: RationalProbability,
    suffix_numbers: Vec<RationalProbability>,
    gamma: Rational,
    max_bit_size: u64,
    bit_gate_asserted: bool,
    /// Words sorted by strictly decreasing product; rank 1 is the largest.
    /// Materialized only when `B^n` fits the enumeration cap.
    words: Option<Vec<(Vec<usize>, Rational)>>,
}

pub fn gen_prime_family(n: u64, b: u64, gamma: Rational) -> Result<PrimeFoolingFamily> {
    gen_prime_family_with_cap(n, b, gamma, DEFAULT_ENUMERATION_CAP)
}

pub fn gen_prime_family_with_cap(
    n: u64,
    b: u64,
    gamma: Rational,
    cap: u64,
) -> Result<PrimeFoolingFamily> {
    if n == 0 || b == 0 {
        return Err(Error::Precondition("n and b must be positive".into()));
    }
    if b > 24 {
        return Err(Error::Unsupported(format!(
            "prime family needs the first n 2^b + n + 1 primes; b = {b} is beyond desk scale"
        )));
    }
    if gamma.is_zero() {
        return Err(Error::Precondition("gamma must be positive".into()));
    }
    let big_b = 1u64 << b;
    let prime_count = n
        .checked_mul(big_b)
        .and_then(|x| x.checked_add(n + 1))
        .ok_or_else(|| Error::Precondition("n 2^b + n + 1 overflows".into()))?;
    let primes = PrimeTable::first_primes(prime_count)?;
    let p = |k: u64| primes.nth(k);

    // Q_i = { p_j / p_(j+1) : (i-1)(B+1)+1 <= j <= i(B+1)-1 }, disjoint by
    // construction of the index ranges.
    let mut blocks = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let lo = (i - 1) * (big_b + 1) + 1;
        let hi = i * (big_b + 1) - 1;
        let block: Vec<RationalProbability> = (lo..=hi)
            .map(|j| RationalProbability::from_u64(p(j), p(j + 1)))
            .collect::<Result<_>>()?;
        debug_assert_eq!(block.len() as u64, big_b);
        blocks.push(block);
    }

    let threshold = RationalProbability::from_u64(p(1), p(prime_count))?;
    let suffix_numbers: Vec<RationalProbability> = (1..=n)
        .map(|i| RationalProbability::from_u64(p((i - 1) * (big_b + 1) + 1), p(i * (big_b + 1) + 1)))
        .collect::<Result<_>>()?;

    // Telescoping: the suffix numbers multiply to exactly the threshold.
    let telescoped = exact_product(&suffix_numbers);
    assert_eq!(&telescoped, threshold.as_ratio(), "telescoping failed");

    // Every suffix fraction s_i / r_i must itself be a probability.
    for (i, s_i) in suffix_numbers.iter().enumerate() {
        for r in &blocks[i] {
            assert!(
                s_i.as_ratio() <= r.as_ratio(),
                "suffix number above block element"
            );
        }
    }

    // Block values are pairwise distinct across the family.
    let mut seen = std::collections::HashSet::new();
    for block in &blocks {
        for q in block {
            assert!(seen.insert(q.clone()), "blocks are not disjoint");
        }
    }

    // Bit sizes: every numerator and denominator is at most p_L^2.
    let p_last = BigUint::from(p(prime_count));
    let p_last_sq = &p_last * &p_last;
    let mut max_bit_size = threshold.bit_size();
    let mut check_number = |q: &RationalProbability| {
        assert!(q.numer() <= &p_last_sq && q.denom() <= &p_last_sq);
        max_bit_size = max_bit_size.max(q.bit_size());
    };
    for block in &blocks {
        for q in block {
            check_number(q);
        }
    }
    for (i, s_i) in suffix_numbers.iter().enumerate() {
        for r in &blocks[i] {
            let frac = RationalProbability::from_ratio(s_i.as_ratio() / r.as_ratio())?;
            check_number(&frac);
        }
    }

    // The "large enough" gate, decided exactly:
    // ceil(2 log2 p_L) <= (2+gamma)(log2 n + b)
    //   <=>  gden*lhs - M*b <= M log2 n  with  M = 2 gden + gnum
    //   <=>  2^(gden*lhs - M*b) <= n^M.
    let lhs = ceil_log2(&p_last_sq);
    let m_factor = gamma.denom() * 2u8 + gamma.numer();
    let left_exp = gamma.denom() * lhs;
    let right_exp = &m_factor * b;
    let bit_gate_asserted = if left_exp <= right_exp {
        true
    } else {
        let diff = (&left_exp - &right_exp)
            .to_u64()
            .expect("desk-scale exponent");
        let m_small = m_factor.to_u64().expect("desk-scale gamma");
        diff < 64 * m_small && (BigUint::one() << diff) <= pow_big(&BigUint::from(n), m_small)
    };
    if bit_gate_asserted {
        // The display inequality holds, so every family number fits the
        // advertised budget; cross-check against the measured maximum.
        debug_assert!({
            let le = gamma.denom() * max_bit_size;
            let re = &m_factor * b;
            le <= re
                || (BigUint::one() << (le - re).to_u64().unwrap())
                    <= pow_big(&BigUint::from(n), m_factor.to_u64().unwrap())
        });
    }

    // Materialize and rank the words when the family is small enough.
    let size = pow_big(&BigUint::from(big_b), n);
    let words = if size <= BigUint::from(cap) {
        let mut all: Vec<(Vec<usize>, Rational)> = Vec::with_capacity(size.to_usize().unwrap());
        let mut choice = vec![0usize; n as usize];
        loop {
            let word: Vec<&RationalProbability> = choice
                .iter()
                .enumerate()
                .map(|(i, &c)| &blocks[i][c])
                .collect();
            all.push((choice.clone(), exact_product(word)));
            // odometer increment
            let mut pos = n as usize;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < big_b as usize {
                    break;
                }
                choice[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
        // rank 1 = largest product; all products strictly distinct
        all.sort_by(|a, b| b.1.cmp(&a.1));
        for w in all.windows(2) {
            assert!(w[0].1 > w[1].1, "family products are not distinct");
        }
        Some(all)
    } else {
        None
    };

    Ok(PrimeFoolingFamily {
        n,
        b,
        big_b,
        primes,
        blocks,
        threshold,
        suffix_numbers,
        gamma,
        max_bit_size,
        bit_gate_asserted,
        words,
    })
}

impl PrimeFoolingFamily {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `B = 2^b`, the block size.
    pub fn block_size(&self) -> u64 {
        self.big_b
    }

    pub fn primes(&self) -> &PrimeTable {
        &self.primes
    }

    pub fn blocks(&self) -> &[Vec<RationalProbability>] {
        &self.blocks
    }

    pub fn threshold(&self) -> &RationalProbability {
        &self.threshold
    }

    pub fn suffix_numbers(&self) -> &[RationalProbability] {
        &self.suffix_numbers
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// Largest bit size over the threshold, the block elements and all
    /// suffix fractions; the automaton consuming family streams must accept
    /// at least this budget.
    pub fn max_bit_size(&self) -> u64 {
        self.max_bit_size
    }

    /// Whether the exact budget inequality
    /// `ceil(2 log2 p_L) <= (2+gamma)(log2 n + b)` held for these
    /// parameters.
    pub fn bit_gate_asserted(&self) -> bool {
        self.bit_gate_asserted
    }

    /// `B^n`, the family size.
    pub fn size(&self) -> BigUint {
        pow_big(&BigUint::from(self.big_b), self.n)
    }

    /// Number of materialized words (absent above the enumeration cap).
    pub fn word_count(&self) -> Option<u64> {
        self.words.as_ref().map(|w| w.len() as u64)
    }

    /// The rank-`i` word (1-indexed): larger rank means strictly smaller
    /// product.
    pub fn family_word(&self, rank: u64) -> Result<Vec<RationalProbability>> {
        let words = self.words.as_ref().ok_or(Error::EnumerationCap {
            size: self.size().to_string(),
            cap: DEFAULT_ENUMERATION_CAP,
        })?;
        if rank == 0 || rank > words.len() as u64 {
            return Err(Error::IndexOutOfRange {
                what: "family rank",
                got: rank.to_string(),
                bound: format!("1..={}", words.len()),
            });
        }
        let (choice, _) = &words[(rank - 1) as usize];
        Ok(choice
            .iter()
            .enumerate()
            .map(|(i, &c)| self.blocks[i][c].clone())
            .collect())
    }

    /// Exact product of the rank-`i` word.
    pub fn word_product(&self, rank: u64) -> Result<Rational> {
        let words = self.words.as_ref().ok_or(Error::EnumerationCap {
            size: self.size().to_string(),
            cap: DEFAULT_ENUMERATION_CAP,
        })?;
        if rank == 0 || rank > words.len() as u64 {
            return Err(Error::IndexOutOfRange {
                what: "family rank",
                got: rank.to_string(),
                bound: format!("1..={}", words.len()),
            });
        }
        Ok(words[(rank - 1) as usize].1.clone())
    }

    /// The distinguishing suffix `(s_1/r_1) ... (s_n/r_n)` for a family
    /// word `r_1 ... r_n`; appending it to `t r_1 ... r_n` lands exactly on
    /// the threshold.
    pub fn family_suffix(
        &self,
        word: &[RationalProbability],
    ) -> Result<Vec<RationalProbability>> {
        if word.len() as u64 != self.n {
            return Err(Error::Precondition(format!(
                "word length {} does not match n = {}",
                word.len(),
                self.n
            )));
        }
        let mut suffix = Vec::with_capacity(word.len());
        for (i, r) in word.iter().enumerate() {
            if !self.blocks[i].contains(r) {
                return Err(Error::Precondition(format!(
                    "element {} is not in block {}",
                    r,
                    i + 1
                )));
            }
            let frac = self.suffix_numbers[i].as_ratio() / r.as_ratio();
            suffix.push(RationalProbability::from_ratio(frac)?);
        }
        Ok(suffix)
    }

    /// Uniformly random family word; available beyond the enumeration cap.
    pub fn sample_word(&self, rng: &mut dyn rand::RngCore) -> Vec<RationalProbability> {
        use rand::Rng;
        self.blocks
            .iter()
            .map(|block| block[rng.random_range(0..block.len())].clone())
            .collect()
    }
}

/// Result of driving a boolean threshold automaton over every ordered pair
/// of family words with the smaller-product word's distinguishing suffix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoolingVerdict {
    pub pairs_checked: u64,
    /// Rank pairs whose prefix memory states serialized identically; every
    /// such collision forces a wrong answer on one continuation.
    pub collisions: Vec<(u64, u64)>,
    /// Final decisions that disagreed with the exact ground truth.
    pub output_errors: u64,
    pub distinct_prefix_states: u64,
}

impl FoolingVerdict {
    /// No witnessed pigeonhole violation and no wrong decision.
    pub fn ok(&self) -> bool {
        self.collisions.is_empty() && self.output_errors == 0
    }
}

/// For every pair of family words `u != v` with `product(u) < product(v)`,
/// run `t u w_v` (a correct decider outputs true) and `t v w_v` (false).
/// Prefix states that collide while the required outputs differ witness a
/// pigeonhole violation.
pub fn fooling_check<A>(automaton: &A, fam: &PrimeFoolingFamily) -> Result<FoolingVerdict>
where
    A: StreamingAutomaton<Output = bool>,
{
    let count = fam.word_count().ok_or(Error::EnumerationCap {
        size: fam.size().to_string(),
        cap: DEFAULT_ENUMERATION_CAP,
    })?;
    let mut rng = sampling::seeded_rng(0);
    // Prefix state (after t . word) per rank, plus collision index.
    let mut states = Vec::with_capacity(count as usize);
    let mut by_encoding: HashMap<crate::bits::Bits, Vec<u64>> = HashMap::new();
    for rank in 1..=count {
        let mut stream = vec![fam.threshold().clone()];
        stream.extend(fam.family_word(rank)?);
        let state = run_stream(automaton, &mut rng, &stream)?;
        let encoding = automaton.serialize_state(&state);
        by_encoding.entry(encoding).or_default().push(rank);
        states.push(state);
    }
    let mut collisions = Vec::new();
    for ranks in by_encoding.values() {
        for i in 0..ranks.len() {
            for j in (i + 1)..ranks.len() {
                let (a, b) = (ranks[i].min(ranks[j]), ranks[i].max(ranks[j]));
                collisions.push((a, b));
            }
        }
    }
    collisions.sort_unstable();

    let mut pairs_checked = 0u64;
    let mut output_errors = 0u64;
    // larger rank <=> strictly smaller product, so for v_rank < u_rank the
    // pair (u, v) has product(u) < product(v).
    for v_rank in 1..=count {
        let v_word = fam.family_word(v_rank)?;
        let suffix = fam.family_suffix(&v_word)?;
        for u_rank in (v_rank + 1)..=count {
            pairs_checked += 1;
            // t u w_v: strictly below the threshold
            let s = crate::streaming::continue_stream(
                automaton,
                states[(u_rank - 1) as usize].clone(),
                &suffix,
            )?;
            if !automaton.output(&s)? {
                output_errors += 1;
            }
            // t v w_v: exactly the threshold, not below
            let s = crate::streaming::continue_stream(
                automaton,
                states[(v_rank - 1) as usize].clone(),
                &suffix,
            )?;
            if automaton.output(&s)? {
                output_errors += 1;
            }
        }
    }

    Ok(FoolingVerdict {
        pairs_checked,
        collisions,
        output_errors,
        distinct_prefix_states: by_encoding.len() as u64,
    })
}

fn pow_big(x: &BigUint, e: u64) -> BigUint {
    let mut acc = BigUint::one();
    let mut sq = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}
