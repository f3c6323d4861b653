//! Segmented sieve of Eratosthenes over odd numbers.

const SEGMENT_ODDS: u64 = 1 << 18;

/// Primes up to `n` by a plain sieve; used for the base primes of the
/// segmented sieve.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = vec![];
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Increasing stream of the primes in `[lo, hi]`. Memory is one segment of
/// 2^18 odd candidates plus the base primes up to `sqrt(hi)`.
pub struct PrimeStream {
    hi: u64,
    base: Vec<u64>,
    /// Next odd number not yet sieved.
    next_odd: u64,
    segment: Vec<bool>,
    seg_start: u64,
    pos: usize,
    emit_two: bool,
}

pub fn sieve_primes(lo: u64, hi: u64) -> PrimeStream {
    let lo = lo.max(2);
    let start = if lo.is_multiple_of(2) { lo + 1 } else { lo }.max(3);
    PrimeStream {
        hi,
        base: small_primes(isqrt(hi)),
        next_odd: start,
        segment: Vec::new(),
        seg_start: start,
        pos: 0,
        emit_two: lo <= 2 && hi >= 2,
    }
}

impl PrimeStream {
    fn refill(&mut self) -> bool {
        if self.next_odd > self.hi {
            return false;
        }
        let start = self.next_odd;
        let count = ((self.hi - start) / 2 + 1).min(SEGMENT_ODDS);
        let end = start + 2 * (count - 1); // inclusive, odd
        self.segment.clear();
        self.segment.resize(count as usize, true);
        for &q in self.base.iter().skip(1) {
            if q * q > end {
                break;
            }
            // first odd multiple of q that is >= max(start, q*q)
            let mut m = (start.max(q * q)).div_ceil(q) * q;
            if m % 2 == 0 {
                m += q;
            }
            while m <= end {
                self.segment[((m - start) / 2) as usize] = false;
                m += 2 * q;
            }
        }
        if start == 1 {
            self.segment[0] = false;
        }
        self.seg_start = start;
        self.pos = 0;
        self.next_odd = end + 2;
        true
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.emit_two {
            self.emit_two = false;
            return Some(2);
        }
        loop {
            while self.pos < self.segment.len() {
                let i = self.pos;
                self.pos += 1;
                if self.segment[i] {
                    return Some(self.seg_start + 2 * i as u64);
                }
            }
            if !self.refill() {
                return None;
            }
        }
    }
}
