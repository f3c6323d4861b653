//! Carry-less multiplication of word slices.
//!
//! On x86_64 with `pclmulqdq` the 64x64 products run on the hardware
//! instruction; everywhere else a 4-bit windowed shift-XOR routine is used.
//! Both paths are exercised by the tests below regardless of the host.

/// Portable 64x64 -> 128 carry-less product.
#[inline]
pub fn clmul64_portable(a: u64, b: u64) -> u128 {
    // Window table over 4 bits of `b`; the top 3 bits of `a` are handled
    // separately so table entries never lose bits.
    let a_low = a & 0x1fff_ffff_ffff_ffff;
    let mut table = [0u128; 16];
    let a128 = a_low as u128;
    for i in 1..16usize {
        let mut v = 0u128;
        for bit in 0..4 {
            if i >> bit & 1 == 1 {
                v ^= a128 << bit;
            }
        }
        table[i] = v;
    }
    let mut acc = 0u128;
    for nib in (0..16).rev() {
        acc <<= 4;
        acc ^= table[((b >> (nib * 4)) & 0xf) as usize];
    }
    for bit in 61..64 {
        if a >> bit & 1 == 1 {
            acc ^= (b as u128) << bit;
        }
    }
    acc
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn clmul64_hw(a: u64, b: u64) -> u128 {
    use std::arch::x86_64::*;
    let x = _mm_set_epi64x(0, a as i64);
    let y = _mm_set_epi64x(0, b as i64);
    let r = _mm_clmulepi64_si128(x, y, 0x00);
    let lo = _mm_cvtsi128_si64(r) as u64;
    let hi = _mm_cvtsi128_si64(_mm_unpackhi_epi64(r, r)) as u64;
    ((hi as u128) << 64) | lo as u128
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn mul_slices_hw(a: &[u64], b: &[u64], out: &mut [u64]) {
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let p = clmul64_hw(x, y);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
}

fn mul_slices_portable(a: &[u64], b: &[u64], out: &mut [u64]) {
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let p = clmul64_portable(x, y);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
}

#[inline]
fn have_hw() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::is_x86_feature_detected!("pclmulqdq")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// 64x64 -> 128 carry-less product, hardware accelerated when available.
#[inline]
pub fn clmul64(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    {
        if have_hw() {
            // SAFETY: the feature was detected at runtime.
            return unsafe { clmul64_hw(a, b) };
        }
    }
    clmul64_portable(a, b)
}

/// XORs the carry-less product `a * b` into `out`.
///
/// `out` must hold at least `a.len() + b.len()` words.
pub fn mul_slices_into(a: &[u64], b: &[u64], out: &mut [u64]) {
    assert!(out.len() >= a.len() + b.len());
    #[cfg(target_arch = "x86_64")]
    {
        if have_hw() {
            // SAFETY: the feature was detected at runtime.
            unsafe { mul_slices_hw(a, b, out) };
            return;
        }
    }
    mul_slices_portable(a, b, out);
}

/// Spreads the 32 bits of `x` into the even bit positions of a u64
/// (squaring over GF(2)).
#[inline]
pub fn spread32(x: u32) -> u64 {
    let mut v = x as u64;
    v = (v | (v << 16)) & 0x0000_ffff_0000_ffff;
    v = (v | (v << 8)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(a: u64, b: u64) -> u128 {
        let mut acc = 0u128;
        for i in 0..64 {
            if b >> i & 1 == 1 {
                acc ^= (a as u128) << i;
            }
        }
        acc
    }

    #[test]
    fn small_products() {
        assert_eq!(clmul64(0b1111, 0b1111), 0b1010101);
        assert_eq!(clmul64_portable(0b1111, 0b1111), 0b1010101);
        assert_eq!(clmul64(u64::MAX, 1), u64::MAX as u128);
        assert_eq!(spread32(0b1011), 0b1000101);
    }

    proptest! {
        #[test]
        fn hw_and_portable_agree(a: u64, b: u64) {
            prop_assert_eq!(clmul64_portable(a, b), naive(a, b));
            prop_assert_eq!(clmul64(a, b), naive(a, b));
        }

        #[test]
        fn slice_paths_agree(a in prop::collection::vec(any::<u64>(), 1..5),
                             b in prop::collection::vec(any::<u64>(), 1..5)) {
            let mut x = vec![0u64; a.len() + b.len()];
            let mut y = vec![0u64; a.len() + b.len()];
            mul_slices_into(&a, &b, &mut x);
            mul_slices_portable(&a, &b, &mut y);
            prop_assert_eq!(x, y);
        }
    }
}
