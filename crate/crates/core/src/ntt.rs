//! Number-theoretic transform over the prime `p = 2^64 − 2^32 + 1`.
//!
//! Used for exact integer convolution powers: the result is exact whenever
//! every true coefficient is below `p`.

pub(crate) const MODULUS: u64 = 0xFFFF_FFFF_0000_0001;
const GENERATOR: u64 = 7;
const TWO_ADICITY: u32 = 32;

#[inline]
fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

#[inline]
fn add(a: u64, b: u64) -> u64 {
    let (s, over) = a.overflowing_add(b);
    if over || s >= MODULUS {
        s.wrapping_sub(MODULUS)
    } else {
        s
    }
}

#[inline]
fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a.wrapping_sub(b).wrapping_add(MODULUS)
    }
}

fn pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    acc
}

fn transform(values: &mut [u64], inverse: bool) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let log_n = n.trailing_zeros();
    debug_assert!(log_n <= TWO_ADICITY);

    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            values.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let mut w_len = pow(GENERATOR, (MODULUS - 1) / len as u64);
        if inverse {
            w_len = pow(w_len, MODULUS - 2);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut w = 1u64;
        for _ in 0..half {
            twiddles.push(w);
            w = mul(w, w_len);
        }
        for chunk in values.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let a = *u;
                let b = mul(*v, t);
                *u = add(a, b);
                *v = sub(a, b);
            }
        }
        len <<= 1;
    }

    if inverse {
        let scale = pow(n as u64, MODULUS - 2);
        for v in values.iter_mut() {
            *v = mul(*v, scale);
        }
    }
}

/// Largest transform length supported by the field.
pub(crate) const MAX_LEN: usize = 1 << 30;

/// `s`-fold self-convolution of `coeffs`, reduced modulo [`MODULUS`].
/// Output length is `s·(len − 1) + 1`.
pub(crate) fn convolution_power(coeffs: &[u64], s: u32) -> Vec<u64> {
    assert!(s >= 1 && !coeffs.is_empty());
    let out_len = s as usize * (coeffs.len() - 1) + 1;
    let size = out_len.next_power_of_two();
    assert!(size <= MAX_LEN);
    let mut buf = vec![0u64; size];
    for (b, &c) in buf.iter_mut().zip(coeffs) {
        *b = c % MODULUS;
    }
    transform(&mut buf, false);
    for v in buf.iter_mut() {
        *v = pow(*v, u64::from(s));
    }
    transform(&mut buf, true);
    buf.truncate(out_len);
    buf
}
