//! Multi-indices and the graded enumeration used for every jet coordinate.
//!
//! Within a fixed degree, indices are listed lexicographically descending,
//! so `(2,0) < (1,1) < (0,2)`. The enumeration is prefix-closed: the position
//! of `α` does not depend on the truncation order.

use crate::ring::{q, Q};

pub type Mi = Vec<u32>;

pub fn degree(a: &[u32]) -> u32 {
    a.iter().sum()
}

pub fn unit(m: usize, i: usize) -> Mi {
    let mut a = vec![0; m];
    a[i] = 1;
    a
}

pub fn add(a: &[u32], b: &[u32]) -> Mi {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a − b` when `b ≤ a` componentwise.
pub fn sub(a: &[u32], b: &[u32]) -> Option<Mi> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}

pub fn leq(b: &[u32], a: &[u32]) -> bool {
    b.iter().zip(a).all(|(x, y)| x <= y)
}

pub fn binom_u(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

pub fn factorial(a: &[u32]) -> Q {
    let mut r = q(1);
    for &x in a {
        for j in 2..=x {
            r *= q(j as i64);
        }
    }
    r
}

/// `C(α, β) = Π C(αᵢ, βᵢ)`.
pub fn binom(a: &[u32], b: &[u32]) -> Q {
    let mut r: u64 = 1;
    for (x, y) in a.iter().zip(b) {
        r *= binom_u(*x as u64, *y as u64);
    }
    q(r as i64)
}

/// Number of multi-indices of arity `m` with `|α| ≤ k`.
pub fn count_upto(m: usize, k: i64) -> usize {
    if k < 0 {
        return 0;
    }
    binom_u((m as u64) + k as u64, m as u64) as usize
}

/// Number of multi-indices of arity `m` with `|α| = d`.
pub fn count_exact(m: usize, d: u32) -> usize {
    if m == 0 {
        return if d == 0 { 1 } else { 0 };
    }
    binom_u(m as u64 + d as u64 - 1, d as u64) as usize
}

/// Position of `α` in the graded enumeration.
pub fn index(a: &[u32]) -> usize {
    let m = a.len();
    let d = degree(a);
    let mut pos = count_upto(m, d as i64 - 1);
    let mut rem = d;
    for i in 0..m {
        let tail = m - i - 1;
        if tail == 0 {
            break;
        }
        // values larger than a[i] come first
        let mut v = rem;
        while v > a[i] {
            pos += count_exact(tail, rem - v);
            v -= 1;
        }
        rem -= a[i];
    }
    pos
}

/// All multi-indices with `|α| = d`, in enumeration order.
pub fn list_exact(m: usize, d: u32) -> Vec<Mi> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; m];
    fn rec(i: usize, rem: u32, cur: &mut Mi, out: &mut Vec<Mi>) {
        let m = cur.len();
        if i + 1 == m {
            cur[i] = rem;
            out.push(cur.clone());
            return;
        }
        let mut v = rem as i64;
        while v >= 0 {
            cur[i] = v as u32;
            rec(i + 1, rem - v as u32, cur, out);
            v -= 1;
        }
    }
    if m == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// All multi-indices with `|α| ≤ k`, in enumeration order.
pub fn list_upto(m: usize, k: i64) -> Vec<Mi> {
    let mut out = Vec::new();
    if k < 0 {
        return out;
    }
    for d in 0..=k as u32 {
        out.extend(list_exact(m, d));
    }
    out
}

pub fn fmt_mi(a: &[u32]) -> String {
    let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_matches_index() {
        for m in 1..=3 {
            for (pos, a) in list_upto(m, 5).iter().enumerate() {
                assert_eq!(index(a), pos, "m={m} a={a:?}");
            }
            assert_eq!(list_upto(m, 4).len(), count_upto(m, 4));
        }
    }

    #[test]
    fn graded_order_small() {
        assert_eq!(list_upto(2, 2), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }
}
