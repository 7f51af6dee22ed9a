//! Permutation enumeration and parity.

use itertools::Itertools;

/// Largest particle count for which full S_n enumeration is permitted.
pub const MAX_ENUMERATED: usize = 8;

/// All permutations of `0..n` in lexicographic order.
///
/// The identity comes first, so index 0 is always the order-preserving
/// ("direct") assignment.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

/// Sign of a permutation: +1 for even, -1 for odd.
pub fn parity(perm: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_first() {
        for n in 1..=5 {
            let perms = all_permutations(n);
            assert_eq!(perms.len(), factorial(n));
            assert_eq!(perms[0], (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn parity_of_transposition() {
        assert_eq!(parity(&[0, 1]), 1.0);
        assert_eq!(parity(&[1, 0]), -1.0);
        assert_eq!(parity(&[1, 2, 0]), 1.0); // 3-cycle is even
        assert_eq!(parity(&[0, 2, 1]), -1.0);
    }

    #[test]
    fn parity_is_multiplicative_over_s4() {
        // sgn(st) = sgn(s)sgn(t), checked exhaustively for n = 4.
        let perms = all_permutations(4);
        for s in &perms {
            for t in &perms {
                let st: Vec<usize> = t.iter().map(|&i| s[i]).collect();
                assert_eq!(parity(&st), parity(s) * parity(t));
            }
        }
    }
}
