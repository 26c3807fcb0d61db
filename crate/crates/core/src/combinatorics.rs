//! Integer partitions and compositions.

/// Number of partitions p(n), by Euler's pentagonal recurrence.
pub fn partition_count(n: usize) -> u128 {
    let mut p = vec![0u128; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut total: i128 = 0;
        let mut k: i64 = 1;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > m {
                break;
            }
            let sign: i128 = if k % 2 == 1 { 1 } else { -1 };
            total += sign * p[m - g1] as i128;
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= m {
                total += sign * p[m - g2] as i128;
            }
            k += 1;
        }
        p[m] = total as u128;
    }
    p[n]
}

/// Partitions of `n` into positive parts, in nonincreasing order.
///
/// Yields the single empty partition for `n == 0`.
pub struct Partitions {
    current: Vec<usize>,
    done: bool,
}

impl Partitions {
    pub fn new(n: usize) -> Self {
        Partitions {
            current: if n == 0 { Vec::new() } else { vec![n] },
            done: false,
        }
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        // Advance: find the rightmost part > 1, decrease it, and refill the tail greedily.
        let mut rem = 0;
        while let Some(&last) = self.current.last() {
            if last == 1 {
                rem += 1;
                self.current.pop();
            } else {
                break;
            }
        }
        match self.current.pop() {
            None => self.done = true,
            Some(part) => {
                let k = part - 1;
                self.current.push(k);
                rem += 1;
                while rem > k {
                    self.current.push(k);
                    rem -= k;
                }
                if rem > 0 {
                    self.current.push(rem);
                }
            }
        }
        Some(out)
    }
}

/// Ordered compositions of `n` into exactly `parts` positive parts.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if n == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if n < parts {
            return;
        }
        for first in 1..=(n - parts + 1) {
            prefix.push(first);
            rec(n - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// All ordered compositions of `n` (any number of parts).
pub fn all_compositions(n: usize) -> Vec<Vec<usize>> {
    (1..=n.max(1)).flat_map(|parts| compositions(n, parts)).collect()
}

/// Binomial coefficient as u128.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_match_enumeration() {
        for n in 0..=25 {
            assert_eq!(Partitions::new(n).count() as u128, partition_count(n), "n = {n}");
        }
        assert_eq!(partition_count(40), 37338);
    }

    #[test]
    fn partitions_are_valid_and_distinct() {
        let all: Vec<_> = Partitions::new(7).collect();
        assert_eq!(all.len(), 15);
        for p in &all {
            assert_eq!(p.iter().sum::<usize>(), 7);
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
        }
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        assert_eq!(Partitions::new(0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn composition_counts_are_binomial() {
        for n in 1..=10 {
            for j in 1..=n {
                assert_eq!(
                    compositions(n, j).len() as u128,
                    binomial(n as u64 - 1, j as u64 - 1)
                );
            }
            assert_eq!(all_compositions(n).len(), 1 << (n - 1));
        }
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
    }
}
