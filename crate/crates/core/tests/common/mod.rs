#![allow(dead_code)]

/// Largest number of positions where `mapping[a[i]] == b[i]`, over every
/// one-to-one mapping of `k` labels. Exhaustive, so only for small `k`.
pub fn best_match_agreement(a: &[usize], b: &[usize], k: usize) -> usize {
    assert_eq!(a.len(), b.len());
    let mut counts = vec![vec![0usize; k]; k];
    for (&x, &y) in a.iter().zip(b) {
        counts[x][y] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0;
    permute(&mut perm, 0, &counts, &mut best);
    best
}

fn permute(perm: &mut [usize], at: usize, counts: &[Vec<usize>], best: &mut usize) {
    if at == perm.len() {
        let score = perm.iter().enumerate().map(|(x, &y)| counts[x][y]).sum();
        *best = (*best).max(score);
        return;
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        permute(perm, at + 1, counts, best);
        perm.swap(at, i);
    }
}
