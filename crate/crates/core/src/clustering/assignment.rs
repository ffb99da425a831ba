//! Maximum-weight perfect matching on a square matrix (Hungarian method).

/// Column assigned to each row so that the total weight is maximal.
pub fn max_weight_assignment(weights: &[Vec<f64>]) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    let big = weights
        .iter()
        .flatten()
        .fold(0.0_f64, |m, &w| m.max(w.abs()));
    // Minimize cost = big − weight with 1-based potentials.
    let cost = |i: usize, j: usize| big - weights[i - 1][j - 1];
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0; n];
    for j in 1..=n {
        col_of[row_of[j] - 1] = j - 1;
    }
    col_of
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for k in 0..n {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn total(w: &[Vec<f64>], a: &[usize]) -> f64 {
        a.iter().enumerate().map(|(i, &j)| w[i][j]).sum()
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..6, vals in proptest::collection::vec(0.0f64..10.0, 36)) {
            let w: Vec<Vec<f64>> = (0..n).map(|i| vals[i * n..(i + 1) * n].to_vec()).collect();
            let best = permutations(n).iter().map(|p| total(&w, p)).fold(f64::NEG_INFINITY, f64::max);
            let got = max_weight_assignment(&w);
            prop_assert!((total(&w, &got) - best).abs() < 1e-9);
        }
    }

    #[test]
    fn picks_off_diagonal_optimum() {
        let w = vec![vec![1.0, 5.0, 0.0], vec![4.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]];
        assert_eq!(max_weight_assignment(&w), vec![1, 0, 2]);
    }

    #[test]
    fn is_a_permutation() {
        let w = vec![vec![3.0; 4]; 4];
        let mut a = max_weight_assignment(&w);
        a.sort();
        assert_eq!(a, vec![0, 1, 2, 3]);
        assert!(max_weight_assignment(&[]).is_empty());
    }
}
