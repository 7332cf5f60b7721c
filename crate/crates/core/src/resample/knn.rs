use rayon::prelude::*;

use crate::matrix::Matrix;

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// For every row of `queries`, the indices of its `k` nearest rows of
/// `points` by Euclidean distance, nearest first (ties by lower index).
/// `exclude_self` skips the point with the query's own index, for queries
/// drawn from `points`.
pub fn k_nearest(queries: &Matrix, points: &Matrix, k: usize, exclude_self: bool) -> Vec<Vec<usize>> {
    (0..queries.n_rows())
        .into_par_iter()
        .map(|q| {
            let query = queries.row(q);
            let mut scored: Vec<(f64, usize)> = (0..points.n_rows())
                .filter(|&i| !(exclude_self && i == q))
                .map(|i| (squared_distance(query, points.row(i)), i))
                .collect();
            let k = k.min(scored.len());
            if k == 0 {
                return Vec::new();
            }
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
            scored.sort_by(cmp);
            scored.into_iter().map(|(_, i)| i).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_with_ties() {
        let p = Matrix::from_rows(&[[0.0], [1.0], [-1.0], [5.0]]).unwrap();
        let nn = k_nearest(&p, &p, 2, true);
        assert_eq!(nn[0], vec![1, 2]);
        assert_eq!(nn[3], vec![1, 0]);
        let q = Matrix::from_rows(&[[4.0]]).unwrap();
        assert_eq!(k_nearest(&q, &p, 1, false), vec![vec![3]]);
    }
}
