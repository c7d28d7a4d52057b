//! Dense Gauss-Jordan elimination returning the full affine solution set.

/// Solution set of `A x = b`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum AffineSolution {
    Inconsistent,
    /// `x = base + sum_k t_k * null_basis[k]`.
    Affine {
        base: Vec<f64>,
        null_basis: Vec<Vec<f64>>,
    },
}

#[cfg(test)]
impl AffineSolution {
    fn nullity(&self) -> usize {
        match self {
            AffineSolution::Inconsistent => 0,
            AffineSolution::Affine { null_basis, .. } => null_basis.len(),
        }
    }
}

const PIVOT_EPS: f64 = 1e-11;

/// Solves a (possibly non-square, possibly singular) system by reduced row
/// echelon form with partial pivoting. Pivots below `PIVOT_EPS` relative to
/// the largest coefficient count as zero.
pub(crate) fn solve_affine(a: &[Vec<f64>], b: &[f64]) -> AffineSolution {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();

    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let eps = PIVOT_EPS * scale;

    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, best_abs) = (r..rows)
            .map(|i| (i, m[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= eps {
            continue;
        }
        m.swap(r, best);
        let p = m[r][c];
        for v in m[r].iter_mut() {
            *v /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[i][c];
                if f != 0.0 {
                    let pivot_row = m[r].clone();
                    for (x, p) in m[i][c..=cols].iter_mut().zip(&pivot_row[c..=cols]) {
                        *x -= f * p;
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }

    let rhs_scale = b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    if m[r..].iter().any(|row| row[cols].abs() > 1e-9 * rhs_scale.max(scale)) {
        return AffineSolution::Inconsistent;
    }

    let mut base = vec![0.0; cols];
    for (row, &pc) in pivot_cols.iter().enumerate() {
        base[pc] = m[row][cols];
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let null_basis = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0.0; cols];
            v[fc] = 1.0;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -m[row][fc];
            }
            v
        })
        .collect();
    AffineSolution::Affine { base, null_basis }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unique_solution() {
        let sol = solve_affine(&[vec![2.0, 1.0], vec![1.0, 3.0]], &[3.0, 5.0]);
        let AffineSolution::Affine { base, null_basis } = sol else {
            panic!("expected a solution")
        };
        assert!(null_basis.is_empty());
        assert_abs_diff_eq!(base[0], 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(base[1], 1.4, epsilon = 1e-12);
    }

    #[test]
    fn inconsistent_system() {
        let sol = solve_affine(&[vec![0.0, 0.0], vec![1.0, 1.0]], &[-1.0, 1.0]);
        assert_eq!(sol, AffineSolution::Inconsistent);
    }

    #[test]
    fn one_dimensional_family() {
        let sol = solve_affine(&[vec![0.0, 0.0], vec![1.0, 1.0]], &[0.0, 1.0]);
        assert_eq!(sol.nullity(), 1);
        let AffineSolution::Affine { base, null_basis } = sol else {
            unreachable!()
        };
        let d = &null_basis[0];
        assert_abs_diff_eq!(d[0] + d[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(base[0] + base[1], 1.0, epsilon = 1e-12);
    }
}
