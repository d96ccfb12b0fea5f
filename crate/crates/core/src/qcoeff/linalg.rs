//! Exact sparse linear solves over QScalar.

use super::QScalar;
use crate::error::{QError, QResult};
use std::collections::BTreeMap;

/// Sparse row: column index to nonzero coefficient.
pub type SparseRow = BTreeMap<usize, QScalar>;

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// Solve M X = B exactly, where M has `ncols` unknowns and B has one row per row of M
/// (each B row is a sparse map from right-hand-side index to value).
/// The system is split into connected blocks and each block is row-reduced.
/// Fails with `Inconsistent` if some right-hand side is not in the range of M
/// or if M does not have full column rank.
pub fn solve_exact(m: &[SparseRow], ncols: usize, b: &[SparseRow]) -> QResult<Vec<SparseRow>> {
    assert_eq!(m.len(), b.len());
    let mut parent: Vec<usize> = (0..ncols).collect();
    for row in m {
        let mut it = row.keys();
        if let Some(&first) = it.next() {
            for &c in it {
                let (ra, rb) = (find(&mut parent, first), find(&mut parent, c));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for c in 0..ncols {
        let r = find(&mut parent, c);
        blocks.entry(r).or_default().0.push(c);
    }
    for (k, row) in m.iter().enumerate() {
        match row.keys().next() {
            Some(&c) => {
                let r = find(&mut parent, c);
                blocks.get_mut(&r).unwrap().1.push(k);
            }
            None => {
                if b[k].values().any(|v| !v.is_zero()) {
                    return Err(QError::Inconsistent(format!("row {k} is zero but its right-hand side is not")));
                }
            }
        }
    }
    let mut x: Vec<SparseRow> = vec![SparseRow::new(); ncols];
    for (cols, rows) in blocks.values() {
        solve_block(m, b, cols, rows, &mut x)?;
    }
    Ok(x)
}

fn solve_block(m: &[SparseRow], b: &[SparseRow], cols: &[usize], rows: &[usize], x: &mut [SparseRow]) -> QResult<()> {
    let n = cols.len();
    let pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    // Dense block: coefficient part and sparse right-hand side.
    let mut a: Vec<Vec<QScalar>> = Vec::with_capacity(rows.len());
    let mut rhs: Vec<SparseRow> = Vec::with_capacity(rows.len());
    for &r in rows {
        let mut dense = vec![QScalar::zero(); n];
        for (c, v) in &m[r] {
            dense[pos[c]] = v.clone();
        }
        a.push(dense);
        rhs.push(b[r].clone());
    }
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let Some(p) = (pivot_row..a.len()).filter(|&r| !a[r][col].is_zero()).min_by_key(|&r| a[r][col].weight()) else {
            return Err(QError::Inconsistent(format!("unknown {} is undetermined", cols[col])));
        };
        a.swap(pivot_row, p);
        rhs.swap(pivot_row, p);
        let inv = a[pivot_row][col].inv()?;
        for v in a[pivot_row].iter_mut().skip(col) {
            *v = &*v * &inv;
        }
        for v in rhs[pivot_row].values_mut() {
            *v = &*v * &inv;
        }
        let prow = a[pivot_row].clone();
        let prhs = rhs[pivot_row].clone();
        for r in 0..a.len() {
            if r == pivot_row || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..n {
                if !prow[c].is_zero() {
                    a[r][c] = &a[r][c] - &(&f * &prow[c]);
                }
            }
            for (k, v) in &prhs {
                let e = rhs[r].entry(*k).or_insert_with(QScalar::zero);
                *e = &*e - &(&f * v);
                if e.is_zero() {
                    rhs[r].remove(k);
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    for r in pivot_row..a.len() {
        if rhs[r].values().any(|v| !v.is_zero()) {
            return Err(QError::Inconsistent("right-hand side outside the range".into()));
        }
    }
    for (col, &r) in pivots.iter().enumerate() {
        x[cols[col]] = rhs[r].clone();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(entries: &[(usize, QScalar)]) -> SparseRow {
        entries.iter().cloned().collect()
    }

    #[test]
    fn solves_small_system() {
        let q = QScalar::q();
        // x0 + q x1 = 1, x1 = q, 0 = 0 (redundant), x2 = 2
        let m = vec![
            row(&[(0, QScalar::one()), (1, q.clone())]),
            row(&[(1, QScalar::one())]),
            row(&[(0, QScalar::from_int(2)), (1, &q * &QScalar::from_int(2))]),
            row(&[(2, QScalar::one())]),
        ];
        let b = vec![
            row(&[(0, QScalar::one())]),
            row(&[(0, q.clone())]),
            row(&[(0, QScalar::from_int(2))]),
            row(&[(0, QScalar::from_int(2))]),
        ];
        let x = solve_exact(&m, 3, &b).unwrap();
        assert_eq!(x[1].get(&0).cloned().unwrap(), q);
        assert_eq!(x[0].get(&0).cloned().unwrap(), QScalar::one() - &q * &q);
        assert_eq!(x[2].get(&0).cloned().unwrap(), QScalar::from_int(2));
    }

    #[test]
    fn detects_inconsistency_and_rank_loss() {
        let m = vec![row(&[(0, QScalar::one())]), row(&[(0, QScalar::one())])];
        let b = vec![row(&[(0, QScalar::one())]), row(&[(0, QScalar::from_int(2))])];
        assert!(matches!(solve_exact(&m, 1, &b), Err(QError::Inconsistent(_))));
        let m = vec![row(&[(0, QScalar::one()), (1, QScalar::one())])];
        let b = vec![row(&[(0, QScalar::one())])];
        assert!(matches!(solve_exact(&m, 2, &b), Err(QError::Inconsistent(_))));
    }
}
