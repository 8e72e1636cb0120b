use num::{One, Zero};

use crate::term::Rat;

/// Solves `a x = b` exactly by reduction to row echelon form. Free unknowns are
/// set to zero. `None` when the system is inconsistent.
pub fn solve(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>, unknowns: usize) -> Option<Vec<Rat>> {
    let rows = a.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = Rat::one() / a[r][col].clone();
        for j in col..unknowns {
            a[r][j] = &a[r][j] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i == r || a[i][col].is_zero() {
                continue;
            }
            let factor = a[i][col].clone();
            for j in col..unknowns {
                let delta = &factor * &a[r][j];
                a[i][j] -= delta;
            }
            let delta = &factor * &b[r];
            b[i] -= delta;
        }
        pivots.push((r, col));
        r += 1;
    }
    if b[r..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![Rat::zero(); unknowns];
    for (row, col) in pivots {
        x[col] = b[row].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn rows(m: &[&[i64]]) -> Vec<Vec<Rat>> {
        m.iter()
            .map(|row| row.iter().map(|&v| r(v)).collect())
            .collect()
    }

    #[test]
    fn square_system() {
        let x = solve(rows(&[&[2, 1], &[1, 3]]), vec![r(3), r(5)], 2).unwrap();
        assert_eq!(
            x,
            vec![Rat::new(4.into(), 5.into()), Rat::new(7.into(), 5.into())]
        );
    }

    #[test]
    fn underdetermined_sets_free_to_zero() {
        let x = solve(rows(&[&[1, 1, 0]]), vec![r(2)], 3).unwrap();
        assert_eq!(x, vec![r(2), r(0), r(0)]);
    }

    #[test]
    fn inconsistent() {
        assert!(solve(rows(&[&[1, 1], &[2, 2]]), vec![r(1), r(3)], 2).is_none());
        assert!(solve(rows(&[&[0]]), vec![r(1)], 1).is_none());
    }
}
