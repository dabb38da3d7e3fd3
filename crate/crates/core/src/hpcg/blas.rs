use crate::cache::TraceSink;
use crate::error::{Error, Result};
use crate::kernels::elem;

fn same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, actual: b });
    }
    Ok(())
}

pub fn dot(u: &[f64], v: &[f64]) -> Result<f64> {
    same_len(u.len(), v.len())?;
    Ok(u.iter().zip(v).map(|(a, b)| a * b).sum())
}

/// `w = alpha * x + beta * y`.
pub fn waxpby(alpha: f64, x: &[f64], beta: f64, y: &[f64]) -> Result<Vec<f64>> {
    let mut w = vec![0.0; x.len()];
    waxpby_into(alpha, x, beta, y, &mut w)?;
    Ok(w)
}

pub fn waxpby_into(alpha: f64, x: &[f64], beta: f64, y: &[f64], w: &mut [f64]) -> Result<()> {
    same_len(x.len(), y.len())?;
    same_len(x.len(), w.len())?;
    for ((wi, xi), yi) in w.iter_mut().zip(x).zip(y) {
        *wi = alpha * xi + beta * yi;
    }
    Ok(())
}

/// `x = alpha * x + beta * y`, the aliased form HPCG uses.
pub fn waxpby_in_place(alpha: f64, x: &mut [f64], beta: f64, y: &[f64]) -> Result<()> {
    same_len(x.len(), y.len())?;
    for (xi, yi) in x.iter_mut().zip(y) {
        *xi = alpha * *xi + beta * yi;
    }
    Ok(())
}

/// Loads of `<u, v>`; a norm (`u == v`) loads each element once.
pub fn dot_trace<S: TraceSink + ?Sized>(n: usize, u: u64, v: u64, sink: &mut S) {
    for i in 0..n {
        sink.load(elem(u, i));
        if u != v {
            sink.load(elem(v, i));
        }
    }
}

/// Accesses of `x = alpha * x + beta * y`.
pub fn waxpby_in_place_trace<S: TraceSink + ?Sized>(n: usize, x: u64, y: u64, sink: &mut S) {
    for i in 0..n {
        sink.load(elem(x, i));
        sink.load(elem(y, i));
        sink.store(elem(x, i));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vectors() {
        let e = |i: usize| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(dot(&e(i), &e(j)).unwrap(), if i == j { 1.0 } else { 0.0 });
            }
        }
        assert!(dot(&e(0), &[1.0]).is_err());
    }

    #[test]
    fn waxpby_identities() {
        let x = [1.0, 2.0, 3.0];
        let y = [7.0, 8.0, 9.0];
        assert_eq!(waxpby(1.0, &x, 0.0, &y).unwrap(), x.to_vec());
        assert_eq!(waxpby(2.0, &x, -1.0, &y).unwrap(), vec![-5.0, -4.0, -3.0]);
        let mut z = x;
        waxpby_in_place(2.0, &mut z, -1.0, &y).unwrap();
        assert_eq!(z.to_vec(), vec![-5.0, -4.0, -3.0]);
        assert!(waxpby(1.0, &x, 1.0, &y[..2]).is_err());
    }
}
