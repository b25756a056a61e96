use super::GeometryError;

/// Number of `y in Z^n` with `|y|^2 = m`.
///
/// Descends one coordinate at a time, only visiting residuals `m - x^2 >= 0`,
/// and memoises the count for each (remaining dimension, residual) pair so no
/// point is ever materialised. Overflow of the `u64` count is reported as a
/// capacity error.
pub fn count_representations(n: usize, m: u64) -> Result<u64, GeometryError> {
    if n == 0 {
        return Err(GeometryError::ZeroDimension);
    }
    let width = usize::try_from(m)
        .ok()
        .and_then(|m| m.checked_add(1))
        .ok_or_else(|| GeometryError::Capacity(format!("residual table for m = {m}")))?;
    let mut memo: Vec<Vec<Option<u64>>> = vec![Vec::new(); n + 1];
    for row in memo.iter_mut().skip(2) {
        row.resize(width, None);
    }
    count_rec(n, m, &mut memo)
}

fn count_rec(
    dims: usize,
    residual: u64,
    memo: &mut [Vec<Option<u64>>],
) -> Result<u64, GeometryError> {
    if dims == 1 {
        return Ok(match isqrt(residual) {
            0 if residual == 0 => 1,
            r if r * r == residual => 2,
            _ => 0,
        });
    }
    if let Some(c) = memo[dims][residual as usize] {
        return Ok(c);
    }
    let bound = isqrt(residual);
    // x and -x contribute equally.
    let mut total = count_rec(dims - 1, residual, memo)?;
    for x in 1..=bound {
        let sub = count_rec(dims - 1, residual - x * x, memo)?;
        total = sub
            .checked_mul(2)
            .and_then(|s| total.checked_add(s))
            .ok_or_else(|| GeometryError::Capacity(format!("r_{dims}({residual}) exceeds u64")))?;
    }
    memo[dims][residual as usize] = Some(total);
    Ok(total)
}

/// Floor of the square root, exact for all `u64`.
pub(crate) fn isqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > v) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= v) {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(n: usize, m: u64) -> u64 {
        let b = isqrt(m) as i64;
        let side = (2 * b + 1) as usize;
        let total = side.pow(n as u32);
        (0..total)
            .filter(|&idx| {
                let mut rest = idx;
                let mut s = 0i64;
                for _ in 0..n {
                    let x = (rest % side) as i64 - b;
                    rest /= side;
                    s += x * x;
                }
                s == m as i64
            })
            .count() as u64
    }

    #[test]
    fn small_values() {
        assert_eq!(count_representations(5, 0).unwrap(), 1);
        assert_eq!(count_representations(5, 1).unwrap(), 10);
        assert_eq!(count_representations(4, 2).unwrap(), 24);
        assert_eq!(count_representations(1, 9).unwrap(), 2);
        assert_eq!(count_representations(1, 8).unwrap(), 0);
        assert_eq!(count_representations(3, 7).unwrap(), 0);
    }

    #[test]
    fn matches_box_count() {
        for n in 1..=4 {
            for m in 0..=20 {
                assert_eq!(
                    count_representations(n, m).unwrap(),
                    brute_force(n, m),
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn zero_dimension_is_an_error() {
        assert_eq!(
            count_representations(0, 3).unwrap_err(),
            GeometryError::ZeroDimension
        );
    }

    #[test]
    fn overflow_is_reported() {
        // r_40(400) is far beyond u64.
        assert!(matches!(
            count_representations(40, 400),
            Err(GeometryError::Capacity(_))
        ));
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX), 4294967295);
    }
}
