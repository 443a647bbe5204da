//! Kendall's tau-b in O(n log n) (Knight's merge-sort algorithm).

/// Kendall's tau-b between two equally long samples. Returns `NaN` when
/// either sample is constant.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "kendall_tau needs paired samples");
    let n = x.len();
    if n < 2 {
        return f64::NAN;
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().cloned().zip(y.iter().cloned()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let (mut tied_x, mut tied_xy) = (0u64, 0u64);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pairs[j].0 == pairs[i].0 {
            j += 1;
        }
        let run = (j - i) as u64;
        tied_x += run * (run - 1) / 2;
        let mut k = i;
        while k < j {
            let mut l = k + 1;
            while l < j && pairs[l].1 == pairs[k].1 {
                l += 1;
            }
            let r = (l - k) as u64;
            tied_xy += r * (r - 1) / 2;
            k = l;
        }
        i = j;
    }

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut tied_y = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && ys[j] == ys[i] {
            j += 1;
        }
        let run = (j - i) as u64;
        tied_y += run * (run - 1) / 2;
        i = j;
    }

    let concordant_minus_discordant =
        n0 as f64 - tied_x as f64 - tied_y as f64 + tied_xy as f64 - 2.0 * swaps as f64;
    let denom = ((n0 - tied_x) as f64 * (n0 - tied_y) as f64).sqrt();
    concordant_minus_discordant / denom
}

/// Sorts `v` ascending, returning the number of inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Pairwise Kendall tau matrix of the given columns.
pub fn kendall_matrix(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = columns.len();
    let mut m = vec![vec![1.0; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let t = kendall_tau(&columns[i], &columns[j]);
            m[i][j] = t;
            m[j][i] = t;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                let sx = (x[i] - x[j]).signum() * ((x[i] != x[j]) as i32 as f64);
                let sy = (y[i] - y[j]).signum() * ((y[i] != y[j]) as i32 as f64);
                if sx == 0.0 && sy == 0.0 {
                    continue;
                } else if sx == 0.0 {
                    tx += 1;
                } else if sy == 0.0 {
                    ty += 1;
                } else if sx * sy > 0.0 {
                    c += 1;
                } else {
                    d += 1;
                }
            }
        }
        (c - d) as f64 / (((c + d + tx) * (c + d + ty)) as f64).sqrt()
    }

    #[test]
    fn perfect_orderings() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau(&x, &x), 1.0);
        let y = [4.0, 3.0, 2.0, 1.0];
        assert_eq!(kendall_tau(&x, &y), -1.0);
    }

    proptest! {
        #[test]
        fn matches_pair_counting(v in proptest::collection::vec((0u8..6, 0u8..6), 3..60)) {
            let x: Vec<f64> = v.iter().map(|p| p.0 as f64).collect();
            let y: Vec<f64> = v.iter().map(|p| p.1 as f64).collect();
            let fast = kendall_tau(&x, &y);
            let slow = brute_force(&x, &y);
            if slow.is_nan() {
                prop_assert!(fast.is_nan());
            } else {
                prop_assert!((fast - slow).abs() < 1e-12, "fast={} slow={}", fast, slow);
            }
        }
    }
}
