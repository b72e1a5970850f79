use alloc::vec::Vec;

use crate::{Error, Result};

/// `(C - D) / C(n, 2)`, ties counted as neither (tau-a), in `O(n log n)`.
pub fn kendall_tau(u: &[f64], v: &[f64]) -> Result<f64> {
    let n = u.len();
    if n != v.len() || n < 2 {
        return Err(Error::domain("Kendall's tau needs two equally long columns of length >= 2"));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| u[i].total_cmp(&u[j]).then(v[i].total_cmp(&v[j])));

    let pairs = |t: u64| t * (t.saturating_sub(1)) / 2;
    let total = pairs(n as u64);
    let mut tied_u = 0u64;
    let mut tied_both = 0u64;
    let (mut run_u, mut run_both) = (1u64, 1u64);
    for w in 1..n {
        let (a, b) = (idx[w - 1], idx[w]);
        if u[a] == u[b] {
            run_u += 1;
            if v[a] == v[b] {
                run_both += 1;
            } else {
                tied_both += pairs(run_both);
                run_both = 1;
            }
        } else {
            tied_u += pairs(run_u);
            tied_both += pairs(run_both);
            run_u = 1;
            run_both = 1;
        }
    }
    tied_u += pairs(run_u);
    tied_both += pairs(run_both);

    let mut ys: Vec<f64> = idx.iter().map(|&i| v[i]).collect();
    let mut buf = ys.clone();
    let swaps = merge_count(&mut ys, &mut buf);

    let mut tied_v = 0u64;
    let mut run = 1u64;
    for w in 1..n {
        if ys[w] == ys[w - 1] {
            run += 1;
        } else {
            tied_v += pairs(run);
            run = 1;
        }
    }
    tied_v += pairs(run);

    let untied = total + tied_both - tied_u - tied_v;
    if untied == 0 {
        return Err(Error::Degenerate("every pair is tied; Kendall's tau is undefined".into()));
    }
    let diff = untied as i128 - 2 * swaps as i128;
    Ok(diff as f64 / total as f64)
}

/// Sorts `a` ascending and returns the number of strictly inverted pairs.
fn merge_count(a: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = a.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl) + merge_count(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if a[j] < a[i] {
            buf[k] = a[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = a[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&a[i..mid]);
    k += mid - i;
    buf[k..].copy_from_slice(&a[j..n]);
    a.copy_from_slice(&buf[..n]);
    swaps
}
