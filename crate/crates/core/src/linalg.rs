//! Small dense linear algebra and summation helpers shared by the kernels.

/// Determinant of an `n x n` row-major matrix. The buffer is overwritten.
pub fn det_in_place(m: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(m.len(), n * n);
    match n {
        0 => 1.0,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => lu_det(m, n),
    }
}

fn lu_det(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].abs();
        for row in col + 1..n {
            let v = m[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for row in col + 1..n {
            let factor = m[row * n + col] / p;
            if factor != 0.0 {
                for j in col + 1..n {
                    m[row * n + j] -= factor * m[col * n + j];
                }
            }
        }
    }
    det
}

/// Determinant of the matrix whose columns are `cols`, restricted to `rows`.
pub fn det_of_columns(cols: &[&[f64]], rows: &[usize]) -> f64 {
    let k = cols.len();
    debug_assert_eq!(rows.len(), k);
    let mut buf = [0.0; 64];
    let mut heap;
    let m: &mut [f64] = if k * k <= buf.len() {
        &mut buf[..k * k]
    } else {
        heap = vec![0.0; k * k];
        &mut heap
    };
    for (c, col) in cols.iter().enumerate() {
        for (r, &row) in rows.iter().enumerate() {
            m[r * k + c] = col[row];
        }
    }
    det_in_place(m, k)
}

/// Determinant of a full square matrix given by its columns.
pub fn det_full(cols: &[&[f64]]) -> f64 {
    let k = cols.len();
    let rows: Vec<usize> = (0..k).collect();
    det_of_columns(cols, &rows)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Calls `f` on every strictly increasing `k`-tuple drawn from `start..n`,
/// in lexicographic order. Returns early when `f` returns `false`.
pub fn for_each_combination(start: usize, n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k == 0 {
        f(&[]);
        return;
    }
    if n < start + k {
        return;
    }
    let mut idx: Vec<usize> = (start..start + k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Streaming pairwise (cascade) summation.
///
/// Terms are summed naively in blocks of `BLOCK`; block sums are merged in a
/// binary tree. The result depends only on the order of the pushed terms.
#[derive(Debug, Clone, Default)]
pub struct PairwiseSum {
    block: f64,
    count: usize,
    // stack[i] holds the sum of 2^i blocks, or None
    stack: Vec<Option<f64>>,
}

impl PairwiseSum {
    const BLOCK: usize = 64;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.block += x;
        self.count += 1;
        if self.count == Self::BLOCK {
            let mut carry = self.block;
            self.block = 0.0;
            self.count = 0;
            for slot in self.stack.iter_mut() {
                match slot.take() {
                    Some(v) => carry += v,
                    None => {
                        *slot = Some(carry);
                        return;
                    }
                }
            }
            self.stack.push(Some(carry));
        }
    }

    pub fn total(&self) -> f64 {
        let mut acc = self.block;
        for v in self.stack.iter().flatten() {
            acc += v;
        }
        acc
    }
}

/// Pairwise sum of a slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sum of `map(det(...))` over all increasing `k`-subsets of `vectors`, with
/// each determinant taken over the coordinates `rows` (`rows.len() == k`).
///
/// Work is split by the first index of the subset; each partition is reduced
/// serially with [`PairwiseSum`] and the partition totals are combined with
/// [`pairwise_sum`] in index order, so the result does not depend on the
/// thread schedule. Within a partition, subsets sharing their first `k - 1`
/// indices reuse one cofactor expansion along the last column.
pub fn subset_determinant_sum<F>(vectors: &[Vec<f64>], rows: &[usize], map: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    use rayon::prelude::*;
    let k = rows.len();
    let n = vectors.len();
    if k == 0 {
        return map(1.0);
    }
    if n < k {
        return 0.0;
    }
    if k == 1 {
        let mut acc = PairwiseSum::new();
        for v in vectors {
            acc.push(map(v[rows[0]]));
        }
        return acc.total();
    }
    let partials: Vec<f64> = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut acc = PairwiseSum::new();
            let mut prefix: Vec<&[f64]> = vec![&vectors[first]; k - 1];
            let mut cofactor = vec![0.0; k];
            let mut minor_rows = Vec::with_capacity(k - 1);
            for_each_combination(first + 1, n - 1, k - 2, |mid| {
                for (slot, &i) in prefix[1..].iter_mut().zip(mid) {
                    *slot = &vectors[i];
                }
                // det(prefix, v) = Σ_r v[rows[r]] · cofactor[r]
                for r in 0..k {
                    minor_rows.clear();
                    minor_rows.extend(rows.iter().enumerate().filter(|&(i, _)| i != r).map(|(_, &row)| row));
                    let sign = if (r + k - 1) % 2 == 0 { 1.0 } else { -1.0 };
                    cofactor[r] = sign * det_of_columns(&prefix, &minor_rows);
                }
                let last_start = mid.last().map_or(first + 1, |&m| m + 1);
                for v in &vectors[last_start..] {
                    let det: f64 = rows.iter().zip(&cofactor).map(|(&row, c)| v[row] * c).sum();
                    acc.push(map(det));
                }
                true
            });
            acc.total()
        })
        .collect();
    pairwise_sum(&partials)
}

/// All permutations of `0..k` with their signs, in Heap's-algorithm order.
pub fn permutations_with_sign(k: usize) -> Vec<(Vec<usize>, f64)> {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut out = vec![(perm.clone(), 1.0)];
    let mut sign = 1.0;
    let mut c = vec![0usize; k];
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Sign of a permutation given as an index list.
pub fn permutation_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}
