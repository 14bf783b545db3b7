//! Integer lattice algebra on small dense matrices.

pub type Mat = Vec<Vec<i128>>;

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Diagonalization `V·M·U = D` with unimodular `V` (rows) and `U` (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Diagonal {
    /// Nonzero diagonal entries `d_0..d_{rank−1}`, all positive.
    pub diagonal: Vec<i128>,
    pub v: Mat,
    pub u: Mat,
}

impl Diagonal {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

pub fn diagonalize(m: &Mat, cols: usize) -> Diagonal {
    let rows = m.len();
    let mut a = m.clone();
    let mut v = identity(rows);
    let mut u = identity(cols);
    let mut diagonal = Vec::new();
    for t in 0..rows.min(cols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        v.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in u.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            for i in t + 1..rows {
                let q = a[i][t] / p;
                if q != 0 {
                    let (pa, pv) = (a[t].clone(), v[t].clone());
                    a[i].iter_mut().zip(&pa).for_each(|(x, y)| *x -= q * y);
                    v[i].iter_mut().zip(&pv).for_each(|(x, y)| *x -= q * y);
                }
            }
            for j in t + 1..cols {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().chain(u.iter_mut()) {
                        row[j] -= q * row[t];
                    }
                }
            }
            let leftover = (t + 1..rows)
                .map(|i| (i, t))
                .chain((t + 1..cols).map(|j| (t, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs());
            match leftover {
                None => break,
                Some((i, j)) if j == t => {
                    a.swap(t, i);
                    v.swap(t, i);
                }
                Some((_, j)) => {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    for row in u.iter_mut() {
                        row.swap(t, j);
                    }
                }
            }
        }
        if a[t][t] < 0 {
            a[t].iter_mut().for_each(|x| *x = -*x);
            v[t].iter_mut().for_each(|x| *x = -*x);
        }
        diagonal.push(a[t][t]);
    }
    Diagonal { diagonal, v, u }
}

/// Basis of the integer kernel of `m`, one vector per basis element.
pub fn kernel(m: &Mat, cols: usize) -> Vec<Vec<i128>> {
    let d = diagonalize(m, cols);
    (d.rank()..cols).map(|c| d.u.iter().map(|row| row[c]).collect()).collect()
}

/// Row Hermite normal form of the lattice spanned by `rows`; zero rows dropped.
pub fn row_hnf(mut rows: Mat) -> Mat {
    let cols = rows.first().map_or(0, Vec::len);
    let mut out: Mat = Vec::new();
    for c in 0..cols {
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][c] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            for &i in &nonzero {
                if i != p {
                    let q = rows[i][c] / rows[p][c];
                    let pivot = rows[p].clone();
                    rows[i].iter_mut().zip(&pivot).for_each(|(x, y)| *x -= q * y);
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][c] != 0) {
            let mut r = rows.remove(i);
            if r[c] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(r);
        }
    }
    for k in 0..out.len() {
        let c = out[k].iter().position(|&x| x != 0).unwrap();
        for i in 0..k {
            let q = out[i][c].div_euclid(out[k][c]);
            let pivot = out[k].clone();
            out[i].iter_mut().zip(&pivot).for_each(|(x, y)| *x -= q * y);
        }
    }
    out
}

/// Whether some real `u` satisfies `a·u > 0` in every row (Fourier–Motzkin).
pub fn strictly_feasible(a: &Mat, vars: usize) -> bool {
    let mut rows: Mat = a.clone();
    for k in 0..vars {
        let (pos, rest): (Mat, Mat) = rows.into_iter().partition(|r| r[k] > 0);
        let (neg, zero): (Mat, Mat) = rest.into_iter().partition(|r| r[k] < 0);
        rows = zero;
        if pos.is_empty() || neg.is_empty() {
            continue;
        }
        for p in &pos {
            for n in &neg {
                let (a, b) = (-n[k], p[k]);
                let mut r: Vec<i128> = p.iter().zip(n).map(|(x, y)| a * x + b * y).collect();
                let g = r.iter().fold(0, |g, &x| gcd(g, x));
                if g > 1 {
                    r.iter_mut().for_each(|x| *x /= g);
                }
                rows.push(r);
            }
        }
        rows.sort();
        rows.dedup();
    }
    rows.is_empty()
}
