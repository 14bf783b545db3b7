//! Exact convex hulls of lattice point sets.
//!
//! The hull is built by a placing triangulation: points are inserted one at a
//! time and every boundary facet visible from a new point spawns the simplex
//! spanned by that facet and the point. Facet normals are integer cofactor
//! vectors, so visibility tests and simplex volumes are exact.

use std::collections::{BTreeSet, HashMap};

/// Lattice point.
pub type Point = Vec<i64>;

#[derive(Debug, Clone)]
pub struct Hull {
    /// Dimension of the affine hull.
    pub dim: usize,
    /// Points on the boundary of the hull; contains every vertex.
    pub boundary: Vec<Point>,
    /// `dim!` times the `dim`-dimensional volume.
    pub scaled_volume: i128,
}

/// Determinant of a small integer matrix by fraction-free elimination.
pub fn det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Affine rank of the points together with the indices of an affinely
/// independent subset and the coordinates onto which projection is injective.
fn affine_basis(points: &[Point]) -> (Vec<usize>, Vec<usize>) {
    let origin = &points[0];
    let mut rows: Vec<(usize, Vec<i128>)> = Vec::new();
    let mut chosen = vec![0];
    for (idx, p) in points.iter().enumerate().skip(1) {
        let mut v: Vec<i128> = p.iter().zip(origin).map(|(a, b)| (a - b) as i128).collect();
        for (pivot, row) in &rows {
            if v[*pivot] != 0 {
                let (a, b) = (row[*pivot], v[*pivot]);
                for (x, r) in v.iter_mut().zip(row) {
                    *x = *x * a - r * b;
                }
                let g = v.iter().fold(0, |g, &x| gcd(g, x));
                if g > 1 {
                    v.iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        if let Some(pivot) = v.iter().position(|&x| x != 0) {
            rows.push((pivot, v));
            chosen.push(idx);
        }
    }
    let mut pivots: Vec<usize> = rows.iter().map(|(p, _)| *p).collect();
    pivots.sort_unstable();
    (chosen, pivots)
}

struct Facet {
    vertices: Vec<usize>,
    normal: Vec<i128>,
    offset: i128,
}

impl Facet {
    fn height(&self, p: &[i128]) -> i128 {
        self.normal.iter().zip(p).map(|(a, b)| a * b).sum::<i128>() - self.offset
    }
}

/// Outward facet through `vertices`; `interior` is `(d+1)` times an interior point.
fn make_facet(points: &[Vec<i128>], vertices: Vec<usize>, interior: &[i128]) -> Facet {
    let d = interior.len();
    let base = &points[vertices[0]];
    let rows: Vec<Vec<i128>> =
        vertices[1..].iter().map(|&v| points[v].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    let mut normal = Vec::with_capacity(d);
    for j in 0..d {
        let minor: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
            .collect();
        let sign = if (d - 1 + j).is_multiple_of(2) { 1 } else { -1 };
        normal.push(sign * det(minor));
    }
    let mut offset: i128 = normal.iter().zip(base).map(|(a, b)| a * b).sum();
    let inside: i128 = normal.iter().zip(interior).map(|(a, b)| a * b).sum::<i128>() - (d as i128 + 1) * offset;
    if inside > 0 {
        normal.iter_mut().for_each(|x| *x = -*x);
        offset = -offset;
    }
    Facet { vertices, normal, offset }
}

/// Convex hull of a nonempty set of lattice points of equal dimension.
pub fn hull(points: &[Point]) -> Hull {
    let unique: Vec<Point> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let (chosen, pivots) = affine_basis(&unique);
    let d = pivots.len();
    match d {
        0 => return Hull { dim: 0, boundary: unique, scaled_volume: 1 },
        1 => {
            let c = pivots[0];
            let lo = unique.iter().min_by_key(|p| p[c]).unwrap().clone();
            let hi = unique.iter().max_by_key(|p| p[c]).unwrap().clone();
            let len = (hi[c] - lo[c]) as i128;
            return Hull { dim: 1, boundary: vec![lo, hi], scaled_volume: len };
        }
        _ => {}
    }

    let projected: Vec<Vec<i128>> = unique.iter().map(|p| pivots.iter().map(|&c| p[c] as i128).collect()).collect();
    let interior: Vec<i128> = (0..d).map(|j| chosen.iter().map(|&i| projected[i][j]).sum()).collect();

    let mut facets: Vec<Facet> = (0..=d)
        .map(|skip| {
            let verts = chosen.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| i).collect();
            make_facet(&projected, verts, &interior)
        })
        .collect();
    let mut scaled_volume = facets[0].height(&projected[chosen[0]]).abs();

    let in_simplex: BTreeSet<usize> = chosen.iter().copied().collect();
    for idx in 0..projected.len() {
        if in_simplex.contains(&idx) {
            continue;
        }
        let p = &projected[idx];
        let heights: Vec<i128> = facets.iter().map(|f| f.height(p)).collect();
        if heights.iter().all(|&h| h <= 0) {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for (f, &h) in facets.iter().zip(&heights) {
            if h <= 0 {
                continue;
            }
            scaled_volume += h;
            for k in 0..d {
                let mut ridge: Vec<usize> =
                    f.vertices.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &v)| v).collect();
                ridge.sort_unstable();
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> = ridges.into_iter().filter(|(_, c)| *c == 1).map(|(r, _)| r).collect();
        horizon.sort();
        let mut kept: Vec<Facet> =
            facets.into_iter().zip(&heights).filter(|(_, &h)| h <= 0).map(|(f, _)| f).collect();
        for mut ridge in horizon {
            ridge.push(idx);
            kept.push(make_facet(&projected, ridge, &interior));
        }
        facets = kept;
    }

    let on_boundary: BTreeSet<usize> = facets.iter().flat_map(|f| f.vertices.iter().copied()).collect();
    Hull { dim: d, boundary: on_boundary.into_iter().map(|i| unique[i].clone()).collect(), scaled_volume }
}
