//! Brute-force enumeration of ice configurations with domain wall boundary
//! conditions, independent of any determinant formula.
//!
//! Edge conventions: a horizontal edge is `true` when its arrow points
//! right, a vertical edge is `true` when its arrow points up. Rows are
//! numbered from the top. On the boundary the horizontal arrows point out
//! of the lattice and the vertical arrows point in.
//!
//! Vertex types: a vertex is `c` when its two horizontal arrows are both in
//! or both out. Otherwise the horizontal and vertical lines pass straight
//! through; `a` is (right, up) or (left, down) and `b` the other two.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::{Error, Precision, Result};

pub const MAX_N: usize = 6;

/// One DWBC configuration on an `N × N` lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowGrid {
    n: usize,
    /// `horizontal[i][j]`: edge left of vertex `(i, j)`; `j = N` is the right
    /// boundary.
    horizontal: Vec<Vec<bool>>,
    /// `vertical[i][j]`: edge above vertex `(i, j)`; `i = N` is the bottom
    /// boundary.
    vertical: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexType {
    A,
    B,
    C,
}

fn classify(left: bool, right: bool, top: bool, bottom: bool) -> VertexType {
    if left != right {
        VertexType::C
    } else if left == bottom {
        debug_assert_eq!(top, bottom);
        VertexType::A
    } else {
        VertexType::B
    }
}

/// Number of arrows pointing into a vertex.
fn arrows_in(left: bool, right: bool, top: bool, bottom: bool) -> u8 {
    left as u8 + !right as u8 + !top as u8 + bottom as u8
}

impl ArrowGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex(&self, i: usize, j: usize) -> VertexType {
        classify(
            self.horizontal[i][j],
            self.horizontal[i][j + 1],
            self.vertical[i][j],
            self.vertical[i + 1][j],
        )
    }

    /// `(n_a, n_b, n_c)`.
    pub fn census(&self) -> (u32, u32, u32) {
        let mut c = (0, 0, 0);
        for i in 0..self.n {
            for j in 0..self.n {
                match self.vertex(i, j) {
                    VertexType::A => c.0 += 1,
                    VertexType::B => c.1 += 1,
                    VertexType::C => c.2 += 1,
                }
            }
        }
        c
    }

    /// Ice rule at every vertex and DWBC on the boundary.
    pub fn is_valid(&self) -> bool {
        let n = self.n;
        let boundary = (0..n).all(|k| {
            !self.horizontal[k][0] && self.horizontal[k][n] && !self.vertical[0][k] && self.vertical[n][k]
        });
        boundary
            && (0..n).all(|i| {
                (0..n).all(|j| {
                    arrows_in(
                        self.horizontal[i][j],
                        self.horizontal[i][j + 1],
                        self.vertical[i][j],
                        self.vertical[i + 1][j],
                    ) == 2
                })
            })
    }

    /// The alternating sign matrix: `+1` on `c` vertices whose horizontal
    /// arrows point out, `-1` on those whose arrows point in.
    pub fn to_asm(&self) -> Vec<Vec<i8>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| match (self.horizontal[i][j], self.horizontal[i][j + 1]) {
                        (false, true) => 1,
                        (true, false) => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect()
    }
}

/// Vertex-type census of every DWBC configuration of one size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumResult {
    pub n: usize,
    /// `(n_a, n_b, n_c)` → number of configurations with that census.
    pub census: BTreeMap<(u32, u32, u32), u64>,
    pub config_count: u64,
}

fn check_size(n: usize) -> Result<()> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 1, max: MAX_N });
    }
    Ok(())
}

/// Calls `visit` on every DWBC configuration, found by a row-by-row sweep
/// with ice-rule propagation.
pub fn for_each_configuration<F: FnMut(&ArrowGrid)>(n: usize, mut visit: F) -> Result<()> {
    check_size(n)?;
    let mut grid = ArrowGrid {
        n,
        horizontal: vec![vec![false; n + 1]; n],
        vertical: vec![vec![false; n]; n + 1],
    };
    for i in 0..n {
        grid.horizontal[i][0] = false;
    }
    sweep(&mut grid, 0, &mut visit);
    Ok(())
}

fn sweep<F: FnMut(&ArrowGrid)>(grid: &mut ArrowGrid, cell: usize, visit: &mut F) {
    let n = grid.n;
    if cell == n * n {
        if grid.vertical[n].iter().all(|&up| up) {
            visit(grid);
        }
        return;
    }
    let (i, j) = (cell / n, cell % n);
    let left = grid.horizontal[i][j];
    let top = grid.vertical[i][j];
    for (right, bottom) in [(false, false), (false, true), (true, false), (true, true)] {
        if arrows_in(left, right, top, bottom) != 2 {
            continue;
        }
        // The last vertex of a row must send its arrow out to the right.
        if j == n - 1 && !right {
            continue;
        }
        grid.horizontal[i][j + 1] = right;
        grid.vertical[i + 1][j] = bottom;
        sweep(grid, cell + 1, visit);
    }
}

/// Enumerates all DWBC configurations for `1 ≤ N ≤ 6`.
pub fn enumerate_dwbc(n: usize) -> Result<EnumResult> {
    let mut census = BTreeMap::new();
    let mut config_count = 0;
    for_each_configuration(n, |g| {
        *census.entry(g.census()).or_insert(0) += 1;
        config_count += 1;
    })?;
    Ok(EnumResult {
        n,
        census,
        config_count,
    })
}

/// `Σ a^{n_a} b^{n_b} c^{n_c}` over all configurations.
pub fn z_bruteforce(n: usize, a: &Float, b: &Float, c: &Float, p: Precision) -> Result<Float> {
    let e = enumerate_dwbc(n)?;
    Ok(z_from_census(&e, a, b, c, p))
}

pub fn z_from_census(e: &EnumResult, a: &Float, b: &Float, c: &Float, p: Precision) -> Float {
    let w = p.work();
    let mut z = Float::with_val(w, 0);
    for (&(na, nb, nc), &count) in &e.census {
        let term = Float::with_val(w, a.pow(na))
            * Float::with_val(w, b.pow(nb))
            * Float::with_val(w, c.pow(nc));
        z += term * Integer::from(count);
    }
    Float::with_val(p.bits(), z)
}

/// Number of DWBC configurations, i.e. of `N × N` alternating sign matrices.
pub fn asm_count(n: usize) -> Result<u64> {
    Ok(enumerate_dwbc(n)?.config_count)
}

/// Confirms the vertex labelling through `Z₁ = c` and `Z₂ = c²(a² + b²)`.
pub fn labeling_is_consistent() -> bool {
    let one = enumerate_dwbc(1).map(|e| e.census.into_iter().collect::<Vec<_>>());
    let two = enumerate_dwbc(2).map(|e| e.census.into_iter().collect::<Vec<_>>());
    matches!(one, Ok(v) if v == [((0, 0, 1), 1)])
        && matches!(two, Ok(v) if v == [((0, 2, 2), 1), ((2, 0, 2), 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lattices() {
        let one = enumerate_dwbc(1).unwrap();
        assert_eq!(one.config_count, 1);
        assert_eq!(one.census.get(&(0, 0, 1)), Some(&1));
        let two = enumerate_dwbc(2).unwrap();
        assert_eq!(two.config_count, 2);
        assert!(labeling_is_consistent());
    }

    #[test]
    fn asm_sequence() {
        let counts: Vec<u64> = (1..=6).map(|n| asm_count(n).unwrap()).collect();
        assert_eq!(counts, [1, 2, 7, 42, 429, 7436]);
    }

    #[test]
    fn census_invariants() {
        for n in 1..=5 {
            let e = enumerate_dwbc(n).unwrap();
            for (&(a, b, c), &count) in &e.census {
                assert_eq!((a + b + c) as usize, n * n);
                assert_eq!(c % 2, n as u32 % 2, "c vertices have the parity of N");
                assert_eq!(e.census.get(&(b, a, c)), Some(&count), "a/b reflection");
            }
            assert_eq!(e.census.values().sum::<u64>(), e.config_count);
        }
    }

    #[test]
    fn every_configuration_is_valid_and_gives_an_asm() {
        for_each_configuration(4, |g| {
            assert!(g.is_valid());
            let m = g.to_asm();
            for k in 0..4 {
                assert_eq!(m[k].iter().map(|&x| x as i32).sum::<i32>(), 1);
                assert_eq!(m.iter().map(|r| r[k] as i32).sum::<i32>(), 1);
            }
        })
        .unwrap();
    }

    /// Aztec diamond tilings: `Σ_ASM 2^{N₊}` with `N₊ = (n_c + N)/2` the
    /// number of +1 entries, so `Z_N(1, 1, √2)` is short by `2^{N/2}`.
    #[test]
    fn aztec_counts() {
        let p = Precision::new(128).unwrap();
        let one = Float::with_val(128, 1);
        let sqrt2 = Float::with_val(128, 2).sqrt();
        for n in 1..=5 {
            let z = z_bruteforce(n, &one, &one, &sqrt2, p).unwrap();
            let z = z * Float::with_val(128, 2).pow(Float::with_val(128, n) / 2u32);
            let expect = Float::with_val(128, 1) << (n * (n + 1) / 2) as u32;
            let err = Float::with_val(128, &z - &expect).abs() / &expect;
            assert!(err < 1e-30, "N={n}");
        }
    }

    #[test]
    fn out_of_range() {
        assert!(enumerate_dwbc(0).is_err());
        assert!(enumerate_dwbc(7).is_err());
    }
}
