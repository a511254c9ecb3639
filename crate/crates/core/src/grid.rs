//! Point-to-cell indexing and per-trial coverage tracking.
//!
//! Cells are packed row-major with the first coordinate fastest:
//! `index = Σ c_i · k^i` where `c_i = min(⌊x_i·k⌋, k − 1)`. The clamp sends
//! the closed upper face `x_i = 1` into the last segment.

use crate::bounds::GridSpec;
use crate::error::{Error, Result};

/// Index of one cell of a [`GridSpec`], in `[0, cells)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellIndex(pub u64);

impl CellIndex {
    pub fn value(self) -> u64 {
        self.0
    }
}

/// Maps a point of `[0,1]^d` to its cell on a grid with `k` segments per axis.
pub fn point_to_cell(x: &[f64], k: u64) -> Result<CellIndex> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let kf = k as f64;
    let mut index = 0u64;
    let mut stride = 1u64;
    for (axis, &xi) in x.iter().enumerate() {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::invalid(format!(
                "coordinate {axis} = {xi} lies outside [0, 1]"
            )));
        }
        let segment = ((xi * kf) as u64).min(k - 1);
        index = segment
            .checked_mul(stride)
            .and_then(|v| v.checked_add(index))
            .ok_or_else(|| Error::Overflow("cell index exceeds 64 bits".into()))?;
        if axis + 1 < x.len() {
            stride = stride
                .checked_mul(k)
                .ok_or_else(|| Error::Overflow("cell index exceeds 64 bits".into()))?;
        }
    }
    Ok(CellIndex(index))
}

/// Coverage record for one trial: one bit per cell plus running counters.
#[derive(Debug, Clone)]
pub struct CoverageState {
    words: Vec<u64>,
    cells: u64,
    covered: u64,
    drawn: u64,
}

impl CoverageState {
    /// Allocates `⌈cells/64⌉` words. Fails if that does not fit in memory addressing.
    pub fn new(cells: u64) -> Result<Self> {
        if cells == 0 {
            return Err(Error::invalid("a grid needs at least one cell"));
        }
        let words = usize::try_from(cells.div_ceil(64))
            .map_err(|_| Error::Overflow(format!("{cells} cells do not fit in memory")))?;
        Ok(CoverageState {
            words: vec![0; words],
            cells,
            covered: 0,
            drawn: 0,
        })
    }

    pub fn for_grid(grid: &GridSpec) -> Result<Self> {
        Self::new(grid.cells)
    }

    /// Marks `cell` as sampled. Returns `true` if it was previously uncovered.
    #[inline]
    pub fn record(&mut self, cell: CellIndex) -> bool {
        debug_assert!(cell.0 < self.cells, "cell {} out of range", cell.0);
        let word = &mut self.words[(cell.0 >> 6) as usize];
        let bit = 1u64 << (cell.0 & 63);
        self.drawn += 1;
        if *word & bit == 0 {
            *word |= bit;
            self.covered += 1;
            true
        } else {
            false
        }
    }

    pub fn is_covered(&self, cell: CellIndex) -> bool {
        self.words[(cell.0 >> 6) as usize] & (1u64 << (cell.0 & 63)) != 0
    }

    /// Realized `Z`: the number of cells without a sample.
    pub fn uncovered_count(&self) -> u64 {
        self.cells - self.covered
    }

    pub fn covered_count(&self) -> u64 {
        self.covered
    }

    pub fn samples_drawn(&self) -> u64 {
        self.drawn
    }

    pub fn cells(&self) -> u64 {
        self.cells
    }

    pub fn is_fully_covered(&self) -> bool {
        self.covered == self.cells
    }

    pub fn reset(&mut self) {
        self.words.fill(0);
        self.covered = 0;
        self.drawn = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn point_to_cell_examples() {
        assert_eq!(point_to_cell(&[0.0, 0.0, 0.0], 7).unwrap(), CellIndex(0));
        assert_eq!(point_to_cell(&[1.0, 1.0], 2).unwrap(), CellIndex(3));
        assert_eq!(point_to_cell(&[0.34, 0.72], 3).unwrap(), CellIndex(7));
    }

    #[test]
    fn point_to_cell_rejects_out_of_range() {
        assert!(point_to_cell(&[0.5, 1.01], 3).is_err());
        assert!(point_to_cell(&[-0.1], 3).is_err());
        assert!(point_to_cell(&[f64::NAN], 3).is_err());
        assert!(point_to_cell(&[0.5], 0).is_err());
    }

    #[test]
    fn lattice_hits_every_cell() {
        for (d, k) in [(1u32, 1u64), (1, 7), (2, 5), (3, 4), (2, 64), (4, 8), (6, 4)] {
            let cells = k.pow(d);
            let mut seen = vec![false; cells as usize];
            // Lattice of cell centres plus the upper faces.
            let steps = 2 * k + 1;
            let mut coords = vec![0u64; d as usize];
            loop {
                let x: Vec<f64> = coords.iter().map(|&c| c as f64 / (steps - 1) as f64).collect();
                let idx = point_to_cell(&x, k).unwrap();
                assert!(idx.0 < cells);
                seen[idx.0 as usize] = true;
                let mut axis = 0;
                while axis < coords.len() {
                    coords[axis] += 1;
                    if coords[axis] < steps {
                        break;
                    }
                    coords[axis] = 0;
                    axis += 1;
                }
                if axis == coords.len() {
                    break;
                }
            }
            assert!(seen.iter().all(|&s| s), "d={d} k={k}");
        }
    }

    #[test]
    fn record_sample_examples() {
        let mut s = CoverageState::new(5).unwrap();
        assert_eq!(s.uncovered_count(), 5);
        assert!(s.record(CellIndex(0)));
        assert_eq!((s.covered_count(), s.samples_drawn()), (1, 1));
        assert!(!s.record(CellIndex(0)));
        assert_eq!((s.covered_count(), s.samples_drawn()), (1, 2));
        s.record(CellIndex(3));
        s.record(CellIndex(4));
        assert_eq!(s.uncovered_count(), 2);
        s.record(CellIndex(1));
        s.record(CellIndex(2));
        assert!(s.is_fully_covered());
        assert_eq!(s.uncovered_count(), 0);
        s.reset();
        assert_eq!((s.covered_count(), s.samples_drawn(), s.uncovered_count()), (0, 0, 5));
    }

    #[test]
    fn z_matches_distinct_set() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for cells in [1u64, 2, 63, 64, 65, 130, 1000] {
            let mut s = CoverageState::new(cells).unwrap();
            let mut seen = HashSet::new();
            for _ in 0..300 {
                let c = rng.gen_range(0..cells);
                s.record(CellIndex(c));
                seen.insert(c);
                assert_eq!(s.uncovered_count(), cells - seen.len() as u64);
                assert!(s.covered_count() <= s.samples_drawn());
            }
            for c in 0..cells {
                assert_eq!(s.is_covered(CellIndex(c)), seen.contains(&c));
            }
        }
    }
}
