//! Chessboard traversal of the interior cells.

use crate::image::Raster;

/// Colour/row-parity class of an interior cell. Cells where `i + j` is
/// even are "blue".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    BlueOdd,
    BlueEven,
    WhiteOdd,
    WhiteEven,
}

impl Phase {
    pub const ORDER: [Phase; 4] = [Phase::BlueOdd, Phase::BlueEven, Phase::WhiteOdd, Phase::WhiteEven];

    pub fn of(i: usize, j: usize) -> Phase {
        match ((i + j).is_multiple_of(2), i % 2 == 1) {
            (true, true) => Phase::BlueOdd,
            (true, false) => Phase::BlueEven,
            (false, true) => Phase::WhiteOdd,
            (false, false) => Phase::WhiteEven,
        }
    }
}

/// Embedding order over interior cells: blue odd rows, blue even rows,
/// white odd rows, white even rows, raster order inside each group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOrder {
    width: usize,
    cells: Vec<usize>,
}

impl ScanOrder {
    pub fn new(width: usize, height: usize) -> Self {
        let mut cells = Vec::with_capacity(width.saturating_sub(2) * height.saturating_sub(2));
        for phase in Phase::ORDER {
            for i in 2..height {
                for j in 2..width {
                    if Phase::of(i, j) == phase {
                        cells.push((i - 1) * width + (j - 1));
                    }
                }
            }
        }
        Self { width, cells }
    }

    pub fn for_raster(r: &Raster) -> Self {
        Self::new(r.width(), r.height())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// 0-based linear indices in scan order.
    pub fn linear(&self) -> &[usize] {
        &self.cells
    }

    /// 1-indexed `(row, col)` of the `k`-th (0-based) scan position.
    pub fn position(&self, k: usize) -> (usize, usize) {
        let idx = self.cells[k];
        (idx / self.width + 1, idx % self.width + 1)
    }

    pub fn phase(&self, k: usize) -> Phase {
        let (i, j) = self.position(k);
        Phase::of(i, j)
    }

    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).map(|k| self.position(k))
    }
}
