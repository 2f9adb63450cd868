//! Uniform bucket grid over a bounding box.
//!
//! Items register in every cell their bounding rectangle overlaps. Cell
//! coordinates come from one monotone function, so an item whose extent
//! contains a query coordinate is always registered in that coordinate's
//! column (or row).

use crate::geom::{BoundingBox, Point2};

#[derive(Clone, Debug)]
pub(crate) struct UniformGrid {
    origin: Point2,
    cell_w: f64,
    cell_h: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
    spans: Vec<[usize; 4]>,
}

impl UniformGrid {
    pub(crate) fn new(bbox: BoundingBox, nx: usize, ny: usize) -> Self {
        let nx = nx.max(1);
        let ny = ny.max(1);
        let w = bbox.width().max(f64::MIN_POSITIVE);
        let h = bbox.height().max(f64::MIN_POSITIVE);
        Self {
            origin: bbox.min,
            cell_w: w / nx as f64,
            cell_h: h / ny as f64,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
            spans: Vec::new(),
        }
    }

    /// Grid sized for roughly `items` entries of small extent.
    pub(crate) fn for_items(bbox: BoundingBox, items: usize) -> Self {
        let side = ((items as f64).sqrt().ceil() as usize).clamp(1, 1024);
        Self::new(bbox, side, side)
    }

    #[inline]
    pub(crate) fn col(&self, x: f64) -> usize {
        let c = ((x - self.origin.x) / self.cell_w).floor();
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(self.nx - 1)
        }
    }

    #[inline]
    pub(crate) fn row(&self, y: f64) -> usize {
        let r = ((y - self.origin.y) / self.cell_h).floor();
        if r <= 0.0 {
            0
        } else {
            (r as usize).min(self.ny - 1)
        }
    }

    pub(crate) fn nx(&self) -> usize {
        self.nx
    }

    pub(crate) fn ny(&self) -> usize {
        self.ny
    }

    pub(crate) fn row_bottom(&self, row: usize) -> f64 {
        self.origin.y + row as f64 * self.cell_h
    }

    pub(crate) fn col_left(&self, col: usize) -> f64 {
        self.origin.x + col as f64 * self.cell_w
    }

    pub(crate) fn cell_size(&self) -> (f64, f64) {
        (self.cell_w, self.cell_h)
    }

    /// Registers an item covering `[x0, x1] × [y0, y1]`; ids are assigned in order.
    pub(crate) fn insert(&mut self, x0: f64, x1: f64, y0: f64, y1: f64) -> usize {
        let id = self.spans.len();
        let span = [self.col(x0), self.col(x1), self.row(y0), self.row(y1)];
        for iy in span[2]..=span[3] {
            for ix in span[0]..=span[1] {
                self.cells[iy * self.nx + ix].push(id as u32);
            }
        }
        self.spans.push(span);
        id
    }

    #[inline]
    pub(crate) fn cell(&self, ix: usize, iy: usize) -> &[u32] {
        &self.cells[iy * self.nx + ix]
    }

    /// Every item registered in column `ix`, each reported once.
    pub(crate) fn column_items(&self, ix: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.ny).flat_map(move |iy| {
            self.cell(ix, iy)
                .iter()
                .map(|&id| id as usize)
                .filter(move |&id| self.spans[id][2] == iy)
        })
    }

    /// Every item registered in row `iy`, each reported once.
    pub(crate) fn row_items(&self, iy: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.nx).flat_map(move |ix| {
            self.cell(ix, iy)
                .iter()
                .map(|&id| id as usize)
                .filter(move |&id| self.spans[id][0] == ix)
        })
    }
}
