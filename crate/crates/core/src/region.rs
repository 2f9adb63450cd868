//! Incremental point-location over the trapezoids swept so far.

use rstar::primitives::{GeomWithData, Rectangle};
use rstar::{RTree, AABB};

use crate::geom::Point2;
use crate::sweep::Trapezoid;

type Entry = GeomWithData<Rectangle<[f64; 2]>, usize>;

/// R-tree of swept trapezoids, grown one sweep at a time.
///
/// Sweeps into thin spikes leave many tiny trapezoids in a small area, which
/// a uniform grid over the curve's bounding box cannot separate.
#[derive(Clone, Debug, Default)]
pub struct SweptRegion {
    tree: RTree<Entry>,
    trapezoids: Vec<Trapezoid>,
    owners: Vec<usize>,
}

impl SweptRegion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, trap: Trapezoid, owner: usize) -> usize {
        let id = self.trapezoids.len();
        let (lo, hi) = trap.y_range();
        // the sides are evaluated again at query points; allow for rounding
        let pad = 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
        let rect = Rectangle::from_corners([trap.x_left, lo - pad], [trap.x_right, hi + pad]);
        self.tree.insert(GeomWithData::new(rect, id));
        self.trapezoids.push(trap);
        self.owners.push(owner);
        id
    }

    pub fn len(&self) -> usize {
        self.trapezoids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trapezoids.is_empty()
    }

    pub fn trapezoids(&self) -> &[Trapezoid] {
        &self.trapezoids
    }

    pub fn owner(&self, id: usize) -> usize {
        self.owners[id]
    }

    fn first_matching(&self, p: Point2, margin: f64, hit: impl Fn(&Trapezoid) -> bool) -> Option<usize> {
        let r = (-margin).max(0.0);
        let area = AABB::from_corners([p.x - r, p.y - r], [p.x + r, p.y + r]);
        self.tree
            .locate_in_envelope_intersecting(area)
            .map(|e| e.data)
            .filter(|&i| hit(&self.trapezoids[i]))
            .min()
    }

    /// Oldest trapezoid containing `p` with clearance `margin` (negative inflates).
    pub fn locate(&self, p: Point2, margin: f64) -> Option<usize> {
        self.first_matching(p, margin, |t| t.contains(p, margin))
    }

    /// Like [`locate`](Self::locate) but with the vertical sides closed, so
    /// points on a side shared by two trapezoids are found.
    pub fn locate_closed(&self, p: Point2, margin: f64) -> Option<usize> {
        self.first_matching(p, margin, |t| t.contains_closed_x(p, margin))
    }
}
