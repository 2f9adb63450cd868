//! Bounding-box tree over polyline edges for nearest-edge queries.

use crate::geom::{point_segment_distance, BoundingBox, Point2};

const LEAF: usize = 8;

#[derive(Clone, Debug)]
struct Node {
    bbox: BoundingBox,
    /// Leaf: range into `order`. Inner: `start` is the left child, `end` the right.
    start: u32,
    end: u32,
    leaf: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct EdgeTree {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

fn box_distance(b: &BoundingBox, p: Point2) -> f64 {
    let dx = (b.min.x - p.x).max(p.x - b.max.x).max(0.0);
    let dy = (b.min.y - p.y).max(p.y - b.max.y).max(0.0);
    dx.hypot(dy)
}

impl EdgeTree {
    pub(crate) fn new(vertices: &[Point2]) -> Self {
        let n = vertices.len();
        let edge = |e: u32| (vertices[e as usize], vertices[(e as usize + 1) % n]);
        let mid = |e: u32| {
            let (a, b) = edge(e);
            Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
        };
        let mut tree = Self {
            nodes: Vec::with_capacity(2 * n / LEAF + 1),
            order: (0..n as u32).collect(),
        };
        // Explicit stack of (node slot, lo, hi).
        tree.nodes.push(Node {
            bbox: BoundingBox::of_points(vertices),
            start: 0,
            end: 0,
            leaf: true,
        });
        let mut stack = vec![(0usize, 0usize, n)];
        while let Some((slot, lo, hi)) = stack.pop() {
            let items = &mut tree.order[lo..hi];
            let pts: Vec<Point2> = items
                .iter()
                .flat_map(|&e| {
                    let (a, b) = edge(e);
                    [a, b]
                })
                .collect();
            let bbox = BoundingBox::of_points(&pts);
            if hi - lo <= LEAF {
                tree.nodes[slot] = Node {
                    bbox,
                    start: lo as u32,
                    end: hi as u32,
                    leaf: true,
                };
                continue;
            }
            let horizontal = bbox.width() >= bbox.height();
            let key = |e: &u32| {
                let m = mid(*e);
                if horizontal {
                    m.x
                } else {
                    m.y
                }
            };
            let half = (hi - lo) / 2;
            items.select_nth_unstable_by(half, |a, b| key(a).total_cmp(&key(b)));
            let left = tree.nodes.len();
            for _ in 0..2 {
                tree.nodes.push(Node {
                    bbox,
                    start: 0,
                    end: 0,
                    leaf: true,
                });
            }
            tree.nodes[slot] = Node {
                bbox,
                start: left as u32,
                end: left as u32 + 1,
                leaf: false,
            };
            stack.push((left, lo, lo + half));
            stack.push((left + 1, lo + half, hi));
        }
        tree
    }

    /// Nearest edge to `p` and its distance.
    pub(crate) fn nearest(&self, vertices: &[Point2], p: Point2) -> Option<(usize, f64)> {
        let n = vertices.len();
        let mut best: Option<(usize, f64)> = None;
        let mut stack = vec![(0u32, box_distance(&self.nodes[0].bbox, p))];
        while let Some((id, d_box)) = stack.pop() {
            if best.is_some_and(|(_, bd)| d_box >= bd) {
                continue;
            }
            let node = &self.nodes[id as usize];
            if node.leaf {
                for &e in &self.order[node.start as usize..node.end as usize] {
                    let e = e as usize;
                    let d = point_segment_distance(p, vertices[e], vertices[(e + 1) % n]);
                    if best.is_none_or(|(be, bd)| d < bd || (d == bd && e < be)) {
                        best = Some((e, d));
                    }
                }
                continue;
            }
            let (a, b) = (node.start, node.end);
            let da = box_distance(&self.nodes[a as usize].bbox, p);
            let db = box_distance(&self.nodes[b as usize].bbox, p);
            // Push the farther child first so the nearer one is popped next.
            if da <= db {
                stack.push((b, db));
                stack.push((a, da));
            } else {
                stack.push((a, da));
                stack.push((b, db));
            }
        }
        best
    }
}
