use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Index of a grid cell, `y * width + x`.
pub type VertexId = usize;

/// A rectangular 4-connected grid. Row 0 is the northern edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    width: usize,
    height: usize,
    blocked: Vec<bool>,
}

impl Grid {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invariant(
                "grid dimensions positive",
                format!("{width}x{height}"),
            ));
        }
        Ok(Grid {
            width,
            height,
            blocked: vec![false; width * height],
        })
    }

    pub fn with_blocked(width: usize, height: usize, blocked: &[VertexId]) -> Result<Self> {
        let mut grid = Grid::new(width, height)?;
        for &v in blocked {
            if v >= grid.len() {
                return Err(Error::invariant(
                    "blocked cell in range",
                    format!("cell {v} outside a {width}x{height} grid"),
                ));
            }
            grid.blocked[v] = true;
        }
        Ok(grid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of vertices, blocked ones included.
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.len()
    }

    pub fn is_blocked(&self, v: VertexId) -> bool {
        self.blocked[v]
    }

    pub fn is_open(&self, v: VertexId) -> bool {
        self.contains(v) && !self.blocked[v]
    }

    pub fn blocked_cells(&self) -> Vec<VertexId> {
        (0..self.len()).filter(|&v| self.blocked[v]).collect()
    }

    pub fn coords(&self, v: VertexId) -> (usize, usize) {
        (v % self.width, v / self.width)
    }

    pub fn vertex(&self, x: usize, y: usize) -> VertexId {
        y * self.width + x
    }

    /// Open cardinal neighbours of `v` in N, E, S, W order.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        self.check_open(v)?;
        let mut out = Vec::with_capacity(4);
        self.for_each_neighbor(v, |n| out.push(n));
        Ok(out)
    }

    /// Unchecked variant of [`Grid::neighbors`] for hot loops; `v` must be open.
    #[inline]
    pub(crate) fn for_each_neighbor(&self, v: VertexId, mut f: impl FnMut(VertexId)) {
        let (x, y) = self.coords(v);
        if y > 0 && !self.blocked[v - self.width] {
            f(v - self.width);
        }
        if x + 1 < self.width && !self.blocked[v + 1] {
            f(v + 1);
        }
        if y + 1 < self.height && !self.blocked[v + self.width] {
            f(v + self.width);
        }
        if x > 0 && !self.blocked[v - 1] {
            f(v - 1);
        }
    }

    pub(crate) fn check_open(&self, v: VertexId) -> Result<()> {
        if !self.contains(v) {
            return Err(Error::Input(format!(
                "vertex {v} outside a {}x{} grid",
                self.width, self.height
            )));
        }
        if self.blocked[v] {
            return Err(Error::Input(format!("vertex {v} is blocked")));
        }
        Ok(())
    }

    pub fn are_adjacent(&self, a: VertexId, b: VertexId) -> bool {
        if !self.is_open(a) || !self.is_open(b) {
            return false;
        }
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        ax.abs_diff(bx) + ay.abs_diff(by) == 1
    }

    /// Shortest open path from `from` to `to`, both endpoints included.
    /// Ties resolve through the N, E, S, W expansion order.
    pub fn shortest_path(&self, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
        if !self.is_open(from) || !self.is_open(to) {
            return None;
        }
        let mut parent = vec![usize::MAX; self.len()];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            self.for_each_neighbor(v, |n| {
                if parent[n] == usize::MAX {
                    parent[n] = v;
                    queue.push_back(n);
                }
            });
        }
        if parent[to] == usize::MAX {
            return None;
        }
        let mut path = vec![to];
        let mut v = to;
        while v != from {
            v = parent[v];
            path.push(v);
        }
        path.reverse();
        Some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_has_four_neighbors_in_compass_order() {
        let g = Grid::new(3, 3).unwrap();
        assert_eq!(g.neighbors(4).unwrap(), vec![1, 5, 7, 3]);
    }

    #[test]
    fn corner_neighbors() {
        let g = Grid::new(3, 3).unwrap();
        assert_eq!(g.neighbors(0).unwrap(), vec![1, 3]);
    }

    #[test]
    fn blocked_neighbor_excluded() {
        let g = Grid::with_blocked(3, 3, &[1]).unwrap();
        assert_eq!(g.neighbors(4).unwrap(), vec![5, 7, 3]);
    }

    #[test]
    fn invalid_vertex_rejected() {
        let g = Grid::with_blocked(3, 3, &[1]).unwrap();
        assert!(matches!(g.neighbors(9), Err(Error::Input(_))));
        assert!(matches!(g.neighbors(1), Err(Error::Input(_))));
    }

    #[test]
    fn edges_are_bidirectional() {
        let g = Grid::with_blocked(4, 3, &[5, 6]).unwrap();
        for v in (0..g.len()).filter(|&v| g.is_open(v)) {
            for n in g.neighbors(v).unwrap() {
                assert!(g.neighbors(n).unwrap().contains(&v));
            }
        }
    }

    #[test]
    fn shortest_path_routes_around_blocks() {
        let g = Grid::with_blocked(3, 3, &[1, 4]).unwrap();
        let p = g.shortest_path(0, 2).unwrap();
        assert_eq!(p.len(), 7);
        assert!(p.windows(2).all(|w| g.are_adjacent(w[0], w[1])));
    }
}
