//! Manhattan routing.
//!
//! [`route_manhattan`] draws an unobstructed L-shaped connection.
//! [`RoutingPlane`] routes nets one after another on a lattice of horizontal
//! and vertical tracks, keeping every earlier net as an obstacle. Two styles
//! are supported: crossing-averse routes never touch an earlier net, while
//! shortest routes minimise length first and may cross earlier nets at right
//! angles. Fences close extra areas to the next route, and an anchor
//! rectangle makes routes of equal length and crossings prefer staying close
//! to it.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RouteStyle {
    /// Never intersect a previously routed net; detour if needed.
    CrossingAverse,
    /// Minimise length, then crossings, then bends.
    Shortest,
}

/// Travel direction on the lattice. `y` grows towards the south.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heading {
    East,
    West,
    North,
    South,
}

impl Heading {
    const ALL: [Heading; 4] = [Heading::East, Heading::West, Heading::North, Heading::South];

    fn index(self) -> usize {
        match self {
            Heading::East => 0,
            Heading::West => 1,
            Heading::North => 2,
            Heading::South => 3,
        }
    }

    fn is_horizontal(self) -> bool {
        matches!(self, Heading::East | Heading::West)
    }

    fn reverse(self) -> Heading {
        match self {
            Heading::East => Heading::West,
            Heading::West => Heading::East,
            Heading::North => Heading::South,
            Heading::South => Heading::North,
        }
    }
}

/// Unobstructed connection from `from` to `to`: a straight segment when the
/// points are aligned, otherwise one bend. Both styles give the Manhattan
/// length since nothing is in the way.
pub fn route_manhattan(from: Point, to: Point, style: RouteStyle) -> Vec<Point> {
    let _ = style;
    if from.x == to.x || from.y == to.y {
        return vec![from, to];
    }
    vec![from, Point::new(to.x, from.y), to]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Free,
    Blocked,
    /// An earlier net runs straight through horizontally.
    PassH,
    /// An earlier net runs straight through vertically.
    PassV,
}

/// A lattice of routing tracks with the obstacles of earlier nets.
#[derive(Debug, Clone)]
pub struct RoutingPlane {
    xs: Vec<i64>,
    ys: Vec<i64>,
    nodes: Vec<Node>,
    // edge (ix, iy) -> (ix + 1, iy)
    used_h: Vec<bool>,
    // edge (ix, iy) -> (ix, iy + 1)
    used_v: Vec<bool>,
    // nodes new routes may not enter, terminals excepted
    fenced: Vec<bool>,
    // equal-length routes prefer to stay close to this rectangle
    anchor: Option<(Point, Point)>,
    search: Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Cost {
    length: i64,
    crossings: u32,
    drift: i64,
    bends: u32,
}

const UNREACHED: Cost = Cost {
    length: i64::MAX,
    crossings: u32::MAX,
    drift: i64::MAX,
    bends: u32::MAX,
};

impl RoutingPlane {
    /// Builds the lattice spanned by the given track coordinates.
    pub fn new(xs: impl IntoIterator<Item = i64>, ys: impl IntoIterator<Item = i64>) -> Self {
        let mut xs: Vec<i64> = xs.into_iter().collect();
        let mut ys: Vec<i64> = ys.into_iter().collect();
        xs.sort_unstable();
        xs.dedup();
        ys.sort_unstable();
        ys.dedup();
        let n = xs.len() * ys.len();
        RoutingPlane {
            nodes: vec![Node::Free; n],
            used_h: vec![false; n],
            used_v: vec![false; n],
            fenced: vec![false; n],
            anchor: None,
            search: Search::default(),
            xs,
            ys,
        }
    }

    pub fn size(&self) -> (usize, usize) {
        (self.xs.len(), self.ys.len())
    }

    fn id(&self, ix: usize, iy: usize) -> usize {
        iy * self.xs.len() + ix
    }

    fn locate(&self, p: Point) -> Option<(usize, usize)> {
        let ix = self.xs.binary_search(&p.x).ok()?;
        let iy = self.ys.binary_search(&p.y).ok()?;
        Some((ix, iy))
    }

    fn point(&self, id: usize) -> Point {
        let w = self.xs.len();
        Point::new(self.xs[id % w], self.ys[id / w])
    }

    fn lattice_node(&self, p: Point, what: &str) -> Result<usize> {
        self.locate(p)
            .map(|(ix, iy)| self.id(ix, iy))
            .ok_or_else(|| Error::invariant(format!("{what} {p:?} is not on the routing lattice")))
    }

    /// Blocks every lattice node inside the closed rectangle.
    pub fn block_rect(&mut self, min: Point, max: Point) {
        let x0 = self.xs.partition_point(|&x| x < min.x);
        let x1 = self.xs.partition_point(|&x| x <= max.x);
        let y0 = self.ys.partition_point(|&y| y < min.y);
        let y1 = self.ys.partition_point(|&y| y <= max.y);
        for iy in y0..y1 {
            for ix in x0..x1 {
                let id = self.id(ix, iy);
                self.nodes[id] = Node::Blocked;
            }
        }
    }

    /// Reserves a lattice point, typically a terminal of a later net.
    pub fn block_point(&mut self, p: Point) -> Result<()> {
        let id = self.lattice_node(p, "blocked point")?;
        self.nodes[id] = Node::Blocked;
        Ok(())
    }

    /// Keeps later routes out of the given closed rectangles, replacing any
    /// earlier fences. Unlike [`block_rect`](Self::block_rect) this does not
    /// change the lattice, so lifting the fences frees the area again.
    pub fn set_fences(&mut self, fences: &[(Point, Point)]) {
        self.fenced.clear();
        self.fenced.resize(self.nodes.len(), false);
        for &(a, b) in fences {
            let x0 = self.xs.partition_point(|&x| x < a.x.min(b.x));
            let x1 = self.xs.partition_point(|&x| x <= a.x.max(b.x));
            let y0 = self.ys.partition_point(|&y| y < a.y.min(b.y));
            let y1 = self.ys.partition_point(|&y| y <= a.y.max(b.y));
            for iy in y0..y1 {
                let row = self.id(0, iy);
                self.fenced[row + x0..row + x1].fill(true);
            }
        }
    }

    /// Among routes of equal length and crossings, prefer those that keep
    /// close to the rectangle `min`..`max`.
    pub fn set_anchor(&mut self, min: Point, max: Point) {
        self.anchor = Some((min, max));
    }

    /// Edge length weighted by how far `p` lies outside the anchor.
    fn drift(&self, p: Point, len: i64) -> i64 {
        self.anchor.map_or(0, |(a, b)| {
            let dx = (a.x - p.x).max(p.x - b.x).max(0);
            let dy = (a.y - p.y).max(p.y - b.y).max(0);
            (dx.max(dy) / 1024).saturating_mul(len / 1024)
        })
    }

    fn neighbour(&self, id: usize, h: Heading) -> Option<(usize, usize)> {
        // returns (neighbour id, edge slot id)
        let w = self.xs.len();
        let (ix, iy) = (id % w, id / w);
        match h {
            Heading::East if ix + 1 < w => Some((id + 1, id)),
            Heading::West if ix > 0 => Some((id - 1, id - 1)),
            Heading::South if iy + 1 < self.ys.len() => Some((id + w, id)),
            Heading::North if iy > 0 => Some((id - w, id - w)),
            _ => None,
        }
    }

    fn edge_used(&self, slot: usize, h: Heading) -> bool {
        if h.is_horizontal() {
            self.used_h[slot]
        } else {
            self.used_v[slot]
        }
    }

    /// Routes a net from `from` to `to` and commits it as an obstacle.
    ///
    /// `leave` and `arrive` optionally fix the first and last travel
    /// directions, which is how nets meet ports on the side of a block.
    /// Both terminals may be blocked points; every other node on the route
    /// must be free, or for [`RouteStyle::Shortest`] a straight pass of an
    /// earlier net crossed at a right angle.
    pub fn route(
        &mut self,
        net: &str,
        from: Point,
        to: Point,
        style: RouteStyle,
        leave: Option<Heading>,
        arrive: Option<Heading>,
    ) -> Result<Vec<Point>> {
        let src = self.lattice_node(from, "net start")?;
        let dst = self.lattice_node(to, "net end")?;
        if src == dst {
            return Ok(vec![from]);
        }
        let mut search = std::mem::take(&mut self.search);
        search.reset(self.nodes.len() * 4);
        let goal = self.point(dst);
        let h = |p: Point| p.manhattan(goal);

        // Seed with the first step out of the source.
        for dir in Heading::ALL {
            if leave.is_some_and(|l| l != dir) {
                continue;
            }
            if let Some((next, len, crossing)) = self.step(src, dir, dst, style, arrive) {
                let c = Cost {
                    length: len,
                    crossings: crossing as u32,
                    drift: self.drift(self.point(next), len),
                    bends: 0,
                };
                search.relax(next * 4 + dir.index(), c, usize::MAX, h(self.point(next)));
            }
        }

        let mut reached = None;
        while let Some((c, s)) = search.pop() {
            let node = s / 4;
            if node == dst {
                reached = Some(s);
                break;
            }
            let came = Heading::ALL[s % 4];
            let crossing_here = self.nodes[node] != Node::Free;
            for dir in Heading::ALL {
                if dir == came.reverse() || (crossing_here && dir != came) {
                    continue;
                }
                let Some((next, len, crossing)) = self.step(node, dir, dst, style, arrive) else {
                    continue;
                };
                let nc = Cost {
                    length: c.length + len,
                    crossings: c.crossings + crossing as u32,
                    drift: c.drift.saturating_add(self.drift(self.point(next), len)),
                    bends: c.bends + (dir != came) as u32,
                };
                search.relax(next * 4 + dir.index(), nc, s, h(self.point(next)));
            }
        }

        let Some(end) = reached else {
            self.search = search;
            return Err(Error::Unroutable {
                net: net.to_string(),
            });
        };
        let mut chain = vec![end];
        let mut s = end;
        while search.prev[s] != usize::MAX {
            s = search.prev[s];
            chain.push(s);
        }
        self.search = search;
        chain.reverse();
        let mut points = vec![self.point(src)];
        points.extend(chain.iter().map(|&s| self.point(s / 4)));
        self.commit(src, &chain);
        Ok(simplify(points))
    }

    /// One lattice move from `node` heading `dir`: returns the next node, the
    /// edge length and whether the move ends on a crossing.
    fn step(
        &self,
        node: usize,
        dir: Heading,
        dst: usize,
        style: RouteStyle,
        arrive: Option<Heading>,
    ) -> Option<(usize, i64, bool)> {
        let (next, slot) = self.neighbour(node, dir)?;
        if self.edge_used(slot, dir) {
            return None;
        }
        let len = self.point(node).manhattan(self.point(next));
        if next == dst {
            return if arrive.map_or(true, |a| a == dir) {
                Some((next, len, false))
            } else {
                None
            };
        }
        if self.fenced[next] {
            return None;
        }
        match (self.nodes[next], style) {
            (Node::Free, _) => Some((next, len, false)),
            (Node::PassH, RouteStyle::Shortest) if !dir.is_horizontal() => Some((next, len, true)),
            (Node::PassV, RouteStyle::Shortest) if dir.is_horizontal() => Some((next, len, true)),
            _ => None,
        }
    }

    fn commit(&mut self, src: usize, chain: &[usize]) {
        self.nodes[src] = Node::Blocked;
        let mut here = src;
        for (k, &s) in chain.iter().enumerate() {
            let node = s / 4;
            let dir = Heading::ALL[s % 4];
            let (_, slot) = self.neighbour(here, dir).expect("route edge");
            if dir.is_horizontal() {
                self.used_h[slot] = true;
            } else {
                self.used_v[slot] = true;
            }
            let straight = chain.get(k + 1).map(|&t| Heading::ALL[t % 4] == dir);
            self.nodes[node] = match (self.nodes[node], straight) {
                (Node::Free, Some(true)) if dir.is_horizontal() => Node::PassH,
                (Node::Free, Some(true)) => Node::PassV,
                _ => Node::Blocked,
            };
            here = node;
        }
    }
}

/// Reusable A* state over (node, heading) pairs. Entries are valid only
/// when stamped with the current generation, so a new search costs nothing
/// up front.
#[derive(Debug, Default)]
struct Search {
    best: Vec<Cost>,
    prev: Vec<usize>,
    stamp: Vec<u32>,
    generation: u32,
    /// Estimated length, then the remaining cost terms, deepest first on ties.
    heap: BinaryHeap<Reverse<(i64, u32, i64, u32, i64, usize)>>,
}

impl Clone for Search {
    fn clone(&self) -> Self {
        Search::default()
    }
}

impl Search {
    fn reset(&mut self, states: usize) {
        if self.stamp.len() != states || self.generation == u32::MAX {
            self.best = vec![UNREACHED; states];
            self.prev = vec![usize::MAX; states];
            self.stamp = vec![0; states];
            self.generation = 0;
        }
        self.generation += 1;
        self.heap.clear();
    }

    fn best(&self, s: usize) -> Cost {
        if self.stamp[s] == self.generation {
            self.best[s]
        } else {
            UNREACHED
        }
    }

    fn relax(&mut self, s: usize, c: Cost, from: usize, h: i64) {
        if c < self.best(s) {
            self.stamp[s] = self.generation;
            self.best[s] = c;
            self.prev[s] = from;
            self.heap.push(Reverse((
                c.length + h,
                c.crossings,
                c.drift,
                c.bends,
                -c.length,
                s,
            )));
        }
    }

    fn pop(&mut self) -> Option<(Cost, usize)> {
        while let Some(Reverse((_, crossings, drift, bends, neg, s))) = self.heap.pop() {
            let c = Cost {
                length: -neg,
                crossings,
                drift,
                bends,
            };
            if c == self.best(s) {
                return Some((c, s));
            }
        }
        None
    }
}

/// Drops points that lie on a straight run between their neighbours.
fn simplify(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.len() >= 2 {
            let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
            if (a.x == b.x && b.x == p.x) || (a.y == b.y && b.y == p.y) {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}
