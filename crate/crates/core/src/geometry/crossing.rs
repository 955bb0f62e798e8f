//! Same-layer crossing detection.
//!
//! A crossing is a point strictly inside both a horizontal and a vertical
//! segment on the same layer. Shared endpoints, bends and T-junctions do not
//! count, and segments on different layers never interact. Two segments
//! lying on top of each other on one layer make the layout invalid.
//!
//! Crossings are found with a left-to-right sweep over segment endpoints
//! keeping the active horizontals ordered by `y`.

use std::collections::{BTreeSet, HashMap};
use std::ops::Bound::Excluded;

use super::{Layer, PhotonicLayout, Segment, WaveguideId};
use crate::error::{Error, Result};

/// Crossing positions of every segment and waveguide of a layout.
#[derive(Debug, Clone)]
pub struct CrossingIndex {
    per_segment: Vec<Vec<i64>>,
    per_waveguide: HashMap<WaveguideId, Vec<i64>>,
    points: usize,
}

/// What part of a layout a crossing count refers to.
#[derive(Debug, Clone, Copy)]
pub enum Selection<'a> {
    /// A whole waveguide.
    Waveguide(WaveguideId),
    /// Layout segments by index.
    Segments(&'a [usize]),
    /// Arc ranges `(waveguide, from, to)` along waveguides; crossings exactly
    /// at `from` or `to` are excluded.
    Pieces(&'a [(WaveguideId, i64, i64)]),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    End,
    Query,
    Start,
}

fn layer_slot(layer: Layer) -> usize {
    match layer {
        Layer::One => 0,
        Layer::Two => 1,
    }
}

impl CrossingIndex {
    pub fn build(layout: &PhotonicLayout) -> Result<Self> {
        let segments = layout.segments();
        check_overlaps(segments)?;

        let mut events: Vec<(i64, EventKind, usize)> = Vec::with_capacity(segments.len() * 2);
        for (i, s) in segments.iter().enumerate() {
            if s.is_empty() {
                continue;
            }
            if s.is_horizontal() {
                events.push((s.a.x.min(s.b.x), EventKind::Start, i));
                events.push((s.a.x.max(s.b.x), EventKind::End, i));
            } else {
                events.push((s.a.x, EventKind::Query, i));
            }
        }
        events.sort_unstable();

        let mut per_segment: Vec<Vec<i64>> = vec![Vec::new(); segments.len()];
        let mut active: [BTreeSet<(i64, usize)>; 2] = [BTreeSet::new(), BTreeSet::new()];
        let mut points = 0;
        for (x, kind, i) in events {
            let s = &segments[i];
            let slot = layer_slot(s.layer);
            match kind {
                EventKind::Start => {
                    active[slot].insert((s.a.y, i));
                }
                EventKind::End => {
                    active[slot].remove(&(s.a.y, i));
                }
                EventKind::Query => {
                    let (y1, y2) = (s.a.y.min(s.b.y), s.a.y.max(s.b.y));
                    for &(y, h) in
                        active[slot].range((Excluded((y1, usize::MAX)), Excluded((y2, 0))))
                    {
                        let p = super::Point::new(x, y);
                        per_segment[h].push(segments[h].offset_of(p));
                        per_segment[i].push(s.offset_of(p));
                        points += 1;
                    }
                }
            }
        }

        let mut per_waveguide = HashMap::with_capacity(layout.waveguides().len());
        for w in layout.waveguides() {
            let mut arc = 0;
            let mut events = Vec::new();
            for k in w.first_segment..w.first_segment + w.segment_count {
                events.extend(per_segment[k].iter().map(|off| arc + off));
                arc += segments[k].len();
            }
            events.sort_unstable();
            per_waveguide.insert(w.id, events);
        }
        for v in &mut per_segment {
            v.sort_unstable();
        }
        Ok(CrossingIndex {
            per_segment,
            per_waveguide,
            points,
        })
    }

    /// Number of distinct crossing points in the layout.
    pub fn crossing_points(&self) -> usize {
        self.points
    }

    pub fn segment_crossings(&self, segment: usize) -> usize {
        self.per_segment.get(segment).map_or(0, Vec::len)
    }

    /// Arc positions of the crossings along a waveguide, ascending.
    pub fn waveguide_events(&self, id: WaveguideId) -> &[i64] {
        self.per_waveguide.get(&id).map_or(&[], Vec::as_slice)
    }

    /// Crossings strictly between arc positions `from` and `to` of a waveguide.
    pub fn count_between(&self, id: WaveguideId, from: i64, to: i64) -> usize {
        let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
        let ev = self.waveguide_events(id);
        let start = ev.partition_point(|&p| p <= lo);
        let end = ev.partition_point(|&p| p < hi);
        end.saturating_sub(start)
    }

    pub fn count(&self, selection: Selection<'_>) -> usize {
        match selection {
            Selection::Waveguide(id) => self.waveguide_events(id).len(),
            Selection::Segments(idx) => idx.iter().map(|&i| self.segment_crossings(i)).sum(),
            Selection::Pieces(pieces) => pieces
                .iter()
                .map(|&(id, from, to)| self.count_between(id, from, to))
                .sum(),
        }
    }
}

/// Counts the same-layer crossings met by the selected part of `layout`.
pub fn count_effective_crossings(
    layout: &PhotonicLayout,
    selection: Selection<'_>,
) -> Result<usize> {
    Ok(CrossingIndex::build(layout)?.count(selection))
}

fn check_overlaps(segments: &[Segment]) -> Result<()> {
    // (layer, horizontal?, fixed coordinate, start, end, index)
    let mut spans: Vec<(Layer, bool, i64, i64, i64, usize)> = segments
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(i, s)| {
            if s.is_horizontal() {
                (s.layer, true, s.a.y, s.a.x.min(s.b.x), s.a.x.max(s.b.x), i)
            } else {
                (s.layer, false, s.a.x, s.a.y.min(s.b.y), s.a.y.max(s.b.y), i)
            }
        })
        .collect();
    spans.sort_unstable();
    let mut reach: Option<(Layer, bool, i64, i64, usize)> = None;
    for &(layer, horizontal, fixed, start, end, i) in &spans {
        match reach {
            Some((l, h, f, max_end, j)) if l == layer && h == horizontal && f == fixed => {
                if start < max_end {
                    return Err(Error::CollinearOverlap {
                        layer,
                        first: segments[j].waveguide.0,
                        second: segments[i].waveguide.0,
                    });
                }
                if end > max_end {
                    reach = Some((layer, horizontal, fixed, end, i));
                }
            }
            _ => reach = Some((layer, horizontal, fixed, end, i)),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn layout(segs: &[(Layer, u32, (i64, i64), (i64, i64))]) -> PhotonicLayout {
        let mut l = PhotonicLayout::new(1.0);
        for &(layer, id, a, b) in segs {
            l.add_waveguide(
                WaveguideId(id),
                layer,
                &[Point::new(a.0, a.1), Point::new(b.0, b.1)],
            )
            .unwrap();
        }
        l
    }

    #[test]
    fn single_x_crossing() {
        let l = layout(&[
            (Layer::One, 0, (0, 5), (10, 5)),
            (Layer::One, 1, (5, 0), (5, 10)),
        ]);
        assert_eq!(
            count_effective_crossings(&l, Selection::Waveguide(WaveguideId(0))).unwrap(),
            1
        );
    }

    #[test]
    fn different_layers_do_not_cross() {
        let l = layout(&[
            (Layer::One, 0, (0, 5), (10, 5)),
            (Layer::Two, 1, (5, 0), (5, 10)),
        ]);
        assert_eq!(
            count_effective_crossings(&l, Selection::Waveguide(WaveguideId(0))).unwrap(),
            0
        );
    }

    #[test]
    fn junctions_are_not_crossings() {
        // T-junction and shared corner
        let l = layout(&[
            (Layer::One, 0, (0, 5), (10, 5)),
            (Layer::One, 1, (5, 5), (5, 10)),
            (Layer::One, 2, (10, 5), (10, 0)),
        ]);
        let idx = CrossingIndex::build(&l).unwrap();
        assert_eq!(idx.crossing_points(), 0);
    }

    #[test]
    fn collinear_overlap_is_an_error() {
        let l = layout(&[
            (Layer::One, 0, (0, 5), (10, 5)),
            (Layer::One, 1, (8, 5), (20, 5)),
        ]);
        assert!(matches!(
            CrossingIndex::build(&l),
            Err(Error::CollinearOverlap { .. })
        ));
        // touching end to end is fine
        let l = layout(&[
            (Layer::One, 0, (0, 5), (10, 5)),
            (Layer::One, 1, (10, 5), (20, 5)),
        ]);
        assert!(CrossingIndex::build(&l).is_ok());
        // same line on the other layer is fine
        let l = layout(&[
            (Layer::One, 0, (0, 5), (10, 5)),
            (Layer::Two, 1, (8, 5), (20, 5)),
        ]);
        assert!(CrossingIndex::build(&l).is_ok());
    }

    #[test]
    fn pieces_exclude_their_endpoints() {
        let mut l = PhotonicLayout::new(1.0);
        l.add_waveguide(
            WaveguideId(0),
            Layer::One,
            &[Point::new(0, 0), Point::new(30, 0)],
        )
        .unwrap();
        for (id, x) in [(1, 10), (2, 20)] {
            l.add_waveguide(
                WaveguideId(id),
                Layer::One,
                &[Point::new(x, -5), Point::new(x, 5)],
            )
            .unwrap();
        }
        let idx = CrossingIndex::build(&l).unwrap();
        let w = WaveguideId(0);
        assert_eq!(idx.waveguide_events(w), &[10, 20]);
        assert_eq!(idx.count(Selection::Pieces(&[(w, 0, 30)])), 2);
        assert_eq!(idx.count(Selection::Pieces(&[(w, 10, 30)])), 1);
        assert_eq!(idx.count(Selection::Pieces(&[(w, 0, 15)])), 1);
    }
}
