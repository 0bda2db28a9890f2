use std::collections::BTreeSet;
use std::fmt;

use super::{GridKind, Node};
use crate::error::{domain, Error, Result};

/// Membership description of a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extent {
    /// `u0 <= u < u0+w`, `v0 <= v < v0+h`: a rectangle on squares, an i/j rhombus on triangles.
    Rect {
        u0: i64,
        v0: i64,
        w: i64,
        h: i64,
    },
    /// Honeycomb cells `u0 <= u < u0+w`, `v0 <= v < v0+h`, both sites.
    Cells {
        u0: i64,
        v0: i64,
        w: i64,
        h: i64,
    },
    /// All nodes within hop distance `radius` of `center`.
    Ball {
        center: Node,
        radius: i64,
    },
    Set(BTreeSet<Node>),
    /// The unbounded lattice.
    Plane,
}

impl Extent {
    pub fn is_finite(&self) -> bool {
        !matches!(self, Extent::Plane)
    }
}

/// A window of a lattice.
///
/// The standard shapes (rectangles, rhombi, cell rhombi) are convex. Balls on the
/// honeycomb are not; use [`super::is_convex`] rather than assuming it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexSubgrid {
    pub kind: GridKind,
    pub extent: Extent,
}

impl ConvexSubgrid {
    pub fn rect(kind: GridKind, u0: i64, v0: i64, w: i64, h: i64) -> Self {
        let extent =
            if kind == GridKind::Hexagonal { Extent::Cells { u0, v0, w, h } } else { Extent::Rect { u0, v0, w, h } };
        ConvexSubgrid { kind, extent }
    }

    pub fn ball(kind: GridKind, center: Node, radius: i64) -> Self {
        ConvexSubgrid { kind, extent: Extent::Ball { center, radius } }
    }

    pub fn plane(kind: GridKind) -> Self {
        ConvexSubgrid { kind, extent: Extent::Plane }
    }

    pub fn set(kind: GridKind, nodes: impl IntoIterator<Item = Node>) -> Self {
        ConvexSubgrid { kind, extent: Extent::Set(nodes.into_iter().collect()) }
    }

    pub fn contains(&self, n: Node) -> bool {
        if self.kind != GridKind::Hexagonal && n.site != 0 {
            return false;
        }
        match &self.extent {
            Extent::Rect { u0, v0, w, h } | Extent::Cells { u0, v0, w, h } => {
                n.u >= *u0 && n.u < u0 + w && n.v >= *v0 && n.v < v0 + h
            }
            Extent::Ball { center, radius } => super::distance(self.kind, *center, n) <= *radius,
            Extent::Set(s) => s.contains(&n),
            Extent::Plane => n.site <= 1,
        }
    }

    /// Members in `(u, v, site)` order.
    pub fn nodes(&self) -> Result<Vec<Node>> {
        let sites: &[u8] = if self.kind == GridKind::Hexagonal { &[0, 1] } else { &[0] };
        let boxed = |u0: i64, v0: i64, w: i64, h: i64| {
            let mut out = Vec::new();
            for u in u0..u0 + w {
                for v in v0..v0 + h {
                    for &s in sites {
                        out.push(Node::hex(u, v, s));
                    }
                }
            }
            out
        };
        Ok(match &self.extent {
            Extent::Rect { u0, v0, w, h } | Extent::Cells { u0, v0, w, h } => boxed(*u0, *v0, *w, *h),
            Extent::Ball { center, radius } => {
                let r = *radius;
                boxed(center.u - r - 1, center.v - r - 1, 2 * r + 3, 2 * r + 3)
                    .into_iter()
                    .filter(|n| self.contains(*n))
                    .collect()
            }
            Extent::Set(s) => s.iter().copied().collect(),
            Extent::Plane => return domain("the unbounded plane has no finite node list"),
        })
    }

    /// Parses the extent part of an instance header.
    pub fn parse(kind: GridKind, text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Domain(format!("malformed extent `{text}`"));
        let ints = |s: &str| -> Result<Vec<i64>> {
            s.split(',').map(|p| p.trim().parse::<i64>().map_err(|_| bad())).collect()
        };
        let node_of = |xs: &[i64]| -> Result<Node> {
            match (kind, xs) {
                (GridKind::Hexagonal, [u, v, s]) if *s == 0 || *s == 1 => Ok(Node::hex(*u, *v, *s as u8)),
                (GridKind::Square | GridKind::Triangular, [u, v]) => Ok(Node::new(*u, *v)),
                _ => Err(bad()),
            }
        };
        if text == "plane" {
            return Ok(ConvexSubgrid::plane(kind));
        }
        let (shape, rest) = text.split_once(':').ok_or_else(bad)?;
        match shape {
            "rect" | "cells" => {
                let xs = ints(rest)?;
                if xs.len() != 4 || xs[2] < 0 || xs[3] < 0 {
                    return Err(bad());
                }
                if (shape == "cells") != (kind == GridKind::Hexagonal) {
                    return domain(format!("extent `{shape}` does not apply to {kind} grids"));
                }
                Ok(ConvexSubgrid::rect(kind, xs[0], xs[1], xs[2], xs[3]))
            }
            "ball" => {
                let (r, c) = rest.split_once(':').ok_or_else(bad)?;
                let radius: i64 = r.trim().parse().map_err(|_| bad())?;
                Ok(ConvexSubgrid::ball(kind, node_of(&ints(c)?)?, radius))
            }
            "set" => {
                let mut nodes = BTreeSet::new();
                for part in rest.split(';').filter(|p| !p.trim().is_empty()) {
                    nodes.insert(node_of(&ints(part)?)?);
                }
                Ok(ConvexSubgrid { kind, extent: Extent::Set(nodes) })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ConvexSubgrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords = |n: &Node| {
            if self.kind == GridKind::Hexagonal {
                format!("{},{},{}", n.u, n.v, n.site)
            } else {
                format!("{},{}", n.u, n.v)
            }
        };
        match &self.extent {
            Extent::Rect { u0, v0, w, h } => write!(f, "rect:{u0},{v0},{w},{h}"),
            Extent::Cells { u0, v0, w, h } => write!(f, "cells:{u0},{v0},{w},{h}"),
            Extent::Ball { center, radius } => write!(f, "ball:{radius}:{}", coords(center)),
            Extent::Set(s) => {
                let parts: Vec<String> = s.iter().map(coords).collect();
                write!(f, "set:{}", parts.join(";"))
            }
            Extent::Plane => f.write_str("plane"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::is_convex;

    #[test]
    fn extent_text_round_trip() {
        let cases = [
            ConvexSubgrid::rect(GridKind::Square, 0, 0, 10, 10),
            ConvexSubgrid::rect(GridKind::Hexagonal, -1, 2, 3, 4),
            ConvexSubgrid::ball(GridKind::Hexagonal, Node::hex(0, 0, 1), 8),
            ConvexSubgrid::ball(GridKind::Triangular, Node::new(2, -3), 4),
            ConvexSubgrid::set(GridKind::Triangular, [Node::new(0, 0), Node::new(1, 0)]),
            ConvexSubgrid::plane(GridKind::Hexagonal),
        ];
        for g in cases {
            assert_eq!(ConvexSubgrid::parse(g.kind, &g.to_string()).unwrap(), g);
        }
        assert!(ConvexSubgrid::parse(GridKind::Square, "cells:0,0,1,1").is_err());
        assert!(ConvexSubgrid::parse(GridKind::Square, "rect:0,0,1").is_err());
    }

    #[test]
    fn ball_sizes() {
        // 1 + 4·C(r+1,2), 1 + 6·C(r+1,2), 1 + 3·C(r+1,2)
        for r in 1..6i64 {
            let b = r * (r + 1) / 2;
            let n = |k| ConvexSubgrid::ball(k, Node::new(0, 0), r).nodes().unwrap().len() as i64;
            assert_eq!(n(GridKind::Square), 1 + 4 * b);
            assert_eq!(n(GridKind::Triangular), 1 + 6 * b);
            assert_eq!(n(GridKind::Hexagonal), 1 + 3 * b);
        }
    }

    #[test]
    fn honeycomb_cells_convex_balls_not() {
        for w in 2..5 {
            assert!(is_convex(&ConvexSubgrid::rect(GridKind::Hexagonal, 0, 0, w, w)).unwrap());
        }
        assert!(!is_convex(&ConvexSubgrid::ball(GridKind::Hexagonal, Node::hex(0, 0, 0), 3)).unwrap());
    }
}
