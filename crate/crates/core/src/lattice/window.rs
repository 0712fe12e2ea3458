use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};

/// Largest window a layer may use. A truth table over `k` points holds
/// `2^k` bits, so this caps a single table at 2 MiB.
pub const MAX_WINDOW_POINTS: usize = 24;

/// Pixel offset relative to the window origin. Ordering is lexicographic on
/// `(row, col)`, which fixes the bit order of pattern indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelOffset {
    pub row: i32,
    pub col: i32,
}

impl PixelOffset {
    pub const ORIGIN: PixelOffset = PixelOffset { row: 0, col: 0 };

    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }

    pub fn chebyshev(self, other: PixelOffset) -> i32 {
        (self.row - other.row)
            .abs()
            .max((self.col - other.col).abs())
    }

    pub fn reflect(self) -> PixelOffset {
        PixelOffset::new(-self.row, -self.col)
    }
}

impl Add for PixelOffset {
    type Output = PixelOffset;

    fn add(self, rhs: PixelOffset) -> PixelOffset {
        PixelOffset::new(self.row + rhs.row, self.col + rhs.col)
    }
}

impl fmt::Display for PixelOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

impl From<(i32, i32)> for PixelOffset {
    fn from((row, col): (i32, i32)) -> Self {
        PixelOffset::new(row, col)
    }
}

/// True iff `points` is nonempty and 8-connected.
pub fn is_connected(points: &[PixelOffset]) -> bool {
    let set: BTreeSet<PixelOffset> = points.iter().copied().collect();
    let Some(&start) = set.iter().next() else {
        return false;
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for dr in -1..=1 {
            for dc in -1..=1 {
                let q = PixelOffset::new(p.row + dr, p.col + dc);
                if set.contains(&q) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
    }
    seen.len() == set.len()
}

/// `{p + q : p in a, q in b}`.
pub fn minkowski_sum_sets(
    a: &BTreeSet<PixelOffset>,
    b: &BTreeSet<PixelOffset>,
) -> BTreeSet<PixelOffset> {
    a.iter()
        .flat_map(|&p| b.iter().map(move |&q| p + q))
        .collect()
}

/// A connected set of offsets inside the square `F_d` of odd side `d`
/// centered at the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window {
    side: usize,
    points: Vec<PixelOffset>,
}

fn check_side(side: usize) -> Result<()> {
    if side < 3 || side.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "window side must be odd and >= 3, got {side}"
        )));
    }
    Ok(())
}

impl Window {
    pub fn new(side: usize, points: impl IntoIterator<Item = PixelOffset>) -> Result<Self> {
        check_side(side)?;
        let set: BTreeSet<PixelOffset> = points.into_iter().collect();
        let radius = ((side - 1) / 2) as i32;
        if set.is_empty() {
            return Err(Error::InvalidWindow("window is empty".into()));
        }
        if let Some(p) = set
            .iter()
            .find(|p| p.row.abs() > radius || p.col.abs() > radius)
        {
            return Err(Error::InvalidWindow(format!(
                "point {p} lies outside the {side}x{side} square"
            )));
        }
        if set.len() > MAX_WINDOW_POINTS {
            return Err(Error::InvalidWindow(format!(
                "{} points exceeds the limit of {MAX_WINDOW_POINTS}",
                set.len()
            )));
        }
        let points: Vec<PixelOffset> = set.into_iter().collect();
        if !is_connected(&points) {
            return Err(Error::InvalidWindow("window is not 8-connected".into()));
        }
        Ok(Self { side, points })
    }

    /// The five point cross `{(0,0), (0,±1), (±1,0)}`.
    pub fn cross(side: usize) -> Result<Self> {
        Self::new(
            side,
            [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)].map(PixelOffset::from),
        )
    }

    /// The origin alone.
    pub fn origin(side: usize) -> Result<Self> {
        Self::new(side, [PixelOffset::ORIGIN])
    }

    /// The full `side x side` square.
    pub fn square(side: usize) -> Result<Self> {
        check_side(side)?;
        let r = ((side - 1) / 2) as i32;
        Self::new(
            side,
            (-r..=r).flat_map(|row| (-r..=r).map(move |col| PixelOffset::new(row, col))),
        )
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn radius(&self) -> i32 {
        ((self.side - 1) / 2) as i32
    }

    /// Points in lexicographic `(row, col)` order.
    pub fn points(&self) -> &[PixelOffset] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: PixelOffset) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// Position of `p` in the point order, i.e. its bit in a pattern index.
    pub fn index_of(&self, p: PixelOffset) -> Option<usize> {
        self.points.binary_search(&p).ok()
    }

    pub fn point_set(&self) -> BTreeSet<PixelOffset> {
        self.points.iter().copied().collect()
    }

    /// Every offset of `F_d` in row-major order.
    pub fn frame_points(&self) -> impl Iterator<Item = PixelOffset> {
        let r = self.radius();
        (-r..=r).flat_map(move |row| (-r..=r).map(move |col| PixelOffset::new(row, col)))
    }

    pub fn with_point(&self, p: PixelOffset) -> Result<Window> {
        if self.contains(p) {
            return Err(Error::InvalidWindow(format!(
                "{p} is already in the window"
            )));
        }
        Window::new(self.side, self.points.iter().copied().chain([p]))
    }

    pub fn without_point(&self, p: PixelOffset) -> Result<Window> {
        if !self.contains(p) {
            return Err(Error::InvalidWindow(format!("{p} is not in the window")));
        }
        Window::new(self.side, self.points.iter().copied().filter(|&q| q != p))
    }

    /// Canonical text key: side, then the membership mask of `F_d` in
    /// row-major order as little-endian hex.
    pub fn key(&self) -> String {
        let mask: Vec<bool> = self.frame_points().map(|p| self.contains(p)).collect();
        format!(
            "{}x{}",
            self.side,
            crate::lattice::table::bits_to_hex(&mask)
        )
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.radius();
        for row in -r..=r {
            for col in -r..=r {
                let c = if self.contains(PixelOffset::new(row, col)) {
                    '#'
                } else {
                    '.'
                };
                write!(f, "{c}")?;
            }
            if row != r {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// `{p + q : p in a, q in b}` for two windows.
pub fn minkowski_sum(a: &Window, b: &Window) -> BTreeSet<PixelOffset> {
    minkowski_sum_sets(&a.point_set(), &b.point_set())
}
