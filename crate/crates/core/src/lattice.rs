//! Lattice sites and rectangular windows of `Z^2`.

use core::fmt;

/// A point `(i, j)` of the lattice. `i` is the horizontal coordinate, `j`
/// the vertical one; up-right paths increase one of them by one per step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub i: i64,
    pub j: i64,
}

impl Site {
    pub const fn new(i: i64, j: i64) -> Self {
        Self { i, j }
    }

    pub const fn right(self) -> Self {
        Self::new(self.i + 1, self.j)
    }

    pub const fn up(self) -> Self {
        Self::new(self.i, self.j + 1)
    }

    pub const fn left(self) -> Self {
        Self::new(self.i - 1, self.j)
    }

    pub const fn down(self) -> Self {
        Self::new(self.i, self.j - 1)
    }

    /// Coordinatewise `self <= other`.
    pub const fn precedes(self, other: Site) -> bool {
        self.i <= other.i && self.j <= other.j
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Inclusive rectangle `[i0, i1] x [j0, j1]`. Always nonempty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    i0: i64,
    i1: i64,
    j0: i64,
    j1: i64,
}

impl Window {
    /// Returns `None` when the rectangle would be empty.
    pub fn new(i0: i64, i1: i64, j0: i64, j1: i64) -> Option<Self> {
        (i0 <= i1 && j0 <= j1).then_some(Self { i0, i1, j0, j1 })
    }

    /// Smallest window containing both corners.
    pub fn spanning(a: Site, b: Site) -> Self {
        Self {
            i0: a.i.min(b.i),
            i1: a.i.max(b.i),
            j0: a.j.min(b.j),
            j1: a.j.max(b.j),
        }
    }

    pub fn i_range(&self) -> (i64, i64) {
        (self.i0, self.i1)
    }

    pub fn j_range(&self) -> (i64, i64) {
        (self.j0, self.j1)
    }

    pub fn lower_left(&self) -> Site {
        Site::new(self.i0, self.j0)
    }

    pub fn upper_right(&self) -> Site {
        Site::new(self.i1, self.j1)
    }

    pub fn width(&self) -> usize {
        (self.i1 - self.i0 + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.j1 - self.j0 + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, site: Site) -> bool {
        (self.i0..=self.i1).contains(&site.i) && (self.j0..=self.j1).contains(&site.j)
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.contains(other.lower_left()) && self.contains(other.upper_right())
    }

    /// Row-major offset of `site` (rows are constant `j`).
    pub fn index(&self, site: Site) -> Option<usize> {
        self.contains(site).then(|| {
            (site.j - self.j0) as usize * self.width() + (site.i - self.i0) as usize
        })
    }

    pub fn site_at(&self, index: usize) -> Site {
        let w = self.width();
        Site::new(self.i0 + (index % w) as i64, self.j0 + (index / w) as i64)
    }

    /// Intersection, if nonempty.
    pub fn intersect(&self, other: &Window) -> Option<Window> {
        Window::new(
            self.i0.max(other.i0),
            self.i1.min(other.i1),
            self.j0.max(other.j0),
            self.j1.min(other.j1),
        )
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (self.j0..=self.j1).flat_map(move |j| (self.i0..=self.i1).map(move |i| Site::new(i, j)))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.i0, self.i1, self.j0, self.j1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let w = Window::new(-3, 4, 2, 6).unwrap();
        for (k, s) in w.sites().enumerate() {
            assert_eq!(w.index(s), Some(k));
            assert_eq!(w.site_at(k), s);
        }
        assert_eq!(w.len(), 8 * 5);
        assert_eq!(w.index(Site::new(5, 2)), None);
    }

    #[test]
    fn empty_window_rejected() {
        assert!(Window::new(1, 0, 0, 0).is_none());
        assert!(Window::new(0, 0, 0, 0).is_some());
    }

    #[test]
    fn intersection() {
        let a = Window::new(0, 10, 0, 10).unwrap();
        let b = Window::new(5, 20, -4, 3).unwrap();
        assert_eq!(a.intersect(&b), Window::new(5, 10, 0, 3));
        let c = Window::new(11, 12, 0, 1).unwrap();
        assert_eq!(a.intersect(&c), None);
    }
}
