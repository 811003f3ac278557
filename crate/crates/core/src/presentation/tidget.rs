use serde::{Deserialize, Serialize};

/// Fraction of the viewport's smaller side kept clear around anchored tidgets.
pub const TIDGET_MARGIN: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Anchor {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl Anchor {
    pub const ALL: [Anchor; 4] = [Anchor::TopLeft, Anchor::TopRight, Anchor::BottomLeft, Anchor::BottomRight];

    pub fn name(self) -> &'static str {
        match self {
            Anchor::TopLeft => "top-left",
            Anchor::TopRight => "top-right",
            Anchor::BottomLeft => "bottom-left",
            Anchor::BottomRight => "bottom-right",
        }
    }

    pub fn parse(s: &str) -> Option<Anchor> {
        Anchor::ALL.into_iter().find(|a| a.name() == s)
    }

    /// Screen-space corner a tidget hangs from, for a viewport of the given
    /// size in pixels (origin top-left, y down). Depends only on fractions of
    /// the viewport so layout is resolution independent.
    pub fn origin(self, width: f64, height: f64) -> (f64, f64) {
        let m = TIDGET_MARGIN * width.min(height);
        match self {
            Anchor::TopLeft => (m, m),
            Anchor::TopRight => (width - m, m),
            Anchor::BottomLeft => (m, height - m),
            Anchor::BottomRight => (width - m, height - m),
        }
    }
}

/// Bulleted text overlay with incremental reveal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tidget {
    pub lines: Vec<String>,
    pub anchor: Anchor,
    pub visible: bool,
    reveal_index: usize,
}

impl Tidget {
    pub fn new<I, S>(anchor: Anchor, lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            lines: lines.into_iter().map(Into::into).collect(),
            anchor,
            visible: true,
            reveal_index: 0,
        }
    }

    pub fn reveal_index(&self) -> usize {
        self.reveal_index
    }

    /// Lines revealed so far.
    pub fn shown(&self) -> &[String] {
        &self.lines[..self.reveal_index]
    }

    pub fn reveal_next(&mut self) -> bool {
        if self.reveal_index < self.lines.len() {
            self.reveal_index += 1;
            true
        } else {
            false
        }
    }

    pub fn reveal_all(&mut self) {
        self.reveal_index = self.lines.len();
    }

    pub fn reset_reveal(&mut self) {
        self.reveal_index = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origins_scale_with_viewport() {
        for anchor in Anchor::ALL {
            let (x1, y1) = anchor.origin(800.0, 600.0);
            let (x2, y2) = anchor.origin(1600.0, 1200.0);
            assert_eq!((x2, y2), (2.0 * x1, 2.0 * y1), "{anchor:?}");
        }
    }

    #[test]
    fn anchor_names_round_trip() {
        for anchor in Anchor::ALL {
            assert_eq!(Anchor::parse(anchor.name()), Some(anchor));
        }
        assert_eq!(Anchor::parse("middle"), None);
    }
}
