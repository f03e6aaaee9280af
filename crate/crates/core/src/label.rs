use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;

use crate::error::Error;

/// Stance of a tweet toward its target.
///
/// The derived ordering is the canonical class order `[Against, Favor, None]`
/// used for matrix axes and for breaking argmax ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StanceLabel {
    Against,
    Favor,
    None,
}

impl StanceLabel {
    pub const ALL: [StanceLabel; 3] = [StanceLabel::Against, StanceLabel::Favor, StanceLabel::None];

    /// Position on the canonical axis.
    pub fn index(self) -> usize {
        match self {
            StanceLabel::Against => 0,
            StanceLabel::Favor => 1,
            StanceLabel::None => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Upper-case form used by SemEval files.
    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Against => "AGAINST",
            StanceLabel::Favor => "FAVOR",
            StanceLabel::None => "NONE",
        }
    }

    pub fn is_polar(self) -> bool {
        self != StanceLabel::None
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StanceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("favor") {
            Ok(StanceLabel::Favor)
        } else if t.eq_ignore_ascii_case("against") {
            Ok(StanceLabel::Against)
        } else if t.eq_ignore_ascii_case("none") {
            Ok(StanceLabel::None)
        } else {
            Err(Error::UnknownStance(t.to_string()))
        }
    }
}
