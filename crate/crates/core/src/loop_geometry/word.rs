use std::fmt;

use super::{GeometryError, Grid};

/// Direction of travel along an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    /// Increasing angle.
    Plus,
    /// Decreasing angle.
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub arc: String,
    pub sign: Sign,
}

impl Letter {
    pub fn new(arc: impl Into<String>, sign: Sign) -> Self {
        Self {
            arc: arc.into(),
            sign,
        }
    }

    pub fn plus(arc: impl Into<String>) -> Self {
        Self::new(arc, Sign::Plus)
    }

    pub fn minus(arc: impl Into<String>) -> Self {
        Self::new(arc, Sign::Minus)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.arc.clone(), self.sign.flip())
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.arc == other.arc && self.sign != other.sign
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{s}{}", self.arc)
    }
}

/// A loop based at the origin, as a word of signed arcs in traversal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LoopWord {
    letters: Vec<Letter>,
}

impl LoopWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The same loop traversed backwards.
    pub fn inverse(&self) -> Self {
        Self::new(self.letters.iter().rev().map(Letter::inverse).collect())
    }

    /// Erases adjacent `e e⁻¹` pairs until none remain.
    ///
    /// Single stack pass; the result is the free reduction of the word, so
    /// the operation is idempotent and never lengthens the word.
    pub fn backtrack_reduce(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for letter in &self.letters {
            if out.last().is_some_and(|top| top.cancels(letter)) {
                out.pop();
            } else {
                out.push(letter.clone());
            }
        }
        Self::new(out)
    }

    /// Checks that every arc exists, that consecutive letters meet on a
    /// common ray, and that the word closes up.
    pub fn check_on(&self, grid: &Grid) -> Result<(), GeometryError> {
        let mut first_start = None;
        let mut previous_end = None;
        for (position, letter) in self.letters.iter().enumerate() {
            let key = grid
                .locate(&letter.arc)
                .ok_or_else(|| GeometryError::ArcNotInGrid(letter.arc.clone()))?;
            let (a, b) = grid.sector_boundaries(key.sector);
            let (start, end) = match letter.sign {
                Sign::Plus => (a, b),
                Sign::Minus => (b, a),
            };
            if let Some(prev) = previous_end {
                if prev != start {
                    return Err(GeometryError::NotConnectable { position });
                }
            }
            first_start.get_or_insert(start);
            previous_end = Some(end);
        }
        match (first_start, previous_end) {
            (Some(start), Some(end)) if start != end => Err(GeometryError::NotClosed { start, end }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<Letter> for LoopWord {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl fmt::Display for LoopWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}
