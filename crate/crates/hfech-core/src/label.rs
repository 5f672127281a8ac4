//! Basis labels shared by every complex in the crate.

use std::fmt;

/// The four occupancy states of a handle factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OSym {
    /// Neither closed curve.
    Zero,
    /// The curve north of the equator.
    Plus,
    /// The curve south of the equator.
    Minus,
    /// Both curves.
    Both,
}

impl OSym {
    pub const ALL: [OSym; 4] = [OSym::Zero, OSym::Plus, OSym::Minus, OSym::Both];

    /// The grading weight: |0| = 0, |+1| = |-1| = 1, |both| = 2.
    pub fn weight(self) -> i64 {
        match self {
            OSym::Zero => 0,
            OSym::Plus | OSym::Minus => 1,
            OSym::Both => 2,
        }
    }
}

impl fmt::Display for OSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OSym::Zero => write!(f, "0"),
            OSym::Plus => write!(f, "+1"),
            OSym::Minus => write!(f, "-1"),
            OSym::Both => write!(f, "b"),
        }
    }
}

/// A handle-factor generator (m, o).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OLabel {
    pub m: i64,
    pub o: OSym,
}

impl OLabel {
    pub fn new(m: i64, o: OSym) -> Self {
        OLabel { m, o }
    }

    /// The filtration norm |m| + 2|o|.
    pub fn norm(&self) -> i64 {
        self.m.abs() + 2 * self.o.weight()
    }
}

impl fmt::Display for OLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.o)
    }
}

/// A basis label of a graded complex. Tensor products pair labels; all
/// other structure is carried by the variants themselves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// A bare generator name.
    Atom(String),
    /// A generator with an integer translation coordinate, written (x, i).
    Indexed(String, i64),
    /// A handle-factor generator.
    Handle(OLabel),
    /// A tensor-product pair.
    Pair(Box<Label>, Box<Label>),
}

impl Label {
    pub fn atom(s: &str) -> Self {
        Label::Atom(s.to_string())
    }

    pub fn indexed(s: &str, i: i64) -> Self {
        Label::Indexed(s.to_string(), i)
    }

    pub fn handle(m: i64, o: OSym) -> Self {
        Label::Handle(OLabel::new(m, o))
    }

    pub fn pair(a: Label, b: Label) -> Self {
        Label::Pair(Box::new(a), Box::new(b))
    }

    /// The translation coordinate of the leftmost indexed factor, if any.
    pub fn translation_index(&self) -> Option<i64> {
        match self {
            Label::Indexed(_, i) => Some(*i),
            Label::Pair(a, _) => a.translation_index(),
            _ => None,
        }
    }

    /// Replaces the translation coordinate of the leftmost indexed factor.
    pub fn with_translation_index(&self, i: i64) -> Option<Label> {
        match self {
            Label::Indexed(name, _) => Some(Label::Indexed(name.clone(), i)),
            Label::Pair(a, b) => a
                .with_translation_index(i)
                .map(|na| Label::Pair(Box::new(na), b.clone())),
            _ => None,
        }
    }

    /// Flattens a left-associated tensor label into its factors.
    pub fn factors(&self) -> Vec<&Label> {
        match self {
            Label::Pair(a, b) => {
                let mut v = a.factors();
                v.push(b);
                v
            }
            other => vec![other],
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(s) => write!(f, "{s}"),
            Label::Indexed(s, i) => write!(f, "({s},{i})"),
            Label::Handle(o) => write!(f, "{o}"),
            Label::Pair(a, b) => write!(f, "{a}*{b}"),
        }
    }
}
