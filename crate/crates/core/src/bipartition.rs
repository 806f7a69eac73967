use std::fmt;
use std::str::FromStr;

/// A split `f|gh` of the three parties into a single party `f` and the pair `gh`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bipartition {
    /// `1|23`
    One,
    /// `2|13`
    Two,
    /// `3|12`
    Three,
}

impl Bipartition {
    pub const ALL: [Bipartition; 3] = [Bipartition::One, Bipartition::Two, Bipartition::Three];

    /// Zero-based index of the isolated party.
    pub fn party(self) -> usize {
        match self {
            Bipartition::One => 0,
            Bipartition::Two => 1,
            Bipartition::Three => 2,
        }
    }

    /// Zero-based indices of the remaining parties, in increasing order.
    pub fn others(self) -> (usize, usize) {
        match self {
            Bipartition::One => (1, 2),
            Bipartition::Two => (0, 2),
            Bipartition::Three => (0, 1),
        }
    }

    pub fn from_party(party: usize) -> Option<Self> {
        Self::ALL.get(party).copied()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bipartition::One => "1|23",
            Bipartition::Two => "2|13",
            Bipartition::Three => "3|12",
        })
    }
}

impl FromStr for Bipartition {
    type Err = String;

    /// Accepts `1|23`, `2|13`, `3|12` or the bare party number.
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "1|23" | "1" => Ok(Bipartition::One),
            "2|13" | "2" => Ok(Bipartition::Two),
            "3|12" | "3" => Ok(Bipartition::Three),
            other => Err(format!(
                "unknown bipartition `{other}` (expected 1|23, 2|13 or 3|12)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_agree() {
        for b in Bipartition::ALL {
            assert_eq!(b.to_string().parse::<Bipartition>().unwrap(), b);
            assert_eq!(Bipartition::from_party(b.party()), Some(b));
        }
        assert!("12|3".parse::<Bipartition>().is_err());
    }
}
