//! Degree and outdegree restriction sets.
//!
//! A [`DegreeSet`] is either finite or cofinite: a finite list of admitted
//! values below a threshold plus, optionally, every integer from the
//! threshold on. The same type describes vertex-degree sets (which contain
//! `1`), outdegree sets (which contain `0`) and the child-count restrictions
//! that appear when a set is shifted down.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeSet {
    finite_part: BTreeSet<usize>,
    tail_min: Option<usize>,
}

impl DegreeSet {
    pub fn new(finite: impl IntoIterator<Item = usize>, tail_min: Option<usize>) -> Self {
        let mut set = DegreeSet {
            finite_part: finite.into_iter().collect(),
            tail_min,
        };
        set.normalize();
        set
    }

    pub fn finite(values: impl IntoIterator<Item = usize>) -> Self {
        Self::new(values, None)
    }

    /// All positive integers, i.e. no degree restriction on unrooted trees.
    pub fn naturals() -> Self {
        Self::new([], Some(1))
    }

    /// All non-negative integers, i.e. no outdegree restriction on rooted trees.
    pub fn all() -> Self {
        Self::new([], Some(0))
    }

    pub fn singleton(value: usize) -> Self {
        Self::finite([value])
    }

    fn normalize(&mut self) {
        if let Some(mut t) = self.tail_min {
            self.finite_part.retain(|&v| v < t);
            while t > 0 && self.finite_part.remove(&(t - 1)) {
                t -= 1;
            }
            self.tail_min = Some(t);
        }
    }

    pub fn finite_part(&self) -> impl Iterator<Item = usize> + '_ {
        self.finite_part.iter().copied()
    }

    pub fn tail_min(&self) -> Option<usize> {
        self.tail_min
    }

    pub fn is_cofinite(&self) -> bool {
        self.tail_min.is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.tail_min.is_none() && self.finite_part.is_empty()
    }

    pub fn contains(&self, value: usize) -> bool {
        match self.tail_min {
            Some(t) if value >= t => true,
            _ => self.finite_part.contains(&value),
        }
    }

    /// Largest value that has to be tracked individually: the tail threshold
    /// for cofinite sets, the maximum for finite ones.
    pub fn cap(&self) -> usize {
        match self.tail_min {
            Some(t) => t,
            None => self.finite_part.iter().next_back().copied().unwrap_or(0),
        }
    }

    /// `{v - shift : v in self, v >= shift}`.
    pub fn shift_down(&self, shift: usize) -> DegreeSet {
        DegreeSet::new(
            self.finite_part
                .iter()
                .filter(|&&v| v >= shift)
                .map(|&v| v - shift),
            self.tail_min.map(|t| t.saturating_sub(shift)),
        )
    }

    /// The outdegree set associated with a degree set.
    pub fn shifted(&self) -> DegreeSet {
        self.shift_down(1)
    }

    /// Gcd of the nonzero elements (1 for cofinite sets, 0 if there are none).
    pub fn period(&self) -> usize {
        if self.tail_min.is_some() {
            return 1;
        }
        self.finite_part
            .iter()
            .filter(|&&v| v > 0)
            .fold(0, |acc, &v| acc.gcd(&v))
    }

    /// Largest element, `None` for cofinite sets.
    pub fn max_finite(&self) -> Option<usize> {
        match self.tail_min {
            Some(_) => None,
            None => self.finite_part.iter().next_back().copied(),
        }
    }

    /// Checks the requirements on a vertex-degree set: contains 1 and some value >= 3.
    pub fn validate_degrees(&self) -> Result<()> {
        if !self.contains(1) {
            return Err(Error::InvalidDegreeSet(
                self.to_string(),
                "a degree set must contain 1".into(),
            ));
        }
        if self.tail_min.is_none() && self.finite_part.iter().all(|&v| v < 3) {
            return Err(Error::InvalidDegreeSet(
                self.to_string(),
                "a degree set must contain some degree >= 3".into(),
            ));
        }
        Ok(())
    }

    /// Checks the requirements on an outdegree set: contains 0 and some value >= 2.
    pub fn validate_outdegrees(&self) -> Result<()> {
        if !self.contains(0) {
            return Err(Error::InvalidDegreeSet(
                self.to_string(),
                "an outdegree set must contain 0".into(),
            ));
        }
        if self.tail_min.is_none() && self.finite_part.iter().all(|&v| v < 2) {
            return Err(Error::InvalidDegreeSet(
                self.to_string(),
                "an outdegree set must contain some outdegree >= 2".into(),
            ));
        }
        Ok(())
    }

    /// Human-readable size rule for free trees with degrees in this set.
    pub fn size_rule(&self) -> String {
        let d = self.shifted().period();
        if d <= 1 {
            "n >= 2".to_string()
        } else {
            format!("n >= 2 and n ≡ 2 (mod {d}), d being the gcd of the nonzero outdegrees")
        }
    }
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.finite_part.iter().map(|v| v.to_string()).collect();
        if let Some(t) = self.tail_min {
            parts.push(format!("{t}+"));
        }
        if parts.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FromStr for DegreeSet {
    type Err = Error;

    /// Parses `"1,3"` (finite) or `"1,2,3+"` (cofinite); `"N"` is shorthand for `"1+"`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.eq_ignore_ascii_case("n") || trimmed.eq_ignore_ascii_case("naturals") {
            return Ok(DegreeSet::naturals());
        }
        let mut finite = Vec::new();
        let mut tail: Option<usize> = None;
        for token in trimmed.split(',').map(str::trim) {
            if token.is_empty() {
                return Err(Error::InvalidDegreeSet(s.into(), "empty entry".into()));
            }
            let (digits, is_tail) = match token.strip_suffix('+') {
                Some(rest) => (rest.trim(), true),
                None => (token, false),
            };
            let value: usize = digits
                .parse()
                .map_err(|_| Error::InvalidDegreeSet(s.into(), format!("bad entry `{token}`")))?;
            if is_tail {
                if tail.is_some() {
                    return Err(Error::InvalidDegreeSet(s.into(), "more than one `+` entry".into()));
                }
                tail = Some(value);
            } else {
                finite.push(value);
            }
        }
        Ok(DegreeSet::new(finite, tail))
    }
}
