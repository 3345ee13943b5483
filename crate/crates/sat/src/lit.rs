use std::fmt;
use std::ops::Not;

/// A propositional variable, numbered from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A literal: a variable with a polarity, packed as `var << 1 | negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | (!positive) as u32)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }

    /// Converts a non-zero DIMACS integer literal.
    pub fn from_dimacs(x: i64) -> Lit {
        debug_assert!(x != 0);
        Lit::new(Var((x.unsigned_abs() - 1) as u32), x > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }
}

impl Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LBool {
    True,
    False,
    Undef,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_conversion() {
        assert_eq!(Lit::from_dimacs(1), Var(0).pos());
        assert_eq!(Lit::from_dimacs(-3), Var(2).neg());
        assert_eq!(Lit::from_dimacs(-3).to_dimacs(), -3);
        assert_eq!(!Var(4).pos(), Var(4).neg());
    }
}
