//! Shared inputs for the engine benchmarks.

use g2flow::{q, Rational};

/// A fixed non-symmetric Heisenberg point `(f, a, b, c)`.
pub fn heisenberg_point() -> [Rational; 4] {
    [q(3, 2), q(2, 3), q(5, 4), q(1, 2)]
}
