//! Reflective extensions of box fields to the period-`2L` torus.

use super::{GridField, Parity};
use crate::scalar::Real;

/// Field on the `2(N-1) x 2(N-1)` periodic lattice of side `2L`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusField<T: Real = f64> {
    side: f64,
    points: usize,
    values: Vec<T>,
}

impl<T: Real> TorusField<T> {
    pub fn side(&self) -> f64 {
        self.side
    }

    /// Lattice points per axis of the periodic grid.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[(i % self.points) * self.points + (j % self.points)]
    }

    /// Restriction to the original box lattice.
    pub fn restrict(&self, template: &GridField<T>) -> GridField<T> {
        let n = template.spec().points();
        let values = (0..n * n).map(|idx| self.at(idx / n, idx % n)).collect();
        GridField::from_parts(*template.spec(), template.parity(), values)
    }
}

fn extend<T: Real>(field: &GridField<T>, parity: [Parity; 2]) -> TorusField<T> {
    let m = field.spec().intervals();
    let period = 2 * m;
    let fold = |i: usize, p: Parity| -> (usize, T) {
        if i <= m {
            (i, T::one())
        } else {
            let sign = if p == Parity::Odd { -T::one() } else { T::one() };
            (period - i, sign)
        }
    };
    let mut values = Vec::with_capacity(period * period);
    for i in 0..period {
        let (a, sa) = fold(i, parity[0]);
        for j in 0..period {
            let (b, sb) = fold(j, parity[1]);
            values.push(sa * sb * field.at(a, b));
        }
    }
    TorusField { side: 2.0 * field.spec().side(), points: period, values }
}

/// Even reflection across every box face.
pub fn even_extension<T: Real>(field: &GridField<T>) -> TorusField<T> {
    extend(field, [Parity::Even; 2])
}

/// Odd reflection across every box face.
pub fn odd_extension<T: Real>(field: &GridField<T>) -> TorusField<T> {
    extend(field, [Parity::Odd; 2])
}
