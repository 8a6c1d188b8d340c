//! Seeded generation of concrete domain elements.

use rand::Rng;

use crate::domain::{Block, Calculus, DirectedInterval, Interval, PlanePoint, Rational, Value};

/// A small rational: numerator in `-range..=range`, denominator 1 or 2.
pub fn small_rational(rng: &mut impl Rng, range: i64) -> Rational {
    let den = if rng.random_bool(0.25) { 2 } else { 1 };
    Rational::new(rng.random_range(-range * den..=range * den), den)
}

fn two_distinct(rng: &mut impl Rng, range: i64) -> (Rational, Rational) {
    loop {
        let (a, b) = (small_rational(rng, range), small_rational(rng, range));
        if a != b {
            return (a, b);
        }
    }
}

fn interval(rng: &mut impl Rng, range: i64) -> Interval {
    let (a, b) = two_distinct(rng, range);
    Interval::new(a.min(b), a.max(b)).expect("distinct endpoints")
}

/// A random element of the calculus (a rational for `None`).
pub fn random_value(calculus: Option<Calculus>, rng: &mut impl Rng, range: i64) -> Value {
    match calculus {
        None => Value::Rational(small_rational(rng, range)),
        Some(Calculus::Ia) => Value::Interval(interval(rng, range)),
        Some(Calculus::Ba(p)) => Value::Block(
            Block::new((0..p).map(|_| interval(rng, range)).collect()).expect("p axes"),
        ),
        Some(Calculus::Cdc) => Value::Point(PlanePoint::new(
            small_rational(rng, range),
            small_rational(rng, range),
        )),
        Some(Calculus::Dia) => {
            let (a, b) = two_distinct(rng, range);
            Value::Directed(DirectedInterval::new(a, b).expect("distinct endpoints"))
        }
    }
}

/// Elements with integer coordinates in `0..=2`, in a fixed order.
pub fn grid_values(calculus: Calculus) -> Vec<Value> {
    let pts: Vec<Rational> = (0..=2).map(Rational::from_integer).collect();
    let mut out = Vec::new();
    let slots = calculus.slots();
    let mut idx = vec![0usize; slots];
    loop {
        let coords: Vec<Rational> = idx.iter().map(|&i| pts[i]).collect();
        if let Ok(v) = Value::from_slots(calculus, &coords) {
            out.push(v);
        }
        let mut k = 0;
        loop {
            if k == slots {
                return out;
            }
            idx[k] += 1;
            if idx[k] < pts.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
