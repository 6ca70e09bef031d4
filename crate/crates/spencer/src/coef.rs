//! Coefficient rings for fields on a chart.
//!
//! A field is stored by its values in some differential ring `R`: symbolic
//! polynomials or rational functions in `x`, or truncated Taylor series in
//! `h` around a rational point `x0` (so `x = x0 + h`). Polynomial structure
//! data of a chart is lifted into `R` by evaluation at the coordinate values.

use exact_core::{DiffRing, Dual, MPoly, Q, RatFunc, Ring, Series, Shape};
use std::sync::Arc;

pub trait Coef: DiffRing {
    /// `p(x)` where `x` are the coordinate values in this ring.
    fn lift(p: &MPoly, x: &[Self]) -> Self {
        p.eval(x, &x[0])
    }
}

fn is_standard_vars(x: &[MPoly]) -> bool {
    x.iter().enumerate().all(|(i, v)| v.arity() == x.len() && *v == MPoly::var(x.len(), i))
}

impl Coef for MPoly {
    fn lift(p: &MPoly, x: &[Self]) -> Self {
        if p.arity() == x.len() && is_standard_vars(x) {
            return p.clone();
        }
        p.eval(x, &x[0])
    }
}

impl Coef for RatFunc {
    fn lift(p: &MPoly, x: &[Self]) -> Self {
        let vars: Vec<MPoly> = x.iter().filter_map(|v| v.as_poly().cloned()).collect();
        if vars.len() == x.len() && is_standard_vars(&vars) {
            return RatFunc::from_poly(p.clone());
        }
        p.eval(x, &x[0])
    }
}

impl<R: Ring> Coef for Series<R> {}
impl<R: Coef> Coef for Dual<R> {}

/// Coordinate values `x_i` of the chart inside `R`.
pub fn symbolic_coords(m: usize) -> Vec<MPoly> {
    (0..m).map(|i| MPoly::var(m, i)).collect()
}

/// `x0 + h` as Taylor series of the given order.
pub fn series_coords(x0: &[Q], order: i64) -> Vec<Series<Q>> {
    let shape: Arc<Shape> = Shape::new(x0.len(), order);
    (0..x0.len()).map(|i| Series::variable(&shape, x0[i].clone(), i)).collect()
}

/// Evaluate a list of polynomials at ring-valued arguments.
pub fn eval_all<R: Ring>(ps: &[MPoly], args: &[R]) -> Vec<R> {
    ps.iter().map(|p| p.eval(args, &args[0])).collect()
}
