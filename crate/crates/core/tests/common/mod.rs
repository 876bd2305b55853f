#![allow(dead_code)]

pub mod dd;

use bertrand_core::curve_dsl::{Expr, Func};
use rand::Rng;

use dd::Dd;

/// Half-width of the window around the evaluation point that the generated
/// expressions must be regular on.
pub const WINDOW: f64 = 0.1;

/// Independent evaluation of an expression tree in double-double arithmetic.
pub fn eval_dd(e: &Expr, s: Dd) -> Dd {
    match e {
        Expr::Param => s,
        Expr::Num(x) => Dd::from(*x),
        Expr::Neg(a) => -eval_dd(a, s),
        Expr::Add(a, b) => eval_dd(a, s) + eval_dd(b, s),
        Expr::Sub(a, b) => eval_dd(a, s) - eval_dd(b, s),
        Expr::Mul(a, b) => eval_dd(a, s) * eval_dd(b, s),
        Expr::Div(a, b) => eval_dd(a, s) / eval_dd(b, s),
        Expr::Pow(a, n) => eval_dd(a, s).powi(*n),
        Expr::Call(f, a) => {
            let x = eval_dd(a, s);
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Exp => x.exp(),
                Func::Sqrt => x.sqrt(),
            }
        }
    }
}

/// Derivatives of orders 1..=4 at `s0` from central differences in
/// double-double arithmetic with step 1e-3, extrapolated over step halvings.
pub fn richardson_derivatives(e: &Expr, s0: f64) -> [f64; 4] {
    const LEVELS: usize = 4;
    let f = |x: Dd| eval_dd(e, x);
    let s0 = Dd::from(s0);
    let mut out = [0.0; 4];
    for (order, slot) in out.iter_mut().enumerate() {
        let mut table: Vec<Dd> = Vec::with_capacity(LEVELS);
        let mut h = 1e-3;
        for _ in 0..LEVELS {
            let hd = Dd::from(h);
            let at = |k: f64| f(s0 + hd * Dd::from(k));
            let d = match order {
                0 => (at(1.0) - at(-1.0)) / (hd * Dd::from(2.0)),
                1 => (at(1.0) - at(0.0) * Dd::from(2.0) + at(-1.0)) / hd.powi(2),
                2 => {
                    (at(2.0) - at(1.0) * Dd::from(2.0) + at(-1.0) * Dd::from(2.0) - at(-2.0))
                        / (hd.powi(3) * Dd::from(2.0))
                }
                _ => {
                    (at(2.0) - at(1.0) * Dd::from(4.0) + at(0.0) * Dd::from(6.0) - at(-1.0) * Dd::from(4.0)
                        + at(-2.0))
                        / hd.powi(4)
                }
            };
            table.push(d);
            h *= 0.5;
        }
        // errors are even powers of h
        for j in 1..LEVELS {
            let factor = Dd::from(4f64.powi(j as i32));
            for i in (j..LEVELS).rev() {
                table[i] = (table[i] * factor - table[i - 1]) / (factor - Dd::from(1.0));
            }
        }
        *slot = table[LEVELS - 1].hi;
    }
    out
}

/// `|a - b| / max(1, |b|)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn literal<R: Rng>(rng: &mut R) -> f64 {
    match rng.gen_range(0..3) {
        0 => rng.gen_range(1..=5) as f64,
        1 => rng.gen_range(1..=400) as f64 / 100.0,
        _ => rng.gen_range(0.05..3.0),
    }
}

/// Random tree with non-negative literals and at most `depth` operator levels.
pub fn random_expr<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.6) { Expr::Param } else { Expr::Num(literal(rng)) };
    }
    let sub = |rng: &mut R| Box::new(random_expr(rng, depth - 1));
    match rng.gen_range(0..8) {
        0 => Expr::Neg(sub(rng)),
        1 => Expr::Add(sub(rng), sub(rng)),
        2 => Expr::Sub(sub(rng), sub(rng)),
        3 => Expr::Mul(sub(rng), sub(rng)),
        4 => Expr::Div(sub(rng), sub(rng)),
        5 => Expr::Pow(sub(rng), rng.gen_range(-2..=4)),
        _ => Expr::Call(Func::ALL[rng.gen_range(0..Func::ALL.len())], sub(rng)),
    }
}

/// Whether every node of `e` stays away from its singular set and
/// moderate in size on `[s0 - WINDOW, s0 + WINDOW]`.
pub fn well_conditioned(e: &Expr, s0: f64) -> bool {
    let points: Vec<f64> = (-8..=8).map(|i| s0 + WINDOW * i as f64 / 8.0).collect();
    let sub_ok = |a: &Expr, ok: &dyn Fn(f64) -> bool| {
        well_conditioned(a, s0) && points.iter().all(|&s| a.eval(s).map_or(false, ok))
    };
    let value_ok = points.iter().all(|&s| e.eval(s).map_or(false, |v| v.abs() < 1e4));
    value_ok
        && match e {
            Expr::Param | Expr::Num(_) => true,
            Expr::Neg(a) => well_conditioned(a, s0),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => well_conditioned(a, s0) && well_conditioned(b, s0),
            Expr::Div(a, b) => well_conditioned(a, s0) && sub_ok(b, &|v| v.abs() > 0.3),
            Expr::Pow(a, n) if *n < 0 => sub_ok(a, &|v| v.abs() > 0.3),
            Expr::Pow(a, _) => well_conditioned(a, s0),
            Expr::Call(Func::Sqrt, a) => sub_ok(a, &|v| v > 0.3),
            Expr::Call(Func::Exp | Func::Sinh | Func::Cosh, a) => sub_ok(a, &|v| v.abs() < 4.0),
            Expr::Call(_, a) => well_conditioned(a, s0),
        }
}

/// A well-conditioned random expression and its evaluation point.
pub fn random_case<R: Rng>(rng: &mut R) -> (Expr, f64) {
    loop {
        let depth = rng.gen_range(1..=4);
        let e = random_expr(rng, depth);
        let s0 = rng.gen_range(-1.0..1.0);
        if well_conditioned(&e, s0) && e.eval_jet(s0).is_ok_and(|j| j.is_finite()) {
            return (e, s0);
        }
    }
}
