use std::fmt;

use thiserror::Error;

use super::jet::Jet4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Sinh, Func::Cosh, Func::Exp, Func::Sqrt];

    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree over the parameter `s`.
///
/// Literals produced by the parser are always non-negative; a leading minus
/// is a [`Expr::Neg`] node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Param,
    Num(f64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at s = {s}")]
    DivisionByZero { s: f64 },
    #[error("square root of non-positive value {value} at s = {s}")]
    SqrtDomain { s: f64, value: f64 },
    #[error("zero raised to negative power {exponent} at s = {s}")]
    PowDomain { s: f64, exponent: i32 },
    #[error("non-finite result at s = {s}")]
    NonFinite { s: f64 },
}

impl EvalError {
    /// The parameter value at which evaluation failed.
    pub fn at(&self) -> f64 {
        match *self {
            EvalError::DivisionByZero { s }
            | EvalError::SqrtDomain { s, .. }
            | EvalError::PowDomain { s, .. }
            | EvalError::NonFinite { s } => s,
        }
    }
}

impl Expr {
    pub fn num(x: f64) -> Expr {
        Expr::Num(x)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// True when the tree does not mention the parameter.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Param => false,
            Expr::Num(_) => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Param | Expr::Num(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.depth(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Param => s,
            Expr::Num(x) => *x,
            Expr::Neg(a) => -a.eval(s)?,
            Expr::Add(a, b) => a.eval(s)? + b.eval(s)?,
            Expr::Sub(a, b) => a.eval(s)? - b.eval(s)?,
            Expr::Mul(a, b) => a.eval(s)? * b.eval(s)?,
            Expr::Div(a, b) => {
                let den = b.eval(s)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero { s });
                }
                a.eval(s)? / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval(s)?;
                if base == 0.0 && *n < 0 {
                    return Err(EvalError::PowDomain { s, exponent: *n });
                }
                base.powi(*n)
            }
            Expr::Call(f, a) => {
                let x = a.eval(s)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::SqrtDomain { s, value: x });
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { s })
        }
    }

    /// Value and derivatives through order four at `s0`.
    pub fn eval_jet(&self, s0: f64) -> Result<Jet4, EvalError> {
        let j = self.jet(s0)?;
        if j.is_finite() {
            Ok(j)
        } else {
            Err(EvalError::NonFinite { s: s0 })
        }
    }

    fn jet(&self, s0: f64) -> Result<Jet4, EvalError> {
        Ok(match self {
            Expr::Param => Jet4::variable(s0),
            Expr::Num(x) => Jet4::constant(*x),
            Expr::Neg(a) => -a.jet(s0)?,
            Expr::Add(a, b) => a.jet(s0)? + b.jet(s0)?,
            Expr::Sub(a, b) => a.jet(s0)? - b.jet(s0)?,
            Expr::Mul(a, b) => a.jet(s0)? * b.jet(s0)?,
            Expr::Div(a, b) => {
                let den = b.jet(s0)?;
                if den.value() == 0.0 {
                    return Err(EvalError::DivisionByZero { s: s0 });
                }
                a.jet(s0)? / den
            }
            Expr::Pow(a, n) => {
                let base = a.jet(s0)?;
                if base.value() == 0.0 && *n < 0 {
                    return Err(EvalError::PowDomain { s: s0, exponent: *n });
                }
                base.powi(*n)
            }
            Expr::Call(f, a) => {
                let x = a.jet(s0)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => {
                        // The derivatives blow up at zero, so zero is excluded too.
                        if x.value() <= 0.0 {
                            return Err(EvalError::SqrtDomain { s: s0, value: x.value() });
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }
}

/// Fully parenthesized output that the parser reads back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Param => f.write_str("s"),
            Expr::Num(x) => {
                if *x < 0.0 || (*x == 0.0 && x.is_sign_negative()) {
                    write!(f, "(-{:?})", -x)
                } else {
                    write!(f, "{x:?}")
                }
            }
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, n) => write!(f, "{a}^{n}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
