//! Integer expressions over the level variable and boolean level guards.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::EvalError;

/// Results above this many bits are refused rather than allocated.
pub const MAX_RESULT_BITS: u64 = 1 << 24;

/// Width and height (in cells) of each supertile at the previous level.
pub type DimTable = HashMap<String, (BigInt, BigInt)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Pow => '^',
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul => 2,
            BinOp::Pow => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Lit(BigUint),
    Level,
    Width(String),
    Height(String),
    Bin(BinOp, Box<IntExpr>, Box<IntExpr>),
}

impl IntExpr {
    pub fn lit(v: u64) -> Self {
        IntExpr::Lit(BigUint::from(v))
    }

    pub fn bin(op: BinOp, lhs: IntExpr, rhs: IntExpr) -> Self {
        IntExpr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    /// Evaluates at level `n`, looking up `w()`/`h()` in `dims`.
    pub fn eval(&self, n: u64, dims: &DimTable) -> Result<BigInt, EvalError> {
        match self {
            IntExpr::Lit(v) => Ok(BigInt::from(v.clone())),
            IntExpr::Level => Ok(BigInt::from(n)),
            IntExpr::Width(label) => dims
                .get(label)
                .map(|d| d.0.clone())
                .ok_or_else(|| EvalError::UnknownDimension(label.clone())),
            IntExpr::Height(label) => dims
                .get(label)
                .map(|d| d.1.clone())
                .ok_or_else(|| EvalError::UnknownDimension(label.clone())),
            IntExpr::Bin(op, lhs, rhs) => {
                let a = lhs.eval(n, dims)?;
                let b = rhs.eval(n, dims)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Pow => checked_pow(&a, &b),
                }
            }
        }
    }

    /// True if the expression mentions `w()` or `h()`.
    pub fn uses_dimensions(&self) -> bool {
        match self {
            IntExpr::Width(_) | IntExpr::Height(_) => true,
            IntExpr::Bin(_, l, r) => l.uses_dimensions() || r.uses_dimensions(),
            _ => false,
        }
    }
}

fn checked_pow(base: &BigInt, exp: &BigInt) -> Result<BigInt, EvalError> {
    if exp.is_negative() {
        return Err(EvalError::NegativeExponent(exp.clone()));
    }
    if base.is_zero() || base.abs().is_one() || exp.is_zero() {
        return Ok(match exp.to_u32() {
            Some(e) => num_traits::pow(base.clone(), e as usize),
            // |base| <= 1 with a huge exponent: only the parity matters
            None if base.is_zero() => BigInt::zero(),
            None if base.is_one() => BigInt::one(),
            None if exp.is_even() => BigInt::one(),
            None => -BigInt::one(),
        });
    }
    let bits = base.bits();
    let e = exp
        .to_u64()
        .filter(|e| e.saturating_mul(bits.saturating_sub(1).max(1)) <= MAX_RESULT_BITS)
        .ok_or_else(|| EvalError::TooLarge(format!("{base}^{exp}")))?;
    Ok(num_traits::pow(base.clone(), e as usize))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn holds(self, a: &BigInt, b: &BigInt) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// Boolean condition on the level `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    /// The literal `default` guard.
    Always,
    Cmp(CmpOp, IntExpr, IntExpr),
    /// `ispow(base, e)`: `e` equals `base^m` for some `m >= 1`.
    IsPow(BigUint, IntExpr),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn eval(&self, n: u64) -> Result<bool, EvalError> {
        let dims = DimTable::new();
        self.eval_with(n, &dims)
    }

    pub fn eval_with(&self, n: u64, dims: &DimTable) -> Result<bool, EvalError> {
        Ok(match self {
            Guard::Always => true,
            Guard::Cmp(op, a, b) => op.holds(&a.eval(n, dims)?, &b.eval(n, dims)?),
            Guard::IsPow(base, e) => is_positive_power(base, &e.eval(n, dims)?),
            Guard::Not(g) => !g.eval_with(n, dims)?,
            Guard::And(a, b) => a.eval_with(n, dims)? && b.eval_with(n, dims)?,
            Guard::Or(a, b) => a.eval_with(n, dims)? || b.eval_with(n, dims)?,
        })
    }
}

/// `value == base^m` for some `m >= 1`. Requires `base >= 2`.
pub fn is_positive_power(base: &BigUint, value: &BigInt) -> bool {
    let Some(mut v) = value.to_biguint() else {
        return false;
    };
    if value.sign() != Sign::Plus || *base < BigUint::from(2u8) || v < *base {
        return false;
    }
    while v > BigUint::one() {
        let (q, r) = v.div_rem(base);
        if !r.is_zero() {
            return false;
        }
        v = q;
    }
    true
}
