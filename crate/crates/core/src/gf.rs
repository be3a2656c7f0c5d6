//! Exact arithmetic in prime fields GF(p) and binary extension fields GF(2^e).
//!
//! Elements are stored as their canonical integer representative: the residue
//! for GF(p), and the bitmask of polynomial coefficients for GF(2^e).
//! The order of every supported field is capped at 2^31, so representatives
//! fit in a `u32` and products of two of them fit in a `u64`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted by [`Field::at_least`].
pub const DEFAULT_CEILING: u64 = 1 << 31;

/// Irreducible moduli over GF(2) for degrees 2..=16, as bitmasks including
/// the leading term. Index is the degree.
pub const BINARY_MODULI: [u32; 17] = [
    0, 0, 0x7, // x^2+x+1
    0xB,      // x^3+x+1
    0x13,     // x^4+x+1
    0x25,     // x^5+x^2+1
    0x43,     // x^6+x+1
    0x83,     // x^7+x+1
    0x11D,    // x^8+x^4+x^3+x^2+1
    0x211,    // x^9+x^4+1
    0x409,    // x^10+x^3+1
    0x805,    // x^11+x^2+1
    0x1053,   // x^12+x^6+x^4+x+1
    0x201B,   // x^13+x^4+x^3+x+1
    0x4443,   // x^14+x^10+x^6+x+1
    0x8003,   // x^15+x+1
    0x1100B,  // x^16+x^12+x^3+x+1
];

/// Which family [`Field::at_least`] should search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prefer {
    Prime,
    Binary,
}

/// A finite field GF(p) or GF(2^e).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct Field {
    p: u32,
    e: u32,
    poly: u32,
    q: u32,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    p: u64,
    e: u32,
    poly: u64,
}

impl TryFrom<FieldRepr> for Field {
    type Error = Error;

    fn try_from(r: FieldRepr) -> Result<Self> {
        let poly = if r.e > 1 { Some(r.poly) } else { None };
        Field::new(r.p, r.e, poly)
    }
}

impl From<Field> for FieldRepr {
    fn from(f: Field) -> Self {
        FieldRepr {
            p: f.p as u64,
            e: f.e,
            poly: if f.e > 1 { f.poly as u64 } else { 0 },
        }
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF(2^{}; {:#x})", self.e, self.poly)
        }
    }
}

impl Field {
    /// Builds GF(p) (`degree == 1`) or GF(2^degree).
    ///
    /// For binary extensions without an explicit modulus the built-in table is
    /// used; degrees above 16 fall back to the smallest irreducible polynomial
    /// of that degree in integer order.
    pub fn new(characteristic: u64, degree: u32, modulus_poly: Option<u64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParams("field degree must be at least 1".into()));
        }
        if !is_prime(characteristic) {
            return Err(Error::CompositeCharacteristic(characteristic));
        }
        if degree == 1 {
            if characteristic > DEFAULT_CEILING {
                return Err(Error::BoundTooLarge {
                    bound: characteristic.to_string(),
                    ceiling: DEFAULT_CEILING,
                });
            }
            let p = characteristic as u32;
            return Ok(Field { p, e: 1, poly: 0, q: p });
        }
        if characteristic != 2 {
            return Err(Error::UnsupportedExtension { p: characteristic, e: degree });
        }
        if degree > 31 {
            return Err(Error::BoundTooLarge {
                bound: format!("2^{degree}"),
                ceiling: DEFAULT_CEILING,
            });
        }
        let poly = match modulus_poly {
            Some(poly) => {
                if poly >> degree != 1 || !is_irreducible_gf2(poly) {
                    return Err(Error::ReduciblePolynomial(poly));
                }
                poly as u32
            }
            None => default_binary_modulus(degree),
        };
        Ok(Field { p: 2, e: degree, poly, q: 1u32 << degree })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Field::new(p, 1, None)
    }

    pub fn binary(degree: u32) -> Result<Self> {
        if degree == 1 {
            Field::prime(2)
        } else {
            Field::new(2, degree, None)
        }
    }

    /// Smallest field of the preferred family whose order is at least `bound`.
    pub fn at_least(bound: u64, prefer: Prefer) -> Result<Self> {
        Field::at_least_with_ceiling(bound, prefer, DEFAULT_CEILING)
    }

    pub fn at_least_with_ceiling(bound: u64, prefer: Prefer, ceiling: u64) -> Result<Self> {
        let too_large = || Error::BoundTooLarge { bound: bound.to_string(), ceiling };
        let bound = bound.max(2);
        if bound > ceiling.min(DEFAULT_CEILING) {
            return Err(too_large());
        }
        match prefer {
            Prefer::Prime => {
                let mut p = bound;
                while !is_prime(p) {
                    p += 1;
                }
                if p > ceiling.min(DEFAULT_CEILING) {
                    return Err(too_large());
                }
                Field::prime(p)
            }
            Prefer::Binary => {
                let e = 64 - (bound - 1).leading_zeros();
                Field::binary(e.max(1))
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Modulus bitmask (0 for prime fields).
    pub fn modulus(&self) -> u64 {
        if self.e > 1 {
            self.poly as u64
        } else {
            0
        }
    }

    pub fn order(&self) -> u64 {
        self.q as u64
    }

    pub fn is_binary(&self) -> bool {
        self.p == 2
    }

    /// Wraps a canonical representative.
    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value >= self.order() {
            return Err(Error::NotCanonical { value, q: self.order() });
        }
        Ok(FieldElement { value: value as u32, field: *self })
    }

    /// Every element in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |value| FieldElement { value, field: *self })
    }

    // Raw arithmetic on canonical representatives. Callers guarantee that
    // arguments are canonical for this field.

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else {
            let s = a as u64 + b as u64;
            let p = self.p as u64;
            (if s >= p { s - p } else { s }) as u32
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 || a == 0 {
            a
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            if self.p == 2 {
                a & b
            } else {
                ((a as u64 * b as u64) % self.p as u64) as u32
            }
        } else {
            gf2_mulmod(a, b, self.poly, self.e)
        }
    }

    pub fn pow(&self, a: u32, mut exp: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

fn default_binary_modulus(degree: u32) -> u32 {
    if (degree as usize) < BINARY_MODULI.len() {
        return BINARY_MODULI[degree as usize];
    }
    let lo = 1u64 << degree;
    (lo + 1..lo << 1)
        .find(|&poly| is_irreducible_gf2(poly))
        .expect("an irreducible polynomial exists in every degree") as u32
}

fn gf2_mulmod(mut a: u32, mut b: u32, poly: u32, e: u32) -> u32 {
    let top = 1u32 << (e - 1);
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        let carry = a & top != 0;
        a = (a << 1) & !(1u32 << e);
        if carry {
            a ^= poly & !(1u32 << e);
        }
    }
    acc
}

fn poly_degree(p: u64) -> u32 {
    63 - p.leading_zeros()
}

fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Trial division by every polynomial of degree at most half of `poly`'s.
pub fn is_irreducible_gf2(poly: u64) -> bool {
    if poly < 2 {
        return false;
    }
    let d = poly_degree(poly);
    if d == 0 {
        return false;
    }
    for divisor in 2u64..(1u64 << (d / 2 + 1)) {
        if poly_rem(poly, divisor) == 0 {
            return false;
        }
    }
    true
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An element tagged with its field; mixed-field arithmetic is an error.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: Field,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.value, self.field)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Operation selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
    Pow,
}

/// Second operand of [`arith`]: an element for binary ops, an exponent for `Pow`.
/// Unary ops ignore it.
#[derive(Clone, Copy, Debug)]
pub enum Operand {
    Elem(FieldElement),
    Int(u64),
}

pub fn arith(op: Op, a: FieldElement, b: Operand) -> Result<FieldElement> {
    let elem = || match b {
        Operand::Elem(e) => Ok(e),
        Operand::Int(_) => Err(Error::InvalidParams(format!("{op:?} expects a field element"))),
    };
    match op {
        Op::Add => a.add(elem()?),
        Op::Sub => a.sub(elem()?),
        Op::Mul => a.mul(elem()?),
        Op::Div => a.div(elem()?),
        Op::Neg => Ok(a.neg()),
        Op::Inv => a.inv(),
        Op::Pow => match b {
            Operand::Int(exp) => Ok(a.pow(exp)),
            Operand::Elem(_) => Err(Error::InvalidParams("pow expects an integer exponent".into())),
        },
    }
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value as u64
    }

    pub(crate) fn raw(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same(&self, other: &FieldElement) -> Result<Field> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self.field)
    }

    fn wrap(&self, value: u32) -> FieldElement {
        FieldElement { value, field: self.field }
    }

    pub fn add(&self, other: FieldElement) -> Result<FieldElement> {
        let f = self.same(&other)?;
        Ok(self.wrap(f.add(self.value, other.value)))
    }

    pub fn sub(&self, other: FieldElement) -> Result<FieldElement> {
        let f = self.same(&other)?;
        Ok(self.wrap(f.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: FieldElement) -> Result<FieldElement> {
        let f = self.same(&other)?;
        Ok(self.wrap(f.mul(self.value, other.value)))
    }

    pub fn div(&self, other: FieldElement) -> Result<FieldElement> {
        let f = self.same(&other)?;
        Ok(self.wrap(f.div(self.value, other.value)?))
    }

    pub fn neg(&self) -> FieldElement {
        self.wrap(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.wrap(self.field.inv(self.value)?))
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        self.wrap(self.field.pow(self.value, exp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> Field {
        Field::new(2, 2, Some(0b111)).unwrap()
    }

    #[test]
    fn gf4_alpha_squared() {
        let f = gf4();
        let alpha = f.element(0b10).unwrap();
        assert_eq!(alpha.mul(alpha).unwrap().value(), 0b11);
        assert_eq!(alpha.inv().unwrap().value(), 0b11);
        // brute force: exactly one nonzero x has alpha*x = 1
        let hits: Vec<_> = f.elements().filter(|x| alpha.mul(*x).unwrap().value() == 1).collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].value(), 0b11);
    }

    #[test]
    fn prime_field_addition() {
        let f = Field::prime(17).unwrap();
        let a = f.element(5).unwrap();
        let b = f.element(13).unwrap();
        assert_eq!(a.add(b).unwrap().value(), 1);
        assert_eq!(a.sub(b).unwrap().value(), 9);
        assert_eq!(f.order(), 17);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(2, 2, Some(0b101)), Err(Error::ReduciblePolynomial(0b101)));
        assert_eq!(Field::new(15, 1, None), Err(Error::CompositeCharacteristic(15)));
        assert_eq!(Field::new(3, 2, None), Err(Error::UnsupportedExtension { p: 3, e: 2 }));
        // wrong degree
        assert!(Field::new(2, 3, Some(0b111)).is_err());
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Field::prime(5).unwrap().element(1).unwrap();
        let b = Field::prime(7).unwrap().element(1).unwrap();
        assert_eq!(a.add(b), Err(Error::FieldMismatch));
        let z = Field::prime(5).unwrap().element(0).unwrap();
        assert_eq!(a.div(z), Err(Error::DivisionByZero));
        assert_eq!(z.inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn arith_dispatch() {
        let f = gf4();
        let alpha = f.element(2).unwrap();
        assert_eq!(arith(Op::Mul, alpha, Operand::Elem(alpha)).unwrap().value(), 3);
        assert_eq!(arith(Op::Inv, alpha, Operand::Int(0)).unwrap().value(), 3);
        assert_eq!(arith(Op::Pow, alpha, Operand::Int(3)).unwrap().value(), 1);
        assert!(arith(Op::Add, alpha, Operand::Int(1)).is_err());
    }

    #[test]
    fn at_least() {
        assert_eq!(Field::at_least(15, Prefer::Prime).unwrap().order(), 17);
        assert_eq!(Field::at_least(15, Prefer::Binary).unwrap().order(), 16);
        assert_eq!(Field::at_least(2, Prefer::Prime).unwrap().order(), 2);
        assert_eq!(Field::at_least(495, Prefer::Prime).unwrap().order(), 499);
        assert_eq!(Field::at_least(2, Prefer::Binary).unwrap().order(), 2);
        assert!(matches!(
            Field::at_least(DEFAULT_CEILING + 1, Prefer::Prime),
            Err(Error::BoundTooLarge { .. })
        ));
        assert!(Field::at_least_with_ceiling(100, Prefer::Prime, 50).is_err());
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for (deg, &poly) in BINARY_MODULI.iter().enumerate().skip(2) {
            assert_eq!(poly_degree(poly as u64), deg as u32);
            assert!(is_irreducible_gf2(poly as u64), "degree {deg}");
        }
        assert!(!is_irreducible_gf2(0b101));
        // fallback search beyond the table
        let f = Field::binary(17).unwrap();
        assert!(is_irreducible_gf2(f.modulus()));
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    fn all_small_fields() -> Vec<Field> {
        let mut v: Vec<Field> = (2..=64u64).filter(|&p| is_prime(p)).map(|p| Field::prime(p).unwrap()).collect();
        v.extend((2..=6).map(|e| Field::binary(e).unwrap()));
        v
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in all_small_fields() {
            let q = f.order() as u32;
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
            // nonzero elements form a group of order q-1: every element's order divides q-1
            for a in 1..q {
                assert_eq!(f.pow(a, (q - 1) as u64), 1, "{f}");
                assert_ne!(f.mul(a, 1), 0);
            }
            // closure under multiplication and a generator exists
            let has_generator = (1..q).any(|g| {
                let mut seen = std::collections::HashSet::new();
                let mut x = 1;
                for _ in 0..q - 1 {
                    seen.insert(x);
                    x = f.mul(x, g);
                }
                seen.len() == (q - 1) as usize
            });
            assert!(has_generator, "{f}");
        }
    }

    #[test]
    fn inverses_exhaustive() {
        let mut fields: Vec<Field> = (2..=256u64).filter(|&p| is_prime(p)).map(|p| Field::prime(p).unwrap()).collect();
        fields.extend((2..=8).map(|e| Field::binary(e).unwrap()));
        for f in fields {
            for a in 1..f.order() as u32 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn serde_roundtrip_and_canonical() {
        let f = gf4();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"p":2,"e":2,"poly":7}"#);
        assert_eq!(serde_json::from_str::<Field>(&s).unwrap(), f);
        let p = Field::prime(17).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"p":17,"e":1,"poly":0}"#);
        assert!(serde_json::from_str::<Field>(r#"{"p":2,"e":2,"poly":5}"#).is_err());
        for x in p.elements() {
            assert_eq!(p.element(x.value()).unwrap(), x);
        }
        assert!(p.element(17).is_err());
    }
}
