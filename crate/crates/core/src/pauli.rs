//! Pauli operators as phase-tracked interleaved bit rows.
//!
//! Qubit `j` uses bit `2j` for its X part and bit `2j + 1` for its Z part. The
//! operator is `i^phase X^x Z^z`, so `Y = iXZ` carries phase 1.

use crate::error::{Error, Result};
use crate::gf2::{BitRow, EchelonRow, EVEN};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PauliString {
    bits: BitRow,
    phase: u8,
}

impl PauliString {
    pub fn identity() -> Self {
        PauliString::default()
    }

    /// Hermitian product of single-qubit factors with overall sign `(-1)^negative`.
    pub fn from_factors<I: IntoIterator<Item = (usize, Pauli)>>(factors: I, negative: bool) -> Self {
        let mut p = PauliString::identity();
        for (q, op) in factors {
            let mut single = BitRow::new();
            let phase = match op {
                Pauli::I => 0,
                Pauli::X => {
                    single.toggle(2 * q);
                    0
                }
                Pauli::Z => {
                    single.toggle(2 * q + 1);
                    0
                }
                Pauli::Y => {
                    single.toggle(2 * q);
                    single.toggle(2 * q + 1);
                    1
                }
            };
            p.combine(&PauliString { bits: single, phase });
        }
        if negative {
            p.phase = (p.phase + 2) % 4;
        }
        p
    }

    pub fn x_on<I: IntoIterator<Item = usize>>(qubits: I) -> Self {
        Self::from_factors(qubits.into_iter().map(|q| (q, Pauli::X)), false)
    }

    pub fn z_on<I: IntoIterator<Item = usize>>(qubits: I) -> Self {
        Self::from_factors(qubits.into_iter().map(|q| (q, Pauli::Z)), false)
    }

    /// Build from raw interleaved bits and a phase exponent.
    pub fn from_raw(bits: BitRow, phase: u8) -> Self {
        PauliString { bits, phase: phase % 4 }
    }

    /// Hermitian operator with the given bits and sign.
    pub fn hermitian(bits: BitRow, negative: bool) -> Self {
        let ys = y_count(&bits) as u8;
        PauliString { bits, phase: (ys + if negative { 2 } else { 0 }) % 4 }
    }

    pub fn bits(&self) -> &BitRow {
        &self.bits
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as usize + 4 - y_count(&self.bits) % 4) % 2 == 0
    }

    /// True when the Hermitian operator is minus a product of X, Y, Z factors.
    pub fn is_negative(&self) -> bool {
        (self.phase as usize + 4 - y_count(&self.bits) % 4) % 4 == 2
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    pub fn factor(&self, q: usize) -> Pauli {
        match (self.bits.get(2 * q), self.bits.get(2 * q + 1)) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Qubits acted on non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.bits.ones().map(|b| b / 2).collect();
        out.dedup();
        out
    }

    pub fn weight(&self) -> usize {
        self.support().len()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.bits.last().map(|b| b / 2)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !self.bits.swap_pairs().dot(&other.bits)
    }

    /// The product `self * other`.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.combine(other);
        out
    }

    /// Keep only the factors on qubits for which `keep` holds.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> PauliString {
        let factors = self.support().into_iter().filter(|q| keep(*q)).map(|q| (q, self.factor(q)));
        PauliString::from_factors(factors, false)
    }

    /// Relabel qubits through `map`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> PauliString {
        let factors = self.support().into_iter().map(|q| (map(q), self.factor(q)));
        PauliString::from_factors(factors, self.is_negative())
    }

    /// Parse `+X0 Z3 Y7` style sparse notation. A bare sign or `I` denotes the identity.
    pub fn parse(text: &str) -> Result<PauliString> {
        let text = text.trim();
        let (negative, rest) = match text.chars().next() {
            Some('+') => (false, &text[1..]),
            Some('-') => (true, &text[1..]),
            _ => (false, text),
        };
        let mut factors = vec![];
        let mut seen = std::collections::BTreeSet::new();
        for token in rest.split_whitespace() {
            let mut chars = token.chars();
            let op = chars
                .next()
                .and_then(Pauli::from_char)
                .ok_or_else(|| Error::InvalidOperator(format!("bad Pauli token `{token}`")))?;
            let index = chars.as_str();
            if op == Pauli::I && index.is_empty() {
                continue;
            }
            let q: usize = index.parse().map_err(|_| Error::InvalidOperator(format!("bad qubit index in `{token}`")))?;
            if q > MAX_QUBIT {
                return Err(Error::InvalidOperator(format!("qubit index {q} too large")));
            }
            if !seen.insert(q) {
                return Err(Error::InvalidOperator(format!("qubit {q} repeated")));
            }
            factors.push((q, op));
        }
        Ok(PauliString::from_factors(factors, negative))
    }
}

/// Largest qubit index accepted by the parser.
pub const MAX_QUBIT: usize = 1 << 24;

fn y_count(bits: &BitRow) -> usize {
    (0..bits.words().len())
        .map(|k| {
            let w = bits.words()[k];
            (w & (w >> 1) & EVEN).count_ones() as usize
        })
        .sum()
}

impl EchelonRow for PauliString {
    fn bits(&self) -> &BitRow {
        &self.bits
    }

    fn combine(&mut self, other: &Self) {
        // Moving Z^z1 past X^x2 contributes (-1)^{z1 . x2}.
        let lo = self.bits.start_word().min(other.bits.start_word());
        let hi = (self.bits.start_word() + self.bits.words().len()).max(other.bits.start_word() + other.bits.words().len());
        let flips: u32 = (lo..hi).map(|i| ((self.bits.word(i) >> 1) & other.bits.word(i) & EVEN).count_ones()).sum();
        self.phase = ((self.phase as u32 + other.phase as u32 + 2 * flips) % 4) as u8;
        self.bits.xor_assign(&other.bits);
    }
}

impl fmt::Display for PauliString {
    /// Hermitian operators print as `+X0 Z3`; others carry the phase as a prefix.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_hermitian() {
            write!(f, "{}", if self.is_negative() { '-' } else { '+' })?;
        } else {
            let ys = y_count(&self.bits) as u8;
            write!(f, "{}", if (self.phase + 4 - ys % 4) % 4 == 1 { "+i" } else { "-i" })?;
        }
        let support = self.support();
        if support.is_empty() {
            return write!(f, "I");
        }
        for (k, q) in support.into_iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", self.factor(q).letter(), q)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // 2x2 complex matrices as [re, im] pairs, for a reference product.
    type M = [[(i32, i32); 2]; 2];

    fn single(p: Pauli) -> M {
        match p {
            Pauli::I => [[(1, 0), (0, 0)], [(0, 0), (1, 0)]],
            Pauli::X => [[(0, 0), (1, 0)], [(1, 0), (0, 0)]],
            Pauli::Y => [[(0, 0), (0, -1)], [(0, 1), (0, 0)]],
            Pauli::Z => [[(1, 0), (0, 0)], [(0, 0), (-1, 0)]],
        }
    }

    fn cmul(a: (i32, i32), b: (i32, i32)) -> (i32, i32) {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }

    fn mmul(a: &M, b: &M) -> M {
        let mut out = [[(0, 0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let t = cmul(a[i][k], b[k][j]);
                    out[i][j] = (out[i][j].0 + t.0, out[i][j].1 + t.1);
                }
            }
        }
        out
    }

    // Tensor factors of a Pauli string times a global phase i^k, compared up to that phase.
    fn reference(p: &PauliString, n: usize) -> (Vec<Pauli>, u8) {
        let ys = (0..n).filter(|&q| p.factor(q) == Pauli::Y).count() as u8;
        ((0..n).map(|q| p.factor(q)).collect(), (p.phase() + 4 - ys % 4) % 4)
    }

    fn pauli_strategy(n: usize) -> impl Strategy<Value = PauliString> {
        (proptest::collection::vec(0u8..4, n), any::<bool>()).prop_map(|(ops, neg)| {
            let ops = ops.into_iter().enumerate().map(|(q, k)| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize]));
            PauliString::from_factors(ops, neg)
        })
    }

    proptest! {
        #[test]
        fn product_matches_matrices(a in pauli_strategy(5), b in pauli_strategy(5)) {
            let ab = a.mul(&b);
            let (fa, ka) = reference(&a, 5);
            let (fb, kb) = reference(&b, 5);
            let (fab, kab) = reference(&ab, 5);
            // Multiply per qubit and collect the scalar left over.
            let mut phase = (ka + kb) % 4;
            for q in 0..5 {
                let m = mmul(&single(fa[q]), &single(fb[q]));
                let target = single(fab[q]);
                let k = (0..4u8).find(|&k| {
                    let s = [(1, 0), (0, 1), (-1, 0), (0, -1)][k as usize];
                    (0..2).all(|i| (0..2).all(|j| cmul(s, target[i][j]) == m[i][j]))
                });
                phase = (phase + k.expect("product of Paulis is a Pauli")) % 4;
            }
            prop_assert_eq!(phase, kab);
            prop_assert_eq!(a.commutes_with(&b), ab == b.mul(&a));
        }

        #[test]
        fn display_round_trips(a in pauli_strategy(7)) {
            prop_assert_eq!(PauliString::parse(&a.to_string()).unwrap(), a);
        }
    }

    #[test]
    fn basic_identities() {
        let x = PauliString::x_on([0]);
        let z = PauliString::z_on([0]);
        let y = PauliString::parse("Y0").unwrap();
        assert!(!x.commutes_with(&z));
        // XZ = -iY and ZX = iY.
        assert_eq!(x.mul(&z), PauliString::from_raw(y.bits().clone(), 0));
        assert_eq!(z.mul(&x).phase(), 2);
        assert_eq!(x.mul(&z).mul(&y), PauliString::from_raw(BitRow::new(), 3));
        assert!(y.is_hermitian() && !y.is_negative());
        assert!(PauliString::x_on([0, 1]).commutes_with(&PauliString::z_on([0, 1])));
        assert_eq!(PauliString::parse("-Z3 X100").unwrap().to_string(), "-Z3 X100");
        assert!(PauliString::parse("X1 X1").is_err());
        assert!(PauliString::parse("Q1").is_err());
        assert!(PauliString::parse("+").unwrap().is_identity());
    }
}
