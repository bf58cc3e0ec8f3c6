//! Shared domain types: accounts, currencies, exact-arithmetic amounts and
//! transaction result codes.
//!
//! Amounts carry a [`BigRational`] value so book crossings and cycle products
//! never round. The native currency is special-cased: it has no issuer, and
//! externally supplied native amounts must be integral in drops (one drop is
//! 10^-6 units).

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sequence number of a closed ledger.
pub type LedgerIndex = u64;

/// Per-owner sequence number identifying an offer.
pub type OfferSequence = u32;

/// Drops per whole unit of the native currency.
pub const DROPS_PER_XRP: u64 = 1_000_000;

/// Maximum significant decimal digits accepted from external input and
/// emitted when rendering.
pub const MAX_SIG_DIGITS: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("malformed amount: {0}")]
    Amount(String),
    #[error("malformed currency: {0}")]
    Currency(String),
    #[error("malformed account: {0}")]
    Account(String),
}

/// An account identifier. Opaque, non-empty, printable ASCII without
/// whitespace or `@` (which delimits issued-currency notation).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AccountId(String);

impl AccountId {
    pub fn new(id: impl Into<String>) -> Result<Self, TypeError> {
        let id = id.into();
        if id.is_empty() {
            return Err(TypeError::Account("empty account id".into()));
        }
        if !id.bytes().all(|b| b.is_ascii_graphic() && b != b'@') {
            return Err(TypeError::Account(format!(
                "account id {id:?} has characters outside printable ASCII (or '@')"
            )));
        }
        Ok(AccountId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for AccountId {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, TypeError> {
        AccountId::new(s)
    }
}

impl TryFrom<String> for AccountId {
    type Error = TypeError;
    fn try_from(s: String) -> Result<Self, TypeError> {
        AccountId::new(s)
    }
}

impl From<AccountId> for String {
    fn from(a: AccountId) -> String {
        a.0
    }
}

/// A ticker for an issued currency: 3 to 20 uppercase ASCII letters or
/// digits. `XRP` is reserved for the native currency and rejected here.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CurrencyCode(String);

impl CurrencyCode {
    pub fn new(code: impl Into<String>) -> Result<Self, TypeError> {
        let code = code.into();
        if code.len() < 3 || code.len() > 20 {
            return Err(TypeError::Currency(format!(
                "code {code:?} must be 3..=20 characters"
            )));
        }
        if !code.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit()) {
            return Err(TypeError::Currency(format!(
                "code {code:?} must be uppercase ASCII letters or digits"
            )));
        }
        if code == "XRP" {
            return Err(TypeError::Currency(
                "XRP denotes the native currency, not an issued code".into(),
            ));
        }
        Ok(CurrencyCode(code))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CurrencyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for CurrencyCode {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, TypeError> {
        CurrencyCode::new(s)
    }
}

impl TryFrom<String> for CurrencyCode {
    type Error = TypeError;
    fn try_from(s: String) -> Result<Self, TypeError> {
        CurrencyCode::new(s)
    }
}

impl From<CurrencyCode> for String {
    fn from(c: CurrencyCode) -> String {
        c.0
    }
}

/// A currency as traded: either native, or an (issuer, code) pair. The same
/// code under two issuers is two distinct currencies.
///
/// Text form is `XRP` or `CODE@ISSUER`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CurrencyId {
    Native,
    Issued { code: CurrencyCode, issuer: AccountId },
}

impl CurrencyId {
    pub fn issued(code: &str, issuer: &str) -> Result<Self, TypeError> {
        Ok(CurrencyId::Issued {
            code: CurrencyCode::new(code)?,
            issuer: AccountId::new(issuer)?,
        })
    }

    pub fn is_native(&self) -> bool {
        matches!(self, CurrencyId::Native)
    }

    pub fn issuer(&self) -> Option<&AccountId> {
        match self {
            CurrencyId::Native => None,
            CurrencyId::Issued { issuer, .. } => Some(issuer),
        }
    }
}

impl fmt::Display for CurrencyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurrencyId::Native => f.write_str("XRP"),
            CurrencyId::Issued { code, issuer } => write!(f, "{code}@{issuer}"),
        }
    }
}

impl FromStr for CurrencyId {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, TypeError> {
        if s == "XRP" {
            return Ok(CurrencyId::Native);
        }
        let (code, issuer) = s
            .split_once('@')
            .ok_or_else(|| TypeError::Currency(format!("currency {s:?} is neither XRP nor CODE@ISSUER")))?;
        CurrencyId::issued(code, issuer)
    }
}

impl TryFrom<String> for CurrencyId {
    type Error = TypeError;
    fn try_from(s: String) -> Result<Self, TypeError> {
        s.parse()
    }
}

impl From<CurrencyId> for String {
    fn from(c: CurrencyId) -> String {
        c.to_string()
    }
}

/// A non-negative quantity of one currency, held exactly.
///
/// Arithmetic inside the engine (partial fills, cycle products) stays
/// rational. The drop-integrality rule for native amounts is enforced at the
/// parse boundary and by [`Amount::mul_floor`], not on every intermediate.
///
/// Text form is `VALUE CURRENCY`, e.g. `1.5 XRP` or `100 USD@GATE`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Amount {
    value: BigRational,
    currency: CurrencyId,
}

impl Amount {
    /// Parses a decimal string into an amount, validating the external-input
    /// rules: non-negative, at most [`MAX_SIG_DIGITS`] significant digits,
    /// and for native amounts integral in drops.
    pub fn parse(value: &str, currency: CurrencyId) -> Result<Self, TypeError> {
        let (v, sig) = parse_decimal(value)?;
        if sig > MAX_SIG_DIGITS {
            return Err(TypeError::Amount(format!(
                "{value:?} has {sig} significant digits, limit is {MAX_SIG_DIGITS}"
            )));
        }
        Self::checked_new(v, currency)
            .map_err(|e| TypeError::Amount(format!("{value:?}: {e}")))
    }

    /// Wraps an exact value already produced by engine arithmetic. Rejects
    /// negatives and fractional-drop native values.
    pub fn checked_new(value: BigRational, currency: CurrencyId) -> Result<Self, TypeError> {
        if value.is_negative() {
            return Err(TypeError::Amount("negative value".into()));
        }
        if currency.is_native() {
            let drops = &value * BigRational::from_integer(BigInt::from(DROPS_PER_XRP));
            if !drops.is_integer() {
                return Err(TypeError::Amount(format!(
                    "native value {} is not integral in drops",
                    render_rational(&value)
                )));
            }
        }
        Ok(Amount { value, currency })
    }

    /// Wraps an exact rational without the drop-integrality check; book
    /// internals use this for in-flight fill fragments.
    pub fn exact(value: BigRational, currency: CurrencyId) -> Self {
        debug_assert!(!value.is_negative());
        Amount { value, currency }
    }

    pub fn zero(currency: CurrencyId) -> Self {
        Amount { value: BigRational::zero(), currency }
    }

    pub fn from_drops(drops: u64) -> Self {
        Amount {
            value: BigRational::new(BigInt::from(drops), BigInt::from(DROPS_PER_XRP)),
            currency: CurrencyId::Native,
        }
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn currency(&self) -> &CurrencyId {
        &self.currency
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Whole drops, for native amounts that are integral in drops.
    pub fn as_drops(&self) -> Option<BigInt> {
        if !self.currency.is_native() {
            return None;
        }
        let drops = &self.value * BigRational::from_integer(BigInt::from(DROPS_PER_XRP));
        drops.is_integer().then(|| drops.to_integer())
    }

    pub fn checked_add(&self, other: &Amount) -> Result<Amount, TypeError> {
        self.same_currency(other)?;
        Ok(Amount {
            value: &self.value + &other.value,
            currency: self.currency.clone(),
        })
    }

    /// Exact subtraction; underflow below zero is an error.
    pub fn checked_sub(&self, other: &Amount) -> Result<Amount, TypeError> {
        self.same_currency(other)?;
        if other.value > self.value {
            return Err(TypeError::Amount(format!(
                "subtraction underflow: {} - {}",
                self, other
            )));
        }
        Ok(Amount {
            value: &self.value - &other.value,
            currency: self.currency.clone(),
        })
    }

    /// Scales by a non-negative rational. Exact for issued currencies; native
    /// results are floored to whole drops so a fractional drop can never
    /// leave the arithmetic boundary.
    pub fn mul_floor(&self, rate: &BigRational) -> Result<Amount, TypeError> {
        if rate.is_negative() {
            return Err(TypeError::Amount("negative scale factor".into()));
        }
        let mut value = &self.value * rate;
        if self.currency.is_native() {
            let per = BigRational::from_integer(BigInt::from(DROPS_PER_XRP));
            value = BigRational::from_integer((&value * &per).floor().to_integer()) / per;
        }
        Ok(Amount { value, currency: self.currency.clone() })
    }

    /// Exact scaling with no drop flooring, for book-internal fragments.
    pub fn mul_exact(&self, rate: &BigRational) -> Amount {
        debug_assert!(!rate.is_negative());
        Amount {
            value: &self.value * rate,
            currency: self.currency.clone(),
        }
    }

    /// Same-currency minimum.
    pub fn min_with(&self, other: &Amount) -> Result<Amount, TypeError> {
        self.same_currency(other)?;
        Ok(if self.value <= other.value { self.clone() } else { other.clone() })
    }

    pub fn cmp_value(&self, other: &Amount) -> Result<std::cmp::Ordering, TypeError> {
        self.same_currency(other)?;
        Ok(self.value.cmp(&other.value))
    }

    fn same_currency(&self, other: &Amount) -> Result<(), TypeError> {
        if self.currency != other.currency {
            return Err(TypeError::Amount(format!(
                "currency mismatch: {} vs {}",
                self.currency, other.currency
            )));
        }
        Ok(())
    }

    pub fn render_value(&self) -> String {
        render_rational(&self.value)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", render_rational(&self.value), self.currency)
    }
}

impl FromStr for Amount {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, TypeError> {
        let (value, currency) = s
            .split_once(' ')
            .ok_or_else(|| TypeError::Amount(format!("amount {s:?} is not VALUE CURRENCY")))?;
        Amount::parse(value.trim(), currency.trim().parse()?)
    }
}

impl TryFrom<String> for Amount {
    type Error = TypeError;
    fn try_from(s: String) -> Result<Self, TypeError> {
        s.parse()
    }
}

impl From<Amount> for String {
    fn from(a: Amount) -> String {
        a.to_string()
    }
}

/// A signed native-currency quantity, for profit-and-loss accounting where
/// realized values go negative. Kept separate so [`Amount`] stays
/// non-negative by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(try_from = "String", into = "String")]
pub struct SignedXrp(BigRational);

impl SignedXrp {
    pub fn zero() -> Self {
        SignedXrp(BigRational::zero())
    }

    pub fn from_rational(v: BigRational) -> Self {
        SignedXrp(v)
    }

    pub fn from_amount(a: &Amount) -> Option<Self> {
        a.currency.is_native().then(|| SignedXrp(a.value.clone()))
    }

    pub fn from_drops(drops: i64) -> Self {
        SignedXrp(BigRational::new(BigInt::from(drops), BigInt::from(DROPS_PER_XRP)))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

impl Add for SignedXrp {
    type Output = SignedXrp;
    fn add(self, rhs: SignedXrp) -> SignedXrp {
        SignedXrp(self.0 + rhs.0)
    }
}

impl AddAssign for SignedXrp {
    fn add_assign(&mut self, rhs: SignedXrp) {
        self.0 += rhs.0;
    }
}

impl Sub for SignedXrp {
    type Output = SignedXrp;
    fn sub(self, rhs: SignedXrp) -> SignedXrp {
        SignedXrp(self.0 - rhs.0)
    }
}

impl SubAssign for SignedXrp {
    fn sub_assign(&mut self, rhs: SignedXrp) {
        self.0 -= rhs.0;
    }
}

impl Neg for SignedXrp {
    type Output = SignedXrp;
    fn neg(self) -> SignedXrp {
        SignedXrp(-self.0)
    }
}

impl fmt::Display for SignedXrp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_negative() {
            write!(f, "-{} XRP", render_rational(&-self.0.clone()))
        } else {
            write!(f, "{} XRP", render_rational(&self.0))
        }
    }
}

impl FromStr for SignedXrp {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, TypeError> {
        let body = s
            .strip_suffix(" XRP")
            .ok_or_else(|| TypeError::Amount(format!("signed amount {s:?} must end in \" XRP\"")))?;
        let (neg, digits) = match body.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, body),
        };
        let (v, _) = parse_decimal(digits)?;
        Ok(SignedXrp(if neg { -v } else { v }))
    }
}

impl TryFrom<String> for SignedXrp {
    type Error = TypeError;
    fn try_from(s: String) -> Result<Self, TypeError> {
        s.parse()
    }
}

impl From<SignedXrp> for String {
    fn from(s: SignedXrp) -> String {
        s.to_string()
    }
}

/// Terminal result of applying one transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TxResultCode {
    /// Applied, possibly with a partial delivery.
    Success,
    /// Payment found no liquidity or no usable trustline; fee still charged.
    PathDry,
    /// Delivered amount would fall short and partial delivery was not
    /// permitted; effects rolled back, fee still charged.
    PartialityNotAllowed,
    /// Offer owner cannot fund what the offer sells.
    Unfunded,
    /// Cancel target does not exist (treated as a successful no-op).
    NoSuchOffer,
    /// Submitter cannot pay the transaction fee.
    InsufficientFee,
    /// Structurally invalid transaction.
    MalformedTx,
}

impl TxResultCode {
    /// Whether the transaction's primary effect applied.
    pub fn applied(self) -> bool {
        matches!(self, TxResultCode::Success | TxResultCode::NoSuchOffer)
    }
}

impl fmt::Display for TxResultCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TxResultCode::Success => "Success",
            TxResultCode::PathDry => "PathDry",
            TxResultCode::PartialityNotAllowed => "PartialityNotAllowed",
            TxResultCode::Unfunded => "Unfunded",
            TxResultCode::NoSuchOffer => "NoSuchOffer",
            TxResultCode::InsufficientFee => "InsufficientFee",
            TxResultCode::MalformedTx => "MalformedTx",
        };
        f.write_str(s)
    }
}

/// Parses a plain non-negative decimal (`123`, `0.5`, `.5`, `7.`) into a
/// rational, returning the value and its significant-digit span (first
/// nonzero digit through last nonzero digit).
pub(crate) fn parse_decimal(s: &str) -> Result<(BigRational, usize), TypeError> {
    if s.is_empty() {
        return Err(TypeError::Amount("empty value".into()));
    }
    if s.starts_with('-') || s.starts_with('+') {
        return Err(TypeError::Amount(format!("{s:?} must be unsigned")));
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(TypeError::Amount(format!("{s:?} has no digits")));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(TypeError::Amount(format!("{s:?} is not a plain decimal")));
    }
    let digits: String = int_part.bytes().chain(frac_part.bytes()).map(char::from).collect();
    let numer = BigInt::parse_bytes(digits.as_bytes(), 10)
        .ok_or_else(|| TypeError::Amount(format!("{s:?} has no digits")))?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let sig = match (digits.find(|c| c != '0'), digits.rfind(|c| c != '0')) {
        (Some(first), Some(last)) => last - first + 1,
        _ => 0, // all zeros
    };
    Ok((BigRational::new(numer, denom), sig))
}

/// Renders a non-negative rational as a plain decimal with at most
/// [`MAX_SIG_DIGITS`] significant digits. Exact when the value terminates
/// within the limit; otherwise truncated toward zero. No exponent notation,
/// no trailing fractional zeros.
pub fn render_rational(v: &BigRational) -> String {
    debug_assert!(!v.is_negative());
    if v.is_zero() {
        return "0".into();
    }

    // A denominator of the form 2^a * 5^b terminates in max(a, b) decimal
    // places; render exactly if that stays within the digit limit.
    let mut d = v.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if d.is_one() {
        let scale = twos.max(fives);
        let digits = (v * BigRational::from_integer(BigInt::from(10u32).pow(scale)))
            .to_integer()
            .to_string();
        if let Some(s) = place_point(&digits, scale as usize) {
            return s;
        }
    }

    // Non-terminating (or too long): truncate to exactly MAX_SIG_DIGITS
    // significant digits. exponent = floor(log10(v)).
    let exponent = decimal_exponent(v);
    let shift = MAX_SIG_DIGITS as i64 - 1 - exponent;
    let scaled = if shift >= 0 {
        v * BigRational::from_integer(BigInt::from(10u32).pow(shift as u32))
    } else {
        v / BigRational::from_integer(BigInt::from(10u32).pow((-shift) as u32))
    };
    let digits = scaled.floor().to_integer().to_string();
    if shift >= 0 {
        place_point(&digits, shift as usize).expect("truncated to digit limit")
    } else {
        // Value at least 10^MAX_SIG_DIGITS: pad with zeros on the left of
        // the point.
        let mut out = digits;
        out.extend(std::iter::repeat_n('0', (-shift) as usize));
        out
    }
}

/// floor(log10(v)) for positive v.
fn decimal_exponent(v: &BigRational) -> i64 {
    let ip = v.to_integer();
    if !ip.is_zero() {
        return ip.to_string().len() as i64 - 1;
    }
    // 0 < v < 1: first nonzero digit is 10^-k.
    let ten = BigRational::from_integer(BigInt::from(10u32));
    let mut k = 1i64;
    let mut scaled = v * &ten;
    while scaled.to_integer().is_zero() {
        scaled *= &ten;
        k += 1;
    }
    -k
}

/// Inserts a decimal point `scale` digits from the right and trims, refusing
/// results whose significant span exceeds the digit limit.
fn place_point(digits: &str, scale: usize) -> Option<String> {
    let sig = match (digits.find(|c| c != '0'), digits.rfind(|c| c != '0')) {
        (Some(first), Some(last)) => last - first + 1,
        _ => return Some("0".into()),
    };
    if sig > MAX_SIG_DIGITS {
        return None;
    }
    let mut s = if scale == 0 {
        digits.to_string()
    } else if digits.len() > scale {
        let (int, frac) = digits.split_at(digits.len() - scale);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{}", "0".repeat(scale - digits.len()), digits)
    };
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    Some(s)
}

/// Convenience for tests and internal constants.
pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}
