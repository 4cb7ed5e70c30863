//! Text grammars for models, sets and grids.
//!
//! ```text
//! model  := family ':' key '=' real (',' key '=' real)*
//! set    := piece ('U' piece)*
//! piece  := ('(' | '[') end ',' end (')' | ']')  |  '{' end '}'
//! end    := real | 'e' | 'e^' real | 'inf'
//! grid   := count (',' count)*  |  base '^' i '..' base '^' j
//! count  := integer | real in scientific notation | base '^' exponent
//! ```

use crate::error::{Error, Result};
use crate::ldp::{BorelSubset, Interval};
use crate::stats::log_spaced;
use crate::tail_models::TailModel;

fn family_keys(family: &str) -> Option<&'static [&'static str]> {
    match family {
        "pareto" => Some(&["alpha", "xm"]),
        "burr" => Some(&["c", "k"]),
        "logpareto" => Some(&["alpha", "gamma", "x0"]),
        _ => None,
    }
}

/// Parses `family:key=value[,key=value]*`. Keys and family are
/// case-insensitive; every key of the family is required exactly once.
pub fn parse_model_spec(s: &str) -> Result<TailModel> {
    let Some(colon) = s.find(':') else {
        return Err(Error::parse(0, "expected `family:key=value,...`"));
    };
    let family = s[..colon].trim().to_ascii_lowercase();
    let keys = family_keys(&family).ok_or_else(|| {
        Error::parse(
            0,
            format!("unknown family `{family}` (pareto, burr, logpareto)"),
        )
    })?;
    let mut values: Vec<Option<f64>> = vec![None; keys.len()];
    let mut offset = colon + 1;
    for part in s[colon + 1..].split(',') {
        let Some((k, v)) = part.split_once('=') else {
            return Err(Error::parse(
                offset,
                format!("expected key=value, got `{part}`"),
            ));
        };
        let key = k.trim().to_ascii_lowercase();
        let slot = keys.iter().position(|&name| name == key).ok_or_else(|| {
            Error::parse(
                offset,
                format!(
                    "unknown key `{key}` for {family} (expected {})",
                    keys.join(", ")
                ),
            )
        })?;
        if values[slot].is_some() {
            return Err(Error::parse(offset, format!("duplicate key `{key}`")));
        }
        let value_at = offset + k.len() + 1;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::parse(value_at, format!("`{}` is not a number", v.trim())))?;
        values[slot] = Some(value);
        offset += part.len() + 1;
    }
    let mut got = Vec::with_capacity(keys.len());
    for (name, v) in keys.iter().zip(&values) {
        got.push(v.ok_or_else(|| Error::parse(s.len(), format!("missing key `{name}`")))?);
    }
    let built = match family.as_str() {
        "pareto" => TailModel::pareto(got[0], got[1]),
        "burr" => TailModel::burr(got[0], got[1]),
        _ => TailModel::log_pareto(got[0], got[1], got[2]),
    };
    built.map_err(|e| Error::parse(colon + 1, constraint_reason(e)))
}

fn constraint_reason(e: Error) -> String {
    match e {
        Error::Domain(m) | Error::InvalidInput(m) => m,
        other => other.to_string(),
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += self.rest().chars().next().map_or(1, char::len_utf8);
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, options: &[char]) -> Result<char> {
        let at = self.pos;
        match self.bump() {
            Some(c) if options.contains(&c) => Ok(c),
            Some(c) => Err(Error::parse(
                at,
                format!("expected one of {options:?}, found `{c}`"),
            )),
            None => Err(Error::parse(
                at,
                format!("expected one of {options:?}, found end of input"),
            )),
        }
    }

    /// Decimal literal, `e`, `e^k` or `inf`.
    fn endpoint(&mut self) -> Result<f64> {
        self.skip_ws();
        let at = self.pos;
        let rest = self.rest();
        if let Some(after) = rest.strip_prefix("inf") {
            self.pos += rest.len() - after.len();
            return Ok(f64::INFINITY);
        }
        if let Some(after) = rest.strip_prefix('e') {
            self.pos += 1;
            if after.starts_with('^') {
                self.pos += 1;
                let k = self.real()?;
                return Ok(k.exp());
            }
            return Ok(std::f64::consts::E);
        }
        let v = self.real()?;
        if !v.is_finite() {
            return Err(Error::parse(at, "endpoint must be finite or `inf`"));
        }
        Ok(v)
    }

    fn real(&mut self) -> Result<f64> {
        self.skip_ws();
        let at = self.pos;
        let len = self
            .rest()
            .char_indices()
            .take_while(|&(i, c)| {
                c.is_ascii_digit()
                    || c == '.'
                    || ((c == '-' || c == '+')
                        && (i == 0 || self.rest()[..i].ends_with(['e', 'E'])))
                    || ((c == 'e' || c == 'E') && i > 0)
            })
            .count();
        let text = &self.rest()[..len];
        let v: f64 = text
            .parse()
            .map_err(|_| Error::parse(at, format!("expected a number, found `{}`", self.rest())))?;
        self.pos += len;
        Ok(v)
    }
}

/// Parses a union of intervals such as `(2,3]U[5,inf)`; the result is
/// normalized (sorted, merged) and must lie in `[1, inf)`.
pub fn parse_set_spec(s: &str) -> Result<BorelSubset> {
    let mut cur = Cursor::new(s);
    let mut pieces = Vec::new();
    loop {
        let start = {
            cur.skip_ws();
            cur.pos
        };
        let open = cur.expect(&['(', '[', '{'])?;
        let low = cur.endpoint()?;
        let (high, low_closed, high_closed) = if open == '{' {
            cur.expect(&['}'])?;
            (low, true, true)
        } else {
            cur.expect(&[','])?;
            let high = cur.endpoint()?;
            let close = cur.expect(&[')', ']'])?;
            if high.is_infinite() && close == ']' {
                return Err(Error::parse(start, "an infinite endpoint must be open"));
            }
            (high, open == '[', close == ']')
        };
        if low.is_infinite() {
            return Err(Error::parse(start, "left endpoint cannot be infinite"));
        }
        if low < 1.0 {
            return Err(Error::parse(start, format!("interval starts at {low} < 1")));
        }
        if low > high {
            return Err(Error::parse(
                start,
                format!("interval has low {low} > high {high}"),
            ));
        }
        pieces.push(Interval::new(low, high, low_closed, high_closed));
        match cur.peek() {
            None => break,
            Some('U') | Some('u') | Some('∪') => {
                cur.bump();
            }
            Some(c) => {
                return Err(Error::parse(
                    cur.pos,
                    format!("expected `U` or end, found `{c}`"),
                ))
            }
        }
    }
    BorelSubset::new(pieces).map_err(|e| Error::parse(0, constraint_reason(e)))
}

const MAX_COUNT: f64 = 9.007_199_254_740_992e15; // 2^53

fn parse_power(text: &str, at: usize) -> Result<(f64, f64)> {
    let (b, k) = text.split_once('^').expect("caller checked for ^");
    let base: f64 = b
        .trim()
        .parse()
        .map_err(|_| Error::parse(at, format!("bad base in `{text}`")))?;
    let exp: f64 = k
        .trim()
        .parse()
        .map_err(|_| Error::parse(at, format!("bad exponent in `{text}`")))?;
    Ok((base, exp))
}

/// One sample size: `1000`, `1e3` or `10^3`. Must be a positive integer.
pub fn parse_count(text: &str) -> Result<u64> {
    parse_count_at(text.trim(), 0)
}

fn parse_count_at(text: &str, at: usize) -> Result<u64> {
    let value = if text.contains('^') {
        let (base, exp) = parse_power(text, at)?;
        base.powf(exp)
    } else {
        text.parse::<f64>()
            .map_err(|_| Error::parse(at, format!("`{text}` is not a number")))?
    };
    if !(value.is_finite() && (1.0..=MAX_COUNT).contains(&value)) || value.fract() != 0.0 {
        return Err(Error::parse(
            at,
            format!("`{text}` is not a positive integer sample size"),
        ));
    }
    Ok(value as u64)
}

/// A list of sample sizes, or a power range `b^i..b^j` expanded to
/// `b^i, b^{i+1}, ..., b^j`.
pub fn parse_n_grid(s: &str) -> Result<Vec<u64>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let (b1, e1) = parse_power(lo.trim(), 0)
            .map_err(|_| Error::parse(0, "a range must be written `b^i..b^j`"))?;
        let at = lo.len() + 2;
        if !hi.contains('^') {
            return Err(Error::parse(at, "a range must be written `b^i..b^j`"));
        }
        let (b2, e2) = parse_power(hi.trim(), at)?;
        if b1 != b2 || e1.fract() != 0.0 || e2.fract() != 0.0 || e1 > e2 {
            return Err(Error::parse(
                at,
                "range needs one base and integer exponents i <= j",
            ));
        }
        return (e1 as i64..=e2 as i64)
            .map(|k| parse_count_at(&format!("{b1}^{k}"), 0))
            .collect();
    }
    let mut out = Vec::new();
    let mut offset = 0;
    for part in s.split(',') {
        out.push(parse_count_at(part.trim(), offset)?);
        offset += part.len() + 1;
    }
    Ok(out)
}

/// Comma list of reals (`e` and `e^k` allowed) or `log:lo:hi:count`.
pub fn parse_real_grid(s: &str) -> Result<Vec<f64>> {
    if let Some(spec) = s.trim().strip_prefix("log:") {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::parse(0, "expected `log:lo:hi:count`"));
        }
        let lo = parse_real(parts[0])?;
        let hi = parse_real(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(0, format!("bad point count `{}`", parts[2])))?;
        if !(lo > 0.0 && hi >= lo && count > 0) {
            return Err(Error::parse(0, "log grid needs 0 < lo <= hi and count > 0"));
        }
        return Ok(log_spaced(lo, hi, count));
    }
    s.split(',').map(parse_real).collect()
}

/// A single real; accepts `e`, `e^k` and decimal literals.
pub fn parse_real(s: &str) -> Result<f64> {
    let mut cur = Cursor::new(s);
    let v = cur.endpoint()?;
    if let Some(c) = cur.peek() {
        return Err(Error::parse(cur.pos, format!("unexpected `{c}`")));
    }
    Ok(v)
}
