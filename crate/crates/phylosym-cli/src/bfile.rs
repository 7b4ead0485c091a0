//! OEIS b-file checking. A b-file is a plain-text list of `n a(n)` pairs,
//! one per line, with `#` comment lines allowed. Every line whose index
//! falls inside the computable range is compared against exact values from
//! the library; a short embedded prefix per sequence pins the expected
//! indexing convention independently of our own code.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use num_bigint::BigUint;
use num_rational::BigRational;

use phylosym::series;
use phylosym::tree;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeqId {
    /// Shape counts u_n (offset 0)
    A001190,
    /// The specialization [z^n] F(z, 2) (offset 1)
    A003609,
    /// Double factorials (2n-1)!!, i.e. b_{n+1} (offset 0)
    A001147,
}

impl SeqId {
    pub fn name(self) -> &'static str {
        match self {
            SeqId::A001190 => "A001190",
            SeqId::A003609 => "A003609",
            SeqId::A001147 => "A001147",
        }
    }

    /// Leading terms under the sequence's own offset convention.
    pub fn embedded_prefix(self) -> (i64, &'static [u64]) {
        match self {
            SeqId::A001190 => (0, &[0, 1, 1, 1, 2, 3, 6, 11, 23, 46, 98]),
            SeqId::A003609 => (1, &[1, 2, 2, 10, 14, 42, 90, 354]),
            SeqId::A001147 => (0, &[1, 1, 3, 15, 105, 945, 10395, 135135, 2027025, 34459425]),
        }
    }
}

/// Exact values computed on demand, shared across all lines of one check.
pub struct SeqContext {
    order: usize,
    otter: Option<Vec<BigUint>>,
    f_at_two: Option<Vec<BigUint>>,
}

impl SeqContext {
    pub fn new(order: usize) -> Self {
        SeqContext { order, otter: None, f_at_two: None }
    }

    fn otter(&mut self) -> &[BigUint] {
        self.otter.get_or_insert_with(|| series::otter_counts(self.order))
    }

    fn f_at_two(&mut self) -> &[BigUint] {
        let order = self.order;
        self.f_at_two.get_or_insert_with(|| {
            let f = series::bivariate_f(order);
            let two = BigRational::from_integer(2.into());
            series::specialize(&f, &two)
                .coeffs()
                .iter()
                .map(|c| c.to_integer().to_biguint().expect("nonnegative"))
                .collect()
        })
    }

    /// `None` means the index is beyond what we can compute at this order.
    pub fn exact(&mut self, id: SeqId, n: i64) -> Result<Option<BigUint>> {
        let (offset, _) = id.embedded_prefix();
        if n < offset {
            bail!("index {n} is below the sequence offset {offset}");
        }
        let n = n as usize;
        let v = match id {
            SeqId::A001190 => (n <= self.order).then(|| self.otter()[n].clone()),
            SeqId::A003609 => (n <= self.order).then(|| self.f_at_two()[n].clone()),
            SeqId::A001147 => {
                // cheap for any sane index, but cap it so a typo in the
                // index column cannot turn into an unbounded computation
                (n <= self.order.max(2_000)).then(|| tree::count_phylo(n + 1))
            }
        };
        Ok(v)
    }
}

#[derive(Debug)]
pub struct BfileReport {
    pub id: SeqId,
    pub checked: usize,
    pub skipped: usize,
}

/// Confirms one embedded prefix against freshly computed values.
fn prefix_check(ctx: &mut SeqContext, id: SeqId, order: usize) -> Result<()> {
    let (offset, prefix) = id.embedded_prefix();
    for (i, &v) in prefix.iter().enumerate() {
        let n = offset + i as i64;
        let computed = ctx
            .exact(id, n)?
            .with_context(|| format!("{}: order {order} too small for n = {n}", id.name()))?;
        if computed != BigUint::from(v) {
            bail!("{}({n}): computed {computed}, embedded {v}", id.name());
        }
    }
    Ok(())
}

/// Confirms every embedded prefix against freshly computed values.
pub fn verify_prefixes(order: usize) -> Result<()> {
    for id in [SeqId::A001190, SeqId::A003609, SeqId::A001147] {
        prefix_check(&mut SeqContext::new(order), id, order)?;
    }
    Ok(())
}

pub fn load_and_check(id: SeqId, path: &Path, order: usize) -> Result<BfileReport> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    check_text(id, &text, order)
}

pub fn check_text(id: SeqId, text: &str, order: usize) -> Result<BfileReport> {
    let mut ctx = SeqContext::new(order);

    // the embedded prefix and the computed values must agree before we
    // trust either as the reference
    prefix_check(&mut ctx, id, order)?;

    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut last_n: Option<i64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let n: i64 = fields
            .next()
            .expect("non-empty line has a first field")
            .parse()
            .with_context(|| format!("line {lineno}: malformed index"))?;
        let value = fields
            .next()
            .with_context(|| format!("line {lineno}: missing value field"))?;
        let value: BigUint = value
            .parse()
            .map_err(|e| anyhow::anyhow!("line {lineno}: malformed value: {e}"))?;
        if let Some(extra) = fields.next() {
            bail!("line {lineno}: unexpected trailing field {extra:?}");
        }
        if let Some(prev) = last_n {
            if n <= prev {
                bail!("line {lineno}: index {n} does not increase (previous was {prev})");
            }
        }
        last_n = Some(n);
        match ctx.exact(id, n).with_context(|| format!("line {lineno}"))? {
            Some(expected) => {
                if value != expected {
                    bail!(
                        "line {lineno}: {}({n}) should be {expected}, file has {value}",
                        id.name()
                    );
                }
                checked += 1;
            }
            None => skipped += 1,
        }
    }
    if checked == 0 {
        bail!("no line of the file overlaps the computable range");
    }
    Ok(BfileReport { id, checked, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_a_clean_prefix() {
        let text = "# comment\n0 0\n1 1\n2 1\n3 1\n4 2\n5 3\n6 6\n7 11\n";
        let r = check_text(SeqId::A001190, text, 64).unwrap();
        assert_eq!(r.checked, 8);
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn rejects_a_wrong_value() {
        let text = "1 1\n2 1\n3 1\n4 3\n";
        let err = check_text(SeqId::A001190, text, 64).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("line 4"), "{msg}");
        assert!(msg.contains("should be 2"), "{msg}");
    }

    #[test]
    fn rejects_malformed_lines() {
        let err = check_text(SeqId::A001147, "0 1\nx 3\n", 32).unwrap_err();
        assert!(format!("{err:#}").contains("line 2"));
        let err = check_text(SeqId::A001147, "0 1\n1 1 9\n", 32).unwrap_err();
        assert!(format!("{err:#}").contains("trailing"));
        let err = check_text(SeqId::A001147, "0 1\n0 1\n", 32).unwrap_err();
        assert!(format!("{err:#}").contains("increase"));
    }

    #[test]
    fn counts_lines_beyond_the_order() {
        let text = "1 1\n2 2\n3 2\n4 10\n40 1\n";
        let r = check_text(SeqId::A003609, text, 32).unwrap();
        assert_eq!((r.checked, r.skipped), (4, 1));
        // same line inside the computable range must now be checked, and
        // the bogus value rejected
        assert!(check_text(SeqId::A003609, text, 64).is_err());
    }

    #[test]
    fn double_factorials_allow_large_indexes() {
        let text = "0 1\n1 1\n2 3\n3 15\n4 105\n5 945\n";
        let r = check_text(SeqId::A001147, text, 16).unwrap();
        assert_eq!(r.checked, 6);
    }

    #[test]
    fn zero_is_not_a_valid_index_for_offset_one() {
        assert!(check_text(SeqId::A003609, "0 1\n1 1\n", 32).is_err());
    }

    #[test]
    fn prefix_agrees_with_library() {
        for id in [SeqId::A001190, SeqId::A003609, SeqId::A001147] {
            let mut ctx = SeqContext::new(16);
            let (offset, prefix) = id.embedded_prefix();
            for (i, &v) in prefix.iter().enumerate().take(10) {
                let n = offset + i as i64;
                let got = ctx.exact(id, n).unwrap().unwrap();
                assert_eq!(got, BigUint::from(v), "{} at {}", id.name(), n);
            }
        }
    }
}
