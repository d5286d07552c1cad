//! Sweep syntax: comma-separated items, each a single value or an inclusive
//! `start:stop[:step]` range.

use anyhow::{bail, Context, Result};

pub fn parse_f64_sweep(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in items(text)? {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        let num = |s: &str| s.parse::<f64>().with_context(|| format!("bad number {s:?} in {text:?}"));
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b] | [a, b, _] => {
                let (start, stop) = (num(a)?, num(b)?);
                let step = if parts.len() == 3 { num(parts[2])? } else { 1.0 };
                if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
                    bail!("range {item:?} needs finite bounds and a positive step");
                }
                if stop < start {
                    bail!("range {item:?} is empty");
                }
                // Tolerate accumulated rounding in (stop - start) / step.
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                out.extend((0..count).map(|i| start + i as f64 * step));
            }
            _ => bail!("cannot parse {item:?}"),
        }
    }
    Ok(out)
}

pub fn parse_usize_sweep(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in items(text)? {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        let num = |s: &str| s.parse::<usize>().with_context(|| format!("bad integer {s:?} in {text:?}"));
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b] | [a, b, _] => {
                let (start, stop) = (num(a)?, num(b)?);
                let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
                if step == 0 {
                    bail!("range {item:?} needs a positive step");
                }
                if stop < start {
                    bail!("range {item:?} is empty");
                }
                out.extend((start..=stop).step_by(step));
            }
            _ => bail!("cannot parse {item:?}"),
        }
    }
    Ok(out)
}

fn items(text: &str) -> Result<Vec<&str>> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        bail!("empty sweep");
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_ranges_are_inclusive() {
        let v = parse_f64_sweep("3.0:6.0:0.5").unwrap();
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], 3.0);
        assert!((v[6] - 6.0).abs() < 1e-12);
        assert_eq!(parse_f64_sweep("0:0.3:0.1").unwrap().len(), 4);
        assert_eq!(parse_f64_sweep("4.25").unwrap(), vec![4.25]);
        assert_eq!(parse_f64_sweep("1, 2:3").unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn integer_ranges() {
        assert_eq!(parse_usize_sweep("1:44").unwrap().len(), 44);
        assert_eq!(parse_usize_sweep("2:5,7,15,50").unwrap(), vec![2, 3, 4, 5, 7, 15, 50]);
        assert_eq!(parse_usize_sweep("1:9:4").unwrap(), vec![1, 5, 9]);
    }

    #[test]
    fn malformed_sweeps_fail() {
        for bad in ["", "a", "3:1", "1:2:0", "1:2:3:4", "1.5"] {
            assert!(parse_usize_sweep(bad).is_err(), "{bad}");
        }
        for bad in ["", "x:1", "2:1", "1:2:-1", "1:2:0"] {
            assert!(parse_f64_sweep(bad).is_err(), "{bad}");
        }
    }
}
