//! Textual oracle-set specifications for the CLI.
//!
//! Grammar: `kind:dim[:params…]`, e.g. `annular:2:0.05`, `ball:2:10`,
//! `ball:3:1:0.5,0,0`, `cells:2:0.9`, `annular-ball:2:0.2:50`.

use copies_core::constructions::{AnnularSet, BourgainSet};
use copies_core::oracle::{
    BallSet, EmptySet, Everything, HalfSpace, Intersection, PeriodicCellComplement, SetOracle,
};

pub fn parse_oracle(spec: &str) -> Result<Box<dyn SetOracle>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let kind = parts[0];
    let dim = |idx: usize| -> Result<usize, String> {
        parts
            .get(idx)
            .ok_or_else(|| format!("{kind}: missing dimension"))?
            .parse::<usize>()
            .map_err(|e| format!("{kind}: bad dimension: {e}"))
    };
    let real = |idx: usize, name: &str| -> Result<f64, String> {
        parts
            .get(idx)
            .ok_or_else(|| format!("{kind}: missing {name}"))?
            .parse::<f64>()
            .map_err(|e| format!("{kind}: bad {name}: {e}"))
    };
    match kind {
        "everything" => Ok(Box::new(Everything { dimension: dim(1)? })),
        "empty" => Ok(Box::new(EmptySet { dimension: dim(1)? })),
        "ball" => {
            let d = dim(1)?;
            let radius = real(2, "radius")?;
            let center = match parts.get(3) {
                Some(c) => parse_point(c)?,
                None => vec![0.0; d],
            };
            if center.len() != d {
                return Err("ball: center dimension mismatch".into());
            }
            Ok(Box::new(BallSet::new(center, radius)))
        }
        "halfspace" => {
            let d = dim(1)?;
            let axis = match parts.get(2) {
                Some(a) => a.parse::<usize>().map_err(|e| format!("halfspace: {e}"))?,
                None => 0,
            };
            if axis >= d {
                return Err("halfspace: axis out of range".into());
            }
            Ok(Box::new(HalfSpace::positive_axis(d, axis)))
        }
        "annular" => {
            let d = dim(1)? as u32;
            Ok(Box::new(AnnularSet::new(d, real(2, "gap")?)))
        }
        "bourgain" => {
            let d = dim(1)? as u32;
            Ok(Box::new(BourgainSet::new(d, real(2, "s")?)))
        }
        "cells" => Ok(Box::new(PeriodicCellComplement::with_density(
            dim(1)?,
            real(2, "density")?,
        ))),
        "annular-ball" => {
            let d = dim(1)?;
            let gap = real(2, "gap")?;
            let radius = real(3, "radius")?;
            Ok(Box::new(Intersection::new(vec![
                Box::new(AnnularSet::new(d as u32, gap)) as Box<dyn SetOracle>,
                Box::new(BallSet::new(vec![0.0; d], radius)),
            ])))
        }
        other => Err(format!(
            "unknown set kind `{other}` (expected everything, empty, ball, halfspace, \
             annular, bourgain, cells, annular-ball)"
        )),
    }
}

/// Comma-separated coordinates.
pub fn parse_point(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad coordinate `{t}`: {e}")))
        .collect()
}

/// Comma-separated list of reals.
pub fn parse_reals(text: &str) -> Result<Vec<f64>, String> {
    parse_point(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_zoo() {
        for spec in [
            "everything:2",
            "empty:3",
            "ball:2:10",
            "ball:3:1:0.5,0,0",
            "halfspace:2",
            "halfspace:3:2",
            "annular:2:0.05",
            "bourgain:2:0.1",
            "cells:2:0.9",
            "annular-ball:2:0.2:50",
        ] {
            assert!(parse_oracle(spec).is_ok(), "{spec}");
        }
    }

    #[test]
    fn rejects_malformed_specs() {
        assert!(parse_oracle("nope:2").is_err());
        assert!(parse_oracle("ball:2").is_err());
        assert!(parse_oracle("ball:3:1:0.5,0").is_err());
        assert!(parse_oracle("halfspace:2:7").is_err());
    }

    #[test]
    fn parsed_annular_behaves() {
        let set = parse_oracle("annular:2:0.4").unwrap();
        assert!(set.contains(&[0.0, 0.0]));
        assert!(!set.contains(&[0.5f64.sqrt(), 0.0]));
    }
}
