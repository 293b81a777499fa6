//! Operator descriptions for the `norm` subcommand.
//!
//! ```text
//! gradient:HxW   identity:N   zero:MxN   mask:N:i,j,...   dense:MxN[:seed]   libsvm:PATH
//! ```

use std::path::Path;

use apda_core::linop::LinearOperator;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CliError, Result};
use crate::formats::load_libsvm;

fn bad(spec: &str, why: &str) -> CliError {
    CliError::Config(format!("operator spec {spec:?}: {why}"))
}

fn dims(spec: &str, s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once('x').ok_or_else(|| bad(spec, "expected dimensions RxC"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| bad(spec, "dimensions must be integers"))
    };
    Ok((parse(a)?, parse(b)?))
}

pub fn parse_operator(spec: &str) -> Result<LinearOperator> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| bad(spec, "expected KIND:ARGS"))?;
    match kind {
        "gradient" => {
            let (h, w) = dims(spec, rest)?;
            if h == 0 || w == 0 {
                return Err(bad(spec, "image dimensions must be positive"));
            }
            Ok(LinearOperator::gradient(h, w))
        }
        "identity" => {
            let n = rest.parse().map_err(|_| bad(spec, "size must be an integer"))?;
            Ok(LinearOperator::identity(n))
        }
        "zero" => {
            let (m, n) = dims(spec, rest)?;
            Ok(LinearOperator::zero(m, n))
        }
        "mask" => {
            let (n, idx) = rest
                .split_once(':')
                .ok_or_else(|| bad(spec, "expected mask:N:i,j,..."))?;
            let n = n.parse().map_err(|_| bad(spec, "size must be an integer"))?;
            let indices = idx
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse().map_err(|_| bad(spec, "indices must be integers")))
                .collect::<Result<Vec<usize>>>()?;
            Ok(LinearOperator::mask(n, indices)?)
        }
        "dense" => {
            let (d, seed) = match rest.split_once(':') {
                Some((d, s)) => (d, s.parse().map_err(|_| bad(spec, "seed must be an integer"))?),
                None => (rest, 0),
            };
            let (m, n) = dims(spec, d)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data = (0..m * n).map(|_| StandardNormal.sample(&mut rng)).collect();
            Ok(LinearOperator::dense(m, n, data)?)
        }
        "libsvm" => {
            let (q, _) = load_libsvm(Path::new(rest))?;
            Ok(LinearOperator::sparse(q))
        }
        _ => Err(bad(
            spec,
            "unknown kind (gradient, identity, zero, mask, dense, libsvm)",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        assert_eq!(parse_operator("gradient:3x4").unwrap().in_dim(), 12);
        assert_eq!(parse_operator("identity:5").unwrap().out_dim(), 5);
        let z = parse_operator("zero:2x7").unwrap();
        assert_eq!((z.out_dim(), z.in_dim()), (2, 7));
        assert_eq!(parse_operator("mask:6:0,2,5").unwrap().out_dim(), 3);
        let d = parse_operator("dense:3x2:9").unwrap();
        assert_eq!((d.out_dim(), d.in_dim()), (3, 2));
    }

    #[test]
    fn rejects_malformed_specs() {
        for s in [
            "gradient",
            "gradient:3",
            "mask:4:9",
            "dense:axb",
            "blob:3",
            "identity:x",
        ] {
            assert!(parse_operator(s).is_err(), "{s}");
        }
    }
}
