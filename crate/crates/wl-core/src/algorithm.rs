//! Algorithm selection: which refinement rule to run and with what knobs.
//!
//! Grammar: `1wl | kwl(K) | kfwl(K) | ktfwl(K,T) | ktfwl+(K,T,ES) | n2fwl(h=H)`
//! with `ES` per the equivariant-set grammar and `H` an integer or `inf`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::es::{parse_es, Cursor, EquivariantSetSpec, EsError, Hops};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    /// Node color refinement: recolor by (own color, multiset of neighbor colors).
    OneWl,
    /// k-tuple refinement aggregating one multiset per substituted position.
    KWl { k: usize },
    /// Folklore k-tuple refinement aggregating per-node color vectors.
    KFwl { k: usize },
    /// Folklore refinement with t-tuple replacements over all of `V(G)^t`.
    KtFwl { k: usize, t: usize },
    /// Folklore refinement with t-tuple replacements drawn from an
    /// equivariant set.
    KtFwlPlus {
        k: usize,
        t: usize,
        es: EquivariantSetSpec,
    },
    /// The (2,2) instance over `(N_1(v2) x N_1(v1)) ^ (N_h(v1) ^ N_h(v2))^2`.
    N2Fwl { h: Hops },
}

impl Algorithm {
    /// Tuple arity of the colored objects.
    pub fn arity(&self) -> usize {
        match self {
            Algorithm::OneWl => 1,
            Algorithm::KWl { k } | Algorithm::KFwl { k } | Algorithm::KtFwl { k, .. } => *k,
            Algorithm::KtFwlPlus { k, .. } => *k,
            Algorithm::N2Fwl { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        match self {
            Algorithm::OneWl => Ok(()),
            Algorithm::KWl { k } | Algorithm::KFwl { k } => Self::check_k(*k),
            Algorithm::KtFwl { k, t } => {
                Self::check_k(*k)?;
                Self::check_t(*t)
            }
            Algorithm::KtFwlPlus { k, t, es } => {
                Self::check_k(*k)?;
                Self::check_t(*t)?;
                if es.arity() != *t {
                    return Err(SpecError::EsArityMismatch {
                        es_arity: es.arity(),
                        t: *t,
                    });
                }
                es.validate_for(*k).map_err(SpecError::Es)
            }
            Algorithm::N2Fwl { h } => match h {
                Hops::Finite(0) => Err(SpecError::HopsOutOfRange),
                _ => Ok(()),
            },
        }
    }

    fn check_k(k: usize) -> Result<(), SpecError> {
        if k < 2 {
            Err(SpecError::KTooSmall { k })
        } else {
            Ok(())
        }
    }

    fn check_t(t: usize) -> Result<(), SpecError> {
        if t < 1 {
            Err(SpecError::TTooSmall { t })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("tuple algorithms need k >= 2, got {k}")]
    KTooSmall { k: usize },
    #[error("replacement arity must satisfy t >= 1, got {t}")]
    TTooSmall { t: usize },
    #[error("hop count must be >= 1 or inf")]
    HopsOutOfRange,
    #[error("equivariant set has arity {es_arity} but t = {t}")]
    EsArityMismatch { es_arity: usize, t: usize },
    #[error(transparent)]
    Es(EsError),
    #[error("cannot parse algorithm at `{rest}`: {message}")]
    Parse { rest: String, message: &'static str },
    #[error("tuple space n^k = {tuples} exceeds the supported budget {budget}")]
    TupleSpaceTooLarge { tuples: u64, budget: u64 },
}

/// An algorithm plus an iteration cap. The default cap, `2 * n^k + 2`, sits
/// above the theoretical convergence bound with margin for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub algorithm: Algorithm,
    pub iteration_cap: Option<usize>,
}

impl AlgorithmSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        AlgorithmSpec {
            algorithm,
            iteration_cap: None,
        }
    }

    pub fn with_cap(algorithm: Algorithm, cap: usize) -> Self {
        AlgorithmSpec {
            algorithm,
            iteration_cap: Some(cap),
        }
    }

    pub fn effective_cap(&self, n: usize) -> usize {
        match self.iteration_cap {
            Some(cap) => cap,
            None => 2 * n.pow(self.algorithm.arity() as u32) + 2,
        }
    }
}

impl From<Algorithm> for AlgorithmSpec {
    fn from(algorithm: Algorithm) -> Self {
        AlgorithmSpec::new(algorithm)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::OneWl => write!(f, "1wl"),
            Algorithm::KWl { k } => write!(f, "kwl({k})"),
            Algorithm::KFwl { k } => write!(f, "kfwl({k})"),
            Algorithm::KtFwl { k, t } => write!(f, "ktfwl({k},{t})"),
            Algorithm::KtFwlPlus { k, t, es } => write!(f, "ktfwl+({k},{t},{es})"),
            Algorithm::N2Fwl { h } => write!(f, "n2fwl(h={h})"),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let mut cur = Cursor::new(s);
        let parse_err = |e: EsError| match e {
            EsError::Parse { rest, message } => SpecError::Parse { rest, message },
            other => SpecError::Es(other),
        };
        let alg = if cur.eat("1wl") {
            Algorithm::OneWl
        } else if cur.eat("kwl(") {
            let k = cur.integer().map_err(parse_err)?;
            cur.expect(")", "expected `)`").map_err(parse_err)?;
            Algorithm::KWl { k }
        } else if cur.eat("kfwl(") {
            let k = cur.integer().map_err(parse_err)?;
            cur.expect(")", "expected `)`").map_err(parse_err)?;
            Algorithm::KFwl { k }
        } else if cur.eat("ktfwl+(") {
            let k = cur.integer().map_err(parse_err)?;
            cur.expect(",", "expected `,`").map_err(parse_err)?;
            let t = cur.integer().map_err(parse_err)?;
            cur.expect(",", "expected `,`").map_err(parse_err)?;
            let es = parse_es(&mut cur).map_err(parse_err)?;
            cur.expect(")", "expected `)`").map_err(parse_err)?;
            Algorithm::KtFwlPlus { k, t, es }
        } else if cur.eat("ktfwl(") {
            let k = cur.integer().map_err(parse_err)?;
            cur.expect(",", "expected `,`").map_err(parse_err)?;
            let t = cur.integer().map_err(parse_err)?;
            cur.expect(")", "expected `)`").map_err(parse_err)?;
            Algorithm::KtFwl { k, t }
        } else if cur.eat("n2fwl(") {
            // Accept both `n2fwl(3)` and `n2fwl(h=3)`.
            let _ = cur.eat("h=");
            let h = cur.hops().map_err(parse_err)?;
            cur.expect(")", "expected `)`").map_err(parse_err)?;
            Algorithm::N2Fwl { h }
        } else {
            return Err(SpecError::Parse {
                rest: cur.rest().chars().take(24).collect(),
                message: "expected an algorithm name",
            });
        };
        if !cur.at_end() {
            return Err(SpecError::Parse {
                rest: cur.rest().chars().take(24).collect(),
                message: "trailing input",
            });
        }
        alg.validate()?;
        Ok(alg)
    }
}
