//! Binary snapshots of an in-flight run.
//!
//! Layout, all integers big-endian:
//!
//! ```text
//! "PFCK"  magic
//! u8      format version (1)
//! u8      algorithm (1 = borwein, 2 = salamin)
//! u32     target iterate
//! u32     steps done
//! fields  each as u64 length + magnitude bytes:
//!         borwein: magnifier, sqrt 2, y, z, product
//!         salamin: magnifier, a, b, sum, weight
//! ```
//!
//! Resuming from a snapshot yields bit-identical results.

use num_bigint::BigUint;

use crate::borwein::{BorweinRun, BorweinState};
use crate::fixedpoint::Magnifier;
use crate::pipeline::{AgmRun, Algorithm};
use crate::salamin::{AgmPair, SalaminRun, SalaminState};
use crate::Error;

const MAGIC: &[u8; 4] = b"PFCK";
const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub algorithm: Algorithm,
    pub target: u32,
    pub done: u32,
    pub magnifier: BigUint,
    /// Algorithm state in layout order.
    pub fields: [BigUint; 4],
}

impl Checkpoint {
    pub fn of(run: &AgmRun) -> Result<Self, Error> {
        let magnifier = run.magnifier().value().clone();
        match run {
            AgmRun::Borwein(r) => {
                let st = r.state().ok_or_else(|| {
                    Error::Checkpoint("a run for pi_0 has no state to save".into())
                })?;
                Ok(Checkpoint {
                    algorithm: Algorithm::Borwein,
                    target: r.target(),
                    done: st.iterate,
                    magnifier,
                    fields: [
                        st.s2.mantissa().clone(),
                        st.y.mantissa().clone(),
                        st.z.mantissa().clone(),
                        st.prod.mantissa().clone(),
                    ],
                })
            }
            AgmRun::Salamin(r) => {
                let st = r.state();
                Ok(Checkpoint {
                    algorithm: Algorithm::Salamin,
                    target: r.target(),
                    done: st.k,
                    magnifier,
                    fields: [
                        st.pair.a.mantissa().clone(),
                        st.pair.b.mantissa().clone(),
                        st.sum.clone(),
                        st.pow2.clone(),
                    ],
                })
            }
        }
    }

    pub fn into_run(self) -> Result<AgmRun, Error> {
        let m = Magnifier::new(self.magnifier)?;
        let [f0, f1, f2, f3] = self.fields;
        match self.algorithm {
            Algorithm::Borwein => {
                let state = BorweinState {
                    iterate: self.done,
                    s2: m.real(f0),
                    y: m.real(f1),
                    z: m.real(f2),
                    prod: m.real(f3),
                };
                Ok(AgmRun::Borwein(BorweinRun::resume(self.target, state)?))
            }
            Algorithm::Salamin => {
                let state = SalaminState {
                    pair: AgmPair {
                        a: m.real(f0),
                        b: m.real(f1),
                    },
                    sum: f2,
                    pow2: f3,
                    k: self.done,
                };
                Ok(AgmRun::Salamin(SalaminRun::resume(self.target, state)?))
            }
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(match self.algorithm {
            Algorithm::Borwein => 1,
            Algorithm::Salamin => 2,
        });
        out.extend_from_slice(&self.target.to_be_bytes());
        out.extend_from_slice(&self.done.to_be_bytes());
        for n in std::iter::once(&self.magnifier).chain(self.fields.iter()) {
            let bytes = n.to_bytes_be();
            out.extend_from_slice(&(bytes.len() as u64).to_be_bytes());
            out.extend_from_slice(&bytes);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = Reader(bytes);
        if r.take(4)? != MAGIC {
            return Err(Error::Checkpoint("not a checkpoint file".into()));
        }
        let version = r.take(1)?[0];
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let algorithm = match r.take(1)?[0] {
            1 => Algorithm::Borwein,
            2 => Algorithm::Salamin,
            t => return Err(Error::Checkpoint(format!("unknown algorithm tag {t}"))),
        };
        let target = r.u32()?;
        let done = r.u32()?;
        let magnifier = r.big()?;
        let fields = [r.big()?, r.big()?, r.big()?, r.big()?];
        if !r.0.is_empty() {
            return Err(Error::Checkpoint(format!("{} trailing bytes", r.0.len())));
        }
        Ok(Checkpoint {
            algorithm,
            target,
            done,
            magnifier,
            fields,
        })
    }
}

struct Reader<'a>(&'a [u8]);

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], Error> {
        if self.0.len() < n {
            return Err(Error::Checkpoint("truncated checkpoint".into()));
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, Error> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn big(&mut self) -> Result<BigUint, Error> {
        let len = u64::from_be_bytes(self.take(8)?.try_into().unwrap());
        let len = usize::try_from(len).map_err(|_| Error::Checkpoint("field too long".into()))?;
        Ok(BigUint::from_bytes_be(self.take(len)?))
    }
}
