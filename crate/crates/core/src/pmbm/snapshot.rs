//! Line-oriented JSON snapshots of a posterior.
//!
//! The first line is a `posterior` header, followed by one `poisson` record
//! per component and, for each hypothesis, a `hypothesis` record followed by
//! one `track` record per Bernoulli track. Field names follow the in-memory
//! types.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::types::{BernoulliTrack, GlobalHypothesis, PmbmPosterior, PoissonIntensity, TrackId, UpdateKind};
use crate::distributions::{BetaGaussianComponent, BetaParams, GaussianComponent};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Serialize, Deserialize)]
struct BetaRecord {
    s: f64,
    t: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GaussianRecord {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record {
    Posterior {
        time_index: u64,
        next_track_id: u64,
    },
    Poisson {
        weight: f64,
        beta: BetaRecord,
        gaussian: GaussianRecord,
    },
    Hypothesis {
        #[serde(with = "extended")]
        log_weight: f64,
    },
    Track {
        track_id: TrackId,
        existence: f64,
        beta: BetaRecord,
        gaussian: GaussianRecord,
        #[serde(with = "extended")]
        log_weight_contrib: f64,
        last_update: UpdateKind,
        lineage: u64,
    },
}

/// Non-finite values are written as the strings `"inf"`, `"-inf"`, `"nan"`.
mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn beta_record<T: Real>(b: &BetaParams<T>) -> BetaRecord {
    BetaRecord { s: b.s().as_f64(), t: b.t().as_f64() }
}

fn gaussian_record<T: Real>(g: &GaussianComponent<T>) -> GaussianRecord {
    GaussianRecord {
        mean: g.mean.iter().map(|x| x.as_f64()).collect(),
        covariance: g
            .covariance
            .row_iter()
            .map(|r| r.iter().map(|x| x.as_f64()).collect())
            .collect(),
    }
}

fn beta_from<T: Real>(r: &BetaRecord) -> Result<BetaParams<T>> {
    BetaParams::new(T::lit(r.s), T::lit(r.t))
}

fn gaussian_from<T: Real>(r: &GaussianRecord) -> Result<GaussianComponent<T>> {
    let n = r.mean.len();
    if r.covariance.len() != n || r.covariance.iter().any(|row| row.len() != n) {
        return Err(Error::Config(format!("snapshot covariance is not {n}x{n}")));
    }
    GaussianComponent::new(
        DVector::from_iterator(n, r.mean.iter().map(|&x| T::lit(x))),
        DMatrix::from_fn(n, n, |i, j| T::lit(r.covariance[i][j])),
    )
}

pub fn write_snapshot<T: Real, W: Write>(post: &PmbmPosterior<T>, mut out: W) -> std::io::Result<()> {
    let mut line = |rec: &Record| -> std::io::Result<()> {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")
    };
    line(&Record::Posterior { time_index: post.time_index, next_track_id: post.next_track_id })?;
    for c in &post.poisson.components {
        line(&Record::Poisson {
            weight: c.weight.as_f64(),
            beta: beta_record(&c.beta),
            gaussian: gaussian_record(&c.gaussian),
        })?;
    }
    for h in &post.hypotheses {
        line(&Record::Hypothesis { log_weight: h.log_weight.as_f64() })?;
        for t in &h.tracks {
            line(&Record::Track {
                track_id: t.track_id,
                existence: t.existence.as_f64(),
                beta: beta_record(&t.beta),
                gaussian: gaussian_record(&t.gaussian),
                log_weight_contrib: t.log_weight_contrib.as_f64(),
                last_update: t.last_update,
                lineage: t.lineage,
            })?;
        }
    }
    Ok(())
}

pub fn to_string<T: Real>(post: &PmbmPosterior<T>) -> String {
    let mut buf = Vec::new();
    write_snapshot(post, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Parses a snapshot. Tracks with equal id and lineage are shared again.
pub fn read_snapshot<T: Real, R: BufRead>(input: R) -> Result<PmbmPosterior<T>> {
    let mut post = PmbmPosterior {
        poisson: PoissonIntensity::empty(),
        hypotheses: Vec::new(),
        time_index: 0,
        next_track_id: 0,
    };
    let mut shared: HashMap<(TrackId, u64), Arc<BernoulliTrack<T>>> = HashMap::new();
    let mut header = false;
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Config(format!("snapshot line {}: {e}", n + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record =
            serde_json::from_str(&line).map_err(|e| Error::Config(format!("snapshot line {}: {e}", n + 1)))?;
        match rec {
            Record::Posterior { time_index, next_track_id } => {
                post.time_index = time_index;
                post.next_track_id = next_track_id;
                header = true;
            }
            Record::Poisson { weight, beta, gaussian } => post.poisson.components.push(BetaGaussianComponent::new(
                T::lit(weight),
                beta_from(&beta)?,
                gaussian_from(&gaussian)?,
            )?),
            Record::Hypothesis { log_weight } => {
                post.hypotheses.push(GlobalHypothesis { log_weight: T::lit(log_weight), tracks: Vec::new() })
            }
            Record::Track { track_id, existence, beta, gaussian, log_weight_contrib, last_update, lineage } => {
                let hyp = post
                    .hypotheses
                    .last_mut()
                    .ok_or_else(|| Error::Config(format!("snapshot line {}: track before any hypothesis", n + 1)))?;
                let track = match shared.get(&(track_id, lineage)) {
                    Some(t) => Arc::clone(t),
                    None => {
                        let t = Arc::new(BernoulliTrack {
                            track_id,
                            existence: T::lit(existence),
                            beta: beta_from(&beta)?,
                            gaussian: gaussian_from(&gaussian)?,
                            log_weight_contrib: T::lit(log_weight_contrib),
                            last_update,
                            lineage,
                        });
                        shared.insert((track_id, lineage), Arc::clone(&t));
                        t
                    }
                };
                hyp.tracks.push(track);
            }
        }
    }
    if !header {
        return Err(Error::Config("snapshot has no posterior header".into()));
    }
    Ok(post)
}
