use std::fmt::Write as _;
use std::time::Duration;

use masterfield_core::{EngineConfig, LassoWord};
use masterfield_mc::McEstimate;
use serde::Serialize;

use crate::format::{num, opt};

/// Everything a run computed, plus the inputs needed to repeat it.
///
/// Timings are kept out of the serialized body so that repeated runs print
/// identical reports; they go to standard error instead.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub query: Query,
    pub config: Fingerprint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lassos: Option<Vec<LassoEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<FaceEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSummary>,
    #[serde(skip)]
    pub timings: Vec<(&'static str, Duration)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Query {
    pub dsl: String,
    #[serde(rename = "loop")]
    pub loop_name: String,
    pub word: String,
    pub reduced_word: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fingerprint {
    pub max_k: usize,
    pub max_alternation: usize,
    pub max_partition_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_per_area: Option<usize>,
}

impl Fingerprint {
    pub fn engine(config: &EngineConfig) -> Self {
        Self {
            max_k: config.max_k,
            max_alternation: config.max_alternation,
            max_partition_points: config.max_partition_points,
            seed: None,
            n: None,
            samples: None,
            steps_per_area: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LassoEntry {
    pub sector: usize,
    pub level: usize,
    pub exponent: i64,
    pub area: f64,
}

impl LassoEntry {
    pub fn list(word: &LassoWord) -> Vec<Self> {
        word.letters()
            .iter()
            .map(|&(key, exponent)| Self {
                sector: key.sector,
                level: key.level,
                exponent,
                area: word.area(key).unwrap_or(0.0),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceEntry {
    pub sector: usize,
    pub level: usize,
    pub area: f64,
    pub winding: i64,
    pub net_exponent: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct McSummary {
    pub mean: f64,
    pub stderr: Option<f64>,
    pub imag_mean: f64,
    pub imag_stderr: Option<f64>,
    pub samples: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub used_steps: usize,
    pub deviation: f64,
    pub z: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// `|z| > 3`.
    Warning,
    /// `|z| > 5`.
    Fail,
    /// No standard error, so no test.
    NotTested,
}

impl Status {
    pub fn from_z(z: Option<f64>) -> Self {
        match z {
            None => Status::NotTested,
            Some(z) if z.abs() > 5.0 => Status::Fail,
            Some(z) if z.abs() > 3.0 => Status::Warning,
            Some(_) => Status::Ok,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Warning => "warning (|z| > 3)",
            Status::Fail => "FAIL (|z| > 5)",
            Status::NotTested => "not tested (single sample)",
        }
    }
}

impl McSummary {
    pub fn new(est: &McEstimate, free_value: f64) -> Self {
        let z = est.z_score(free_value);
        Self {
            mean: est.mean,
            stderr: est.stderr,
            imag_mean: est.imag_mean,
            imag_stderr: est.imag_stderr,
            samples: est.samples,
            n: est.n,
            used_steps: est.used_steps,
            deviation: est.mean - free_value,
            z,
            status: Status::from_z(z),
        }
    }
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key:<16}{value}");
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let q = &self.query;
        line(&mut out, "command", self.command);
        line(&mut out, "dsl", &q.dsl);
        line(&mut out, "loop", &q.loop_name);
        line(&mut out, "word", &q.word);
        line(&mut out, "reduced word", &q.reduced_word);
        if let Some(k) = q.k {
            line(&mut out, "k", k);
        }
        if let Some(lassos) = &self.lassos {
            let keys: Vec<String> = lassos
                .iter()
                .map(|l| format!("({},{})^{}", l.sector, l.level, l.exponent))
                .collect();
            line(&mut out, "lasso word", format!("[{}]", keys.join(" ")));
        }
        if let Some(v) = self.free_value {
            line(&mut out, "free value", num(v));
        }
        if let Some(mc) = &self.mc {
            line(&mut out, "mc mean", num(mc.mean));
            line(&mut out, "mc stderr", opt(mc.stderr));
            line(&mut out, "mc imag mean", num(mc.imag_mean));
            line(&mut out, "mc imag stderr", opt(mc.imag_stderr));
            line(&mut out, "deviation", num(mc.deviation));
            line(&mut out, "z", opt(mc.z));
            line(&mut out, "status", mc.status.label());
            line(&mut out, "steps/sample", mc.used_steps);
        }
        if let Some(lassos) = &self.lassos {
            if !lassos.is_empty() {
                out.push('\n');
                let _ = writeln!(out, "{:<10}{:<10}{}", "lasso", "exponent", "area");
                for l in lassos {
                    let key = format!("({},{})", l.sector, l.level);
                    let _ = writeln!(out, "{key:<10}{:<10}{}", l.exponent, num(l.area));
                }
            }
        }
        if let Some(faces) = &self.faces {
            out.push('\n');
            let _ = writeln!(
                out,
                "{:<10}{:<18}{:<10}{}",
                "face", "area", "winding", "net exponent"
            );
            for f in faces {
                let key = format!("({},{})", f.sector, f.level);
                let _ = writeln!(
                    out,
                    "{key:<10}{:<18}{:<10}{}",
                    num(f.area),
                    f.winding,
                    f.net_exponent
                );
            }
        }
        out.push('\n');
        let c = &self.config;
        let mut caps = format!(
            "max_k={} max_alternation={} max_partition_points={}",
            c.max_k, c.max_alternation, c.max_partition_points
        );
        if let (Some(seed), Some(n), Some(samples), Some(steps)) =
            (c.seed, c.n, c.samples, c.steps_per_area)
        {
            let _ = write!(caps, " seed={seed} N={n} samples={samples} steps_per_area={steps}");
        }
        line(&mut out, "config", caps);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
