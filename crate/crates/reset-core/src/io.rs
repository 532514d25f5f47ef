//! On-disk formats: scene records, sample matrices with a one-line header,
//! dataset directories with an index record and flat flow/primitive
//! serialization, versioned model bundles, and rollout traces.
//!
//! All float text uses Rust's shortest round-trip formatting, so every
//! format round-trips bit-exactly.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::flow::PointFlow;
use crate::datagen::{DemoVideo, ExpertDemo, PlayRecord};
use crate::gap::{SampleMeta, SampleSet};
use crate::learn::base::{BaseModel, NaiveModel};
use crate::learn::flowgen::FlowGenerator;
use crate::learn::reduction::ReductionModel;
use crate::learn::score::ScoreModel;
use crate::rollout::RolloutTrace;
use crate::sim::tasks::Split;
use crate::sim::{ActionPrimitive, PrimitiveClass, Task, WorldState};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed {what} record: {detail}")]
    Malformed { what: &'static str, detail: String },
    #[error("model file version {got} is not supported (expected {expected})")]
    Version { got: u32, expected: u32 },
    #[error("model feature length {got} does not match this build ({expected})")]
    FeatureLen { got: usize, expected: usize },
}

fn malformed(what: &'static str, detail: impl Into<String>) -> IoError {
    IoError::Malformed {
        what,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------------------
// Scenes: one JSON record per line.

pub fn write_scenes(path: &Path, scenes: &[WorldState]) -> Result<(), IoError> {
    let mut out = String::new();
    for scene in scenes {
        out.push_str(&serde_json::to_string(scene)?);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_scenes(path: &Path) -> Result<Vec<WorldState>, IoError> {
    let file = fs::File::open(path)?;
    BufReader::new(file)
        .lines()
        .map(|line| Ok(serde_json::from_str(&line?)?))
        .collect()
}

// ---------------------------------------------------------------------------
// Sample sets: one-line header (n, d, meta) then one whitespace-delimited
// numeric row per line.

pub fn write_sample_set(path: &Path, samples: &SampleSet) -> Result<(), IoError> {
    let mut out = String::new();
    out.push_str(&format!(
        "n={} d={} task={} split={} policy={} t={}\n",
        samples.n(),
        samples.dim(),
        samples.meta.task.name(),
        samples.meta.split.name(),
        samples.meta.policy,
        samples.meta.horizon
    ));
    for row in &samples.vectors {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

fn task_from_name(name: &str) -> Result<Task, IoError> {
    Task::ALL
        .into_iter()
        .find(|t| t.name() == name)
        .ok_or_else(|| malformed("sample set", format!("unknown task {name}")))
}

pub fn read_sample_set(path: &Path) -> Result<SampleSet, IoError> {
    let file = fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| malformed("sample set", "missing header"))??;
    let mut fields = std::collections::BTreeMap::new();
    for kv in header.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| malformed("sample set", format!("bad header field {kv}")))?;
        fields.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| -> Result<&String, IoError> {
        fields
            .get(k)
            .ok_or_else(|| malformed("sample set", format!("missing header key {k}")))
    };
    let n: usize = get("n")?
        .parse()
        .map_err(|e| malformed("sample set", format!("bad n: {e}")))?;
    let d: usize = get("d")?
        .parse()
        .map_err(|e| malformed("sample set", format!("bad d: {e}")))?;
    let task = task_from_name(get("task")?)?;
    let split = match get("split")?.as_str() {
        "in_dist" => Split::InDist,
        "ood" => Split::Ood,
        other => return Err(malformed("sample set", format!("unknown split {other}"))),
    };
    let meta = SampleMeta {
        task,
        split,
        policy: get("policy")?.clone(),
        horizon: get("t")?
            .parse()
            .map_err(|e| malformed("sample set", format!("bad t: {e}")))?,
    };

    let mut vectors = Vec::with_capacity(n);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|e| malformed("sample set", format!("bad row: {e}")))?;
        if row.len() != d {
            return Err(malformed(
                "sample set",
                format!("row has {} cells, expected {d}", row.len()),
            ));
        }
        vectors.push(row);
    }
    if vectors.len() != n {
        return Err(malformed(
            "sample set",
            format!("{} rows, header said {n}", vectors.len()),
        ));
    }
    Ok(SampleSet { vectors, meta })
}

// ---------------------------------------------------------------------------
// Dataset directories: index record plus per-record files.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetIndex {
    pub kind: String,
    pub count: usize,
    /// Records per task (empty for task-specific datasets).
    pub task_mix: std::collections::BTreeMap<String, usize>,
    pub seed: u64,
    pub config_hash: String,
}

fn write_index(dir: &Path, index: &DatasetIndex) -> Result<(), IoError> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("index.json"),
        serde_json::to_string_pretty(index)?,
    )?;
    Ok(())
}

pub fn read_index(dir: &Path) -> Result<DatasetIndex, IoError> {
    Ok(serde_json::from_str(&fs::read_to_string(
        dir.join("index.json"),
    )?)?)
}

fn flow_to_line(flow: &PointFlow) -> String {
    let mut cells = Vec::with_capacity(2 + flow.data.len() * 2);
    cells.push(flow.frames.to_string());
    cells.push(flow.points.to_string());
    for p in &flow.data {
        cells.push(format!("{}", p[0]));
        cells.push(format!("{}", p[1]));
    }
    cells.join(" ")
}

fn flow_from_line(line: &str) -> Result<PointFlow, IoError> {
    let mut it = line.split_whitespace();
    let frames: usize = it
        .next()
        .ok_or_else(|| malformed("flow", "missing frame count"))?
        .parse()
        .map_err(|e| malformed("flow", format!("bad frame count: {e}")))?;
    let points: usize = it
        .next()
        .ok_or_else(|| malformed("flow", "missing point count"))?
        .parse()
        .map_err(|e| malformed("flow", format!("bad point count: {e}")))?;
    let coords: Result<Vec<f64>, _> = it.map(str::parse).collect();
    let coords = coords.map_err(|e| malformed("flow", format!("bad coordinate: {e}")))?;
    if coords.len() != frames * points * 2 {
        return Err(malformed(
            "flow",
            format!(
                "expected {} coordinates, found {}",
                frames * points * 2,
                coords.len()
            ),
        ));
    }
    if frames == 0 || points == 0 {
        return Ok(PointFlow::empty());
    }
    let data = coords.chunks(2).map(|c| [c[0], c[1]]).collect();
    Ok(PointFlow::new(frames, points, data))
}

fn primitive_to_line(action: &ActionPrimitive) -> String {
    format!(
        "{} {} {} {} {}",
        action.class.name(),
        action.params[0],
        action.params[1],
        action.params[2],
        action.params[3]
    )
}

fn primitive_from_line(line: &str) -> Result<ActionPrimitive, IoError> {
    let mut it = line.split_whitespace();
    let class_name = it
        .next()
        .ok_or_else(|| malformed("primitive", "missing class"))?;
    let class = PrimitiveClass::ALL
        .into_iter()
        .find(|c| c.name() == class_name)
        .ok_or_else(|| malformed("primitive", format!("unknown class {class_name}")))?;
    let params: Result<Vec<f64>, _> = it.map(str::parse).collect();
    let params = params.map_err(|e| malformed("primitive", format!("bad parameter: {e}")))?;
    if params.len() != 4 {
        return Err(malformed(
            "primitive",
            format!("expected 4 parameters, found {}", params.len()),
        ));
    }
    Ok(ActionPrimitive {
        class,
        params: [params[0], params[1], params[2], params[3]],
    })
}

/// Play dataset: flows and primitives in flat numeric text, observations as
/// JSON records, one of each per episode.
pub fn write_play_dataset(
    dir: &Path,
    records: &[PlayRecord],
    index: &DatasetIndex,
) -> Result<(), IoError> {
    write_index(dir, index)?;
    let mut flows = fs::File::create(dir.join("flows.txt"))?;
    let mut prims = fs::File::create(dir.join("primitives.txt"))?;
    let mut obs = fs::File::create(dir.join("observations.jsonl"))?;
    for rec in records {
        writeln!(flows, "{}", flow_to_line(&rec.flow))?;
        writeln!(prims, "{}", primitive_to_line(&rec.primitive))?;
        writeln!(obs, "{}", serde_json::to_string(&rec.pre_observation)?)?;
    }
    Ok(())
}

pub fn read_play_dataset(dir: &Path) -> Result<(Vec<PlayRecord>, DatasetIndex), IoError> {
    let index = read_index(dir)?;
    let flows: Result<Vec<PointFlow>, IoError> =
        BufReader::new(fs::File::open(dir.join("flows.txt"))?)
            .lines()
            .map(|l| flow_from_line(&l?))
            .collect();
    let prims: Result<Vec<ActionPrimitive>, IoError> =
        BufReader::new(fs::File::open(dir.join("primitives.txt"))?)
            .lines()
            .map(|l| primitive_from_line(&l?))
            .collect();
    let obs: Result<Vec<crate::sim::Observation>, IoError> =
        BufReader::new(fs::File::open(dir.join("observations.jsonl"))?)
            .lines()
            .map(|l| Ok(serde_json::from_str(&l?)?))
            .collect();
    let (flows, prims, obs) = (flows?, prims?, obs?);
    if flows.len() != prims.len() || flows.len() != obs.len() {
        return Err(malformed("play dataset", "record files disagree in length"));
    }
    let records = obs
        .into_iter()
        .zip(flows)
        .zip(prims)
        .map(|((pre_observation, flow), primitive)| PlayRecord {
            pre_observation,
            flow,
            primitive,
        })
        .collect();
    Ok((records, index))
}

/// Demonstration dataset: full videos as JSON records.
pub fn write_demo_dataset(
    dir: &Path,
    demos: &[DemoVideo],
    index: &DatasetIndex,
) -> Result<(), IoError> {
    write_index(dir, index)?;
    let mut out = fs::File::create(dir.join("records.jsonl"))?;
    for demo in demos {
        writeln!(out, "{}", serde_json::to_string(demo)?)?;
    }
    Ok(())
}

pub fn read_demo_dataset(dir: &Path) -> Result<(Vec<DemoVideo>, DatasetIndex), IoError> {
    let index = read_index(dir)?;
    let demos: Result<Vec<DemoVideo>, IoError> =
        BufReader::new(fs::File::open(dir.join("records.jsonl"))?)
            .lines()
            .map(|l| Ok(serde_json::from_str(&l?)?))
            .collect();
    Ok((demos?, index))
}

/// Expert dataset: observation/primitive pair lists as JSON records.
pub fn write_expert_dataset(
    dir: &Path,
    demos: &[ExpertDemo],
    index: &DatasetIndex,
) -> Result<(), IoError> {
    write_index(dir, index)?;
    let mut out = fs::File::create(dir.join("records.jsonl"))?;
    for demo in demos {
        writeln!(out, "{}", serde_json::to_string(demo)?)?;
    }
    Ok(())
}

pub fn read_expert_dataset(dir: &Path) -> Result<(Vec<ExpertDemo>, DatasetIndex), IoError> {
    let index = read_index(dir)?;
    let demos: Result<Vec<ExpertDemo>, IoError> =
        BufReader::new(fs::File::open(dir.join("records.jsonl"))?)
            .lines()
            .map(|l| Ok(serde_json::from_str(&l?)?))
            .collect();
    Ok((demos?, index))
}

// ---------------------------------------------------------------------------
// Model bundles: versioned header line, JSON body, load-time dimension check.

/// Everything the evaluator needs for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub task: Task,
    pub score: ScoreModel,
    pub c_hat: f64,
    pub flowgen: FlowGenerator,
    pub reduction: ReductionModel,
    pub base: BaseModel,
    pub naive: NaiveModel,
}

pub fn write_models(path: &Path, bundle: &ModelBundle, config_hash: &str) -> Result<(), IoError> {
    let header = format!(
        "reset-models v{} feature_len={} config_hash={}\n",
        MODEL_FORMAT_VERSION,
        crate::learn::FEATURE_LEN,
        config_hash
    );
    let body = serde_json::to_string(bundle)?;
    fs::write(path, header + &body + "\n")?;
    Ok(())
}

pub fn read_models(path: &Path) -> Result<(ModelBundle, String), IoError> {
    let text = fs::read_to_string(path)?;
    let (header, body) = text
        .split_once('\n')
        .ok_or_else(|| malformed("model file", "missing header line"))?;
    let mut fields = header.split_whitespace();
    let magic = fields.next().unwrap_or_default();
    if magic != "reset-models" {
        return Err(malformed("model file", format!("bad magic {magic}")));
    }
    let version: u32 = fields
        .next()
        .and_then(|v| v.strip_prefix('v'))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| malformed("model file", "bad version field"))?;
    if version != MODEL_FORMAT_VERSION {
        return Err(IoError::Version {
            got: version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let mut feature_len = None;
    let mut config_hash = String::new();
    for kv in fields {
        if let Some(v) = kv.strip_prefix("feature_len=") {
            feature_len = v.parse::<usize>().ok();
        } else if let Some(v) = kv.strip_prefix("config_hash=") {
            config_hash = v.to_string();
        }
    }
    let got = feature_len.ok_or_else(|| malformed("model file", "missing feature_len"))?;
    if got != crate::learn::FEATURE_LEN {
        return Err(IoError::FeatureLen {
            got,
            expected: crate::learn::FEATURE_LEN,
        });
    }
    Ok((serde_json::from_str(body)?, config_hash))
}

// ---------------------------------------------------------------------------
// Traces.

pub fn write_traces(path: &Path, traces: &[RolloutTrace]) -> Result<(), IoError> {
    let mut out = fs::File::create(path)?;
    for trace in traces {
        writeln!(out, "{}", serde_json::to_string(trace)?)?;
    }
    Ok(())
}

pub fn read_traces(path: &Path) -> Result<Vec<RolloutTrace>, IoError> {
    BufReader::new(fs::File::open(path)?)
        .lines()
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}
