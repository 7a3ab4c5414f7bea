use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use relu_morse::dgvf::{compactify_and_match, cross_check_local, is_acyclic, LocalCheck, VPath};
use relu_morse::homology::{betti, chain_complex, morse_complex, verify_relative_perfectness, BettiVector, PerfectnessReport};
use relu_morse::network::fixtures;
use relu_morse::orientation::{analyze_shallow, classify_all, ShallowReport, VertexClassification};
use relu_morse::render::{render_svg, Bounds, RenderOptions};
use relu_morse::{Architecture, CanonicalComplex, Error, ReluNetwork, Tolerances};
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Domain(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
        }
    }

    pub fn report(&self) {
        match self {
            CliError::Usage(m) | CliError::Io(m) => eprintln!("error: {m}"),
            CliError::Domain(e) => {
                let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
                eprintln!("{body}");
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

pub struct RunConfig {
    pub net: ReluNetwork,
    pub output: Option<PathBuf>,
    pub tol: Tolerances,
}

impl RunConfig {
    pub fn new(
        input: Option<PathBuf>,
        fixture: Option<String>,
        output: Option<PathBuf>,
        sign: f64,
        lp_feasibility: f64,
        lp_pivot: f64,
    ) -> Result<RunConfig, CliError> {
        let tol = Tolerances { sign, lp_feasibility, lp_pivot, ..Tolerances::default() };
        tol.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let net = match (input, fixture) {
            (_, Some(name)) => named_fixture(&name)?,
            (Some(path), None) => {
                let text = fs::read_to_string(&path)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
                ReluNetwork::from_json(&text)
                    .map_err(|e| CliError::Io(format!("{} is not a valid weight file: {e}", path.display())))?
            }
            (None, None) => return Err(CliError::Usage("either --input or --fixture is required".into())),
        };
        Ok(RunConfig { net, output, tol })
    }
}

fn named_fixture(name: &str) -> Result<ReluNetwork, CliError> {
    fixtures::by_name(name).ok_or_else(|| CliError::Usage(format!("unknown fixture {name:?} (known: net-b, net-b-negated)")))
}

/// Write to `path` through a temporary file in the same directory, or to
/// standard output.
fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(content.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}")));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(content.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn parse_arch(text: &str) -> Result<Architecture, CliError> {
    let dims = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("--arch {text:?}: {e}")))?;
    Architecture::new(dims).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn gen(
    fixture: Option<&str>,
    arch: Option<&str>,
    seed: Option<u64>,
    scale: f64,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let net = match (fixture, arch, seed) {
        (Some(name), _, _) => named_fixture(name)?,
        (None, Some(arch), Some(seed)) => {
            ReluNetwork::random(&parse_arch(arch)?, seed, scale).map_err(|e| CliError::Usage(e.to_string()))?
        }
        _ => return Err(CliError::Usage("gen needs --fixture, or --arch and --seed".into())),
    };
    let mut text = net.to_json();
    text.push('\n');
    emit(output, &text)
}

pub fn build(cfg: &RunConfig) -> Result<(), CliError> {
    let complex = CanonicalComplex::build(&cfg.net, &cfg.tol)?;
    emit(cfg.output.as_deref(), &json(&complex.export()))
}

#[derive(Serialize)]
struct VertexReport {
    location: Vec<f64>,
    value: f64,
    #[serde(flatten)]
    classification: VertexClassification,
}

#[derive(Serialize)]
struct ClassifyReport {
    architecture: Vec<usize>,
    vertices: Vec<VertexReport>,
    regular: usize,
    critical_by_index: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shallow: Option<ShallowReport>,
}

pub fn classify(cfg: &RunConfig) -> Result<(), CliError> {
    let complex = CanonicalComplex::build(&cfg.net, &cfg.tol)?;
    let classes = classify_all(&complex)?;
    let mut critical_by_index = vec![0; complex.input_dim() + 1];
    for c in &classes {
        if let Some(k) = c.index() {
            critical_by_index[k] += 1;
        }
    }
    let mut vertices: Vec<VertexReport> = classes
        .into_iter()
        .enumerate()
        .map(|(v, classification)| VertexReport {
            location: complex.vertex(v).location.clone(),
            value: complex.vertex(v).value,
            classification,
        })
        .collect();
    vertices.sort_by(|a, b| a.classification.vertex.cmp(&b.classification.vertex));
    let shallow = if cfg.net.architecture().is_shallow_simplex() { Some(analyze_shallow(&complex)?) } else { None };
    let report = ClassifyReport {
        architecture: cfg.net.architecture().dims().to_vec(),
        regular: vertices.iter().filter(|v| !v.classification.is_critical()).count(),
        critical_by_index,
        vertices,
        shallow,
    };
    emit(cfg.output.as_deref(), &json(&report))
}

#[derive(Serialize)]
struct AcyclicityReport {
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<String>>,
}

#[derive(Serialize)]
struct MorseReport {
    complex_betti: BettiVector,
    morse_betti: Option<BettiVector>,
    pass: bool,
}

#[derive(Serialize)]
struct DgvfReport {
    matching: relu_morse::dgvf::MatchingExport,
    valid: bool,
    acyclicity: AcyclicityReport,
    relative_perfectness: PerfectnessReport,
    morse_homology: MorseReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    local_check: Option<LocalCheck>,
    verdict: &'static str,
}

fn witness_labels(w: &VPath) -> Vec<String> {
    w.sequence().iter().map(|s| s.to_string()).collect()
}

pub fn dgvf(cfg: &RunConfig, local_check: bool, corrupt_pair: Option<usize>) -> Result<(), CliError> {
    let complex = CanonicalComplex::build(&cfg.net, &cfg.tol)?;
    let (cc, mut matching) = compactify_and_match(&complex)?;
    if let Some(i) = corrupt_pair {
        matching = matching.unpair(i).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let valid = matching.validate(&cc).is_ok();
    let acyclic = is_acyclic(&matching, &cc)?;
    let perfect = verify_relative_perfectness(&cc, &matching);
    let complex_betti = betti(&chain_complex(&cc, None));
    let morse_betti = match morse_complex(&cc, &matching) {
        Ok(m) => Some(betti(&m)),
        Err(Error::CyclicMatching) => None,
        Err(e) => return Err(e.into()),
    };
    let morse = MorseReport { pass: morse_betti.as_ref() == Some(&complex_betti), complex_betti, morse_betti };
    let local = if local_check { Some(cross_check_local(&complex, &matching)?) } else { None };
    let pass = valid && acyclic.acyclic && perfect.pass && morse.pass && local.as_ref().is_none_or(LocalCheck::pass);
    let report = DgvfReport {
        matching: matching.export(),
        valid,
        acyclicity: AcyclicityReport {
            pass: acyclic.acyclic,
            witness: acyclic.witness.as_ref().map(witness_labels),
        },
        relative_perfectness: perfect,
        morse_homology: morse,
        local_check: local,
        verdict: if pass { "pass" } else { "fail" },
    };
    emit(cfg.output.as_deref(), &json(&report))
}

pub fn render(cfg: &RunConfig, render_box: Option<&str>) -> Result<(), CliError> {
    let bounds = render_box
        .map(|b| b.parse::<Bounds>().map_err(|e| CliError::Usage(e.to_string())))
        .transpose()?;
    let complex = CanonicalComplex::build_arrangement(&cfg.net, &cfg.tol)?;
    let svg = render_svg(&complex, &RenderOptions { bounds })?;
    emit(cfg.output.as_deref(), &svg)
}
