//! Graphons, their regularity certificates and the graphs drawn from them.
//!
//! Vertices are indexed from zero here: vertex `k` sits at `x_k = k/n` and
//! owns the cell `[k/n, (k+1)/n)`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::quadrature::gl64;

/// The built-in graphon families.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawSpec")]
pub enum GraphonSpec {
    /// `W = p`.
    Constant { p: f64 },
    /// `W(x, y) = (1 + cos(2 pi (x - y))) / 2`.
    #[default]
    Ring,
    /// `W(x, y) = max(eta0, 1 - |x - y|)`.
    Tent { eta0: f64 },
    /// Two blocks split at `split`.
    Sbm { p_in: f64, p_out: f64, split: f64 },
}

/// Flat form of [`GraphonSpec`] for deserializing. Serde lets stray fields
/// through on unit variants of tagged enums, so fields are checked by hand.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    p: Option<f64>,
    eta0: Option<f64>,
    p_in: Option<f64>,
    p_out: Option<f64>,
    split: Option<f64>,
}

impl TryFrom<RawSpec> for GraphonSpec {
    type Error = String;

    fn try_from(r: RawSpec) -> std::result::Result<Self, String> {
        let fields = [
            ("p", r.p),
            ("eta0", r.eta0),
            ("p_in", r.p_in),
            ("p_out", r.p_out),
            ("split", r.split),
        ];
        let allowed: &[&str] = match r.kind.as_str() {
            "constant" => &["p"],
            "ring" => &[],
            "tent" => &["eta0"],
            "sbm" => &["p_in", "p_out", "split"],
            other => return Err(format!("unknown graphon kind `{other}`")),
        };
        for (name, v) in fields {
            if v.is_some() && !allowed.contains(&name) {
                return Err(format!("unknown field `{name}` for graphon `{}`", r.kind));
            }
        }
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| format!("graphon `{}` needs `{name}`", r.kind))
        };
        Ok(match r.kind.as_str() {
            "constant" => GraphonSpec::Constant { p: need("p", r.p)? },
            "ring" => GraphonSpec::Ring,
            "tent" => GraphonSpec::Tent {
                eta0: need("eta0", r.eta0)?,
            },
            _ => GraphonSpec::Sbm {
                p_in: need("p_in", r.p_in)?,
                p_out: need("p_out", r.p_out)?,
                split: need("split", r.split)?,
            },
        })
    }
}

impl FromStr for GraphonSpec {
    type Err = Error;

    /// `ring`, `constant:0.7`, `tent:0.5`, `sbm` or `sbm:0.8,0.2,0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let nums = |a: Option<&str>| -> Result<Vec<f64>> {
            a.map(|a| {
                a.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::UnknownGraphon(s.into()))
                    })
                    .collect()
            })
            .unwrap_or(Ok(Vec::new()))
        };
        let v = nums(args)?;
        let spec = match (name, v.as_slice()) {
            ("ring", []) => GraphonSpec::Ring,
            ("constant", [p]) => GraphonSpec::Constant { p: *p },
            ("constant", []) => GraphonSpec::Constant { p: 1.0 },
            ("tent", [e]) => GraphonSpec::Tent { eta0: *e },
            ("tent", []) => GraphonSpec::Tent { eta0: 0.5 },
            ("sbm", []) => GraphonSpec::Sbm {
                p_in: 0.8,
                p_out: 0.2,
                split: 0.5,
            },
            ("sbm", [a, b]) => GraphonSpec::Sbm {
                p_in: *a,
                p_out: *b,
                split: 0.5,
            },
            ("sbm", [a, b, c]) => GraphonSpec::Sbm {
                p_in: *a,
                p_out: *b,
                split: *c,
            },
            _ => return Err(Error::UnknownGraphon(s.into())),
        };
        Ok(spec)
    }
}

impl fmt::Display for GraphonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphonSpec::Constant { p } => write!(f, "constant:{p}"),
            GraphonSpec::Ring => write!(f, "ring"),
            GraphonSpec::Tent { eta0 } => write!(f, "tent:{eta0}"),
            GraphonSpec::Sbm { p_in, p_out, split } => write!(f, "sbm:{p_in},{p_out},{split}"),
        }
    }
}

type KernelFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum Kind {
    Builtin(GraphonSpec),
    Custom {
        f: Arc<KernelFn>,
        diagonal_kinks: Vec<f64>,
        kinks: Vec<f64>,
    },
}

/// A symmetric kernel `W: [0,1]^2 -> [0,1]`.
#[derive(Clone)]
pub struct Graphon {
    name: String,
    kind: Kind,
}

impl fmt::Debug for Graphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graphon").field("name", &self.name).finish()
    }
}

impl Graphon {
    pub fn from_spec(spec: GraphonSpec) -> Result<Self> {
        let ok = |v: f64| (0.0..=1.0).contains(&v);
        let valid = match spec {
            GraphonSpec::Constant { p } => ok(p),
            GraphonSpec::Ring => true,
            GraphonSpec::Tent { eta0 } => ok(eta0),
            GraphonSpec::Sbm { p_in, p_out, split } => {
                ok(p_in) && ok(p_out) && split > 0.0 && split < 1.0
            }
        };
        if !valid {
            return Err(Error::InvalidParams(format!(
                "graphon parameters out of range: {spec}"
            )));
        }
        Ok(Graphon {
            name: spec.to_string(),
            kind: Kind::Builtin(spec),
        })
    }

    /// A user kernel. `diagonal_kinks` lists offsets `d` where `W(x, .)` has
    /// a kink at `x +- d`; `kinks` lists fixed kink locations.
    pub fn custom<F>(
        name: impl Into<String>,
        f: F,
        diagonal_kinks: Vec<f64>,
        kinks: Vec<f64>,
    ) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Graphon {
            name: name.into(),
            kind: Kind::Custom {
                f: Arc::new(f),
                diagonal_kinks,
                kinks,
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self) -> Option<GraphonSpec> {
        match &self.kind {
            Kind::Builtin(s) => Some(*s),
            Kind::Custom { .. } => None,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            Kind::Builtin(GraphonSpec::Constant { p }) => *p,
            Kind::Builtin(GraphonSpec::Ring) => 0.5 * (1.0 + (2.0 * PI * (x - y)).cos()),
            Kind::Builtin(GraphonSpec::Tent { eta0 }) => eta0.max(1.0 - (x - y).abs()),
            Kind::Builtin(GraphonSpec::Sbm { p_in, p_out, split }) => {
                if (x < *split) == (y < *split) {
                    *p_in
                } else {
                    *p_out
                }
            }
            Kind::Custom { f, .. } => f(x, y),
        }
    }

    /// Points in `y` where `W(x, .)` is not smooth.
    pub fn kinks(&self, x: f64) -> Vec<f64> {
        let (diag, fixed): (Vec<f64>, Vec<f64>) = match &self.kind {
            Kind::Builtin(GraphonSpec::Tent { eta0 }) => (vec![0.0, 1.0 - eta0], vec![]),
            Kind::Builtin(GraphonSpec::Sbm { split, .. }) => (vec![], vec![*split]),
            Kind::Builtin(_) => (vec![], vec![]),
            Kind::Custom {
                diagonal_kinks,
                kinks,
                ..
            } => (diagonal_kinks.clone(), kinks.clone()),
        };
        let mut out = fixed;
        for d in diag {
            out.push(x - d);
            out.push(x + d);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    Declared,
    GridEstimated,
}

/// Constants `(kappa, eta, K)`: on `|x - y| <= kappa`, `W >= eta` and
/// `W(x, .)` is `K`-Lipschitz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityCertificate {
    pub kappa: f64,
    pub eta: f64,
    pub lipschitz_k: f64,
    pub method: CertificateMethod,
    pub grid_resolution: Option<usize>,
}

/// A built-in graphon with its analytic certificate, if it has one.
#[derive(Debug, Clone)]
pub struct BuiltinGraphon {
    pub graphon: Graphon,
    pub certificate: Option<RegularityCertificate>,
    pub caveat: Option<String>,
}

/// `kappa` is only used by the ring, whose certificate depends on it.
pub fn builtin_graphon(spec: GraphonSpec, kappa: f64) -> Result<BuiltinGraphon> {
    let graphon = Graphon::from_spec(spec)?;
    let declared = |kappa: f64, eta: f64, k: f64| RegularityCertificate {
        kappa,
        eta,
        lipschitz_k: k,
        method: CertificateMethod::Declared,
        grid_resolution: None,
    };
    let (certificate, caveat) = match spec {
        GraphonSpec::Constant { p } => (Some(declared(0.49, p, 0.0)), None),
        GraphonSpec::Ring => {
            if !(kappa > 0.0 && kappa < 0.5) {
                return Err(Error::InvalidParams(format!(
                    "ring needs 0 < kappa < 1/2, got {kappa}"
                )));
            }
            (
                Some(declared(kappa, 0.5 * (1.0 + (2.0 * PI * kappa).cos()), PI)),
                None,
            )
        }
        GraphonSpec::Tent { eta0 } => (Some(declared(0.49, eta0, 1.0)), None),
        GraphonSpec::Sbm { .. } => (
            None,
            Some("assumption violated at block boundary".to_string()),
        ),
    };
    Ok(BuiltinGraphon {
        graphon,
        certificate,
        caveat,
    })
}

/// Grid proxy for the certificate: the minimum of `W` and the largest
/// difference quotient between neighbouring grid points inside the band.
pub fn estimate_regularity(
    w: &Graphon,
    kappa: f64,
    grid_resolution: usize,
) -> Result<RegularityCertificate> {
    if !(kappa > 0.0 && kappa <= 0.5) {
        return Err(Error::InvalidParams(format!(
            "kappa {kappa} not in (0, 1/2]"
        )));
    }
    if grid_resolution < 64 {
        return Err(Error::InvalidParams(format!(
            "grid resolution {grid_resolution} below 64"
        )));
    }
    let res = grid_resolution;
    let pt = |i: usize| i as f64 / res as f64;
    let inside = |i: usize, j: usize| (pt(i) - pt(j)).abs() <= kappa + 1e-12;
    let (eta, k) = (0..=res)
        .into_par_iter()
        .map(|i| {
            let x = pt(i);
            let mut eta = f64::INFINITY;
            let mut k = 0.0f64;
            let mut prev: Option<(usize, f64)> = None;
            for j in 0..=res {
                if !inside(i, j) {
                    prev = None;
                    continue;
                }
                let v = w.eval(x, pt(j));
                eta = eta.min(v);
                if let Some((jp, vp)) = prev {
                    k = k.max((v - vp).abs() / (pt(j) - pt(jp)));
                }
                prev = Some((j, v));
            }
            (eta, k)
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    if eta <= 0.0 {
        return Err(Error::Nonvanishing { eta });
    }
    Ok(RegularityCertificate {
        kappa,
        eta,
        lipschitz_k: k,
        method: CertificateMethod::GridEstimated,
        grid_resolution: Some(res),
    })
}

/// `W_x`: the mean of `W(x, .)` over `[x - r, x + r]` clipped to `[0, 1]`.
pub fn local_average(w: &Graphon, x: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::InvalidParams(format!("radius {r} not in (0, 1/2)")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain { x });
    }
    let a = (x - r).max(0.0);
    let b = (x + r).min(1.0);
    let mut edges = vec![a, b];
    edges.extend(w.kinks(x).into_iter().filter(|&t| t > a && t < b));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let rule = gl64();
    let total: f64 = edges
        .windows(2)
        .map(|p| rule.integrate(p[0], p[1], |y| w.eval(x, y)))
        .sum();
    Ok(total / (b - a))
}

/// The vertex positions `x_k = k/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexGrid {
    n: usize,
}

impl VertexGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("vertex grid needs n >= 1".into()));
        }
        Ok(VertexGrid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.point(k))
    }

    /// `(k/n, (k+1)/n)`, closed on the left.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        (self.point(k), (k + 1) as f64 / self.n as f64)
    }

    /// Cell containing `x`; `x = 1` goes to the last cell.
    #[inline]
    pub fn cell(&self, x: f64) -> usize {
        let mut k = ((x * self.n as f64).floor().max(0.0) as usize).min(self.n - 1);
        // x * n can round to either side of an integer; settle against point()
        if k + 1 < self.n && self.point(k + 1) <= x {
            k += 1;
        } else if k > 0 && self.point(k) > x {
            k -= 1;
        }
        k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdjacencyKind {
    Deterministic,
    RandomRealized,
}

/// Dense symmetric adjacency with zero diagonal, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    n: usize,
    entries: Vec<f64>,
    kind: AdjacencyKind,
    seed: Option<u64>,
}

const MAGIC: &[u8; 6] = b"GWADJ1";

impl AdjacencyMatrix {
    /// Checks symmetry, the zero diagonal and the range `[0, 1]`.
    pub fn new(
        n: usize,
        entries: Vec<f64>,
        kind: AdjacencyKind,
        seed: Option<u64>,
    ) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Shape(format!(
                "{} entries for n = {n}",
                entries.len()
            )));
        }
        for k in 0..n {
            if entries[k * n + k] != 0.0 {
                return Err(Error::Format(format!("nonzero diagonal at {k}")));
            }
            for l in 0..k {
                let v = entries[k * n + l];
                if v != entries[l * n + k] {
                    return Err(Error::Format(format!("asymmetric at ({k}, {l})")));
                }
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Format(format!(
                        "entry {v} at ({k}, {l}) outside [0, 1]"
                    )));
                }
                if kind == AdjacencyKind::RandomRealized && v != 0.0 && v != 1.0 {
                    return Err(Error::Format(format!(
                        "non-binary entry {v} in a realized graph"
                    )));
                }
            }
        }
        Ok(AdjacencyMatrix {
            n,
            entries,
            kind,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> AdjacencyKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[k * self.n + l]
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        &self.entries[k * self.n..(k + 1) * self.n]
    }

    pub fn grid(&self) -> VertexGrid {
        VertexGrid { n: self.n }
    }

    /// Copy with one symmetric pair changed, for perturbation checks.
    pub fn with_entry(&self, k: usize, l: usize, v: f64) -> Result<Self> {
        let mut e = self.entries.clone();
        e[k * self.n + l] = v;
        e[l * self.n + k] = v;
        AdjacencyMatrix::new(self.n, e, self.kind, self.seed)
    }

    fn from_lower(n: usize, mut entries: Vec<f64>, kind: AdjacencyKind, seed: Option<u64>) -> Self {
        for k in 0..n {
            for l in k + 1..n {
                entries[k * n + l] = entries[l * n + k];
            }
        }
        AdjacencyMatrix {
            n,
            entries,
            kind,
            seed,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record([self.n.to_string()])?;
        for k in 0..self.n {
            w.write_record(self.row(k).iter().map(|&v| sig17(v)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV layout. A matrix with only 0/1 entries is taken as realized.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(input);
        let mut records = r.records();
        let head = records
            .next()
            .ok_or_else(|| Error::Format("empty adjacency file".into()))??;
        let n: usize = head
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Format("first row must hold n".into()))?;
        let mut entries = Vec::with_capacity(n * n);
        for rec in records {
            let rec = rec?;
            if rec.len() != n {
                return Err(Error::Shape(format!(
                    "row of length {} for n = {n}",
                    rec.len()
                )));
            }
            for s in rec.iter() {
                entries.push(
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Format(e.to_string()))?,
                );
            }
        }
        Self::new(n, entries.clone(), infer_kind(&entries), None)
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        let n = u32::try_from(self.n).map_err(|_| Error::Format("n exceeds u32".into()))?;
        out.write_all(&n.to_le_bytes())?;
        for v in &self.entries {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 6];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic, expected GWADJ1".into()));
        }
        let mut b4 = [0u8; 4];
        input.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        let mut buf = vec![0u8; n * n * 8];
        input.read_exact(&mut buf)?;
        let entries: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Self::new(n, entries.clone(), infer_kind(&entries), None)
    }

    /// Writes CSV for a `.csv` extension and the binary layout otherwise.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        if is_csv(path) {
            self.write_csv(file)
        } else {
            self.write_binary(file)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        if is_csv(path) {
            Self::read_csv(file)
        } else {
            Self::read_binary(file)
        }
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn infer_kind(entries: &[f64]) -> AdjacencyKind {
    if entries.iter().all(|&v| v == 0.0 || v == 1.0) {
        AdjacencyKind::RandomRealized
    } else {
        AdjacencyKind::Deterministic
    }
}

/// `A[k][l] = W(x_k, x_l)` off the diagonal.
pub fn deterministic_graph(w: &Graphon, n: usize) -> Result<AdjacencyMatrix> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("graph needs n >= 2, got {n}")));
    }
    let grid = VertexGrid { n };
    let mut entries = vec![0.0; n * n];
    entries.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
        let x = grid.point(k);
        for (l, v) in row.iter_mut().enumerate().take(k) {
            *v = w.eval(x, grid.point(l));
        }
    });
    Ok(AdjacencyMatrix::from_lower(
        n,
        entries,
        AdjacencyKind::Deterministic,
        None,
    ))
}

/// The uniform draw behind entry `(k, l)`, `k > l`: the `l`-th word of
/// ChaCha8 stream `k` under `seed`. It does not depend on `n`.
pub fn edge_uniforms(seed: u64, k: usize) -> impl Iterator<Item = f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    std::iter::repeat_with(move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
}

/// Bernoulli edges `xi_kl ~ Bernoulli(W(x_k, x_l))`, independent over `k > l`.
pub fn random_graph(w: &Graphon, n: usize, seed: u64) -> Result<AdjacencyMatrix> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("graph needs n >= 2, got {n}")));
    }
    let grid = VertexGrid { n };
    let mut entries = vec![0.0; n * n];
    entries.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
        let x = grid.point(k);
        for (l, (v, u)) in row
            .iter_mut()
            .zip(edge_uniforms(seed, k))
            .enumerate()
            .take(k)
        {
            *v = if u < w.eval(x, grid.point(l)) {
                1.0
            } else {
                0.0
            };
        }
    });
    Ok(AdjacencyMatrix::from_lower(
        n,
        entries,
        AdjacencyKind::RandomRealized,
        Some(seed),
    ))
}

/// Piecewise-constant graphon of an adjacency matrix.
#[derive(Debug, Clone)]
pub struct StepGraphon {
    adjacency: Arc<AdjacencyMatrix>,
}

impl StepGraphon {
    pub fn n(&self) -> usize {
        self.adjacency.n
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let g = self.adjacency.grid();
        self.adjacency.get(g.cell(x), g.cell(y))
    }
}

pub fn step_graphon(adj: &AdjacencyMatrix) -> StepGraphon {
    StepGraphon {
        adjacency: Arc::new(adj.clone()),
    }
}

/// Piecewise-constant signal: value `k` on cell `k`, vertex-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSignal {
    grid: VertexGrid,
    channels: usize,
    values: Vec<Complex64>,
}

impl StepSignal {
    pub fn new(n: usize, channels: usize, values: Vec<Complex64>) -> Result<Self> {
        if channels == 0 || values.len() != n * channels {
            return Err(Error::Shape(format!(
                "{} values for n = {n} and {channels} channels",
                values.len()
            )));
        }
        Ok(StepSignal {
            grid: VertexGrid::new(n)?,
            channels,
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn grid(&self) -> VertexGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn vertex(&self, k: usize) -> &[Complex64] {
        &self.values[k * self.channels..(k + 1) * self.channels]
    }

    pub fn eval(&self, x: f64) -> &[Complex64] {
        self.vertex(self.grid.cell(x))
    }
}

/// Scalar real values, one per vertex.
pub fn step_signal(values: &[f64], n: usize) -> Result<StepSignal> {
    StepSignal::new(
        n,
        1,
        values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    )
}
