//! Coupled-system model: subsystem dynamics, neighbor structure, noise
//! models, constraint polytopes, and probability levels.
//!
//! Systems are ingested from a JSON config (see the repository README for
//! the schema) and validated on construction; neighbor sets are always
//! derived from the nonzero coupling blocks, never read from the file.
//! Subsystem labels are 1-based in configs and error messages, 0-based in
//! the API.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::conic;
use crate::{Error, Result};

/// Symmetry / PSD tolerance used when validating covariance and weight
/// matrices.
const PSD_TOL: f64 = 1e-10;

/// Convex polytope `{ x : H x <= h }` with the origin in its interior.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    /// Facet normals, one row per facet.
    pub normals: DMatrix<f64>,
    /// Facet offsets, strictly positive.
    pub offsets: DVector<f64>,
}

impl Polytope {
    pub fn new(normals: DMatrix<f64>, offsets: DVector<f64>) -> core::result::Result<Self, String> {
        if normals.nrows() != offsets.len() {
            return Err(format!(
                "facet count mismatch: H has {} rows, h has {} entries",
                normals.nrows(),
                offsets.len()
            ));
        }
        if normals.iter().any(|v| !v.is_finite()) || offsets.iter().any(|v| !v.is_finite()) {
            return Err("non-finite entries".to_string());
        }
        for r in 0..normals.nrows() {
            if offsets[r] <= 0.0 {
                return Err(format!("facet {} offset {} not strictly positive; the origin must lie in the interior", r, offsets[r]));
            }
            if normals.row(r).norm() == 0.0 {
                return Err(format!("facet {r} has a zero normal row"));
            }
        }
        Ok(Self { normals, offsets })
    }

    pub fn dim(&self) -> usize {
        self.normals.ncols()
    }

    pub fn num_facets(&self) -> usize {
        self.normals.nrows()
    }

    /// Membership test with absolute slack `tol` per facet.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        let vals = &self.normals * x;
        (0..self.num_facets()).all(|r| vals[r] <= self.offsets[r] + tol)
    }
}

/// One LTI subsystem with its coupling blocks, noise second moments,
/// constraints, probability levels, and stage-cost weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsystem {
    /// 0-based index within the graph.
    pub index: usize,
    pub state_dim: usize,
    pub input_dim: usize,
    pub output_dim: usize,
    /// Nonzero state-coupling blocks `A_ij`, keyed by 0-based neighbor index.
    pub a_blocks: BTreeMap<usize, DMatrix<f64>>,
    pub b: DMatrix<f64>,
    /// Nonzero output-coupling blocks `C_ij`.
    pub c_blocks: BTreeMap<usize, DMatrix<f64>>,
    pub sigma_w: DMatrix<f64>,
    pub sigma_d: DMatrix<f64>,
    pub state_set: Polytope,
    pub input_set: Polytope,
    pub p_x: f64,
    /// Input chance-constraint level; when absent no input tightening is
    /// generated.
    pub p_u: Option<f64>,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

/// The coupled system: subsystems, derived neighbor sets, and dimension
/// bookkeeping. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemGraph {
    subsystems: Vec<Subsystem>,
    neighbor_sets: Vec<Vec<usize>>,
    state_offsets: Vec<usize>,
    input_offsets: Vec<usize>,
    output_offsets: Vec<usize>,
    n: usize,
    m: usize,
    p: usize,
}

/// Globally assembled matrices of the coupled system.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub sigma_w: DMatrix<f64>,
    pub sigma_d: DMatrix<f64>,
}

// --------------------------------------------------------------------------
// Config schema
// --------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolytopeConfig {
    #[serde(rename = "H")]
    h: Vec<Vec<f64>>,
    #[serde(rename = "h")]
    offsets: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SubsystemConfig {
    n: usize,
    m: usize,
    p: usize,
    #[serde(rename = "A")]
    a: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(rename = "Sigma_W")]
    sigma_w: Vec<Vec<f64>>,
    #[serde(rename = "Sigma_D")]
    sigma_d: Vec<Vec<f64>>,
    #[serde(rename = "X")]
    x: PolytopeConfig,
    #[serde(rename = "U")]
    u: PolytopeConfig,
    p_x: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p_u: Option<f64>,
    #[serde(rename = "Q")]
    q: Vec<Vec<f64>>,
    #[serde(rename = "R")]
    r: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SystemConfig {
    subsystems: Vec<SubsystemConfig>,
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(Error::Parse(format!("{what}: empty matrix")));
    }
    let ncols = rows[0].len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse(format!("{what}: ragged or empty rows")));
    }
    let m = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse(format!("{what}: non-finite entry")));
    }
    Ok(m)
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn check_psd(m: &DMatrix<f64>, what: &str, strict: bool) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Parse(format!("{what}: not square")));
    }
    let scale = 1.0 + m.norm();
    if (m - m.transpose()).norm() > PSD_TOL * scale {
        return Err(Error::NotPsd { what: what.to_string(), min_eig: f64::NAN });
    }
    let min_eig = conic::min_eigenvalue(m)?;
    let bound = if strict { PSD_TOL * scale } else { -PSD_TOL * scale };
    if min_eig < bound {
        return Err(Error::NotPsd { what: what.to_string(), min_eig });
    }
    Ok(())
}

fn parse_block_map(
    raw: &BTreeMap<String, Vec<Vec<f64>>>,
    subsystem: usize,
    total: usize,
    what: &str,
) -> Result<BTreeMap<usize, DMatrix<f64>>> {
    let mut out = BTreeMap::new();
    for (key, rows) in raw {
        let label: usize = key.parse().map_err(|_| {
            Error::Parse(format!("subsystem {}: {what} key {key:?} is not an index", subsystem + 1))
        })?;
        if label < 1 || label > total {
            return Err(Error::Parse(format!(
                "subsystem {}: {what} references unknown subsystem {label}",
                subsystem + 1
            )));
        }
        let m = rows_to_matrix(rows, &format!("{what}[{label}] of subsystem {}", subsystem + 1))?;
        // exact-zero blocks are equivalent to absent blocks
        if m.iter().any(|&v| v != 0.0) {
            out.insert(label - 1, m);
        }
    }
    Ok(out)
}

/// Parse and validate a system config from JSON text.
pub fn load_system(config_source: &str) -> Result<SystemGraph> {
    let cfg: SystemConfig =
        serde_json::from_str(config_source).map_err(|e| Error::Parse(e.to_string()))?;
    if cfg.subsystems.is_empty() {
        return Err(Error::Parse("config declares no subsystems".to_string()));
    }
    let total = cfg.subsystems.len();
    let dims: Vec<usize> = cfg.subsystems.iter().map(|s| s.n).collect();

    let mut subsystems = Vec::with_capacity(total);
    for (i, sc) in cfg.subsystems.iter().enumerate() {
        let label = i + 1;
        if sc.n == 0 || sc.m == 0 || sc.p == 0 {
            return Err(Error::Parse(format!("subsystem {label}: dimensions must be positive")));
        }
        let a_blocks = parse_block_map(&sc.a, i, total, "A")?;
        for (&j, blk) in &a_blocks {
            if blk.nrows() != sc.n || blk.ncols() != dims[j] {
                return Err(Error::DimensionMismatch {
                    i: label,
                    j: j + 1,
                    detail: format!(
                        "A block is {}x{}, expected {}x{}",
                        blk.nrows(),
                        blk.ncols(),
                        sc.n,
                        dims[j]
                    ),
                });
            }
        }
        let c_blocks = parse_block_map(&sc.c, i, total, "C")?;
        for (&j, blk) in &c_blocks {
            if blk.nrows() != sc.p || blk.ncols() != dims[j] {
                return Err(Error::DimensionMismatch {
                    i: label,
                    j: j + 1,
                    detail: format!(
                        "C block is {}x{}, expected {}x{}",
                        blk.nrows(),
                        blk.ncols(),
                        sc.p,
                        dims[j]
                    ),
                });
            }
        }
        let b = rows_to_matrix(&sc.b, &format!("B of subsystem {label}"))?;
        if b.nrows() != sc.n || b.ncols() != sc.m {
            return Err(Error::DimensionMismatch {
                i: label,
                j: label,
                detail: format!("B is {}x{}, expected {}x{}", b.nrows(), b.ncols(), sc.n, sc.m),
            });
        }
        let sigma_w = rows_to_matrix(&sc.sigma_w, &format!("Sigma_W of subsystem {label}"))?;
        if sigma_w.nrows() != sc.n {
            return Err(Error::DimensionMismatch {
                i: label,
                j: label,
                detail: format!("Sigma_W is {}x{}, expected {0}x{0}", sigma_w.nrows(), sigma_w.ncols()),
            });
        }
        check_psd(&sigma_w, &format!("Sigma_W of subsystem {label}"), false)?;
        let sigma_d = rows_to_matrix(&sc.sigma_d, &format!("Sigma_D of subsystem {label}"))?;
        if sigma_d.nrows() != sc.p {
            return Err(Error::DimensionMismatch {
                i: label,
                j: label,
                detail: "Sigma_D dimension does not match p".to_string(),
            });
        }
        check_psd(&sigma_d, &format!("Sigma_D of subsystem {label}"), false)?;
        let q = rows_to_matrix(&sc.q, &format!("Q of subsystem {label}"))?;
        if q.nrows() != sc.n {
            return Err(Error::DimensionMismatch {
                i: label,
                j: label,
                detail: "Q dimension does not match n".to_string(),
            });
        }
        check_psd(&q, &format!("Q of subsystem {label}"), false)?;
        let r = rows_to_matrix(&sc.r, &format!("R of subsystem {label}"))?;
        if r.nrows() != sc.m {
            return Err(Error::DimensionMismatch {
                i: label,
                j: label,
                detail: "R dimension does not match m".to_string(),
            });
        }
        check_psd(&r, &format!("R of subsystem {label}"), true)?;

        let state_set = build_polytope(&sc.x, sc.n, label)?;
        let input_set = build_polytope(&sc.u, sc.m, label)?;
        if !(sc.p_x > 0.0 && sc.p_x < 1.0) {
            return Err(Error::Parse(format!("subsystem {label}: p_x must lie strictly in (0, 1)")));
        }
        if let Some(pu) = sc.p_u {
            if !(pu > 0.0 && pu < 1.0) {
                return Err(Error::Parse(format!("subsystem {label}: p_u must lie strictly in (0, 1)")));
            }
        }

        subsystems.push(Subsystem {
            index: i,
            state_dim: sc.n,
            input_dim: sc.m,
            output_dim: sc.p,
            a_blocks,
            b,
            c_blocks,
            sigma_w,
            sigma_d,
            state_set,
            input_set,
            p_x: sc.p_x,
            p_u: sc.p_u,
            q,
            r,
        });
    }

    SystemGraph::from_subsystems(subsystems)
}

fn build_polytope(cfg: &PolytopeConfig, dim: usize, label: usize) -> Result<Polytope> {
    let h = rows_to_matrix(&cfg.h, &format!("constraint H of subsystem {label}"))?;
    if h.ncols() != dim {
        return Err(Error::BadPolytope {
            subsystem: label,
            detail: format!("H has {} columns, expected {dim}", h.ncols()),
        });
    }
    let offs = DVector::from_vec(cfg.offsets.clone());
    Polytope::new(h, offs).map_err(|detail| Error::BadPolytope { subsystem: label, detail })
}

impl SystemGraph {
    /// Assemble a graph from validated subsystems, deriving neighbor sets
    /// from the nonzero blocks.
    pub fn from_subsystems(subsystems: Vec<Subsystem>) -> Result<Self> {
        let total = subsystems.len();
        let mut neighbor_sets = Vec::with_capacity(total);
        for (i, s) in subsystems.iter().enumerate() {
            let mut set: Vec<usize> = (0..total)
                .filter(|&j| j == i || s.a_blocks.contains_key(&j) || s.c_blocks.contains_key(&j))
                .collect();
            set.sort_unstable();
            neighbor_sets.push(set);
        }
        let mut state_offsets = Vec::with_capacity(total);
        let mut input_offsets = Vec::with_capacity(total);
        let mut output_offsets = Vec::with_capacity(total);
        let (mut n, mut m, mut p) = (0, 0, 0);
        for s in &subsystems {
            state_offsets.push(n);
            input_offsets.push(m);
            output_offsets.push(p);
            n += s.state_dim;
            m += s.input_dim;
            p += s.output_dim;
        }
        Ok(Self { subsystems, neighbor_sets, state_offsets, input_offsets, output_offsets, n, m, p })
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn subsystem(&self, i: usize) -> &Subsystem {
        &self.subsystems[i]
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    /// Ordered (ascending) neighbor set of subsystem `i`, including `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbor_sets[i]
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    pub fn output_dim(&self) -> usize {
        self.p
    }

    pub fn state_offset(&self, i: usize) -> usize {
        self.state_offsets[i]
    }

    pub fn input_offset(&self, i: usize) -> usize {
        self.input_offsets[i]
    }

    pub fn output_offset(&self, i: usize) -> usize {
        self.output_offsets[i]
    }

    /// Total state dimension of the neighborhood of `i`.
    pub fn neighborhood_state_dim(&self, i: usize) -> usize {
        self.neighbor_sets[i].iter().map(|&j| self.subsystems[j].state_dim).sum()
    }

    /// The 0/1 row-selection matrix `T_i` with `x_Ni = T_i x`.
    pub fn selector(&self, i: usize) -> DMatrix<f64> {
        let rows = self.neighborhood_state_dim(i);
        let mut t = DMatrix::<f64>::zeros(rows, self.n);
        let mut r = 0;
        for &j in &self.neighbor_sets[i] {
            for k in 0..self.subsystems[j].state_dim {
                t[(r, self.state_offsets[j] + k)] = 1.0;
                r += 1;
            }
        }
        t
    }

    /// Restrict a global state vector to the neighborhood of `i`
    /// (`T_i x`, ordering matching the ascending neighbor list).
    pub fn lift_to_neighborhood(&self, i: usize, global: &DVector<f64>) -> Result<DVector<f64>> {
        if global.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: global.len() });
        }
        let mut out = DVector::zeros(self.neighborhood_state_dim(i));
        let mut r = 0;
        for &j in &self.neighbor_sets[i] {
            let d = self.subsystems[j].state_dim;
            out.rows_mut(r, d).copy_from(&global.rows(self.state_offsets[j], d));
            r += d;
        }
        Ok(out)
    }

    /// Neighborhood row `A_Ni` of subsystem `i`: the horizontal stack of
    /// `A_ij` over the ordered neighbor list (zero where absent).
    pub fn a_neighborhood(&self, i: usize) -> DMatrix<f64> {
        let s = &self.subsystems[i];
        let mut out = DMatrix::<f64>::zeros(s.state_dim, self.neighborhood_state_dim(i));
        let mut c = 0;
        for &j in &self.neighbor_sets[i] {
            let d = self.subsystems[j].state_dim;
            if let Some(blk) = s.a_blocks.get(&j) {
                out.view_mut((0, c), (s.state_dim, d)).copy_from(blk);
            }
            c += d;
        }
        out
    }

    /// Neighborhood output row `C_Ni` of subsystem `i`.
    pub fn c_neighborhood(&self, i: usize) -> DMatrix<f64> {
        let s = &self.subsystems[i];
        let mut out = DMatrix::<f64>::zeros(s.output_dim, self.neighborhood_state_dim(i));
        let mut c = 0;
        for &j in &self.neighbor_sets[i] {
            let d = self.subsystems[j].state_dim;
            if let Some(blk) = s.c_blocks.get(&j) {
                out.view_mut((0, c), (s.output_dim, d)).copy_from(blk);
            }
            c += d;
        }
        out
    }

    /// Assemble the block-sparse global matrices.
    pub fn assemble_global(&self) -> GlobalSystem {
        let mut a = DMatrix::<f64>::zeros(self.n, self.n);
        let mut b = DMatrix::<f64>::zeros(self.n, self.m);
        let mut c = DMatrix::<f64>::zeros(self.p, self.n);
        let mut sigma_w = DMatrix::<f64>::zeros(self.n, self.n);
        let mut sigma_d = DMatrix::<f64>::zeros(self.p, self.p);
        for (i, s) in self.subsystems.iter().enumerate() {
            let ro = self.state_offsets[i];
            for (&j, blk) in &s.a_blocks {
                a.view_mut((ro, self.state_offsets[j]), (blk.nrows(), blk.ncols())).copy_from(blk);
            }
            b.view_mut((ro, self.input_offsets[i]), (s.state_dim, s.input_dim)).copy_from(&s.b);
            let oo = self.output_offsets[i];
            for (&j, blk) in &s.c_blocks {
                c.view_mut((oo, self.state_offsets[j]), (blk.nrows(), blk.ncols())).copy_from(blk);
            }
            sigma_w.view_mut((ro, ro), (s.state_dim, s.state_dim)).copy_from(&s.sigma_w);
            sigma_d.view_mut((oo, oo), (s.output_dim, s.output_dim)).copy_from(&s.sigma_d);
        }
        GlobalSystem { a, b, c, sigma_w, sigma_d }
    }

    /// Block-diagonal global stage-cost weights.
    pub fn global_state_weight(&self) -> DMatrix<f64> {
        let mut q = DMatrix::<f64>::zeros(self.n, self.n);
        for (i, s) in self.subsystems.iter().enumerate() {
            let o = self.state_offsets[i];
            q.view_mut((o, o), (s.state_dim, s.state_dim)).copy_from(&s.q);
        }
        q
    }

    pub fn global_input_weight(&self) -> DMatrix<f64> {
        let mut r = DMatrix::<f64>::zeros(self.m, self.m);
        for (i, s) in self.subsystems.iter().enumerate() {
            let o = self.input_offsets[i];
            r.view_mut((o, o), (s.input_dim, s.input_dim)).copy_from(&s.r);
        }
        r
    }

    /// Serialize back to the config JSON schema (1-based block keys,
    /// zero blocks omitted).
    pub fn to_config_json(&self) -> String {
        let cfg = SystemConfig {
            subsystems: self
                .subsystems
                .iter()
                .map(|s| SubsystemConfig {
                    n: s.state_dim,
                    m: s.input_dim,
                    p: s.output_dim,
                    a: s
                        .a_blocks
                        .iter()
                        .map(|(&j, blk)| ((j + 1).to_string(), matrix_to_rows(blk)))
                        .collect(),
                    b: matrix_to_rows(&s.b),
                    c: s
                        .c_blocks
                        .iter()
                        .map(|(&j, blk)| ((j + 1).to_string(), matrix_to_rows(blk)))
                        .collect(),
                    sigma_w: matrix_to_rows(&s.sigma_w),
                    sigma_d: matrix_to_rows(&s.sigma_d),
                    x: PolytopeConfig {
                        h: matrix_to_rows(&s.state_set.normals),
                        offsets: s.state_set.offsets.iter().copied().collect(),
                    },
                    u: PolytopeConfig {
                        h: matrix_to_rows(&s.input_set.normals),
                        offsets: s.input_set.offsets.iter().copied().collect(),
                    },
                    p_x: s.p_x,
                    p_u: s.p_u,
                    q: matrix_to_rows(&s.q),
                    r: matrix_to_rows(&s.r),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&cfg).expect("config serialization cannot fail")
    }
}


#[cfg(test)]
mod tests {
    use super::test_fixtures::{decoupled_config, paper_config};
    use super::*;

    #[test]
    fn paper_system_has_full_neighbor_sets() {
        let g = load_system(&paper_config()).unwrap();
        assert_eq!(g.len(), 3);
        for i in 0..3 {
            assert_eq!(g.neighbors(i), &[0, 1, 2]);
        }
        assert_eq!(g.state_dim(), 6);
        assert_eq!(g.input_dim(), 3);
        assert_eq!(g.output_dim(), 3);
    }

    #[test]
    fn paper_global_assembly_is_block_dense_in_a() {
        let g = load_system(&paper_config()).unwrap();
        let gs = g.assemble_global();
        assert_eq!(gs.a.nrows(), 6);
        for bi in 0..3 {
            for bj in 0..3 {
                let blk = gs.a.view((2 * bi, 2 * bj), (2, 2));
                assert!(blk.iter().any(|&v| v != 0.0), "block ({bi},{bj}) is zero");
            }
        }
        // B = blkdiag([0;1] x3)
        let mut expected_b = DMatrix::<f64>::zeros(6, 3);
        for i in 0..3 {
            expected_b[(2 * i + 1, i)] = 1.0;
        }
        assert_eq!(gs.b, expected_b);
        // every block recovered exactly
        for (i, s) in g.subsystems().iter().enumerate() {
            for (&j, blk) in &s.a_blocks {
                let view = gs.a.view((g.state_offset(i), g.state_offset(j)), (2, 2));
                assert_eq!(&view.clone_owned(), blk);
            }
        }
    }

    #[test]
    fn decoupled_system_has_singleton_neighbors_and_block_diag_a() {
        let g = load_system(&decoupled_config()).unwrap();
        assert_eq!(g.neighbors(0), &[0]);
        assert_eq!(g.neighbors(1), &[1]);
        let gs = g.assemble_global();
        assert_eq!(gs.a[(0, 1)], 0.0);
        assert_eq!(gs.a[(1, 0)], 0.0);
    }

    #[test]
    fn neighbor_relation_matches_assembled_nonzero_blocks() {
        let g = load_system(&paper_config()).unwrap();
        let gs = g.assemble_global();
        for i in 0..g.len() {
            for j in 0..g.len() {
                let a_blk = gs.a.view((g.state_offset(i), g.state_offset(j)), (2, 2));
                let c_blk = gs.c.view((g.output_offset(i), g.state_offset(j)), (1, 2));
                let nonzero = a_blk.iter().any(|&v| v != 0.0) || c_blk.iter().any(|&v| v != 0.0);
                assert_eq!(g.neighbors(i).contains(&j), nonzero || i == j);
            }
        }
    }

    #[test]
    fn explicit_zero_block_is_not_a_neighbor() {
        let cfg = r#"{ "subsystems": [
            { "n": 1, "m": 1, "p": 1,
              "A": { "1": [[0.5]], "2": [[0.0]] }, "B": [[1.0]], "C": { "1": [[1.0]] },
              "Sigma_W": [[0.01]], "Sigma_D": [[0.01]],
              "X": { "H": [[1.0], [-1.0]], "h": [1.0, 1.0] },
              "U": { "H": [[1.0], [-1.0]], "h": [1.0, 1.0] },
              "p_x": 0.8, "Q": [[1.0]], "R": [[1.0]] },
            { "n": 1, "m": 1, "p": 1,
              "A": { "2": [[0.3]] }, "B": [[1.0]], "C": { "2": [[1.0]] },
              "Sigma_W": [[0.01]], "Sigma_D": [[0.01]],
              "X": { "H": [[1.0], [-1.0]], "h": [1.0, 1.0] },
              "U": { "H": [[1.0], [-1.0]], "h": [1.0, 1.0] },
              "p_x": 0.8, "Q": [[1.0]], "R": [[1.0]] }
        ] }"#;
        let g = load_system(cfg).unwrap();
        assert_eq!(g.neighbors(0), &[0]);
    }

    #[test]
    fn wrong_block_shape_names_the_pair() {
        let bad = paper_config().replace(
            r#""2": [[0.1, 0.0], [0.1, 0.1]]"#,
            r#""2": [[0.1], [0.1]]"#,
        );
        match load_system(&bad) {
            Err(Error::DimensionMismatch { i: 1, j: 2, .. }) => {}
            other => panic!("expected dimension mismatch naming (1,2); got {other:?}"),
        }
    }

    #[test]
    fn non_psd_covariance_is_rejected() {
        let bad = paper_config().replace("[[0.005, 0.0], [0.0, 0.005]]", "[[0.005, 0.0], [0.0, -0.005]]");
        assert!(matches!(load_system(&bad), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn polytope_must_contain_origin() {
        let bad = paper_config().replace(r#""h": [0.5, 1.0]"#, r#""h": [-0.5, 1.0]"#);
        assert!(matches!(load_system(&bad), Err(Error::BadPolytope { .. })));
    }

    #[test]
    fn parse_error_reports_location() {
        match load_system("{ not json") {
            Err(Error::Parse(msg)) => assert!(msg.contains("line"), "message: {msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn lift_examples() {
        let g = load_system(&paper_config()).unwrap();
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        // full neighborhood: the lift is the identity
        assert_eq!(g.lift_to_neighborhood(0, &x).unwrap(), x);
        let gd = load_system(&decoupled_config()).unwrap();
        let y = DVector::from_vec(vec![7.0, 8.0]);
        assert_eq!(gd.lift_to_neighborhood(0, &y).unwrap(), DVector::from_vec(vec![7.0]));
        assert_eq!(
            gd.lift_to_neighborhood(1, &DVector::zeros(2)).unwrap(),
            DVector::zeros(1)
        );
        assert!(matches!(
            g.lift_to_neighborhood(0, &DVector::zeros(5)),
            Err(Error::LengthMismatch { expected: 6, got: 5 })
        ));
        // selector matrix route agrees
        let t = g.selector(1);
        assert_eq!(t * &x, g.lift_to_neighborhood(1, &x).unwrap());
    }

    #[test]
    fn config_round_trip_preserves_graph() {
        for cfg in [paper_config(), decoupled_config()] {
            let g = load_system(&cfg).unwrap();
            let re = load_system(&g.to_config_json()).unwrap();
            assert_eq!(g, re);
        }
    }
}
