//! Finite-dimensional C*-algebras `M_{n_1} ⊕ … ⊕ M_{n_s}`, their elements,
//! faithful states, unital *-homomorphisms and the GNS construction.
//!
//! Elements are stored in matrix-unit coordinates: block by block, each
//! block row-major. The basis element with index `k` is the matrix unit
//! `e^{(b)}_{rc}` returned by [`FiniteCStarAlgebra::basis_label`].

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::operator::{eigh, ComplexMatrix, HermitianOperator, Isometry};
use crate::tolerance::Tolerances;
use crate::triple::Representation;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Sources up to this dimension get a brute-force check on all basis pairs
/// in [`hom_validate`]; larger spectrum maps use the structural argument.
const BRUTE_FORCE_MAX_SOURCE_DIM: usize = 64;

/// `M_{n_1} ⊕ … ⊕ M_{n_s}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr", into = "AlgebraRepr")]
pub struct FiniteCStarAlgebra {
    block_dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraRepr {
    block_dims: Vec<usize>,
}

impl TryFrom<AlgebraRepr> for FiniteCStarAlgebra {
    type Error = crate::Error;

    fn try_from(r: AlgebraRepr) -> Result<Self> {
        Self::new(r.block_dims)
    }
}

impl From<FiniteCStarAlgebra> for AlgebraRepr {
    fn from(a: FiniteCStarAlgebra) -> Self {
        Self { block_dims: a.block_dims }
    }
}

impl FiniteCStarAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return validation(format!("block dimensions must be a nonempty list of positive counts, got {block_dims:?}"));
        }
        Ok(Self { block_dims })
    }

    /// `ℂ^n`, functions on `n` points.
    pub fn commutative(points: usize) -> Result<Self> {
        Self::new(vec![1; points])
    }

    /// `M_n`.
    pub fn full_matrix(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// `Σ n_i²`.
    pub fn dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.block_dims.iter().all(|&n| n == 1)
    }

    /// Offset of each block in the coordinate vector.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.block_dims
            .iter()
            .map(|n| {
                let o = acc;
                acc += n * n;
                o
            })
            .collect()
    }

    /// `(block, row, col)` of basis element `k`.
    pub fn basis_label(&self, k: usize) -> (usize, usize, usize) {
        let mut rest = k;
        for (b, &n) in self.block_dims.iter().enumerate() {
            if rest < n * n {
                return (b, rest / n, rest % n);
            }
            rest -= n * n;
        }
        panic!("basis index {k} out of range for algebra of dimension {}", self.dim());
    }

    pub fn basis_index(&self, block: usize, row: usize, col: usize) -> usize {
        let n = self.block_dims[block];
        assert!(row < n && col < n);
        self.block_offsets()[block] + row * n + col
    }

    pub fn basis_element(&self, k: usize) -> AlgebraElement {
        let mut coords = vec![ZERO; self.dim()];
        coords[k] = ONE;
        AlgebraElement { algebra: self.clone(), coords }
    }

    pub fn unit(&self) -> AlgebraElement {
        let mut coords = vec![ZERO; self.dim()];
        for (o, &n) in self.block_offsets().iter().zip(&self.block_dims) {
            for i in 0..n {
                coords[o + i * n + i] = ONE;
            }
        }
        AlgebraElement { algebra: self.clone(), coords }
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { algebra: self.clone(), coords: vec![ZERO; self.dim()] }
    }

    /// Self-adjoint generators: diagonal matrix units and, for off-diagonal
    /// pairs, `e_rc + e_cr` and `i(e_rc − e_cr)`.
    pub fn hermitian_generators(&self) -> Vec<AlgebraElement> {
        let mut out = Vec::new();
        for (b, &n) in self.block_dims.iter().enumerate() {
            for r in 0..n {
                for c in r..n {
                    if r == c {
                        out.push(self.basis_element(self.basis_index(b, r, r)));
                        continue;
                    }
                    let rc = self.basis_index(b, r, c);
                    let cr = self.basis_index(b, c, r);
                    let mut sym = self.zero();
                    sym.coords[rc] = ONE;
                    sym.coords[cr] = ONE;
                    let mut anti = self.zero();
                    anti.coords[rc] = Complex64::new(0.0, 1.0);
                    anti.coords[cr] = Complex64::new(0.0, -1.0);
                    out.push(sym);
                    out.push(anti);
                }
            }
        }
        out
    }
}

/// Element of a [`FiniteCStarAlgebra`] in matrix-unit coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct AlgebraElement {
    algebra: FiniteCStarAlgebra,
    coords: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    blocks: Vec<ComplexMatrix>,
}

impl TryFrom<ElementRepr> for AlgebraElement {
    type Error = crate::Error;

    fn try_from(r: ElementRepr) -> Result<Self> {
        AlgebraElement::from_blocks(&r.blocks)
    }
}

impl From<AlgebraElement> for ElementRepr {
    fn from(a: AlgebraElement) -> Self {
        Self { blocks: a.blocks() }
    }
}

impl AlgebraElement {
    pub fn from_coordinates(algebra: &FiniteCStarAlgebra, coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() != algebra.dim() {
            return validation(format!(
                "element needs {} coordinates, got {}",
                algebra.dim(),
                coords.len()
            ));
        }
        Ok(Self { algebra: algebra.clone(), coords })
    }

    /// Element of `⊕ M_{n_i}` from its square blocks.
    pub fn from_blocks(blocks: &[ComplexMatrix]) -> Result<Self> {
        if let Some(b) = blocks.iter().find(|b| !b.is_square()) {
            return validation(format!("algebra blocks must be square, got {:?}", b.shape()));
        }
        let algebra = FiniteCStarAlgebra::new(blocks.iter().map(ComplexMatrix::rows).collect())?;
        let coords = blocks.iter().flat_map(|b| b.as_slice().iter().copied()).collect();
        Ok(Self { algebra, coords })
    }

    /// Function on the points of `ℂ^n`.
    pub fn from_function(values: &[Complex64]) -> Result<Self> {
        let algebra = FiniteCStarAlgebra::commutative(values.len())?;
        Ok(Self { algebra, coords: values.to_vec() })
    }

    pub fn from_real_function(values: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_function(&v)
    }

    pub fn algebra(&self) -> &FiniteCStarAlgebra {
        &self.algebra
    }

    pub fn coordinates(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn block(&self, b: usize) -> ComplexMatrix {
        let n = self.algebra.block_dims[b];
        let o = self.algebra.block_offsets()[b];
        ComplexMatrix::from_vec(n, n, self.coords[o..o + n * n].to_vec()).expect("block shape")
    }

    pub fn blocks(&self) -> Vec<ComplexMatrix> {
        (0..self.algebra.num_blocks()).map(|b| self.block(b)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut coords = vec![ZERO; self.coords.len()];
        for (o, &n) in self.algebra.block_offsets().iter().zip(&self.algebra.block_dims) {
            for r in 0..n {
                for c in 0..n {
                    coords[o + r * n + c] = self.coords[o + c * n + r].conj();
                }
            }
        }
        Self { algebra: self.algebra.clone(), coords }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_algebra(rhs)?;
        let mut coords = vec![ZERO; self.coords.len()];
        for (o, &n) in self.algebra.block_offsets().iter().zip(&self.algebra.block_dims) {
            for r in 0..n {
                for k in 0..n {
                    let a = self.coords[o + r * n + k];
                    if a == ZERO {
                        continue;
                    }
                    for c in 0..n {
                        coords[o + r * n + c] += a * rhs.coords[o + k * n + c];
                    }
                }
            }
        }
        Ok(Self { algebra: self.algebra.clone(), coords })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_algebra(rhs)?;
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect();
        Ok(Self { algebra: self.algebra.clone(), coords })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_algebra(rhs)?;
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect();
        Ok(Self { algebra: self.algebra.clone(), coords })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { algebra: self.algebra.clone(), coords: self.coords.iter().map(|z| z * s).collect() }
    }

    /// Largest coordinate modulus.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// C*-norm: the largest block operator norm.
    pub fn norm(&self) -> f64 {
        self.blocks().iter().map(crate::operator::operator_norm).fold(0.0, f64::max)
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).map(|d| d.max_abs() <= tol).unwrap_or(false)
    }

    fn check_same_algebra(&self, rhs: &Self) -> Result<()> {
        if self.algebra != rhs.algebra {
            return validation(format!(
                "elements belong to different algebras {:?} and {:?}",
                self.algebra.block_dims, rhs.algebra.block_dims
            ));
        }
        Ok(())
    }
}

/// Unital *-homomorphism between finite C*-algebras.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HomRepr", into = "HomRepr")]
pub enum StarHomomorphism {
    /// Pullback `f ↦ f ∘ θ` along `θ`: target points → source points, with
    /// `map[t] = θ(t)`. Injective exactly when `θ` is surjective.
    SpectrumMap { source_points: usize, map: Vec<usize> },
    /// Linear map on matrix-unit coordinates, `target_dim × source_dim`.
    ExplicitLinear { source: FiniteCStarAlgebra, target: FiniteCStarAlgebra, matrix: ComplexMatrix },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum HomRepr {
    SpectrumMap { source_points: usize, map: Vec<usize> },
    ExplicitLinear { source: FiniteCStarAlgebra, target: FiniteCStarAlgebra, matrix: ComplexMatrix },
}

impl TryFrom<HomRepr> for StarHomomorphism {
    type Error = crate::Error;

    fn try_from(r: HomRepr) -> Result<Self> {
        match r {
            HomRepr::SpectrumMap { source_points, map } => Self::spectrum_map(source_points, map),
            HomRepr::ExplicitLinear { source, target, matrix } => Self::explicit_linear(source, target, matrix),
        }
    }
}

impl From<StarHomomorphism> for HomRepr {
    fn from(h: StarHomomorphism) -> Self {
        match h {
            StarHomomorphism::SpectrumMap { source_points, map } => HomRepr::SpectrumMap { source_points, map },
            StarHomomorphism::ExplicitLinear { source, target, matrix } => {
                HomRepr::ExplicitLinear { source, target, matrix }
            }
        }
    }
}

impl StarHomomorphism {
    /// Pullback along `map: target points → source points`. Surjectivity is
    /// not required here; [`hom_validate`] reports it.
    pub fn spectrum_map(source_points: usize, map: Vec<usize>) -> Result<Self> {
        if source_points == 0 || map.is_empty() {
            return validation("spectrum map needs nonempty point sets");
        }
        if let Some(t) = map.iter().position(|&s| s >= source_points) {
            return validation(format!(
                "spectrum map sends target point {t} to {} but the source has {source_points} points",
                map[t]
            ));
        }
        Ok(Self::SpectrumMap { source_points, map })
    }

    pub fn explicit_linear(source: FiniteCStarAlgebra, target: FiniteCStarAlgebra, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.shape() != (target.dim(), source.dim()) {
            return validation(format!(
                "linear map must be {}x{}, got {:?}",
                target.dim(),
                source.dim(),
                matrix.shape()
            ));
        }
        Ok(Self::ExplicitLinear { source, target, matrix })
    }

    pub fn identity(algebra: &FiniteCStarAlgebra) -> Self {
        if algebra.is_commutative() {
            let n = algebra.dim();
            Self::SpectrumMap { source_points: n, map: (0..n).collect() }
        } else {
            Self::ExplicitLinear {
                source: algebra.clone(),
                target: algebra.clone(),
                matrix: ComplexMatrix::identity(algebra.dim()),
            }
        }
    }

    pub fn source(&self) -> FiniteCStarAlgebra {
        match self {
            Self::SpectrumMap { source_points, .. } => FiniteCStarAlgebra { block_dims: vec![1; *source_points] },
            Self::ExplicitLinear { source, .. } => source.clone(),
        }
    }

    pub fn target(&self) -> FiniteCStarAlgebra {
        match self {
            Self::SpectrumMap { map, .. } => FiniteCStarAlgebra { block_dims: vec![1; map.len()] },
            Self::ExplicitLinear { target, .. } => target.clone(),
        }
    }

    /// The map on coordinates as a `target_dim × source_dim` matrix.
    pub fn linear_matrix(&self) -> ComplexMatrix {
        match self {
            Self::SpectrumMap { source_points, map } => {
                let mut m = ComplexMatrix::zeros(map.len(), *source_points);
                for (t, &s) in map.iter().enumerate() {
                    m[(t, s)] = ONE;
                }
                m
            }
            Self::ExplicitLinear { matrix, .. } => matrix.clone(),
        }
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &StarHomomorphism) -> Result<StarHomomorphism> {
        if self.target() != outer.source() {
            return validation(format!(
                "cannot compose: target {:?} differs from source {:?}",
                self.target().block_dims,
                outer.source().block_dims
            ));
        }
        match (self, outer) {
            (Self::SpectrumMap { source_points, map: inner }, Self::SpectrumMap { map: outer, .. }) => {
                Ok(Self::SpectrumMap { source_points: *source_points, map: outer.iter().map(|&t| inner[t]).collect() })
            }
            _ => Ok(Self::ExplicitLinear {
                source: self.source(),
                target: outer.target(),
                matrix: outer.linear_matrix().checked_mul(&self.linear_matrix())?,
            }),
        }
    }
}

/// `φ(a)`.
pub fn hom_apply(phi: &StarHomomorphism, a: &AlgebraElement) -> Result<AlgebraElement> {
    if a.algebra != phi.source() {
        return validation(format!(
            "element of {:?} is not in the source algebra {:?}",
            a.algebra.block_dims,
            phi.source().block_dims
        ));
    }
    match phi {
        StarHomomorphism::SpectrumMap { map, .. } => {
            let coords = map.iter().map(|&s| a.coords[s]).collect();
            Ok(AlgebraElement { algebra: phi.target(), coords })
        }
        StarHomomorphism::ExplicitLinear { target, matrix, .. } => {
            Ok(AlgebraElement { algebra: target.clone(), coords: matrix.mul_vec(&a.coords) })
        }
    }
}

/// Residuals of the unital *-homomorphism axioms and injectivity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomReport {
    /// `max |φ(1) − 1|`.
    pub unit_residual: f64,
    /// `max |φ(e_k e_l) − φ(e_k) φ(e_l)|` over basis pairs.
    pub multiplicative_residual: f64,
    /// `max |φ(e_k*) − φ(e_k)*|` over basis elements.
    pub star_residual: f64,
    /// Smallest singular value of the coordinate map; 0 when not injective.
    pub injectivity_margin: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Checks the homomorphism axioms; never fails on a well-formed map.
pub fn hom_validate(phi: &StarHomomorphism, tol: &Tolerances) -> HomReport {
    let source = phi.source();
    let (unit_residual, multiplicative_residual, star_residual) = match phi {
        StarHomomorphism::SpectrumMap { .. } if source.dim() > BRUTE_FORCE_MAX_SOURCE_DIM => (0.0, 0.0, 0.0),
        _ => brute_force_residuals(phi, &source),
    };
    let injectivity_margin = match phi {
        StarHomomorphism::SpectrumMap { source_points, map } => {
            let mut fibers = vec![0usize; *source_points];
            for &s in map {
                fibers[s] += 1;
            }
            (*fibers.iter().min().expect("nonempty source") as f64).sqrt()
        }
        StarHomomorphism::ExplicitLinear { matrix, .. } => smallest_singular_value(matrix),
    };
    let mut failures = Vec::new();
    if unit_residual > tol.validation {
        failures.push(format!("unit residual {unit_residual:e}"));
    }
    if multiplicative_residual > tol.validation {
        failures.push(format!("multiplicative residual {multiplicative_residual:e}"));
    }
    if star_residual > tol.validation {
        failures.push(format!("*-preservation residual {star_residual:e}"));
    }
    if injectivity_margin <= tol.rank {
        failures.push(format!("not injective: margin {injectivity_margin:e}"));
    }
    HomReport {
        unit_residual,
        multiplicative_residual,
        star_residual,
        injectivity_margin,
        passed: failures.is_empty(),
        failures,
    }
}

fn brute_force_residuals(phi: &StarHomomorphism, source: &FiniteCStarAlgebra) -> (f64, f64, f64) {
    let target = phi.target();
    let apply = |a: &AlgebraElement| hom_apply(phi, a).expect("element of the source");
    let unit = apply(&source.unit()).sub(&target.unit()).expect("same algebra").max_abs();
    let images: Vec<AlgebraElement> = (0..source.dim()).map(|k| apply(&source.basis_element(k))).collect();
    let mut mult: f64 = 0.0;
    let mut star: f64 = 0.0;
    for k in 0..source.dim() {
        let ek = source.basis_element(k);
        let adj = apply(&ek.adjoint()).sub(&images[k].adjoint()).expect("same algebra");
        star = star.max(adj.max_abs());
        for l in 0..source.dim() {
            let prod = ek.mul(&source.basis_element(l)).expect("same algebra");
            let lhs = apply(&prod);
            let rhs = images[k].mul(&images[l]).expect("same algebra");
            mult = mult.max(lhs.sub(&rhs).expect("same algebra").max_abs());
        }
    }
    (unit, mult, star)
}

fn smallest_singular_value(m: &ComplexMatrix) -> f64 {
    if m.rows() < m.cols() {
        return 0.0;
    }
    let gram = HermitianOperator::from_matrix_unchecked((&m.adjoint() * m).hermitian_part());
    match eigh(&gram, &Tolerances::default()) {
        Ok(d) => d.eigenvalues()[0].max(0.0).sqrt(),
        Err(_) => 0.0,
    }
}

/// Faithful state `τ(a) = Σ_b tr(ρ_b a_b)` with positive-definite block
/// densities of total trace 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct State {
    algebra: FiniteCStarAlgebra,
    block_densities: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    block_densities: Vec<ComplexMatrix>,
}

impl TryFrom<StateRepr> for State {
    type Error = crate::Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        let dims = r.block_densities.iter().map(ComplexMatrix::rows).collect();
        State::new(&FiniteCStarAlgebra::new(dims)?, r.block_densities, &Tolerances::default())
    }
}

impl From<State> for StateRepr {
    fn from(s: State) -> Self {
        Self { block_densities: s.block_densities }
    }
}

impl State {
    /// Validates positivity (faithfulness) and normalization.
    pub fn new(algebra: &FiniteCStarAlgebra, block_densities: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        if block_densities.len() != algebra.num_blocks() {
            return validation(format!(
                "state needs {} block densities, got {}",
                algebra.num_blocks(),
                block_densities.len()
            ));
        }
        let mut total = 0.0;
        for (b, (rho, &n)) in block_densities.iter().zip(&algebra.block_dims).enumerate() {
            if rho.shape() != (n, n) {
                return validation(format!("density {b} must be {n}x{n}, got {:?}", rho.shape()));
            }
            let h = HermitianOperator::new(rho.clone(), tol)
                .map_err(|_| crate::Error::Validation(format!("density {b} is not Hermitian")))?;
            let smallest = eigh(&h, tol)?.eigenvalues()[0];
            if smallest <= tol.rank {
                return validation(format!(
                    "state is not faithful: density {b} has eigenvalue {smallest:e}"
                ));
            }
            total += rho.trace().re;
        }
        if (total - 1.0).abs() > tol.validation.max(1e-12) * algebra.num_blocks() as f64 {
            return validation(format!("state must have total trace 1, got {total}"));
        }
        Ok(Self { algebra: algebra.clone(), block_densities })
    }

    /// Point weights on `ℂ^n`.
    pub fn from_weights(weights: &[f64], tol: &Tolerances) -> Result<Self> {
        let algebra = FiniteCStarAlgebra::commutative(weights.len())?;
        let densities = weights.iter().map(|&w| ComplexMatrix::from_real_diagonal(&[w])).collect();
        Self::new(&algebra, densities, tol)
    }

    /// `τ(a) = Σ_b tr(a_b) / Σ_b n_b`.
    pub fn normalized_trace(algebra: &FiniteCStarAlgebra) -> Self {
        let total: usize = algebra.block_dims.iter().sum();
        let densities = algebra
            .block_dims
            .iter()
            .map(|&n| ComplexMatrix::identity(n).scale_real(1.0 / total as f64))
            .collect();
        Self { algebra: algebra.clone(), block_densities: densities }
    }

    pub fn algebra(&self) -> &FiniteCStarAlgebra {
        &self.algebra
    }

    pub fn block_densities(&self) -> &[ComplexMatrix] {
        &self.block_densities
    }

    pub fn evaluate(&self, a: &AlgebraElement) -> Result<Complex64> {
        if a.algebra != self.algebra {
            return validation("element is not in the state's algebra");
        }
        let mut acc = ZERO;
        for (b, rho) in self.block_densities.iter().enumerate() {
            let ab = a.block(b);
            acc += (rho * &ab).trace();
        }
        Ok(acc)
    }

    /// `τ ∘ ψ` on the source of `ψ`.
    pub fn pullback(&self, psi: &StarHomomorphism, tol: &Tolerances) -> Result<State> {
        if psi.target() != self.algebra {
            return validation("homomorphism target is not the state's algebra");
        }
        let source = psi.source();
        let mut densities = Vec::with_capacity(source.num_blocks());
        for (b, &n) in source.block_dims.iter().enumerate() {
            // tr(ρ e_rc) = ρ_cr
            let mut rho = ComplexMatrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    let e = source.basis_element(source.basis_index(b, r, c));
                    rho[(c, r)] = self.evaluate(&hom_apply(psi, &e)?)?;
                }
            }
            densities.push(rho.hermitian_part());
        }
        State::new(&source, densities, tol)
    }
}

/// GNS space of a faithful state.
///
/// Vectors are held in orthonormal coordinates `x = (1 ⊗ L*) c` per block,
/// where `c` are matrix-unit coordinates and `ρ_bᵀ = L L*`. In these
/// coordinates `π(a) = a ⊗ 1` blockwise.
#[derive(Clone, Debug)]
pub struct GnsSpace {
    state: State,
    factors: Vec<ComplexMatrix>,
}

impl GnsSpace {
    pub fn algebra(&self) -> &FiniteCStarAlgebra {
        &self.state.algebra
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn dim(&self) -> usize {
        self.state.algebra.dim()
    }

    /// `⟨e_k, e_l⟩ = τ(e_k* e_l)` on matrix units.
    pub fn gram(&self) -> ComplexMatrix {
        let alg = &self.state.algebra;
        let mut g = ComplexMatrix::zeros(alg.dim(), alg.dim());
        for (b, (&n, o)) in alg.block_dims.iter().zip(alg.block_offsets()).enumerate() {
            let rho = &self.state.block_densities[b];
            for k in 0..n {
                for l in 0..n {
                    for lp in 0..n {
                        // τ(e_lk e_klp) = ρ_{lp,l}
                        g[(o + k * n + l, o + k * n + lp)] = rho[(lp, l)];
                    }
                }
            }
        }
        g
    }

    /// Orthonormal coordinates of `η(a)`.
    pub fn eta(&self, a: &AlgebraElement) -> Result<Vec<Complex64>> {
        if a.algebra != self.state.algebra {
            return validation("element is not in the GNS algebra");
        }
        let alg = &self.state.algebra;
        let mut x = vec![ZERO; alg.dim()];
        for (b, (&n, o)) in alg.block_dims.iter().zip(alg.block_offsets()).enumerate() {
            let l = &self.factors[b];
            for k in 0..n {
                let row = &a.coords[o + k * n..o + (k + 1) * n];
                for i in 0..n {
                    // (L* r)_i = Σ_m conj(L_mi) r_m
                    x[o + k * n + i] = (0..n).map(|m| l[(m, i)].conj() * row[m]).sum();
                }
            }
        }
        Ok(x)
    }

    /// `η(1)`.
    pub fn cyclic_vector(&self) -> Vec<Complex64> {
        self.eta(&self.state.algebra.unit()).expect("unit of the GNS algebra")
    }

    /// `⟨η(a), η(b)⟩`.
    pub fn inner(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<Complex64> {
        let x = self.eta(a)?;
        let y = self.eta(b)?;
        Ok(x.iter().zip(&y).map(|(p, q)| p.conj() * q).sum())
    }

    /// Left multiplication in orthonormal coordinates.
    pub fn representation(&self) -> Representation {
        let alg = &self.state.algebra;
        if alg.is_commutative() {
            return Representation::Diagonal { labels: (0..alg.dim()).collect() };
        }
        let images = (0..alg.dim())
            .map(|k| {
                let (b, r, c) = alg.basis_label(k);
                let n = alg.block_dims[b];
                let o = alg.block_offsets()[b];
                let mut m = ComplexMatrix::zeros(alg.dim(), alg.dim());
                // e_rc ⊗ 1 maps x_{(c, i)} to x_{(r, i)}
                for i in 0..n {
                    m[(o + r * n + i, o + c * n + i)] = ONE;
                }
                m
            })
            .collect();
        Representation::Matrices { images }
    }
}

/// GNS construction for a faithful state.
pub fn gns(algebra: &FiniteCStarAlgebra, state: &State) -> Result<GnsSpace> {
    if state.algebra != *algebra {
        return validation("state belongs to a different algebra");
    }
    let mut factors = Vec::with_capacity(algebra.num_blocks());
    for (b, rho) in state.block_densities.iter().enumerate() {
        let n = rho.rows();
        let dm = DMatrix::from_fn(n, n, |i, j| rho[(j, i)]);
        let chol = Cholesky::new(dm)
            .ok_or_else(|| crate::Error::Validation(format!("state is not faithful on block {b}")))?;
        let l = chol.l();
        factors.push(ComplexMatrix::from_fn(n, n, |i, j| l[(i, j)]));
    }
    Ok(GnsSpace { state: state.clone(), factors })
}

/// Orthonormal basis of `η(ψ(B))` as the columns of an isometry, in the
/// order of the source basis, by modified Gram–Schmidt with one
/// reorthogonalization pass.
///
/// Columns whose residual falls below `rank · ‖η(ψ(e))‖` are dropped.
pub fn subspace_basis(g: &GnsSpace, psi: &StarHomomorphism, tol: &Tolerances) -> Result<Isometry> {
    if psi.target() != *g.algebra() {
        return validation("inclusion target is not the GNS algebra");
    }
    let source = psi.source();
    let n = g.dim();
    let mut basis: Vec<(Vec<Complex64>, usize, usize)> = Vec::new();
    for k in 0..source.dim() {
        let mut v = g.eta(&hom_apply(psi, &source.basis_element(k))?)?;
        let original = norm(&v);
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            let (lo, hi) = support(&v);
            for (q, qlo, qhi) in &basis {
                let (a, b) = (lo.max(*qlo), hi.min(*qhi));
                if a >= b {
                    continue;
                }
                let c: Complex64 = (a..b).map(|i| q[i].conj() * v[i]).sum();
                if c != ZERO {
                    for i in *qlo..*qhi {
                        v[i] -= c * q[i];
                    }
                }
            }
        }
        let r = norm(&v);
        if r <= tol.rank * original {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= r);
        let (lo, hi) = support(&v);
        basis.push((v, lo, hi));
    }
    if basis.is_empty() {
        return validation("subspace is zero");
    }
    let cols: Vec<Vec<Complex64>> = basis.into_iter().map(|(v, _, _)| v).collect();
    Ok(Isometry::from_matrix_unchecked(ComplexMatrix::from_columns(n, &cols)))
}

/// Orthogonal projection onto `η(ψ(B))`.
pub fn subspace_projection(g: &GnsSpace, psi: &StarHomomorphism, tol: &Tolerances) -> Result<HermitianOperator> {
    let report = hom_validate(psi, tol);
    if !report.passed {
        return validation(format!("invalid inclusion: {}", report.failures.join(", ")));
    }
    Ok(subspace_basis(g, psi, tol)?.range_projection())
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn support(v: &[Complex64]) -> (usize, usize) {
    let lo = v.iter().position(|z| *z != ZERO).unwrap_or(0);
    let hi = v.iter().rposition(|z| *z != ZERO).map_or(0, |i| i + 1);
    (lo, hi)
}
