//! Bases of the space of dimensionless monomials (pi-groups).
//!
//! For variables of dimensions `w_1..w_n`, the monomials `x_1^c_1 ... x_n^c_n`
//! that are dimensionless are exactly the kernel vectors of the dimension
//! matrix, so they form a subspace of dimension `n - rank`.

use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{free_variable_kernel, invert, kernel_basis, rref, solve, QMatrix, Rational};
use crate::quantity::{dim_combine, dimension_matrix, DimSystem, DimVector, Fclcf, SettingError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("no variables given")]
    Empty,
    #[error("not a basis of the dimensionless monomials: {0}")]
    NotABasis(String),
    #[error("bases are over different variable dimensions")]
    DimsDiffer,
    #[error(transparent)]
    Setting(#[from] SettingError),
}

/// A basis of the pi-groups of `dims`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiBasis {
    system: Arc<DimSystem>,
    dims: Vec<DimVector>,
    groups: Vec<Fclcf>,
    rank: usize,
}

fn system_of(dims: &[DimVector]) -> Result<Arc<DimSystem>, BasisError> {
    let first = dims.first().ok_or(BasisError::Empty)?;
    let system = Arc::clone(first.system());
    if dims.iter().any(|d| d.system() != &system) {
        return Err(SettingError::SystemMismatch.into());
    }
    Ok(system)
}

impl PiBasis {
    /// Wraps `groups` after checking they form a basis for `dims`.
    pub fn new(dims: Vec<DimVector>, groups: Vec<Fclcf>) -> Result<PiBasis, BasisError> {
        let system = system_of(&dims)?;
        let a = dimension_matrix(&system, &dims)?;
        let rank = rref(&a).rank;
        check_basis(&system, &dims, rank, &groups)?;
        Ok(PiBasis {
            system,
            dims,
            groups,
            rank,
        })
    }

    pub fn system(&self) -> &Arc<DimSystem> {
        &self.system
    }

    pub fn dims(&self) -> &[DimVector] {
        &self.dims
    }

    pub fn groups(&self) -> &[Fclcf] {
        &self.groups
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.dims.len()
    }

    /// Rank of the dimension matrix.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of groups, `n - rank`.
    pub fn r(&self) -> usize {
        self.groups.len()
    }

    /// The `r x n` matrix whose rows are the group exponents.
    pub fn coefficient_matrix(&self) -> QMatrix {
        QMatrix::from_rows(
            self.n(),
            self.groups
                .iter()
                .map(|g| g.coefficients().to_vec())
                .collect(),
        )
        .expect("groups have arity n")
    }

    /// The basis whose groups are the rows of `change * coefficient_matrix()`.
    pub fn transformed(&self, change: &QMatrix) -> Result<PiBasis, BasisError> {
        let rows = change
            .mul(&self.coefficient_matrix())
            .map_err(|e| BasisError::NotABasis(e.to_string()))?;
        PiBasis::new(
            self.dims.clone(),
            rows.row_vecs().into_iter().map(Fclcf::new).collect(),
        )
    }
}

fn check_basis(
    system: &Arc<DimSystem>,
    dims: &[DimVector],
    rank: usize,
    groups: &[Fclcf],
) -> Result<(), BasisError> {
    let n = dims.len();
    if groups.len() != n - rank {
        return Err(BasisError::NotABasis(format!(
            "{} groups given, {} needed",
            groups.len(),
            n - rank
        )));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.arity() != n {
            return Err(BasisError::NotABasis(format!(
                "group {i} has {} exponents for {n} variables",
                g.arity()
            )));
        }
        let d = dim_combine(system, g, dims)?;
        if !d.is_dimensionless() {
            return Err(BasisError::NotABasis(format!(
                "group {i} has dimension {d}"
            )));
        }
    }
    let m = QMatrix::from_rows(
        n,
        groups.iter().map(|g| g.coefficients().to_vec()).collect(),
    )
    .expect("arity checked");
    if rref(&m).rank != groups.len() {
        return Err(BasisError::NotABasis(
            "groups are linearly dependent".into(),
        ));
    }
    Ok(())
}

/// True iff `candidate` annihilates `dims`, is independent and has `n - rank` members.
pub fn is_pi_basis(candidate: &[Fclcf], dims: &[DimVector]) -> bool {
    PiBasis::new(dims.to_vec(), candidate.to_vec()).is_ok()
}

/// Canonical basis: the kernel of the dimension matrix from the RREF
/// free-variable construction, scaled to primitive integers.
pub fn pi_basis(dims: &[DimVector]) -> Result<PiBasis, BasisError> {
    let system = system_of(dims)?;
    let a = dimension_matrix(&system, dims)?;
    let rank = rref(&a).rank;
    let groups = kernel_basis(&a).into_iter().map(Fclcf::new).collect();
    Ok(PiBasis {
        system,
        dims: dims.to_vec(),
        groups,
        rank,
    })
}

/// A basis in which group `i` contains the free variable `free_indices[i]`
/// to the first power, no other free variable, and otherwise only pivot
/// variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialPiBasis {
    base: PiBasis,
    pivot_indices: Vec<usize>,
    free_indices: Vec<usize>,
}

impl SpecialPiBasis {
    pub fn basis(&self) -> &PiBasis {
        &self.base
    }

    pub fn pivot_indices(&self) -> &[usize] {
        &self.pivot_indices
    }

    pub fn free_indices(&self) -> &[usize] {
        &self.free_indices
    }

    pub fn groups(&self) -> &[Fclcf] {
        self.base.groups()
    }
}

/// Special basis with pivots at the first maximal independent subfamily of
/// `dims`. For each free index `l`, the group is `x_l` divided by the monomial
/// in the pivots that has the same dimension as `x_l`.
pub fn special_basis(dims: &[DimVector]) -> Result<SpecialPiBasis, BasisError> {
    let system = system_of(dims)?;
    let a = dimension_matrix(&system, dims)?;
    let pivots = rref(&a).pivot_cols;
    let n = dims.len();
    let free: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
    let pivot_matrix = QMatrix::from_rows(
        pivots.len(),
        (0..a.rows())
            .map(|j| pivots.iter().map(|&p| a[(j, p)].clone()).collect())
            .collect(),
    )
    .expect("pivot submatrix shape");
    let groups = free
        .iter()
        .map(|&l| {
            let coords = solve(&pivot_matrix, &a.col(l))
                .expect("pivot columns span every column of the dimension matrix");
            let mut c = vec![Rational::zero(); n];
            c[l] = Rational::one();
            for (&p, v) in pivots.iter().zip(coords) {
                c[p] = -v;
            }
            Fclcf::new(c)
        })
        .collect();
    Ok(SpecialPiBasis {
        base: PiBasis {
            system,
            dims: dims.to_vec(),
            groups,
            rank: pivots.len(),
        },
        pivot_indices: pivots,
        free_indices: free,
    })
}

/// The unscaled RREF kernel vectors coincide with the special basis; kept
/// as an independent route for tests.
pub fn special_groups_via_rref(dims: &[DimVector]) -> Result<Vec<Fclcf>, BasisError> {
    let system = system_of(dims)?;
    let a = dimension_matrix(&system, dims)?;
    Ok(free_variable_kernel(&a)
        .into_iter()
        .map(Fclcf::new)
        .collect())
}

/// The change of basis between two pi-bases of the same dimensions: row `i`
/// of `matrix` expresses `pi.groups[i]` in terms of `psi.groups`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub matrix: QMatrix,
    pub inverse: QMatrix,
}

impl Transition {
    /// Maps log values of the source groups to log values of the target groups.
    pub fn apply_log(&self, source: &[f64]) -> Vec<f64> {
        (0..self.matrix.rows())
            .map(|i| {
                self.matrix
                    .row(i)
                    .iter()
                    .zip(source)
                    .map(|(c, v)| crate::exactlin::to_f64(c) * v)
                    .sum()
            })
            .collect()
    }
}

pub fn transition(psi: &PiBasis, pi: &PiBasis) -> Result<Transition, BasisError> {
    if psi.dims != pi.dims {
        return Err(BasisError::DimsDiffer);
    }
    check_basis(&psi.system, &psi.dims, psi.rank, &psi.groups)?;
    check_basis(&pi.system, &pi.dims, pi.rank, &pi.groups)?;
    let r = psi.r();
    let psi_cols = psi.coefficient_matrix().transpose();
    let mut rows = Vec::with_capacity(r);
    for g in &pi.groups {
        let c = solve(&psi_cols, g.coefficients()).map_err(|_| {
            BasisError::NotABasis("group outside the span of the source basis".into())
        })?;
        rows.push(c);
    }
    let matrix = QMatrix::from_rows(r, rows).expect("r x r");
    debug_assert_eq!(
        matrix.mul(&psi.coefficient_matrix()).ok(),
        Some(pi.coefficient_matrix())
    );
    let inverse = invert(&matrix).map_err(|e| BasisError::NotABasis(e.to_string()))?;
    Ok(Transition { matrix, inverse })
}
