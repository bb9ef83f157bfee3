#ifndef NCHMM_LINALG_HPP
#define NCHMM_LINALG_HPP

#include <span>
#include <tuple>
#include <vector>

namespace nchmm {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Symmetric sparse matrix in compressed-row storage (full pattern stored).
/// Frozen after assembly; duplicates in the triplet stream are summed.
class SparseSymMatrix {
  public:
    /// Throws std::out_of_range for indices outside [0, dimension).
    static SparseSymMatrix from_triplets(int dimension, std::span<const Triplet> triplets);

    int dimension() const { return dim_; }
    std::size_t nonzero_count() const { return values_.size(); }

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    /// Entry lookup by binary search within a row (test/oracle use).
    double coeff(int row, int col) const;

    /// Maximum |a_ij - a_ji| over stored entries.
    double max_asymmetry() const;

    std::vector<double> diagonal() const;

    /// Dense copy, row-major (oracle use; keep dimension small).
    std::vector<double> to_dense() const;

  private:
    int dim_ = 0;
    std::vector<int> row_start_;  // size dim_ + 1
    std::vector<int> cols_;
    std::vector<double> values_;
};

struct CgOptions {
    double tol = 1e-10;   // relative residual target
    int max_iter = -1;    // -1 means 10 * dimension
    bool jacobi = false;  // diagonal preconditioning (off by default)
};

struct CgReport {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Conjugate gradients for symmetric positive (semi-)definite consistent
/// systems. Returns one representative solution for singular matrices (the
/// kernel component is whatever CG produces; callers post-process).
/// ||rhs|| = 0 returns x = 0 immediately. Residual stagnation is reported as
/// non-convergence rather than looping until max_iter.
std::pair<std::vector<double>, CgReport> cg_solve(const SparseSymMatrix& A,
                                                  std::span<const double> rhs,
                                                  const CgOptions& options = {});

/// Dense Lagrange-multiplier solve of the constrained system
///   A x + C^t mu = rhs,  C x = 0
/// where each row of `constraints` is one linear functional. Intended as a
/// small-problem oracle. Singular-but-consistent saddle systems yield the
/// minimum-norm solution; throws std::runtime_error on an inconsistent
/// system or excessive dimension.
std::vector<double> dense_constrained_solve(const SparseSymMatrix& A,
                                            const std::vector<std::vector<double>>& constraints,
                                            std::span<const double> rhs);

/// Eigenvalues of a dense symmetric matrix (row-major), ascending.
/// Helper for rank/deficiency reporting and test assertions.
std::vector<double> dense_sym_eigenvalues(const std::vector<double>& dense, int dimension);

}  // namespace nchmm

#endif
