#include "nchmm/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nchmm {

SparseSymMatrix SparseSymMatrix::from_triplets(int dimension, std::span<const Triplet> triplets) {
    SparseSymMatrix m;
    m.dim_ = dimension;
    for (const Triplet& t : triplets)
        if (t.row < 0 || t.row >= dimension || t.col < 0 || t.col >= dimension)
            throw std::out_of_range("SparseSymMatrix: triplet index (" + std::to_string(t.row) +
                                    ", " + std::to_string(t.col) + ") out of range");

    // Count entries per row, then bucket and sort each row to merge duplicates.
    std::vector<int> counts(static_cast<std::size_t>(dimension) + 1, 0);
    for (const Triplet& t : triplets) ++counts[t.row + 1];
    std::partial_sum(counts.begin(), counts.end(), counts.begin());

    std::vector<int> cols(triplets.size());
    std::vector<double> vals(triplets.size());
    {
        std::vector<int> cursor(counts.begin(), counts.end() - 1);
        for (const Triplet& t : triplets) {
            const int k = cursor[t.row]++;
            cols[k] = t.col;
            vals[k] = t.value;
        }
    }

    m.row_start_.assign(static_cast<std::size_t>(dimension) + 1, 0);
    m.cols_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::vector<int> order;
    for (int r = 0; r < dimension; ++r) {
        const int lo = counts[r], hi = counts[r + 1];
        order.resize(hi - lo);
        std::iota(order.begin(), order.end(), lo);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return cols[a] < cols[b]; });
        const std::size_t row_base = m.cols_.size();
        for (int k : order) {
            if (m.cols_.size() > row_base && m.cols_.back() == cols[k]) {
                m.values_.back() += vals[k];
            } else {
                m.cols_.push_back(cols[k]);
                m.values_.push_back(vals[k]);
            }
        }
        m.row_start_[r + 1] = static_cast<int>(m.cols_.size());
    }
    return m;
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < dim_; ++r) {
        double s = 0.0;
        for (int k = row_start_[r]; k < row_start_[r + 1]; ++k) s += values_[k] * x[cols_[k]];
        y[r] = s;
    }
}

std::vector<double> SparseSymMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(dim_));
    multiply(x, y);
    return y;
}

double SparseSymMatrix::coeff(int row, int col) const {
    const auto begin = cols_.begin() + row_start_[row];
    const auto end = cols_.begin() + row_start_[row + 1];
    const auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - cols_.begin())];
}

double SparseSymMatrix::max_asymmetry() const {
    double worst = 0.0;
    for (int r = 0; r < dim_; ++r)
        for (int k = row_start_[r]; k < row_start_[r + 1]; ++k)
            worst = std::max(worst, std::abs(values_[k] - coeff(cols_[k], r)));
    return worst;
}

std::vector<double> SparseSymMatrix::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(dim_), 0.0);
    for (int r = 0; r < dim_; ++r) d[r] = coeff(r, r);
    return d;
}

std::vector<double> SparseSymMatrix::to_dense() const {
    std::vector<double> dense(static_cast<std::size_t>(dim_) * dim_, 0.0);
    for (int r = 0; r < dim_; ++r)
        for (int k = row_start_[r]; k < row_start_[r + 1]; ++k)
            dense[static_cast<std::size_t>(r) * dim_ + cols_[k]] = values_[k];
    return dense;
}

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot_vec(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::pair<std::vector<double>, CgReport> cg_solve(const SparseSymMatrix& A,
                                                  std::span<const double> rhs,
                                                  const CgOptions& options) {
    const int n = A.dimension();
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    CgReport report;

    const double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) {
        report.converged = true;
        return {std::move(x), report};
    }

    const int max_iter = options.max_iter >= 0 ? options.max_iter : 10 * n;
    std::vector<double> inv_diag;
    if (options.jacobi) {
        inv_diag = A.diagonal();
        for (double& d : inv_diag) d = (d > 0.0) ? 1.0 / d : 1.0;
    }

    std::vector<double> r(rhs.begin(), rhs.end());
    std::vector<double> z(static_cast<std::size_t>(n));
    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (options.jacobi)
            for (int i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
        else
            out = in;
    };
    precondition(r, z);
    std::vector<double> p = z;
    std::vector<double> ap(static_cast<std::size_t>(n));
    double rz = dot_vec(r, z);
    double best_res = 1.0;
    int since_improvement = 0;
    const int stagnation_window = 500;

    for (int it = 0; it < max_iter; ++it) {
        A.multiply(p, ap);
        const double pap = dot_vec(p, ap);
        if (!(pap > 0.0)) break;  // kernel direction or indefiniteness: stop
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        report.iterations = it + 1;
        const double res = norm2(r) / rhs_norm;
        report.relative_residual = res;
        if (res <= options.tol) {
            report.converged = true;
            return {std::move(x), report};
        }
        if (res < 0.99 * best_res) {
            best_res = res;
            since_improvement = 0;
        } else if (++since_improvement >= stagnation_window) {
            break;  // stagnated: report failure instead of looping
        }
        precondition(r, z);
        const double rz_new = dot_vec(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    auto ax = A.multiply(x);
    for (int i = 0; i < n; ++i) ax[i] -= rhs[i];
    report.relative_residual = norm2(ax) / rhs_norm;
    report.converged = report.relative_residual <= options.tol;
    return {std::move(x), report};
}

std::vector<double> dense_constrained_solve(const SparseSymMatrix& A,
                                            const std::vector<std::vector<double>>& constraints,
                                            std::span<const double> rhs) {
    const int n = A.dimension();
    const int m = static_cast<int>(constraints.size());
    if (n > 2500) throw std::runtime_error("dense_constrained_solve: dimension too large");
    Eigen::MatrixXd saddle = Eigen::MatrixXd::Zero(n + m, n + m);
    const auto dense = A.to_dense();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) saddle(i, j) = dense[static_cast<std::size_t>(i) * n + j];
    for (int c = 0; c < m; ++c) {
        if (static_cast<int>(constraints[c].size()) != n)
            throw std::invalid_argument("dense_constrained_solve: constraint length mismatch");
        for (int j = 0; j < n; ++j) {
            saddle(n + c, j) = constraints[c][j];
            saddle(j, n + c) = constraints[c][j];
        }
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + m);
    for (int i = 0; i < n; ++i) b(i) = rhs[i];
    // The saddle matrix may carry a benign kernel (basis vectors with zero
    // gradient that also satisfy all constraints); take the minimum-norm
    // solution and verify consistency afterwards.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(saddle);
    const Eigen::VectorXd sol = cod.solve(b);
    const double resid = (saddle * sol - b).norm();
    const double scale = std::max(b.norm(), 1.0);
    if (resid > 1e-9 * scale)
        throw std::runtime_error("dense_constrained_solve: inconsistent constrained system");
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[i] = sol(i);
    return x;
}

std::vector<double> dense_sym_eigenvalues(const std::vector<double>& dense, int dimension) {
    Eigen::MatrixXd M(dimension, dimension);
    for (int i = 0; i < dimension; ++i)
        for (int j = 0; j < dimension; ++j)
            M(i, j) = dense[static_cast<std::size_t>(i) * dimension + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    std::vector<double> out(static_cast<std::size_t>(dimension));
    for (int i = 0; i < dimension; ++i) out[i] = es.eigenvalues()(i);
    return out;
}

}  // namespace nchmm
