#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nchmm/linalg.hpp"

using namespace nchmm;

TEST_CASE("triplet assembly sums duplicates") {
    const Triplet ts[] = {{0, 0, 1.0}, {0, 0, 1.0}};
    const auto m = SparseSymMatrix::from_triplets(1, ts);
    CHECK(m.coeff(0, 0) == doctest::Approx(2.0));
    CHECK(m.nonzero_count() == 1);
}

TEST_CASE("identity assembly") {
    std::vector<Triplet> ts;
    for (int i = 0; i < 5; ++i) ts.push_back({i, i, 1.0});
    const auto m = SparseSymMatrix::from_triplets(5, ts);
    std::vector<double> x = {1, 2, 3, 4, 5};
    const auto y = m.multiply(x);
    for (int i = 0; i < 5; ++i) CHECK(y[i] == doctest::Approx(x[i]));
}

TEST_CASE("random symmetric triplet set yields a symmetric matrix") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> idx(0, 19);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<Triplet> ts;
    for (int k = 0; k < 300; ++k) {
        const int i = idx(rng), j = idx(rng);
        const double v = val(rng);
        ts.push_back({i, j, v});
        ts.push_back({j, i, v});
    }
    const auto m = SparseSymMatrix::from_triplets(20, ts);
    CHECK(m.max_asymmetry() <= 1e-14);
    const auto dense = m.to_dense();
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) CHECK(dense[i * 20 + j] == doctest::Approx(m.coeff(j, i)));
}

TEST_CASE("out-of-range triplet throws") {
    const Triplet bad[] = {{0, 3, 1.0}};
    CHECK_THROWS_AS(SparseSymMatrix::from_triplets(3, bad), std::out_of_range);
}

TEST_CASE("cg: identity solves in one iteration") {
    std::vector<Triplet> ts = {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
    const auto m = SparseSymMatrix::from_triplets(3, ts);
    const std::vector<double> rhs = {1.0, 0.0, 0.0};
    const auto [x, rep] = cg_solve(m, rhs);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(x[0] == doctest::Approx(1.0));
}

TEST_CASE("cg: zero rhs returns zero immediately") {
    std::vector<Triplet> ts = {{0, 0, 2.0}};
    const auto m = SparseSymMatrix::from_triplets(1, ts);
    const std::vector<double> rhs = {0.0};
    const auto [x, rep] = cg_solve(m, rhs);
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    CHECK(x[0] == 0.0);
}

TEST_CASE("cg: consistent singular system") {
    std::vector<Triplet> ts = {{0, 0, 1.0}, {1, 1, 2.0}};  // diag(1, 2, 0)
    const auto m = SparseSymMatrix::from_triplets(3, ts);
    const std::vector<double> rhs = {1.0, 2.0, 0.0};
    const auto [x, rep] = cg_solve(m, rhs);
    CHECK(rep.converged);
    const auto ax = m.multiply(x);
    CHECK(ax[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ax[1] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("cg: inconsistent singular system reports failure, never a wrong answer") {
    std::vector<Triplet> ts = {{0, 0, 1.0}};  // diag(1, 0)
    const auto m = SparseSymMatrix::from_triplets(2, ts);
    const std::vector<double> rhs = {0.0, 1.0};
    const auto [x, rep] = cg_solve(m, rhs);
    CHECK_FALSE(rep.converged);
}

TEST_CASE("cg: SPD convergence within dimension + slack") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    const int n = 40;
    // diagonally dominant symmetric matrix (hence SPD)
    std::vector<Triplet> ts;
    std::vector<double> rowsum(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if ((i + j) % 3) continue;
            const double v = val(rng);
            ts.push_back({i, j, v});
            ts.push_back({j, i, v});
            rowsum[i] += std::abs(v);
            rowsum[j] += std::abs(v);
        }
    for (int i = 0; i < n; ++i) ts.push_back({i, i, rowsum[i] + 1.0});
    const auto m = SparseSymMatrix::from_triplets(n, ts);
    std::vector<double> rhs(n);
    for (double& r : rhs) r = val(rng);
    CgOptions opt;
    opt.tol = 1e-12;
    const auto [x, rep] = cg_solve(m, rhs, opt);
    CHECK(rep.converged);
    CHECK(rep.iterations <= n + 10);
}

TEST_CASE("jacobi preconditioning gives the same answer") {
    std::vector<Triplet> ts = {{0, 0, 4.0}, {1, 1, 1.0}, {0, 1, 0.5}, {1, 0, 0.5}};
    const auto m = SparseSymMatrix::from_triplets(2, ts);
    const std::vector<double> rhs = {1.0, -1.0};
    CgOptions plain, jac;
    jac.jacobi = true;
    const auto [x0, r0] = cg_solve(m, rhs, plain);
    const auto [x1, r1] = cg_solve(m, rhs, jac);
    CHECK(r0.converged);
    CHECK(r1.converged);
    CHECK(x0[0] == doctest::Approx(x1[0]).epsilon(1e-9));
    CHECK(x0[1] == doctest::Approx(x1[1]).epsilon(1e-9));
}

TEST_CASE("dense constrained solve: no constraints matches cg") {
    std::vector<Triplet> ts = {{0, 0, 3.0}, {1, 1, 5.0}, {0, 1, 1.0}, {1, 0, 1.0}};
    const auto m = SparseSymMatrix::from_triplets(2, ts);
    const std::vector<double> rhs = {1.0, 2.0};
    const auto xd = dense_constrained_solve(m, {}, rhs);
    const auto [xc, rep] = cg_solve(m, rhs);
    CHECK(rep.converged);
    CHECK(std::abs(xd[0] - xc[0]) <= 1e-10);
    CHECK(std::abs(xd[1] - xc[1]) <= 1e-10);
}

TEST_CASE("dense constrained solve: ones-deficient Laplacian with zero-sum constraint") {
    // 1D periodic Laplacian on 4 nodes: kernel = constants
    const int n = 4;
    std::vector<Triplet> ts;
    for (int i = 0; i < n; ++i) {
        ts.push_back({i, i, 2.0});
        ts.push_back({i, (i + 1) % n, -1.0});
        ts.push_back({(i + 1) % n, i, -1.0});
    }
    const auto m = SparseSymMatrix::from_triplets(n, ts);
    const std::vector<double> rhs = {1.0, -1.0, 1.0, -1.0};  // orthogonal to ones
    const auto x = dense_constrained_solve(m, {std::vector<double>(n, 1.0)}, rhs);
    double sum = 0.0;
    for (double v : x) sum += v;
    CHECK(std::abs(sum) <= 1e-12);
    const auto ax = m.multiply(x);
    for (int i = 0; i < n; ++i) CHECK(ax[i] == doctest::Approx(rhs[i]).epsilon(1e-12));

    // CG solution shifted to zero mean agrees
    const auto [xc, rep] = cg_solve(m, rhs);
    CHECK(rep.converged);
    double mean = 0.0;
    for (double v : xc) mean += v / n;
    for (int i = 0; i < n; ++i) CHECK(xc[i] - mean == doctest::Approx(x[i]).epsilon(1e-8));
}

TEST_CASE("dense constrained solve failure modes") {
    std::vector<Triplet> ts = {{0, 0, 0.0}, {1, 1, 0.0}};
    const auto zero = SparseSymMatrix::from_triplets(2, ts);
    const std::vector<double> rhs = {1.0, 1.0};
    CHECK_THROWS_AS(dense_constrained_solve(zero, {}, rhs), std::runtime_error);
    const auto id = SparseSymMatrix::from_triplets(
        2, std::vector<Triplet>{{0, 0, 1.0}, {1, 1, 1.0}});
    CHECK_THROWS_AS(dense_constrained_solve(id, {std::vector<double>{1.0}}, rhs),
                    std::invalid_argument);
}

TEST_CASE("dense symmetric eigenvalues") {
    const std::vector<double> dense = {2.0, 1.0, 1.0, 2.0};
    const auto eigs = dense_sym_eigenvalues(dense, 2);
    CHECK(eigs[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eigs[1] == doctest::Approx(3.0).epsilon(1e-12));
}
