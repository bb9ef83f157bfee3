#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nchmm/examples.hpp"
#include "nchmm/micro.hpp"

using namespace nchmm;

namespace {

const TensorField& tensor_51() { return find_example("peri-diag").tensor; }
const TensorField& tensor_52() { return find_example("peri-offdiag").tensor; }
const TensorField& tensor_53() { return find_example("dirichlet-noninteger").tensor; }

double energy_norm_sq(const MicroSystem& sys, const Field& f) {
    const auto& mesh = sys.space.mesh();
    double sum = 0.0;
    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const Vec2 g = f.gradient(e);
        sum += mesh.cell_area() * dot(sys.cell_tensor[e].apply(g), g);
    }
    return sum;
}

}  // namespace

TEST_CASE("constant coefficient, Dirichlet coupling: plain Laplacian stiffness") {
    const SamplingDomain d{{0.5, 0.5}, 1.0, 2, Coupling::Dirichlet};
    const auto sys = assemble_micro_system(d, TensorField::constant(Mat2::identity()));
    // 2x2 mesh with zero boundary means: single interior vertex DOF
    CHECK(sys.matrix.dimension() == 1);
    // 4 adjacent cells, each contributing area*(g.g) = 0.25*(1/(4*0.25)+1/(4*0.25)) = 0.5
    CHECK(sys.matrix.coeff(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
    // constant coefficient: both correctors vanish identically
    const auto corr = solve_correctors(d, sys);
    for (int j = 0; j < 2; ++j) {
        CHECK(corr.reports[j].iterations == 0);
        for (double v : corr.psi[j].vertex_values) CHECK(v == 0.0);
    }
}

TEST_CASE("periodic coupling: constants lie in the matrix kernel") {
    const double eps = 1e-3;
    const SamplingDomain d{{0.5, 0.5}, eps, 4, Coupling::Periodic};
    const auto sys = assemble_micro_system(d, tensor_51());
    std::vector<double> ones(static_cast<std::size_t>(sys.matrix.dimension()), 1.0);
    const auto y = sys.matrix.multiply(ones);
    double scale = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) scale = std::max(scale, std::abs(y[k]));
    CHECK(scale <= 1e-12 * sys.matrix.coeff(0, 0) * sys.matrix.dimension());
}

TEST_CASE("periodic matrix equals the Full-space matrix folded by identification") {
    const double eps = 1e-3;
    const SamplingDomain d{{0.3, 0.7}, eps, 4, Coupling::Periodic};
    const auto sys = assemble_micro_system(d, tensor_51());

    // Independently assemble on the Full vertex space with the same
    // quadrature and fold rows/columns through the torus DOF map.
    const UniformQuadMesh mesh = d.make_mesh();
    NCSpace full(mesh, SpaceVariant::Full);
    NCSpace per(mesh, SpaceVariant::PeriodicZeroMean);
    std::array<Vec2, 4> grads;
    for (int c = 0; c < 4; ++c)
        grads[c] = shape_gradient(c, mesh.cell_width_x(), mesh.cell_width_y());
    std::vector<Triplet> folded;
    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const Mat2& abar = sys.cell_tensor[e];
        const auto verts = mesh.element_vertices(e);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                folded.push_back({per.vertex_dof(verts[a]), per.vertex_dof(verts[b]),
                                  mesh.cell_area() * dot(abar.apply(grads[b]), grads[a])});
    }
    const auto oracle = SparseSymMatrix::from_triplets(per.dof_count(), folded);
    for (int i = 0; i < per.dof_count(); ++i)
        for (int j = 0; j < per.dof_count(); ++j)
            CHECK(std::abs(sys.matrix.coeff(i, j) - oracle.coeff(i, j)) <= 1e-12);
}

TEST_CASE("x1-periodic scalar tensor: psi2 vanishes, psi1 independent of x2") {
    const double eps = 1e-3;
    const SamplingDomain d{{0.5, 0.5}, eps, 8, Coupling::Periodic};
    const auto sys = assemble_micro_system(d, tensor_53());
    const auto corr = solve_correctors(d, sys);
    for (double v : corr.psi[1].vertex_values) CHECK(std::abs(v) <= 1e-12);
    const UniformQuadMesh mesh = d.make_mesh();
    for (int i = 0; i <= mesh.nx(); ++i) {
        const double base = corr.psi[0].vertex_values[mesh.vertex_id(i, 0)];
        for (int j = 1; j <= mesh.ny(); ++j)
            CHECK(std::abs(corr.psi[0].vertex_values[mesh.vertex_id(i, j)] - base) <= 1e-9);
    }
}

TEST_CASE("iterative solution matches the dense Lagrange oracle (n = 4, periodic)") {
    const double eps = 1e-3;
    const SamplingDomain d{{0.5, 0.5}, eps, 4, Coupling::Periodic};
    const auto sys = assemble_micro_system(d, tensor_51());
    const auto iter = solve_correctors(d, sys);
    const auto dense = dense_micro_reference(d, tensor_51());
    for (int j = 0; j < 2; ++j) {
        Field diff = iter.psi[j];
        for (std::size_t v = 0; v < diff.vertex_values.size(); ++v)
            diff.vertex_values[v] -= dense.psi[j].vertex_values[v];
        const double rel = std::sqrt(energy_norm_sq(sys, diff)) /
                           std::max(std::sqrt(energy_norm_sq(sys, dense.psi[j])), 1e-300);
        CHECK(rel <= 1e-8);
    }
}

TEST_CASE("dense oracle agreement for all micro systems with n <= 8, both couplings") {
    const double eps = 1e-3;
    for (const Coupling coupling : {Coupling::Periodic, Coupling::Dirichlet}) {
        for (const int n : {2, 4, 8}) {
            const SamplingDomain d{{0.25, 0.6}, eps, n, coupling};
            const auto sys = assemble_micro_system(d, tensor_52());
            const auto iter = solve_correctors(d, sys);
            const auto dense = dense_micro_reference(d, tensor_52());
            const auto rt_iter = recovered_tensor(d, sys, iter);
            const auto rt_dense = recovered_tensor(d, sys, dense);
            CHECK((rt_iter.value - rt_dense.value).frobenius_norm() <= 1e-8);
        }
    }
}

TEST_CASE("recovered tensor: constant coefficient reproduced exactly") {
    const Mat2 a0{{{2.0, 0.3}, {0.3, 1.5}}};
    for (const Coupling coupling : {Coupling::Periodic, Coupling::Dirichlet}) {
        const SamplingDomain d{{0.1, -0.2}, 0.01, 4, coupling};
        const auto sys = assemble_micro_system(d, TensorField::constant(a0));
        const auto corr = solve_correctors(d, sys);
        const auto rt = recovered_tensor(d, sys, corr);
        CHECK((rt.value - a0).frobenius_norm() <= 1e-13);
        CHECK(rt.cross_check <= 1e-13);
    }
}

TEST_CASE("recovered tensor error values") {
    const double eps = 1e-3;
    {
        const SamplingDomain d{{0.5, 0.5}, eps, 16, Coupling::Periodic};
        const auto sys = assemble_micro_system(d, tensor_51());
        const auto rt = recovered_tensor(d, sys, solve_correctors(d, sys));
        const double err = (Mat2::identity() - rt.value).frobenius_norm();
        CHECK(err == doctest::Approx(9.02e-3).epsilon(0.02));
    }
    {
        const SamplingDomain d{{0.5, 0.5}, eps, 64, Coupling::Periodic};
        const auto sys = assemble_micro_system(d, tensor_52());
        const auto rt = recovered_tensor(d, sys, solve_correctors(d, sys));
        const Mat2 a0 = find_example("peri-offdiag").homogenized.evaluate({0.5, 0.5});
        CHECK((a0 - rt.value).frobenius_norm() == doctest::Approx(4.52e-4).epsilon(0.02));
    }
}

TEST_CASE("recovered tensor symmetry, ellipticity, and representation cross-check") {
    const double eps = 1e-3;
    const TensorField& A = tensor_52();
    for (const Coupling coupling : {Coupling::Periodic, Coupling::Dirichlet}) {
        const SamplingDomain d{{0.37, 0.81}, 1.1 * eps, 16, coupling};
        const auto sys = assemble_micro_system(d, A);
        const auto corr = solve_correctors(d, sys);
        const auto rt = recovered_tensor(d, sys, corr);
        CHECK(rt.cross_check <= 1e-10);
        CHECK(rt.energy_value.max_asymmetry() <= 1e-10);
        const auto eigs = rt.value.sym_eigenvalues();
        CHECK(eigs[0] >= A.lambda_min - 1e-8);
        CHECK(eigs[1] <= A.lambda_max + 1e-8);
    }
}

TEST_CASE("seminorm bounds of the constrained micro solution, 20 random directions") {
    const double eps = 1e-3;
    const TensorField& A = tensor_51();
    const SamplingDomain d{{0.5, 0.5}, eps, 16, Coupling::Periodic};
    const auto sys = assemble_micro_system(d, A);
    const auto corr = solve_correctors(d, sys);
    const auto& mesh = sys.space.mesh();
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.14159265358979);
    const double area = d.delta * d.delta;
    for (int k = 0; k < 20; ++k) {
        const double t = ang(rng);
        const Vec2 xi = {std::cos(t), std::sin(t)};
        // |v_H|_{1,K} = |xi| sqrt(|K|) = sqrt(area) for unit xi
        const double lower = std::sqrt(area);
        double seminorm_sq = 0.0;
        for (ElementId e = 0; e < mesh.element_count(); ++e) {
            const Vec2 g0 = corr.psi[0].gradient(e);
            const Vec2 g1 = corr.psi[1].gradient(e);
            const Vec2 g = {xi[0] * (1.0 + g0[0]) + xi[1] * g1[0],
                            xi[0] * g0[1] + xi[1] * (1.0 + g1[1])};
            seminorm_sq += mesh.cell_area() * dot(g, g);
        }
        const double seminorm = std::sqrt(seminorm_sq);
        CHECK(seminorm >= lower * (1.0 - 1e-10));
        CHECK(seminorm <= (A.lambda_max / A.lambda_min) * lower * (1.0 + 1e-10));
    }
}

TEST_CASE("energy identity: micro energy equals recovered tensor quadratic form") {
    const double eps = 1e-3;
    const SamplingDomain d{{0.5, 0.5}, eps, 8, Coupling::Periodic};
    const auto sys = assemble_micro_system(d, tensor_52());
    const auto corr = solve_correctors(d, sys);
    const auto rt = recovered_tensor(d, sys, corr);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        const Vec2 xi = {uni(rng), uni(rng)};
        const Vec2 eta = {uni(rng), uni(rng)};
        const double lhs = micro_cross_energy(sys, corr, xi, eta) / (d.delta * d.delta);
        const double rhs = dot(rt.value.apply(xi), eta);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
        const double quad = micro_energy(sys, corr, xi) / (d.delta * d.delta);
        CHECK(std::abs(quad - dot(rt.value.apply(xi), xi)) <= 1e-10 * std::max(1.0, quad));
    }
}

TEST_CASE("zero-mean post-process leaves the variational residual unchanged") {
    const double eps = 1e-3;
    const SamplingDomain d{{0.5, 0.5}, eps, 8, Coupling::Periodic};
    const auto sys = assemble_micro_system(d, tensor_51());
    const auto [x, rep] = cg_solve(sys.matrix, sys.rhs[0]);
    REQUIRE(rep.converged);
    auto residual_norm = [&](const std::vector<double>& v) {
        const auto av = sys.matrix.multiply(v);
        double s = 0.0;
        for (std::size_t i = 0; i < av.size(); ++i) {
            const double r = av[i] - sys.rhs[0][i];
            s += r * r;
        }
        return std::sqrt(s);
    };
    const double before = residual_norm(x);
    double mean = 0.0;
    for (double v : x) mean += v / static_cast<double>(x.size());
    std::vector<double> shifted = x;
    for (double& v : shifted) v -= mean;
    const double after = residual_norm(shifted);
    double rhs_scale = 0.0;
    for (double v : sys.rhs[0]) rhs_scale += v * v;
    CHECK(std::abs(before - after) <= 1e-12 * std::sqrt(rhs_scale));
}

TEST_CASE("periodic corrector has zero mean; Dirichlet corrector zero boundary means") {
    const double eps = 1e-3;
    {
        const SamplingDomain d{{0.5, 0.5}, eps, 8, Coupling::Periodic};
        const auto corr = solve_correctors(d, tensor_52());
        CHECK(std::abs(corr.psi[0].domain_mean()) <= 1e-13);
        CHECK(std::abs(corr.psi[1].domain_mean()) <= 1e-13);
    }
    {
        const SamplingDomain d{{0.5, 0.5}, 1.1 * eps, 8, Coupling::Dirichlet};
        const auto corr = solve_correctors(d, tensor_52());
        const auto& mesh = corr.psi[0].mesh;
        for (FaceId f = 0; f < mesh.face_count(); ++f) {
            if (!mesh.is_boundary_face(f)) continue;
            const ElementId e = mesh.face_elements(f)[0];
            CHECK(std::abs(corr.psi[0].edge_mean(e, f)) <= 1e-13);
        }
    }
}

TEST_CASE("rank info: periodic system reports deficiency >= 1") {
    const double eps = 1e-3;
    const SamplingDomain d{{0.5, 0.5}, eps, 5, Coupling::Periodic};
    const auto sys = assemble_micro_system(d, tensor_51());
    const auto [dim, deficiency] = micro_system_rank_info(sys);
    CHECK(dim == 25);
    CHECK(deficiency >= 1);
    // even n adds the checkerboard relation
    const SamplingDomain d4{{0.5, 0.5}, eps, 4, Coupling::Periodic};
    const auto sys4 = assemble_micro_system(d4, tensor_51());
    CHECK(micro_system_rank_info(sys4).second >= 2);
}

TEST_CASE("sampling domain validation") {
    const SamplingDomain bad{{0.0, 0.0}, 0.0, 4, Coupling::Periodic};
    CHECK_THROWS_AS(bad.make_mesh(), std::invalid_argument);
    const SamplingDomain bad2{{0.0, 0.0}, 1.0, 0, Coupling::Periodic};
    CHECK_THROWS_AS(bad2.make_mesh(), std::invalid_argument);
}
