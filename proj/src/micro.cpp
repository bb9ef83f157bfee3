#include "nchmm/micro.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nchmm {

namespace {

constexpr double kGaussOffset = 0.28867513459481287;  // 1/(2*sqrt(3))

Mat2 cell_average_tensor(const TensorField& A, Point origin, double wx, double wy) {
    Mat2 avg;
    for (int qa = 0; qa < 2; ++qa)
        for (int qb = 0; qb < 2; ++qb) {
            const Point q{origin.x + (0.5 + (qa ? kGaussOffset : -kGaussOffset)) * wx,
                          origin.y + (0.5 + (qb ? kGaussOffset : -kGaussOffset)) * wy};
            avg += A.evaluate(q);
        }
    return 0.25 * avg;
}

}  // namespace

UniformQuadMesh SamplingDomain::make_mesh() const {
    return UniformQuadMesh({center.x - 0.5 * delta, center.y - 0.5 * delta}, delta, delta, n, n);
}

MicroSystem assemble_micro_system(const SamplingDomain& domain, const TensorField& A) {
    const UniformQuadMesh mesh = domain.make_mesh();
    NCSpace space(mesh, domain.coupling == Coupling::Periodic ? SpaceVariant::PeriodicZeroMean
                                                              : SpaceVariant::ZeroBoundaryMean);
    const double wx = mesh.cell_width_x(), wy = mesh.cell_width_y();
    const double area = mesh.cell_area();

    std::array<Vec2, 4> grads;
    for (int c = 0; c < 4; ++c) grads[c] = shape_gradient(c, wx, wy);

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.element_count()) * 16);
    MicroSystem sys{std::move(space),
                    SparseSymMatrix{},
                    {std::vector<double>(), std::vector<double>()},
                    {0.0, 0.0},
                    {}};
    const int dofs = sys.space.dof_count();
    sys.rhs[0].assign(static_cast<std::size_t>(dofs), 0.0);
    sys.rhs[1].assign(static_cast<std::size_t>(dofs), 0.0);
    sys.cell_tensor.resize(static_cast<std::size_t>(mesh.element_count()));

    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const Mat2 abar = cell_average_tensor(A, mesh.element_origin(e), wx, wy);
        sys.cell_tensor[e] = abar;
        const auto edofs = sys.space.element_dofs(e);
        std::array<Vec2, 4> agrads;
        for (int c = 0; c < 4; ++c) agrads[c] = abar.apply(grads[c]);
        for (int a = 0; a < 4; ++a) {
            if (edofs[a] < 0) continue;
            for (int b = 0; b < 4; ++b) {
                if (edofs[b] < 0) continue;
                triplets.push_back({edofs[a], edofs[b], area * dot(agrads[b], grads[a])});
            }
            for (int j = 0; j < 2; ++j) {
                // -(A e_j) . grad z integrated over the cell
                const double contrib = -area * agrads[a][j];
                sys.rhs[j][edofs[a]] += contrib;
                sys.rhs_gross[j] += std::abs(contrib);
            }
        }
    }
    sys.matrix = SparseSymMatrix::from_triplets(dofs, triplets);
    return sys;
}

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

Corrector solve_correctors(const SamplingDomain& domain, const MicroSystem& system,
                           const CgOptions& options) {
    const int dofs = system.space.dof_count();
    Corrector out{{Field{system.space.mesh(), {}}, Field{system.space.mesh(), {}}}, {}};
    for (int j = 0; j < 2; ++j) {
        const auto& rhs = system.rhs[j];
        if (domain.coupling == Coupling::Periodic) {
            const double total = std::accumulate(rhs.begin(), rhs.end(), 0.0);
            if (std::abs(total) > 1e-12 * std::max(system.rhs_gross[j], 1e-300))
                throw std::runtime_error(
                    "solve_correctors: periodic RHS inconsistent with constant kernel");
        }
        std::vector<double> coeffs;
        if (norm2(rhs) <= 1e-13 * system.rhs_gross[j]) {
            // Analytically zero RHS drowned in roundoff: the corrector is 0.
            coeffs.assign(static_cast<std::size_t>(dofs), 0.0);
            out.reports[j] = CgReport{0, 0.0, true};
        } else {
            auto [x, report] = cg_solve(system.matrix, rhs, options);
            if (!report.converged)
                throw std::runtime_error("solve_correctors: CG failed for direction " +
                                         std::to_string(j + 1) + " after " +
                                         std::to_string(report.iterations) +
                                         " iterations, relative residual " +
                                         std::to_string(report.relative_residual));
            coeffs = std::move(x);
            out.reports[j] = report;
        }
        Field field = make_field(system.space, coeffs);
        if (domain.coupling == Coupling::Periodic) {
            const double mean = field.domain_mean();
            for (double& v : field.vertex_values) v -= mean;
        }
        out.psi[j] = std::move(field);
    }
    return out;
}

Corrector solve_correctors(const SamplingDomain& domain, const TensorField& A,
                           const CgOptions& options) {
    return solve_correctors(domain, assemble_micro_system(domain, A), options);
}

RecoveredTensor recovered_tensor(const SamplingDomain& domain, const MicroSystem& system,
                                 const Corrector& corrector) {
    const UniformQuadMesh& mesh = system.space.mesh();
    const double area = mesh.cell_area();
    const double scale = 1.0 / (domain.delta * domain.delta);
    Mat2 flux, energy;
    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const Mat2& abar = system.cell_tensor[e];
        const Vec2 g0 = corrector.psi[0].gradient(e);
        const Vec2 g1 = corrector.psi[1].gradient(e);
        const Vec2 phi[2] = {{1.0 + g0[0], g0[1]}, {g1[0], 1.0 + g1[1]}};
        const Vec2 aphi[2] = {abar.apply(phi[0]), abar.apply(phi[1])};
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                // Flux entry (j,k): A_jk + (A grad psi^k)_j = (A phi^k)_j.
                flux(j, k) += area * aphi[k][j];
                energy(j, k) += area * dot(aphi[j], phi[k]);
            }
    }
    RecoveredTensor out{scale * flux, scale * energy, 0.0};
    out.cross_check = (out.value - out.energy_value).frobenius_norm();
    return out;
}

double micro_energy(const MicroSystem& system, const Corrector& corrector, Vec2 xi) {
    return micro_cross_energy(system, corrector, xi, xi);
}

double micro_cross_energy(const MicroSystem& system, const Corrector& corrector, Vec2 xi,
                          Vec2 eta) {
    const UniformQuadMesh& mesh = system.space.mesh();
    const double area = mesh.cell_area();
    double sum = 0.0;
    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const Vec2 g0 = corrector.psi[0].gradient(e);
        const Vec2 g1 = corrector.psi[1].gradient(e);
        const Vec2 gu = {xi[0] * (1.0 + g0[0]) + xi[1] * g1[0],
                         xi[0] * g0[1] + xi[1] * (1.0 + g1[1])};
        const Vec2 gv = {eta[0] * (1.0 + g0[0]) + eta[1] * g1[0],
                         eta[0] * g0[1] + eta[1] * (1.0 + g1[1])};
        sum += area * dot(system.cell_tensor[e].apply(gu), gv);
    }
    return sum;
}

Corrector dense_micro_reference(const SamplingDomain& domain, const TensorField& A) {
    const UniformQuadMesh mesh = domain.make_mesh();
    NCSpace full(mesh, SpaceVariant::Full);
    const double wx = mesh.cell_width_x(), wy = mesh.cell_width_y();
    const double area = mesh.cell_area();
    const int nv = mesh.vertex_count();

    std::array<Vec2, 4> grads;
    for (int c = 0; c < 4; ++c) grads[c] = shape_gradient(c, wx, wy);

    std::vector<Triplet> triplets;
    std::array<std::vector<double>, 2> rhs = {std::vector<double>(nv, 0.0),
                                              std::vector<double>(nv, 0.0)};
    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const Mat2 abar = cell_average_tensor(A, mesh.element_origin(e), wx, wy);
        const auto verts = mesh.element_vertices(e);
        for (int a = 0; a < 4; ++a) {
            const Vec2 ag = abar.apply(grads[a]);
            for (int b = 0; b < 4; ++b)
                triplets.push_back({verts[a], verts[b], area * dot(abar.apply(grads[b]), grads[a])});
            for (int j = 0; j < 2; ++j) rhs[j][verts[a]] -= area * ag[j];
        }
    }
    const SparseSymMatrix matrix = SparseSymMatrix::from_triplets(nv, triplets);

    std::vector<std::vector<double>> constraints;
    if (domain.coupling == Coupling::Periodic) {
        // Edge-mean equality on each opposite face pair (means of the vertex
        // basis are averages of the two end-vertex coefficients).
        const OppositeFacePairs pairs = mesh.opposite_face_pairs();
        auto all_pairs = pairs.left_right;
        all_pairs.insert(all_pairs.end(), pairs.bottom_top.begin(), pairs.bottom_top.end());
        for (const auto& [fa, fb] : all_pairs) {
            std::vector<double> row(static_cast<std::size_t>(nv), 0.0);
            for (VertexId v : mesh.face_vertices(fa)) row[v] += 0.5;
            for (VertexId v : mesh.face_vertices(fb)) row[v] -= 0.5;
            constraints.push_back(std::move(row));
        }
        // Zero integral: each vertex contributes area/4 per adjacent cell.
        std::vector<double> row(static_cast<std::size_t>(nv), 0.0);
        for (ElementId e = 0; e < mesh.element_count(); ++e)
            for (VertexId v : mesh.element_vertices(e)) row[v] += 0.25 * area;
        constraints.push_back(std::move(row));
    } else {
        for (FaceId f = 0; f < mesh.face_count(); ++f) {
            if (!mesh.is_boundary_face(f)) continue;
            std::vector<double> row(static_cast<std::size_t>(nv), 0.0);
            for (VertexId v : mesh.face_vertices(f)) row[v] += 0.5;
            constraints.push_back(std::move(row));
        }
    }

    Corrector out{{Field{mesh, {}}, Field{mesh, {}}}, {}};
    for (int j = 0; j < 2; ++j) {
        std::vector<double> x = dense_constrained_solve(matrix, constraints, rhs[j]);
        out.psi[j] = Field{mesh, std::move(x)};
        out.reports[j] = CgReport{0, 0.0, true};
    }
    return out;
}

std::pair<int, int> micro_system_rank_info(const MicroSystem& system, double tol) {
    const int dim = system.matrix.dimension();
    const auto eigs = dense_sym_eigenvalues(system.matrix.to_dense(), dim);
    const double largest = eigs.empty() ? 0.0 : std::abs(eigs.back());
    int deficiency = 0;
    for (double e : eigs)
        if (std::abs(e) <= tol * largest) ++deficiency;
    return {dim, deficiency};
}

}  // namespace nchmm
