#include "nchmm/macro.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "nchmm/parallel.hpp"

namespace nchmm {

namespace {

constexpr double kGaussOffset = 0.28867513459481287;  // 1/(2*sqrt(3))

// Local (s,t) coordinates of the 4 Gauss points, order matching quadrature_points.
constexpr double kLocal[4][2] = {{0.5 - kGaussOffset, 0.5 - kGaussOffset},
                                 {0.5 + kGaussOffset, 0.5 - kGaussOffset},
                                 {0.5 - kGaussOffset, 0.5 + kGaussOffset},
                                 {0.5 + kGaussOffset, 0.5 + kGaussOffset}};

struct SpaceWithLift {
    NCSpace space;
    std::vector<double> fixed_values;
};

SpaceWithLift build_macro_space(const UniformQuadMesh& mesh, const BoundarySpec& bc) {
    const SideCondition* sides[4] = {&bc.left, &bc.right, &bc.bottom, &bc.top};
    bool any_dirichlet = false;
    for (const SideCondition* s : sides)
        if (s->type != BcType::NeumannZero) any_dirichlet = true;
    if (!any_dirichlet)
        throw std::invalid_argument("BoundarySpec: at least one Dirichlet side required");

    const int nv = mesh.vertex_count();
    std::vector<char> fixed(static_cast<std::size_t>(nv), 0);
    std::vector<double> values(static_cast<std::size_t>(nv), 0.0);
    auto side_value = [](const SideCondition& s, Point p) {
        return s.type == BcType::DirichletValue ? s.value(p) : 0.0;
    };
    for (VertexId v = 0; v < nv; ++v) {
        const auto [i, j] = mesh.vertex_grid(v);
        const Point p = mesh.vertex(v);
        bool have = false;
        double value = 0.0;
        auto consider = [&](const SideCondition& s) {
            if (s.type == BcType::NeumannZero) return;
            const double g = side_value(s, p);
            if (have && std::abs(g - value) > 1e-12)
                throw std::invalid_argument("BoundarySpec: conflicting Dirichlet corner values");
            have = true;
            value = g;
        };
        if (i == 0) consider(bc.left);
        if (i == mesh.nx()) consider(bc.right);
        if (j == 0) consider(bc.bottom);
        if (j == mesh.ny()) consider(bc.top);
        if (have) {
            fixed[v] = 1;
            values[v] = value;
        }
    }
    return {NCSpace::with_fixed_vertices(mesh, std::move(fixed)), std::move(values)};
}

/// Shared stiffness/RHS assembly given the omega-weighted tensor sum per
/// element (sum_q w_q A_q) and the source sampled at the Gauss points.
MacroSystem assemble_core(SpaceWithLift parts, const std::function<Mat2(ElementId, int)>& tensor_at,
                          const std::function<double(Point)>& source) {
    const UniformQuadMesh& mesh = parts.space.mesh();
    const double wx = mesh.cell_width_x(), wy = mesh.cell_width_y();
    std::array<Vec2, 4> grads;
    for (int c = 0; c < 4; ++c) grads[c] = shape_gradient(c, wx, wy);
    double shape_at[4][4];  // [q][corner]
    for (int q = 0; q < 4; ++q)
        for (int c = 0; c < 4; ++c) shape_at[q][c] = shape_value(c, kLocal[q][0], kLocal[q][1]);

    MacroSystem sys{std::move(parts.space), std::move(parts.fixed_values),
                    SparseSymMatrix{},      {},
                    {},                     0,
                    0,                      0.0,
                    0.0};
    const int dofs = sys.space.dof_count();
    sys.rhs.assign(static_cast<std::size_t>(dofs), 0.0);
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.element_count()) * 16);

    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const auto qpts = quadrature_points(mesh, e);
        Mat2 weighted;  // sum_q w_q A_q (constant gradients factor out)
        double f_at[4];
        for (int q = 0; q < 4; ++q) {
            weighted += qpts[q].weight * tensor_at(e, q);
            f_at[q] = source(qpts[q].x);
        }
        const auto edofs = sys.space.element_dofs(e);
        const auto verts = mesh.element_vertices(e);
        for (int a = 0; a < 4; ++a) {
            double load = 0.0;
            for (int q = 0; q < 4; ++q) load += qpts[q].weight * f_at[q] * shape_at[q][a];
            if (edofs[a] >= 0) sys.rhs[edofs[a]] += load;
            for (int b = 0; b < 4; ++b) {
                const double k_ab = dot(weighted.apply(grads[b]), grads[a]);
                if (edofs[a] >= 0 && edofs[b] >= 0)
                    triplets.push_back({edofs[a], edofs[b], k_ab});
                else if (edofs[a] >= 0)
                    sys.rhs[edofs[a]] -= k_ab * sys.fixed_values[verts[b]];
            }
        }
    }
    sys.matrix = SparseSymMatrix::from_triplets(dofs, triplets);
    return sys;
}

}  // namespace

std::array<QuadPoint, 4> quadrature_points(const UniformQuadMesh& mesh, ElementId e) {
    const Point o = mesh.element_origin(e);
    const double wx = mesh.cell_width_x(), wy = mesh.cell_width_y();
    const double w = 0.25 * mesh.cell_area();
    std::array<QuadPoint, 4> out;
    for (int q = 0; q < 4; ++q)
        out[q] = {{o.x + kLocal[q][0] * wx, o.y + kLocal[q][1] * wy}, w};
    return out;
}

MacroSystem assemble_fehmm(const MacroProblem& problem) {
    const UniformQuadMesh& mesh = problem.mesh;
    const int n_elems = mesh.element_count();
    const int n_tasks = 4 * n_elems;

    // Group sampling domains whose micro problems are provably identical
    // (same tensor restriction up to translation) so each is solved once.
    std::vector<Point> centers(static_cast<std::size_t>(n_tasks));
    for (ElementId e = 0; e < n_elems; ++e) {
        const auto qpts = quadrature_points(mesh, e);
        for (int q = 0; q < 4; ++q) centers[4 * e + q] = qpts[q].x;
    }
    std::vector<int> task_group(static_cast<std::size_t>(n_tasks));
    std::vector<int> group_rep;  // representative task per group
    if (problem.memoize && problem.tensor.sampling_key) {
        std::map<std::string, int> by_key;
        for (int t = 0; t < n_tasks; ++t) {
            const auto key = problem.tensor.sampling_key(centers[t], problem.delta);
            if (!key) {
                task_group[t] = static_cast<int>(group_rep.size());
                group_rep.push_back(t);
                continue;
            }
            const auto [it, inserted] = by_key.try_emplace(*key, static_cast<int>(group_rep.size()));
            if (inserted) group_rep.push_back(t);
            task_group[t] = it->second;
        }
    } else {
        group_rep.resize(static_cast<std::size_t>(n_tasks));
        for (int t = 0; t < n_tasks; ++t) {
            task_group[t] = t;
            group_rep[t] = t;
        }
    }

    const int n_groups = static_cast<int>(group_rep.size());
    std::vector<RecoveredTensor> group_tensor(static_cast<std::size_t>(n_groups));
    std::vector<long> group_iters(static_cast<std::size_t>(n_groups), 0);
    parallel_for(n_groups, problem.jobs, [&](int g) {
        const Point c = centers[group_rep[g]];
        const SamplingDomain domain{c, problem.delta, problem.micro_n, problem.coupling};
        try {
            const MicroSystem micro = assemble_micro_system(domain, problem.tensor);
            const Corrector corr = solve_correctors(domain, micro, problem.micro_cg);
            group_tensor[g] = recovered_tensor(domain, micro, corr);
            group_iters[g] = corr.reports[0].iterations + corr.reports[1].iterations;
        } catch (const std::exception& ex) {
            throw std::runtime_error("micro solve failed at sampling domain center (" +
                                     std::to_string(c.x) + ", " + std::to_string(c.y) +
                                     "), delta " + std::to_string(problem.delta) + ": " +
                                     ex.what());
        }
    });

    std::vector<Mat2> tensors(static_cast<std::size_t>(n_tasks));
    for (int t = 0; t < n_tasks; ++t) tensors[t] = group_tensor[task_group[t]].value;

    MacroSystem sys = assemble_core(
        build_macro_space(mesh, problem.bc),
        [&](ElementId e, int q) { return tensors[4 * e + q]; }, problem.source);
    sys.tensors = std::move(tensors);
    sys.micro_solves = n_groups;
    for (int g = 0; g < n_groups; ++g) {
        sys.micro_cg_iters_total += group_iters[g];
        sys.max_tensor_cross_check =
            std::max(sys.max_tensor_cross_check, group_tensor[g].cross_check);
        sys.max_tensor_asymmetry =
            std::max(sys.max_tensor_asymmetry, group_tensor[g].value.max_asymmetry());
    }
    return sys;
}

MacroSystem assemble_with_tensor_field(const UniformQuadMesh& mesh, const TensorField& A0,
                                       const std::function<double(Point)>& source,
                                       const BoundarySpec& bc) {
    return assemble_core(
        build_macro_space(mesh, bc),
        [&](ElementId e, int q) { return A0.evaluate(quadrature_points(mesh, e)[q].x); }, source);
}

std::pair<Field, CgReport> solve_macro(const MacroSystem& system, double tol) {
    CgOptions options;
    options.tol = tol;
    auto [x, report] = cg_solve(system.matrix, system.rhs, options);
    if (!report.converged)
        throw std::runtime_error("solve_macro: CG failed after " +
                                 std::to_string(report.iterations) +
                                 " iterations, relative residual " +
                                 std::to_string(report.relative_residual));
    return {make_field(system.space, x, system.fixed_values), report};
}

}  // namespace nchmm
