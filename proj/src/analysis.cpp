#include "nchmm/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "nchmm/examples.hpp"

namespace nchmm {

namespace {

// 3x3 Gauss-Legendre on [0,1].
constexpr double kNode[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr double kWeight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

template <typename Body>
double integrate_elements(const UniformQuadMesh& mesh, Body&& body) {
    const double wx = mesh.cell_width_x(), wy = mesh.cell_width_y();
    const double area = mesh.cell_area();
    double total = 0.0;
    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const Point o = mesh.element_origin(e);
        for (int qa = 0; qa < 3; ++qa)
            for (int qb = 0; qb < 3; ++qb) {
                const Point x{o.x + kNode[qa] * wx, o.y + kNode[qb] * wy};
                total += area * kWeight[qa] * kWeight[qb] * body(e, x);
            }
    }
    return total;
}

void check_nested(const UniformQuadMesh& coarse, const UniformQuadMesh& fine) {
    const bool same_domain = std::abs(coarse.origin().x - fine.origin().x) < 1e-14 &&
                             std::abs(coarse.origin().y - fine.origin().y) < 1e-14 &&
                             std::abs(coarse.extent_x() - fine.extent_x()) < 1e-14 &&
                             std::abs(coarse.extent_y() - fine.extent_y()) < 1e-14;
    if (!same_domain || fine.nx() % coarse.nx() != 0 || fine.ny() % coarse.ny() != 0)
        throw std::invalid_argument("inter-mesh error: fine mesh is not nested in coarse mesh");
}

}  // namespace

double broken_h1_error(const Field& u, const ExactSolution& exact) {
    const double sq = integrate_elements(u.mesh, [&](ElementId e, Point x) {
        const Vec2 g = u.gradient(e);
        const Vec2 ge = exact.gradient(x);
        const double dx = g[0] - ge[0], dy = g[1] - ge[1];
        return dx * dx + dy * dy;
    });
    return std::sqrt(sq);
}

double l2_error(const Field& u, const ExactSolution& exact) {
    const double sq = integrate_elements(u.mesh, [&](ElementId e, Point x) {
        const double d = u.evaluate(e, x) - exact.value(x);
        return d * d;
    });
    return std::sqrt(sq);
}

double broken_h1_between(const Field& coarse, const Field& fine) {
    check_nested(coarse.mesh, fine.mesh);
    const int rx = fine.mesh.nx() / coarse.mesh.nx();
    const int ry = fine.mesh.ny() / coarse.mesh.ny();
    const double area = fine.mesh.cell_area();
    double sq = 0.0;
    for (ElementId ef = 0; ef < fine.mesh.element_count(); ++ef) {
        const auto [fi, fj] = fine.mesh.element_grid(ef);
        const ElementId ec = coarse.mesh.element_id(fi / rx, fj / ry);
        const Vec2 gc = coarse.gradient(ec);
        const Vec2 gf = fine.gradient(ef);
        const double dx = gc[0] - gf[0], dy = gc[1] - gf[1];
        sq += area * (dx * dx + dy * dy);  // both gradients constant per fine cell
    }
    return std::sqrt(sq);
}

double l2_between(const Field& coarse, const Field& fine) {
    check_nested(coarse.mesh, fine.mesh);
    const int rx = fine.mesh.nx() / coarse.mesh.nx();
    const int ry = fine.mesh.ny() / coarse.mesh.ny();
    const double sq = integrate_elements(fine.mesh, [&](ElementId ef, Point x) {
        const auto [fi, fj] = fine.mesh.element_grid(ef);
        const ElementId ec = coarse.mesh.element_id(fi / rx, fj / ry);
        const double d = coarse.evaluate(ec, x) - fine.evaluate(ef, x);
        return d * d;
    });
    return std::sqrt(sq);
}

Field reference_solver(const UniformQuadMesh& mesh, const TensorField& tensor,
                       const std::function<double(Point)>& source, const BoundarySpec& bc,
                       double tol) {
    const MacroSystem sys = assemble_with_tensor_field(mesh, tensor, source, bc);
    return solve_macro(sys, tol).first;
}

std::vector<double> estimate_rates(const std::vector<double>& errors) {
    std::vector<double> rates;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
        rates.push_back(std::log2(errors[i] / errors[i + 1]));
    return rates;
}

RunOutput run_fehmm(const ExampleProblem& example, int H_den, int micro_n, double delta,
                    const RunOptions& options) {
    RunOutput out;
    out.record.H_den = H_den;
    out.record.micro_n = micro_n;
    out.record.delta = delta;
    out.record.coupling = example.coupling;
    try {
        const UniformQuadMesh mesh({0.0, 0.0}, 1.0, 1.0, H_den, H_den);
        MacroProblem problem{mesh,    example.tensor,   example.source,  example.bc,
                             delta,   micro_n,          example.coupling, options.micro_cg,
                             options.memoize, options.jobs};
        const MacroSystem sys = assemble_fehmm(problem);
        auto [field, report] = solve_macro(sys, options.macro_tol);

        out.record.micro_cg_iters_total = sys.micro_cg_iters_total;
        out.record.micro_solves = sys.micro_solves;
        out.record.macro_cg_iters = report.iterations;

        out.centers.reserve(static_cast<std::size_t>(4) * mesh.element_count());
        for (ElementId e = 0; e < mesh.element_count(); ++e)
            for (const QuadPoint& qp : quadrature_points(mesh, e)) out.centers.push_back(qp.x);
        out.tensors = sys.tensors;
        double sup = 0.0;
        for (std::size_t t = 0; t < out.tensors.size(); ++t) {
            const Mat2 exact0 = example.homogenized.evaluate(out.centers[t]);
            sup = std::max(sup, (exact0 - out.tensors[t]).frobenius_norm());
        }
        out.record.tensor_err_sup = sup;

        if (example.exact) {
            out.record.err_h1 = broken_h1_error(field, *example.exact);
            out.record.err_l2 = l2_error(field, *example.exact);
        } else if (example.needs_reference) {
            Field owned_reference{mesh, {}};
            const Field* reference = options.reference;
            if (!reference) {
                const UniformQuadMesh fine({0.0, 0.0}, 1.0, 1.0, example.reference_n,
                                           example.reference_n);
                owned_reference =
                    reference_solver(fine, example.homogenized, example.source, example.bc);
                reference = &owned_reference;
            }
            out.record.err_h1 = broken_h1_between(field, *reference);
            out.record.err_l2 = l2_between(field, *reference);
        }
        out.solution = std::move(field);
        out.record.ok = true;
    } catch (const std::exception& ex) {
        out.record.ok = false;
        out.record.message = ex.what();
    }
    return out;
}

ConvergenceReport convergence_report(const ExampleProblem& example,
                                     const std::vector<int>& H_dens,
                                     const std::vector<int>& micro_ns,
                                     const std::vector<double>& deltas,
                                     const RunOptions& options) {
    ConvergenceReport report;
    std::optional<Field> reference;
    RunOptions cell_options = options;
    if (example.needs_reference && !options.reference) {
        const UniformQuadMesh fine({0.0, 0.0}, 1.0, 1.0, example.reference_n,
                                   example.reference_n);
        reference = reference_solver(fine, example.homogenized, example.source, example.bc);
        cell_options.reference = &*reference;
    }
    for (double delta : deltas)
        for (int H_den : H_dens)
            for (int n : micro_ns)
                report.records.push_back(run_fehmm(example, H_den, n, delta, cell_options).record);
    return report;
}

}  // namespace nchmm
