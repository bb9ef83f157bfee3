#include "nchmm/examples.hpp"

#include <cmath>
#include <stdexcept>

namespace nchmm {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double frac(double v) { return v - std::floor(v); }

/// Token for a periodic coordinate offset: equal tokens mean the sampling
/// domain sees an identical coefficient restriction (up to translation by
/// whole periods).
std::string periodic_token(double coordinate, double eps) {
    return std::to_string(std::llround(frac(coordinate / eps) * 1e9));
}

ExampleProblem make_peri_diag() {
    ExampleProblem ex;
    ex.name = "peri-diag";
    ex.description = "diagonal tensor, periodic in both coordinates; homogenized limit I";
    const double eps = 1e-3;
    ex.epsilon = eps;
    ex.coupling = Coupling::Periodic;
    ex.default_delta = eps;
    ex.tensor.evaluate = [eps](Point p) {
        return Mat2::diag(std::sqrt(2.0) + std::sin(2.0 * kPi * p.x / eps),
                          std::sqrt(2.0) + std::sin(2.0 * kPi * p.y / eps));
    };
    ex.tensor.lambda_min = std::sqrt(2.0) - 1.0;
    ex.tensor.lambda_max = std::sqrt(2.0) + 1.0;
    ex.tensor.period = eps;
    ex.tensor.sampling_key = [eps](Point c, double) -> std::optional<std::string> {
        return periodic_token(c.x, eps) + "," + periodic_token(c.y, eps);
    };
    ex.homogenized = TensorField::constant(Mat2::identity());
    ex.source = [](Point p) {
        return 2.0 * kPi * kPi * std::sin(kPi * p.x) * std::sin(kPi * p.y);
    };
    ex.bc = BoundarySpec::all_dirichlet_zero();
    ex.exact = ExactSolution{
        [](Point p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); },
        [](Point p) -> Vec2 {
            return {kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y),
                    kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y)};
        }};
    return ex;
}

ExampleProblem make_peri_offdiag() {
    ExampleProblem ex;
    ex.name = "peri-offdiag";
    ex.description = "full tensor with off-diagonal terms, periodic in x1 only";
    const double eps = 1e-3;
    ex.epsilon = eps;
    ex.coupling = Coupling::Periodic;
    ex.default_delta = eps;
    ex.tensor.evaluate = [eps](Point p) {
        const double s = std::sin(2.0 * kPi * p.x / eps);
        const double off = 0.5 + s / (2.0 * std::sqrt(2.0));
        return Mat2{{{std::sqrt(2.0) + s, off}, {off, 2.0 + s}}};
    };
    // Ellipticity bounds: extremize the closed-form eigenvalues over one period.
    {
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i <= 4096; ++i) {
            const auto eigs = ex.tensor.evaluate({eps * i / 4096.0, 0.0}).sym_eigenvalues();
            lo = std::min(lo, eigs[0]);
            hi = std::max(hi, eigs[1]);
        }
        ex.tensor.lambda_min = lo;
        ex.tensor.lambda_max = hi;
    }
    ex.tensor.period = eps;
    ex.tensor.sampling_key = [eps](Point c, double) -> std::optional<std::string> {
        return periodic_token(c.x, eps);
    };
    const double c12 = 1.0 / (2.0 * std::sqrt(2.0));
    const double a22 = (17.0 - std::sqrt(2.0)) / 8.0;
    ex.homogenized = TensorField::constant(Mat2{{{1.0, c12}, {c12, a22}}});
    ex.source = [c12, a22](Point p) {
        // -div(A0 grad u0) for u0 = sin(pi x1) sin(pi x2) with constant A0.
        return kPi * kPi * (1.0 + a22) * std::sin(kPi * p.x) * std::sin(kPi * p.y) -
               2.0 * c12 * kPi * kPi * std::cos(kPi * p.x) * std::cos(kPi * p.y);
    };
    ex.bc = BoundarySpec::all_dirichlet_zero();
    ex.exact = ExactSolution{
        [](Point p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); },
        [](Point p) -> Vec2 {
            return {kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y),
                    kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y)};
        }};
    return ex;
}

ExampleProblem make_dirichlet_noninteger() {
    ExampleProblem ex;
    ex.name = "dirichlet-noninteger";
    ex.description =
        "scalar tensor periodic in x1, Dirichlet coupling, sampling domains not an integer "
        "multiple of the period; mixed boundary conditions";
    const double eps = 1e-3;
    ex.epsilon = eps;
    ex.coupling = Coupling::Dirichlet;
    ex.default_delta = 1.1 * eps;
    ex.tensor.evaluate = [eps](Point p) {
        return Mat2::scaled_identity(2.0 + std::cos(2.0 * kPi * p.x / eps));
    };
    ex.tensor.lambda_min = 1.0;
    ex.tensor.lambda_max = 3.0;
    ex.tensor.period = eps;
    ex.tensor.sampling_key = [eps](Point c, double) -> std::optional<std::string> {
        return periodic_token(c.x, eps);
    };
    ex.homogenized = TensorField::constant(Mat2::diag(std::sqrt(3.0), 2.0));
    ex.source = [](Point) { return 1.0; };
    ex.bc.left = {BcType::DirichletZero, {}};
    ex.bc.right = {BcType::DirichletZero, {}};
    ex.bc.bottom = {BcType::NeumannZero, {}};
    ex.bc.top = {BcType::NeumannZero, {}};
    const double scale = 1.0 / (2.0 * std::sqrt(3.0));
    ex.exact = ExactSolution{[scale](Point p) { return -scale * p.x * (p.x - 1.0); },
                             [scale](Point p) -> Vec2 {
                                 return {-scale * (2.0 * p.x - 1.0), 0.0};
                             }};
    return ex;
}

bool in_omega1(Point p) { return p.x > 0.5 && p.y < 0.5; }

ExampleProblem make_mixed_domain() {
    ExampleProblem ex;
    ex.name = "mixed-domain";
    ex.description =
        "piecewise coefficient: oscillatory in the lower-right quadrant, constant elsewhere; "
        "inhomogeneous Dirichlet left/right, Neumann top/bottom";
    const double eps = 1e-3;
    ex.epsilon = eps;
    ex.coupling = Coupling::Periodic;
    ex.default_delta = eps;
    ex.tensor.evaluate = [eps](Point p) {
        const double v =
            in_omega1(p) ? 1.1 + std::sin(2.0 * kPi * p.x / eps) : 1.1;
        return Mat2::scaled_identity(v);
    };
    ex.tensor.lambda_min = 0.1;
    ex.tensor.lambda_max = 2.1;
    ex.tensor.period = eps;
    ex.tensor.sampling_key = [eps](Point c, double delta) -> std::optional<std::string> {
        const double half = 0.5 * delta;
        // Entirely outside the oscillatory quadrant: the coefficient is a
        // constant on the whole sampling domain.
        if (c.x + half <= 0.5 || c.y - half >= 0.5) return "const";
        // Entirely inside: periodic in x1 only.
        if (c.x - half >= 0.5 && c.y + half <= 0.5) return "o1," + periodic_token(c.x, eps);
        return std::nullopt;  // straddles the interface; never shared
    };
    ex.homogenized.evaluate = [](Point p) {
        return in_omega1(p) ? Mat2::diag(std::sqrt(0.21), 1.1) : Mat2::scaled_identity(1.1);
    };
    ex.homogenized.lambda_min = std::sqrt(0.21);
    ex.homogenized.lambda_max = 1.1;
    ex.source = [](Point) { return 0.0; };
    ex.bc.left = {BcType::DirichletValue, [](Point) { return 1.0; }};
    ex.bc.right = {BcType::DirichletValue, [](Point) { return 0.0; }};
    ex.bc.bottom = {BcType::NeumannZero, {}};
    ex.bc.top = {BcType::NeumannZero, {}};
    ex.needs_reference = true;
    ex.reference_n = 512;
    return ex;
}

}  // namespace

const std::vector<ExampleProblem>& builtin_examples() {
    static const std::vector<ExampleProblem> catalog = {
        make_peri_diag(), make_peri_offdiag(), make_dirichlet_noninteger(), make_mixed_domain()};
    return catalog;
}

const ExampleProblem& find_example(const std::string& name) {
    for (const ExampleProblem& ex : builtin_examples())
        if (ex.name == name) return ex;
    std::string known;
    for (const ExampleProblem& ex : builtin_examples()) known += " " + ex.name;
    throw std::invalid_argument("unknown example '" + name + "'; known examples:" + known);
}

}  // namespace nchmm
