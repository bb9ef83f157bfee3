#ifndef NCHMM_EXAMPLES_HPP
#define NCHMM_EXAMPLES_HPP

#include <optional>
#include <string>
#include <vector>

#include "nchmm/analysis.hpp"
#include "nchmm/macro.hpp"
#include "nchmm/tensor_field.hpp"

namespace nchmm {

/// A built-in experiment: multiscale tensor, its analytic homogenized limit,
/// source, boundary conditions, and (where available) the exact homogenized
/// solution. The domain is always (0,1)^2.
struct ExampleProblem {
    std::string name;
    std::string description;
    TensorField tensor;       // A^eps
    TensorField homogenized;  // analytic A^0
    std::function<double(Point)> source;
    BoundarySpec bc;
    double epsilon = 1e-3;
    Coupling coupling = Coupling::Periodic;
    double default_delta = 1e-3;
    std::optional<ExactSolution> exact;
    /// Errors are measured against a fine-mesh nonconforming Galerkin solve
    /// of the homogenized problem instead of an exact solution.
    bool needs_reference = false;
    int reference_n = 512;
};

/// The four built-in problems: peri-diag, peri-offdiag, dirichlet-noninteger,
/// mixed-domain.
const std::vector<ExampleProblem>& builtin_examples();

/// Throws std::invalid_argument for an unknown name.
const ExampleProblem& find_example(const std::string& name);

}  // namespace nchmm

#endif
