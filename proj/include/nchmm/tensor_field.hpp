#ifndef NCHMM_TENSOR_FIELD_HPP
#define NCHMM_TENSOR_FIELD_HPP

#include <functional>
#include <optional>
#include <string>

#include "nchmm/mat2.hpp"
#include "nchmm/mesh.hpp"

namespace nchmm {

/// Coefficient field x -> 2x2 symmetric matrix with ellipticity bounds.
///
/// `sampling_key`, when set, maps a sampling-domain center to a token such
/// that equal tokens guarantee identical coefficient restrictions on the
/// sampling domain (up to translation invariance of the micro problem). It
/// enables optional memoization of micro solves; returning nullopt for a
/// center opts that domain out.
struct TensorField {
    std::function<Mat2(Point)> evaluate;
    double lambda_min = 1.0;
    double lambda_max = 1.0;
    std::optional<double> period;  // epsilon for locally periodic tensors
    std::function<std::optional<std::string>(Point center, double delta)> sampling_key;

    static TensorField constant(Mat2 value) {
        TensorField f;
        f.evaluate = [value](Point) { return value; };
        const auto eigs = value.sym_eigenvalues();
        f.lambda_min = eigs[0];
        f.lambda_max = eigs[1];
        f.sampling_key = [](Point, double) { return std::optional<std::string>("const"); };
        return f;
    }
};

}  // namespace nchmm

#endif
