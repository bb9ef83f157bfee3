#ifndef NCHMM_MAT2_HPP
#define NCHMM_MAT2_HPP

#include <array>
#include <cmath>

namespace nchmm {

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

/// 2x2 matrix, row-major. Small enough to pass by value everywhere.
struct Mat2 {
    double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    static Mat2 identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }
    static Mat2 diag(double a, double b) { return {{{a, 0.0}, {0.0, b}}}; }
    static Mat2 scaled_identity(double a) { return diag(a, a); }

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    Mat2& operator+=(const Mat2& o) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m[i][j] += o.m[i][j];
        return *this;
    }
    friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
    friend Mat2 operator-(const Mat2& a, const Mat2& b) {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
        return r;
    }
    friend Mat2 operator*(double s, const Mat2& a) {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = s * a.m[i][j];
        return r;
    }

    Vec2 apply(const Vec2& v) const {
        return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
    }

    double frobenius_norm() const {
        return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] +
                         m[1][1] * m[1][1]);
    }

    double max_asymmetry() const { return std::abs(m[0][1] - m[1][0]); }

    /// Eigenvalues of the symmetrized matrix, ascending.
    std::array<double, 2> sym_eigenvalues() const {
        const double a = m[0][0], d = m[1][1];
        const double b = 0.5 * (m[0][1] + m[1][0]);
        const double mean = 0.5 * (a + d);
        const double r = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
        return {mean - r, mean + r};
    }
};

}  // namespace nchmm

#endif
