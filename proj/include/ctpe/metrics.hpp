#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ctpe/basis.hpp"

namespace ctpe {

// Sobolev norm of a coefficient map under the uniform law. Mode weights:
// order 0: 1; order 1: 1 + (2pi)^2 |alpha|_2^2; order 2 adds the Hessian
// Frobenius weight (2pi)^4 |alpha|_2^4.
double sobolev_norm(const CoeffMap& coeffs, int order);
double sobolev_mode_weight(const MultiIndex& alpha, int order);

// Coefficient map of a basis-coordinate vector.
CoeffMap coeff_map_of(const Eigen::VectorXd& theta, const FourierBasis& basis);
// Difference of maps (a - b) over the union of supports.
CoeffMap coeff_diff(const CoeffMap& a, const CoeffMap& b);

// Tr(H1^{-1} H0) = sum_alpha 1/(1 + (2pi)^2 |alpha|_2^2).
double trace_ratio(const FourierBasis& basis);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares on (ln x, ln y); requires >= 3 positive points.
FitResult fit_rate(const std::vector<double>& xs, const std::vector<double>& ys);

struct ErrorReport {
    double l2_err = 0.0;   // |f_hat - f*|_{L2}
    double h1_err = 0.0;   // |f_hat - f*|_{H1} (total)
    double h2_err = 0.0;   // |f_hat - f*|_{H2}
    double approx_h1 = 0.0; // |fbar - f*|_{H1}
    double stat_h1 = 0.0;   // |f_hat - fbar|_{H1}
    int n = 0;
    long m = 0;
    int nu = 0;
    double T = 0.0;
    double eta = 0.0;
    std::uint64_t seed = 0;
};

// Errors of an estimate against the discretized fixed point cbar (truncated
// internally onto the basis span, so approx_h1 carries the projection
// residual and shrinks as the basis grows) and the true solution cstar.
// The decomposition satisfies total <= approx + stat by the triangle
// inequality, exactly.
ErrorReport measure_errors(const Eigen::VectorXd& theta_hat, const FourierBasis& basis,
                           const CoeffMap& cbar, const CoeffMap& cstar);

} // namespace ctpe
