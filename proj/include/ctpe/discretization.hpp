#pragma once

#include <string>
#include <vector>

namespace ctpe {

// Lagrange node polynomials W_i on the nodes {0, eta, ..., (nu-1) eta} of
// the physical interval [0, (nu-1) eta], stored as monomial coefficient
// vectors (weights[i][k] multiplies s^k), together with the exponentially
// weighted node integrals kappa_i = (1/eta) int_0^{(nu-1)eta} e^{-beta s}
// W_i(s) ds. nu is capped at 8: equispaced interpolation degrades beyond
// that.
struct DiscretizationScheme {
    int nu = 2;
    double eta = 0.0;
    double beta = 0.0;
    std::vector<std::vector<double>> weights;
    std::vector<double> kappas;

    static DiscretizationScheme build(int nu, double eta, double beta);

    double horizon() const { return (nu - 1) * eta; } // (nu-1) eta
    double eval_weight(int i, double s) const;        // Horner on stored coeffs
    std::string to_json() const;                      // {nu, eta, beta, kappas[]}
};

// Monomial coefficients of the W_i on the physical interval.
std::vector<std::vector<double>> lagrange_weights(int nu, double eta);

// Closed-form kappa via exponential moments of the scaled variable u = s/eta
// (exact integer Lagrange coefficients there); a series/recurrence hybrid
// evaluated in compensated double-double arithmetic keeps the assembly
// cancellation below 1e-12 against quadrature for all nu <= 8.
std::vector<double> kappa_coefficients(int nu, double eta, double beta);

} // namespace ctpe
