#pragma once

#include <Eigen/Dense>

#include "ctpe/basis.hpp"
#include "ctpe/discretization.hpp"

namespace ctpe {

// Mode-wise solution of the elliptic equation beta f = A f + r on a
// diagonal-semigroup model: c*_alpha = rhat_alpha / (beta + lambda_alpha).
CoeffMap true_value_coeffs(const SpectrumFn& spectrum, const CoeffMap& rhat, double beta);

// Mode-wise fixed point of the discretized Bellman operator:
//   cbar_alpha = [sum_i eta kappa_i e^{-lambda_alpha i eta}] rhat_alpha
//                / (1 - e^{-(beta+lambda_alpha)(nu-1) eta}).
// The reward-side node integrals reuse the kappa machinery; the semigroup
// factor enters per node.
CoeffMap discretized_fixed_point_coeffs(const DiscretizationScheme& scheme,
                                        const SpectrumFn& spectrum, const CoeffMap& rhat);

// Coefficient truncation of the discretized fixed point onto the basis
// (projection under the uniform law), as the population LSTD target.
Eigen::VectorXd population_theta_bar(const FourierBasis& basis, const DiscretizationScheme& scheme,
                                     const SpectrumFn& spectrum, const CoeffMap& rhat);

// Population LSTD system in closed form: Abar is diagonal with entries
// (1 - e^{-(beta+lambda_alpha)(nu-1) eta}) / eta, bbar_j =
// sum_i kappa_i e^{-lambda_j i eta} rhat_j. theta_bar solves Abar th = bbar.
Eigen::VectorXd population_A_bar_diag(const FourierBasis& basis,
                                      const DiscretizationScheme& scheme,
                                      const SpectrumFn& spectrum);
Eigen::VectorXd population_b_bar(const FourierBasis& basis, const DiscretizationScheme& scheme,
                                 const SpectrumFn& spectrum, const CoeffMap& rhat);

// Bundle of the closed-form oracles for one (model, reward, scheme) triple.
struct ValueOracle {
    CoeffMap true_coeffs;        // c*
    CoeffMap discretized_coeffs; // cbar
    Eigen::VectorXd theta_bar;   // truncation of cbar onto the basis

    static ValueOracle build(const FourierBasis& basis, const DiscretizationScheme& scheme,
                             const SpectrumFn& spectrum, const CoeffMap& rhat);
};

} // namespace ctpe
