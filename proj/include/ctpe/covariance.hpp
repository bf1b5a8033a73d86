#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ctpe/basis.hpp"
#include "ctpe/diffusion.hpp"
#include "ctpe/discretization.hpp"

namespace ctpe {

struct MuEstimate {
    double value = 0.0;
    double se = 0.0;
    long pairs = 0;
};

// Lag-k cross-covariance of the path functionals
//   U(b) = f(X_{b eta}) * (1/eta) int_0^{w eta} e^{-beta t} ((beta - A) g)(X_{b eta + t}) dt
// estimated as the unbiased sample covariance over disjointly tiled window
// pairs (stride k + w observations), centered by the replicate means.
// Default window length is one observation step (w = 1); diagnostics that
// want the (nu-1)-step block variant pass window_obs = nu - 1. Requires
// inner states and at least 30 pairs.
MuEstimate estimate_mu_k(const Trajectory& traj, const FunctionInSpan& f, const FunctionInSpan& g,
                         const DiscretizationScheme& scheme, int k, int window_obs = 1);

struct CovarianceDiagnostics {
    std::vector<MuEstimate> mu;   // k = 0..K_max
    double sigma_mkv_sq = 0.0;    // eta mu_0 + 2 eta sum_{k>=1} mu_k
    int K_max = 0;
    bool stable = false;          // tail-truncation stability flag
    double martingale_proxy = 0.0;
    std::string f_desc;
    std::string g_desc;
};

// Truncated asymptotic-variance series with a tail-stability flag: the
// partial sums at K_max/2 and K_max must differ by less than 3x the
// aggregate standard error of the added terms.
CovarianceDiagnostics estimate_sigma_mkv(const Trajectory& traj, const FunctionInSpan& f,
                                         const FunctionInSpan& g,
                                         const DiscretizationScheme& scheme, int K_max,
                                         int window_obs = 1);

// Window-average estimate (value, batch-means standard error) of
//   E[ |H1^{-1/2} psi(X_0)|^2 (1/eta) int_0^eta e^{-2 beta t}
//      (grad fbar)^T Lambda (grad fbar)(X_t) dt ],
// the quantity whose growth in the basis size tracks Tr(H1^{-1} H0).
std::pair<double, double> martingale_variance_proxy(const Trajectory& traj,
                                                    const Eigen::VectorXd& theta_bar,
                                                    const FourierBasis& basis,
                                                    const DiscretizationScheme& scheme);

} // namespace ctpe
