#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "ctpe/basis.hpp"
#include "ctpe/diffusion.hpp"
#include "ctpe/discretization.hpp"

namespace ctpe {

// Single-trajectory LSTD system, scaled to stay O(1) as T grows:
//   A_N = (1/(N eta)) sum_k psi(X_k)(psi(X_k) - e^{-beta(nu-1)eta} psi(X_{k+nu-1}))^T
//   b_N = (1/N) sum_k sum_i kappa_i R_{k+i} psi(X_k)
// with N = floor(T/eta) - nu + 1 and k = 0..N-1.
struct AssembledSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    long N = 0;
};

AssembledSystem assemble(const Trajectory& traj, const FourierBasis& basis,
                         const DiscretizationScheme& scheme);

enum class SolvePolicy { Strict, Ridge };

struct SolveReport {
    double condition = 0.0;
    bool flagged = false;       // set when ridge regularization was applied
    std::string policy;
};

// Strict solves refuse condition estimates above this (the short-trajectory
// regime where the estimator's guarantee has not kicked in yet).
inline constexpr double kConditionLimit = 1e12;

struct SolveError : std::runtime_error {
    explicit SolveError(double cond)
        : std::runtime_error("linear system too ill-conditioned (cond_1 estimate " +
                             std::to_string(cond) + ")"),
          condition(cond) {}
    double condition;
};

// LU solve with one step of iterative refinement. Strict throws SolveError
// when the 1-norm condition estimate exceeds kConditionLimit; Ridge solves
// (A + lambda I) theta = b with default lambda = 1e-8 trace(A)/m and flags
// the report. Pass ridge_lambda < 0 for the default.
std::pair<Eigen::VectorXd, SolveReport> solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                              SolvePolicy policy, double ridge_lambda = -1.0);

struct LstdEstimate {
    Eigen::VectorXd theta_hat;
    Eigen::MatrixXd A_hat;
    Eigen::VectorXd b_hat;
    long N = 0;
    double condition_estimate = 0.0;
    bool flagged = false;
    const DiscretizationScheme* scheme = nullptr;
    const FourierBasis* basis = nullptr;

    std::string to_json() const; // {theta[], N, cond, scheme, basis_ref, flags}
};

LstdEstimate lstd_estimate(const Trajectory& traj, const FourierBasis& basis,
                           const DiscretizationScheme& scheme,
                           SolvePolicy policy = SolvePolicy::Strict, double ridge_lambda = -1.0);

FunctionInSpan estimate_value(const Eigen::VectorXd& theta, const FourierBasis& basis);

} // namespace ctpe
