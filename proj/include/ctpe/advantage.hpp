#pragma once

#include <Eigen/Dense>
#include <functional>

#include "ctpe/basis.hpp"
#include "ctpe/rng.hpp"

namespace ctpe {

// Control-affine policy data: a bounded action box, the policy's mean
// action, and the uncontrolled base drift.
struct ControlAffinePolicy {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> mean_action;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> base_drift;

    double diameter() const { return (hi - lo).norm(); }
    bool in_box(const Eigen::VectorXd& a) const;
};

struct AdvantageEstimate {
    FunctionInSpan value;
    ControlAffinePolicy policy;
};

// q_hat(x, a) = <grad f_hat(x), a - mean_action(x)>. Throws if a is outside
// the action box. The advantage of the mean action is identically zero.
double advantage(const AdvantageEstimate& est, const Eigen::VectorXd& x, const Eigen::VectorXd& a);

// General dynamics variant: q(x, a) = <grad f(x), g(x, a) - b_pi(x)> with a
// caller-supplied g.
double advantage_general(
    const FunctionInSpan& f, const Eigen::VectorXd& x, const Eigen::VectorXd& a,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>& g,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& mean_drift);

struct AdvantageBoundReport {
    double max_sq_gap = 0.0;  // max over samples of (q_hat - q)^2
    double bound = 0.0;       // diam(A)^2 |f_hat - f_true|_{H1}^2
    bool holds = true;        // max_sq_gap <= bound at every sample
    long samples = 0;
};

// Empirical check of (q_hat - q)^2 <= diam(A)^2 |f_hat - f_true|_{H1}^2 at
// sampled states with actions drawn uniformly from the box.
AdvantageBoundReport advantage_error_bound_check(const FunctionInSpan& f_hat,
                                                 const CoeffMap& f_true_coeffs,
                                                 const ControlAffinePolicy& policy,
                                                 const std::vector<Eigen::VectorXd>& sample_states,
                                                 int actions_per_state, RandomStream& rng);

} // namespace ctpe
