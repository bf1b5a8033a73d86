#include "ctpe/lstd.hpp"

#include <cmath>
#include <json.hpp>

namespace ctpe {

AssembledSystem assemble(const Trajectory& traj, const FourierBasis& basis,
                         const DiscretizationScheme& scheme) {
    const long K = traj.num_observations() - 1;
    const long N = K - scheme.nu + 1;
    if (N < 1) throw std::invalid_argument("assemble: trajectory shorter than one Bellman block");

    const long m = basis.m();
    const double discount = std::exp(-scheme.beta * scheme.horizon());
    const int nu = scheme.nu;

    AssembledSystem sys;
    sys.A = Eigen::MatrixXd::Zero(m, m);
    sys.b = Eigen::VectorXd::Zero(m);
    sys.N = N;

    // Ring buffer of feature vectors: at step j we hold psi_{j-nu+1}..psi_j.
    std::vector<Eigen::VectorXd> ring(static_cast<std::size_t>(nu), Eigen::VectorXd(m));
    Eigen::VectorXd residual(m);
    for (long j = 0; j <= K; ++j) {
        Eigen::VectorXd& slot = ring[static_cast<std::size_t>(j % nu)];
        basis.eval(traj.observations.row(j).transpose(), slot);
        const long k = j - (nu - 1);
        if (k < 0 || k >= N) continue;
        const Eigen::VectorXd& psi_k = ring[static_cast<std::size_t>(k % nu)];
        residual = psi_k - discount * slot;
        sys.A.noalias() += psi_k * residual.transpose();
        double rw = 0.0;
        for (int i = 0; i < nu; ++i) rw += scheme.kappas[static_cast<std::size_t>(i)] * traj.rewards[k + i];
        sys.b.noalias() += rw * psi_k;
    }
    sys.A /= static_cast<double>(N) * scheme.eta;
    sys.b /= static_cast<double>(N);
    return sys;
}

std::pair<Eigen::VectorXd, SolveReport> solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                              SolvePolicy policy, double ridge_lambda) {
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw std::invalid_argument("solve: system is not square");
    const long m = A.rows();

    SolveReport rep;
    Eigen::MatrixXd M = A;
    if (policy == SolvePolicy::Ridge) {
        const double lam = ridge_lambda >= 0.0 ? ridge_lambda : 1e-8 * A.trace() / static_cast<double>(m);
        M.diagonal().array() += lam;
        rep.flagged = true;
        rep.policy = "ridge";
    } else {
        rep.policy = "strict";
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();
    const Eigen::MatrixXd Minv = lu.inverse();
    const double inv_norm1 = Minv.cwiseAbs().colwise().sum().maxCoeff();
    rep.condition = norm1 * inv_norm1;

    if (policy == SolvePolicy::Strict &&
        (!std::isfinite(rep.condition) || rep.condition > kConditionLimit))
        throw SolveError(rep.condition);

    Eigen::VectorXd theta = lu.solve(b);
    theta += lu.solve(b - M * theta); // one refinement step
    return {std::move(theta), rep};
}

LstdEstimate lstd_estimate(const Trajectory& traj, const FourierBasis& basis,
                           const DiscretizationScheme& scheme, SolvePolicy policy,
                           double ridge_lambda) {
    AssembledSystem sys = assemble(traj, basis, scheme);
    auto [theta, rep] = solve(sys.A, sys.b, policy, ridge_lambda);
    LstdEstimate est;
    est.theta_hat = std::move(theta);
    est.A_hat = std::move(sys.A);
    est.b_hat = std::move(sys.b);
    est.N = sys.N;
    est.condition_estimate = rep.condition;
    est.flagged = rep.flagged;
    est.scheme = &scheme;
    est.basis = &basis;
    return est;
}

FunctionInSpan estimate_value(const Eigen::VectorXd& theta, const FourierBasis& basis) {
    return FunctionInSpan{theta, &basis};
}

std::string LstdEstimate::to_json() const {
    nlohmann::ordered_json j;
    j["theta"] = std::vector<double>(theta_hat.data(), theta_hat.data() + theta_hat.size());
    j["N"] = N;
    j["cond"] = condition_estimate;
    if (scheme) j["scheme"] = nlohmann::ordered_json::parse(scheme->to_json());
    if (basis) j["basis_ref"] = {{"d", basis->d()}, {"n", basis->n()}, {"m", basis->m()}};
    j["flags"] = flagged ? std::vector<std::string>{"ridge"} : std::vector<std::string>{};
    return j.dump(2);
}

} // namespace ctpe
