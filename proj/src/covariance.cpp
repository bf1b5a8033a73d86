#include "ctpe/covariance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctpe {

namespace {

// (beta - A)g along the trajectory's model, with Ag through the basis
// generator action (exact for spectrum models).
std::function<double(const Eigen::VectorXd&)> bellman_residual_fn(const Trajectory& traj,
                                                                  const FunctionInSpan& g,
                                                                  double beta) {
    if (!traj.model) throw std::invalid_argument("covariance: trajectory lacks a model reference");
    if (!g.basis) throw std::invalid_argument("covariance: g must live in a basis span");
    const DiffusionModel* model = traj.model;
    return [model, &g, beta](const Eigen::VectorXd& x) {
        return beta * g.eval(x) - g.theta.dot(g.basis->generator_action(*model, x));
    };
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
    const std::size_t n = v.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

} // namespace

MuEstimate estimate_mu_k(const Trajectory& traj, const FunctionInSpan& f, const FunctionInSpan& g,
                         const DiscretizationScheme& scheme, int k, int window_obs) {
    if (!traj.has_inner()) throw std::invalid_argument("estimate_mu_k: inner states required");
    if (k < 0) throw std::invalid_argument("estimate_mu_k: lag must be nonnegative");
    if (window_obs < 1) throw std::invalid_argument("estimate_mu_k: window must be positive");

    const auto phi = bellman_residual_fn(traj, g, scheme.beta);
    const double inv_eta = 1.0 / scheme.eta;
    auto U = [&](long b) {
        return f.eval(traj.observations.row(b).transpose()) * inv_eta *
               integrate_path_functional(traj, phi, b, scheme.beta, window_obs);
    };

    const long K = traj.num_observations() - 1;
    const long stride = k + window_obs; // pair occupies [b, b + k + w]
    std::vector<double> u0s, uks;
    for (long b = 0; b + k + window_obs <= K; b += stride) {
        u0s.push_back(U(b));
        uks.push_back(k == 0 ? u0s.back() : U(b + k));
    }
    if (u0s.size() < 30)
        throw std::invalid_argument("estimate_mu_k: fewer than 30 disjoint window pairs");

    // Unbiased sample covariance over the replicate pairs; centering matters
    // whenever f and (beta - A)g share a mode, where E[U] != 0.
    const std::size_t P = u0s.size();
    const double m0 = mean_of(u0s);
    const double mk = mean_of(uks);
    std::vector<double> products(P);
    for (std::size_t i = 0; i < P; ++i) products[i] = (u0s[i] - m0) * (uks[i] - mk);

    MuEstimate est;
    est.pairs = static_cast<long>(P);
    est.value = 0.0;
    for (double p : products) est.value += p;
    est.value /= static_cast<double>(P - 1);
    est.se = stderr_of(products, mean_of(products));
    return est;
}

CovarianceDiagnostics estimate_sigma_mkv(const Trajectory& traj, const FunctionInSpan& f,
                                         const FunctionInSpan& g,
                                         const DiscretizationScheme& scheme, int K_max,
                                         int window_obs) {
    if (K_max < 2) throw std::invalid_argument("estimate_sigma_mkv: K_max must be at least 2");
    CovarianceDiagnostics diag;
    diag.K_max = K_max;
    diag.mu.reserve(static_cast<std::size_t>(K_max) + 1);
    for (int k = 0; k <= K_max; ++k)
        diag.mu.push_back(estimate_mu_k(traj, f, g, scheme, k, window_obs));

    const double eta = scheme.eta;
    diag.sigma_mkv_sq = eta * diag.mu[0].value;
    for (int k = 1; k <= K_max; ++k) diag.sigma_mkv_sq += 2.0 * eta * diag.mu[static_cast<std::size_t>(k)].value;

    // Tail stability: the terms added between K_max/2 and K_max must be
    // within 3x their aggregate standard error of zero.
    const int half = K_max / 2;
    double added = 0.0, var = 0.0;
    for (int k = half + 1; k <= K_max; ++k) {
        added += 2.0 * eta * diag.mu[static_cast<std::size_t>(k)].value;
        const double se = 2.0 * eta * diag.mu[static_cast<std::size_t>(k)].se;
        var += se * se;
    }
    diag.stable = std::abs(added) < 3.0 * std::sqrt(var);
    return diag;
}

std::pair<double, double> martingale_variance_proxy(const Trajectory& traj,
                                                    const Eigen::VectorXd& theta_bar,
                                                    const FourierBasis& basis,
                                                    const DiscretizationScheme& scheme) {
    if (!traj.has_inner())
        throw std::invalid_argument("martingale_variance_proxy: inner states required");
    if (!traj.model)
        throw std::invalid_argument("martingale_variance_proxy: trajectory lacks a model");

    const DiffusionModel& model = *traj.model;
    const FunctionInSpan fbar{theta_bar, &basis};
    auto energy = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd gr = fbar.grad(x);
        const Eigen::MatrixXd S = model.diffusion_sqrt(x);
        return (S.transpose() * gr).squaredNorm(); // grad^T Lambda grad
    };

    const Eigen::VectorXd& h1 = basis.h1_diag();
    Eigen::VectorXd psi(basis.m());
    const long K = traj.num_observations() - 1;
    if (K < 2) throw std::invalid_argument("martingale_variance_proxy: trajectory too short");

    std::vector<double> window_vals(static_cast<std::size_t>(K));
    const double inv_eta = 1.0 / scheme.eta;
    for (long b = 0; b < K; ++b) {
        basis.eval(traj.observations.row(b).transpose(), psi);
        double leverage = 0.0;
        for (long j = 0; j < basis.m(); ++j) leverage += psi[j] * psi[j] / h1[j];
        const double integral =
            inv_eta * integrate_path_functional(traj, energy, b, 2.0 * scheme.beta, 1);
        window_vals[static_cast<std::size_t>(b)] = leverage * integral;
    }

    const double mean = mean_of(window_vals);

    // Batch-means standard error; batch length grows with K so neighbouring
    // window correlation is absorbed.
    const long B = std::min<long>(30, std::max<long>(2, K / 30));
    const long L = K / B;
    std::vector<double> batch_means(static_cast<std::size_t>(B));
    for (long b = 0; b < B; ++b) {
        double s = 0.0;
        for (long i = b * L; i < (b + 1) * L; ++i) s += window_vals[static_cast<std::size_t>(i)];
        batch_means[static_cast<std::size_t>(b)] = s / static_cast<double>(L);
    }
    const double bm = mean_of(batch_means);
    const double se = stderr_of(batch_means, bm);
    return {mean, se};
}

} // namespace ctpe
