#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctpe/rng.hpp"

namespace ctpe {

using MultiIndex = std::vector<int>;
using CoeffMap = std::map<MultiIndex, double>;
using SpectrumFn = std::function<double(const MultiIndex&)>;

enum class StateSpace { Torus, Euclidean };

// Time-homogeneous diffusion dX = b(X)dt + S(X)dB with S = Lambda^{1/2}.
// Models with a diagonal semigroup on Fourier modes carry `spectrum`,
// mapping a multi-index to the generator eigenvalue lambda_alpha >= 0.
struct DiffusionModel {
    int d = 1;
    StateSpace space = StateSpace::Torus;
    std::string name;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> diffusion_sqrt;
    SpectrumFn spectrum;                  // empty if no closed-form semigroup
    bool exact_increment = false;         // advance by exact Gaussian steps
    std::function<Eigen::VectorXd(RandomStream&)> stationary_sampler;
    double lambda_min = 0.0;              // ellipticity bounds of Lambda
    double lambda_max = 0.0;
    double burn_in_time = 0.0;            // simulated before t=0 when > 0
    double sigma = 0.0;                   // noise scale of the built-ins

    bool has_spectrum() const { return static_cast<bool>(spectrum); }

    // Brownian motion on the d-torus: b = 0, Lambda = sigma^2 I, uniform
    // stationary law, eigenvalue (sigma^2/2)(2 pi)^2 |alpha|_2^2.
    static DiffusionModel torus_brownian(int d, double sigma);

    // Langevin dynamics on the torus: b = -(sigma^2/2) grad U. No closed
    // spectrum; rho_hat is the user-declared spectral-gap estimate used for
    // the default burn-in 10 / (lambda_min * rho_hat).
    static DiffusionModel langevin_torus(
        int d, double sigma, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_potential,
        double rho_hat, double burn_in_override = -1.0);

    // Ornstein-Uhlenbeck on R^d: dX = -rate X dt + sigma dB, stationary
    // N(0, sigma^2/(2 rate) I) sampled exactly.
    static DiffusionModel ou_euclidean(int d, double rate, double sigma);
};

// Reward observation model: R = r(X) + Uniform(-eps, eps), |R| <= 1.
struct RewardSpec {
    std::function<double(const Eigen::VectorXd&)> mean_reward;
    double eps_noise = 0.1;
    std::optional<CoeffMap> fourier_coeffs; // real-pair coefficients, if any
    double sup_bound = 1.0;                 // bound on sup |r|

    // Build from real-pair Fourier coefficients: value at alpha=0 is the
    // constant term, a positive representative keys sqrt2*cos(2pi<a,x>),
    // its negation keys sqrt2*sin(2pi<a,x>).
    static RewardSpec from_fourier(const CoeffMap& coeffs, double eps_noise);
    static RewardSpec constant(double c, double eps_noise);
};

// Evaluate a real-pair Fourier sum at x (shared by RewardSpec and tests).
double eval_fourier_sum(const CoeffMap& coeffs, const Eigen::VectorXd& x);

struct Trajectory {
    double eta = 0.0;
    int substeps = 1;
    std::uint64_t seed = 0;
    double total_time = 0.0;
    Eigen::MatrixXd observations;     // (K+1) x d, row k = X_{k eta}
    Eigen::VectorXd rewards;          // (K+1), R_{k eta}
    Eigen::MatrixXd inner_states;     // (K*s+1) x d on the eta/s grid, or 0x0
    const DiffusionModel* model = nullptr; // non-owning

    long num_observations() const { return observations.rows(); }
    bool has_inner() const { return inner_states.rows() > 0; }

    // CSV with header k,t,x_0..x_{d-1},reward; floats with 17 significant
    // digits so reruns are byte-comparable.
    std::string to_csv() const;
    std::string inner_to_csv() const;

    // Copy with the first observation removed (and the matching inner rows);
    // used by stability checks.
    Trajectory drop_first_observation() const;
};

// Stationary-start simulation on the eta/substeps grid. Exact Gaussian
// increments for models flagged exact_increment, Euler-Maruyama otherwise.
// Rewards are sampled at every observation time. Streams are split per
// purpose (init / path / reward) from the given seed.
Trajectory simulate_trajectory(const DiffusionModel& model, const RewardSpec& reward, double T,
                               double eta, int substeps, std::uint64_t seed,
                               bool keep_inner = false);

// Trapezoidal quadrature of e^{-beta t} phi(X_t) dt over the inner grid of
// the window [k eta, (k + window_obs) eta], with t measured from the window
// start. Requires inner states.
double integrate_path_functional(const Trajectory& traj,
                                 const std::function<double(const Eigen::VectorXd&)>& phi, long k,
                                 double beta, int window_obs = 1);

} // namespace ctpe
