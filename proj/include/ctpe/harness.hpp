#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctpe/diffusion.hpp"
#include "ctpe/lstd.hpp"
#include "ctpe/metrics.hpp"

namespace ctpe {

// One experiment grid: model x reward x (nu, eta) x n x T x seeds.
struct ExperimentConfig {
    std::string model_kind = "torus-brownian"; // torus-brownian | langevin-torus | ou
    int d = 1;
    double sigma = 1.0;
    double potential_amp = 0.2;  // langevin-torus: U(x) = amp * sum_i cos(2 pi x_i)
    double rho_hat = 1.0;        // langevin-torus: spectral-gap estimate for burn-in
    double ou_rate = 1.0;        // ou: mean-reversion rate
    CoeffMap reward_coeffs;       // real-pair Fourier coefficients
    double eps_noise = 0.1;
    std::vector<int> nus = {2};
    std::vector<double> etas = {0.05};
    double beta = 1.0;
    std::vector<int> ns = {2};
    std::vector<double> Ts = {64.0};
    std::uint64_t seed_base = 1;
    int num_seeds = 1;
    SolvePolicy policy = SolvePolicy::Strict;
    double ridge_lambda = -1.0;
    int substeps = 1;
    bool timing = false;          // when false, wall_ms is written as 0 so
                                  // reruns are byte-identical
    double admissibility_c0 = 1.0;

    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json() const;
    void validate() const; // throws std::invalid_argument

    // Stepsize-condition advisories: one message per (eta, n) pair with
    // eta > c0 * m^{-4/d}. Advisory only; runs proceed.
    std::vector<std::string> admissibility_warnings() const;
};

// Model and reward constructed from the config fields (shared by the
// experiment driver and the simulate subcommand).
DiffusionModel build_model(const ExperimentConfig& config);
RewardSpec build_reward(const ExperimentConfig& config);

// Row flags: 0 = clean, 1 = ridge regularization applied, 2 = solve failed.
struct ResultRow {
    std::string model;
    int d = 1;
    double sigma = 1.0;
    int n = 0;
    long m = 0;
    int nu = 2;
    double eta = 0.0;
    double beta = 0.0;
    double T = 0.0;
    std::uint64_t seed = 0;
    double l2_err = 0.0;
    double h1_err = 0.0;
    double h2_err = 0.0;
    double approx_h1 = 0.0;
    double stat_h1 = 0.0;
    double cond = 0.0;
    int flag = 0;
    double wall_ms = 0.0;

    static std::string csv_header();
    std::string to_csv() const;
};

// Runs the full grid. Tasks execute concurrently up to the CTPE_WORKERS
// limit (default 1); rows come back in canonical grid order regardless of
// completion order, and identical configs produce identical tables.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

std::string rows_to_csv(const std::vector<ResultRow>& rows);

struct GroupStat {
    double key = 0.0;
    double rms = 0.0;
    long count = 0;
};

struct GroupFit {
    std::vector<GroupStat> groups;
    FitResult fit;
};

// RMS of `response` per distinct `key`, then a log-log fit over
// (key, RMS). Requires >= 3 nondegenerate groups.
GroupFit aggregate_and_fit(const std::vector<ResultRow>& rows,
                           const std::function<double(const ResultRow&)>& key,
                           const std::function<double(const ResultRow&)>& response);

// Worker limit from CTPE_WORKERS (>= 1; unset or invalid means 1).
int worker_limit();

// 17-significant-digit float formatting shared by every CSV writer.
std::string format_g17(double v);

} // namespace ctpe
