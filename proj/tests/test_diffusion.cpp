#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ctpe/diffusion.hpp"

using namespace ctpe;

namespace {

const double kTwoPi = 2.0 * M_PI;

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd x(1);
    x << a;
    return x;
}

// Signed distance on the circle, in (-1/2, 1/2].
double wrap_diff(double b, double a) {
    double d = b - a;
    d -= std::round(d);
    return d;
}

} // namespace

TEST_SUITE("diffusion") {

TEST_CASE("observation bookkeeping and determinism") {
    const auto model = DiffusionModel::torus_brownian(1, 1.0);
    const auto reward = RewardSpec::constant(0.5, 0.0);
    const auto traj = simulate_trajectory(model, reward, 1.0, 0.1, 1, 7);
    CHECK(traj.num_observations() == 11);
    for (long k = 0; k < traj.num_observations(); ++k) {
        CHECK(traj.observations(k, 0) >= 0.0);
        CHECK(traj.observations(k, 0) < 1.0);
    }

    const auto again = simulate_trajectory(model, reward, 1.0, 0.1, 1, 7);
    CHECK(traj.to_csv() == again.to_csv());
    CHECK((traj.observations - again.observations).cwiseAbs().maxCoeff() == 0.0);
    CHECK((traj.rewards - again.rewards).cwiseAbs().maxCoeff() == 0.0);

    const auto other = simulate_trajectory(model, reward, 1.0, 0.1, 1, 8);
    CHECK(traj.to_csv() != other.to_csv());

    // floor(T/eta) + 1 rows, tolerant of representation error in T/eta.
    CHECK(simulate_trajectory(model, reward, 64.0, 0.05, 1, 1).num_observations() == 1281);
    CHECK(simulate_trajectory(model, reward, 0.3, 0.1, 1, 1).num_observations() == 4);

    const auto inner = simulate_trajectory(model, reward, 1.0, 0.1, 16, 7, true);
    CHECK(inner.has_inner());
    CHECK(inner.inner_states.rows() == 10 * 16 + 1);
    // Every 16th inner row is an observation.
    for (long k = 0; k <= 10; ++k)
        CHECK(inner.inner_states(16 * k, 0) == doctest::Approx(inner.observations(k, 0)));

    CHECK_THROWS_AS(simulate_trajectory(model, reward, 0.0, 0.1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_trajectory(model, reward, 1.0, -0.1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_trajectory(model, reward, 1.0, 0.1, 0, 1), std::invalid_argument);
}

TEST_CASE("reward noise stream does not perturb the path") {
    const auto model = DiffusionModel::torus_brownian(1, 0.7);
    const auto quiet = RewardSpec::constant(0.5, 0.0);
    const auto noisy = RewardSpec::constant(0.5, 0.4);
    const auto a = simulate_trajectory(model, quiet, 5.0, 0.1, 4, 99, true);
    const auto b = simulate_trajectory(model, noisy, 5.0, 0.1, 4, 99, true);
    CHECK((a.observations - b.observations).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.inner_states - b.inner_states).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.rewards - b.rewards).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("inner increments have the exact Gaussian variance") {
    const double sigma = 1.0, eta = 0.1;
    const int s = 100;
    const auto model = DiffusionModel::torus_brownian(1, sigma);
    const auto reward = RewardSpec::constant(0.0, 0.0);
    const auto traj = simulate_trajectory(model, reward, 100.0, eta, s, 11, true);
    const long N = traj.inner_states.rows() - 1;
    REQUIRE(N >= 100000);

    // Wrapped-to-nearest differences recover the raw increments: the step
    // standard deviation is 0.03, so |increment| > 1/2 has probability ~0.
    double sum = 0.0, sumsq = 0.0;
    for (long j = 0; j < N; ++j) {
        const double d = wrap_diff(traj.inner_states(j + 1, 0), traj.inner_states(j, 0));
        sum += d;
        sumsq += d * d;
    }
    const double mean = sum / N;
    const double var = sumsq / N - mean * mean;
    const double want = sigma * sigma * eta / s;
    const double se = want * std::sqrt(2.0 / (N - 1));
    CHECK(std::abs(var - want) <= 3.0 * se);
}

TEST_CASE("stationary marginal is uniform") {
    const auto model = DiffusionModel::torus_brownian(1, 1.0);
    const auto reward = RewardSpec::constant(0.0, 0.0);
    // eta = 0.5 mixes essentially completely between observations.
    const auto traj = simulate_trajectory(model, reward, 5000.0, 0.5, 1, 3);
    const long N = traj.num_observations();
    REQUIRE(N == 10001);
    std::vector<double> xs(static_cast<std::size_t>(N));
    for (long k = 0; k < N; ++k) xs[static_cast<std::size_t>(k)] = traj.observations(k, 0);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (long i = 0; i < N; ++i) {
        const double x = xs[static_cast<std::size_t>(i)];
        ks = std::max(ks, std::abs((i + 1.0) / N - x));
        ks = std::max(ks, std::abs(x - static_cast<double>(i) / N));
    }
    CHECK(ks < 1.36 / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("wrapped increments keep the Brownian characteristic function") {
    // cos(2 pi (X_{k+1} - X_k)) is wrap-invariant and has mean e^{-2 pi^2
    // sigma^2 eta} under the exact transition law.
    const double eta = 0.02;
    const auto model = DiffusionModel::torus_brownian(1, 1.0);
    const auto traj =
        simulate_trajectory(model, RewardSpec::constant(0.0, 0.0), 200.0, eta, 1, 21);
    const long N = traj.num_observations() - 1;
    double sum = 0.0, sumsq = 0.0;
    for (long k = 0; k < N; ++k) {
        const double c = std::cos(kTwoPi * (traj.observations(k + 1, 0) - traj.observations(k, 0)));
        sum += c;
        sumsq += c * c;
    }
    const double mean = sum / N;
    const double se = std::sqrt(std::max(0.0, sumsq / N - mean * mean) / N);
    CHECK(std::abs(mean - std::exp(-2.0 * M_PI * M_PI * eta)) <= 5.0 * se);
}

TEST_CASE("rewards are bounded and conditionally centered") {
    CoeffMap coeffs;
    coeffs[MultiIndex{1}] = 0.6; // sup |r| = 0.6 sqrt2 ~ 0.849
    const auto reward = RewardSpec::from_fourier(coeffs, 0.15);
    CHECK(reward.sup_bound == doctest::Approx(0.6 * std::sqrt(2.0)).epsilon(1e-14));
    const auto model = DiffusionModel::torus_brownian(1, 1.0);
    const auto traj = simulate_trajectory(model, reward, 500.0, 0.05, 1, 13);
    const long K = traj.num_observations();
    double worst = 0.0, dev = 0.0;
    for (long k = 0; k < K; ++k) {
        worst = std::max(worst, std::abs(traj.rewards[k]));
        dev += traj.rewards[k] - reward.mean_reward(traj.observations.row(k).transpose());
    }
    CHECK(worst <= 1.0);
    // Noise is Uniform(-eps, eps): sd eps/sqrt(3).
    const double se = 0.15 / std::sqrt(3.0) / std::sqrt(static_cast<double>(K));
    CHECK(std::abs(dev / K) <= 5.0 * se);
}

TEST_CASE("inadmissible reward bounds are rejected") {
    const auto model = DiffusionModel::torus_brownian(1, 1.0);
    CoeffMap coeffs;
    coeffs[MultiIndex{1}] = 0.8; // sup 1.13 > 1
    CHECK_THROWS_AS(
        simulate_trajectory(model, RewardSpec::from_fourier(coeffs, 0.0), 1.0, 0.1, 1, 1),
        std::invalid_argument);
    CHECK_THROWS_AS(simulate_trajectory(model, RewardSpec::constant(0.95, 0.1), 1.0, 0.1, 1, 1),
                    std::invalid_argument);
    CHECK_NOTHROW(simulate_trajectory(model, RewardSpec::constant(0.9, 0.1), 1.0, 0.1, 1, 1));
}

TEST_CASE("fourier sum evaluation matches the reward closure") {
    CoeffMap coeffs;
    coeffs[MultiIndex{0}] = 0.1;
    coeffs[MultiIndex{1}] = 0.25;
    coeffs[MultiIndex{-2}] = -0.2;
    const auto reward = RewardSpec::from_fourier(coeffs, 0.0);
    for (double x : {0.0, 0.13, 0.25, 0.5, 0.77}) {
        const double direct = 0.1 + 0.25 * std::sqrt(2.0) * std::cos(kTwoPi * x) -
                              0.2 * std::sqrt(2.0) * std::sin(2.0 * kTwoPi * x);
        CHECK(std::abs(eval_fourier_sum(coeffs, vec1(x)) - direct) <= 1e-10);
        CHECK(std::abs(reward.mean_reward(vec1(x)) - direct) <= 1e-10);
    }
}

TEST_CASE("path functional quadrature") {
    const auto model = DiffusionModel::torus_brownian(1, 1.0);
    const auto traj =
        simulate_trajectory(model, RewardSpec::constant(0.0, 0.0), 2.0, 1.0, 64, 5, true);
    auto one = [](const Eigen::VectorXd&) { return 1.0; };

    // Constant integrand, beta = 0: exactly the window length.
    CHECK(integrate_path_functional(traj, one, 0, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(integrate_path_functional(traj, one, 0, 0.0, 2) == doctest::Approx(2.0).epsilon(1e-13));

    // e^{-t} over [0,1]: trapezoid error is h^2/12 * int |f''| <= h^2/12.
    const double h = 1.0 / 64.0;
    const double got = integrate_path_functional(traj, one, 0, 1.0);
    CHECK(std::abs(got - (1.0 - std::exp(-1.0))) <= h * h / 12.0 + 1e-15);

    // Second window starts its discount clock at the window start.
    const double got2 = integrate_path_functional(traj, one, 1, 1.0);
    CHECK(got2 == doctest::Approx(got).epsilon(1e-12));

    CHECK_THROWS_AS(
        integrate_path_functional(simulate_trajectory(model, RewardSpec::constant(0.0, 0.0), 2.0,
                                                      1.0, 4, 5, false),
                                  one, 0, 1.0),
        std::invalid_argument);
    CHECK_THROWS_AS(integrate_path_functional(traj, one, 2, 1.0), std::out_of_range);
}

TEST_CASE("path functional agrees with its Richardson error estimate") {
    // One stored path, three nested trapezoid grids: the fine-grid value
    // must sit within 4x the Richardson error estimate of the coarse grid.
    const auto model = DiffusionModel::torus_brownian(1, 1.0);
    const auto traj =
        simulate_trajectory(model, RewardSpec::constant(0.0, 0.0), 2.0, 0.1, 160, 17, true);
    auto phi = [](const Eigen::VectorXd& x) { return std::cos(kTwoPi * x(0)); };
    const double beta = 1.0;

    const int window_obs = 20; // the whole path
    const double fine = integrate_path_functional(traj, phi, 0, beta, window_obs);

    auto decimated = [&](int every) {
        const double h = traj.eta / traj.substeps * every;
        const long rows = traj.inner_states.rows();
        double acc = 0.0;
        long steps = 0;
        for (long j = 0; j + every < rows; j += every) {
            const double t0 = steps * h, t1 = (steps + 1) * h;
            const double f0 =
                std::exp(-beta * t0) * phi(traj.inner_states.row(j).transpose());
            const double f1 =
                std::exp(-beta * t1) * phi(traj.inner_states.row(j + every).transpose());
            acc += 0.5 * (f0 + f1) * h;
            ++steps;
        }
        return acc;
    };

    const double coarse = decimated(16); // 10x coarser than the stored grid
    const double half = decimated(8);
    const double err_est = std::abs(half - coarse) * 4.0 / 3.0;
    CHECK(std::abs(fine - coarse) <= 4.0 * err_est);
}

TEST_CASE("first-observation drop shifts everything consistently") {
    const auto model = DiffusionModel::torus_brownian(1, 1.0);
    const auto traj =
        simulate_trajectory(model, RewardSpec::constant(0.3, 0.1), 2.0, 0.1, 8, 23, true);
    const auto dropped = traj.drop_first_observation();
    CHECK(dropped.num_observations() == traj.num_observations() - 1);
    CHECK(dropped.total_time == doctest::Approx(traj.total_time - traj.eta));
    for (long k = 0; k < dropped.num_observations(); ++k) {
        CHECK(dropped.observations(k, 0) == traj.observations(k + 1, 0));
        CHECK(dropped.rewards[k] == traj.rewards[k + 1]);
    }
    CHECK(dropped.inner_states.rows() == traj.inner_states.rows() - traj.substeps);
    CHECK(dropped.inner_states(0, 0) == traj.inner_states(traj.substeps, 0));
}

TEST_CASE("serialization headers") {
    const auto model = DiffusionModel::torus_brownian(2, 1.0);
    const auto traj =
        simulate_trajectory(model, RewardSpec::constant(0.0, 0.0), 0.5, 0.1, 2, 1, true);
    CHECK(traj.to_csv().rfind("k,t,x_0,x_1,reward\n", 0) == 0);
    CHECK(traj.inner_to_csv().rfind("j,t,x_0,x_1\n", 0) == 0);
}

TEST_CASE("langevin burn-in default and override") {
    auto gradU = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(x.size());
        for (long i = 0; i < x.size(); ++i) g(i) = -kTwoPi * 0.2 * std::sin(kTwoPi * x(i));
        return g;
    };
    const auto model = DiffusionModel::langevin_torus(1, 1.0, gradU, 2.0);
    CHECK(model.burn_in_time == doctest::Approx(10.0 / (1.0 * 2.0)));
    CHECK(!model.has_spectrum());
    const auto forced = DiffusionModel::langevin_torus(1, 1.0, gradU, 2.0, 0.7);
    CHECK(forced.burn_in_time == doctest::Approx(0.7));

    // Drift is -(sigma^2/2) grad U.
    const Eigen::VectorXd x = vec1(0.2);
    CHECK(model.drift(x)(0) == doctest::Approx(-0.5 * gradU(x)(0)).epsilon(1e-14));

    // Burn-in leaves determinism intact and states on the torus.
    const auto traj = simulate_trajectory(model, RewardSpec::constant(0.0, 0.0), 1.0, 0.1, 4, 5);
    const auto traj2 = simulate_trajectory(model, RewardSpec::constant(0.0, 0.0), 1.0, 0.1, 4, 5);
    CHECK(traj.to_csv() == traj2.to_csv());
    for (long k = 0; k < traj.num_observations(); ++k) {
        CHECK(traj.observations(k, 0) >= 0.0);
        CHECK(traj.observations(k, 0) < 1.0);
    }
}

TEST_CASE("ou process holds its stationary law") {
    const double rate = 2.0, sigma = 1.0;
    const auto model = DiffusionModel::ou_euclidean(1, rate, sigma);
    const auto traj =
        simulate_trajectory(model, RewardSpec::constant(0.0, 0.0), 2000.0, 0.05, 10, 77);
    const long N = traj.num_observations();
    double sum = 0.0, sumsq = 0.0;
    for (long k = 0; k < N; ++k) {
        sum += traj.observations(k, 0);
        sumsq += traj.observations(k, 0) * traj.observations(k, 0);
    }
    const double mean = sum / N;
    const double var = sumsq / N - mean * mean;
    const double want = sigma * sigma / (2.0 * rate);
    CHECK(std::abs(mean) <= 0.05);
    CHECK(std::abs(var - want) <= 0.03);
}

} // TEST_SUITE
