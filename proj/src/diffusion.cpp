#include "ctpe/diffusion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ctpe/harness.hpp" // format_g17

namespace ctpe {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

Eigen::VectorXd mod1(Eigen::VectorXd x) {
    for (long i = 0; i < x.size(); ++i) {
        x[i] -= std::floor(x[i]);
        if (x[i] >= 1.0) x[i] = 0.0; // floor rounding at the right edge
    }
    return x;
}

// floor(T/eta) with a relative tolerance so grids like T=1, eta=0.1 do not
// lose the last observation to binary rounding.
long tolerant_floor_ratio(double T, double eta) {
    return static_cast<long>(std::floor(T / eta + 1e-9));
}

} // namespace

DiffusionModel DiffusionModel::torus_brownian(int d, double sigma) {
    if (d < 1 || !(sigma > 0.0)) throw std::invalid_argument("torus_brownian: bad parameters");
    DiffusionModel m;
    m.d = d;
    m.space = StateSpace::Torus;
    m.name = "torus-brownian";
    m.sigma = sigma;
    m.drift = [d](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(d).eval(); };
    m.diffusion_sqrt = [d, sigma](const Eigen::VectorXd&) {
        return (sigma * Eigen::MatrixXd::Identity(d, d)).eval();
    };
    m.spectrum = [sigma](const MultiIndex& a) {
        double a2 = 0.0;
        for (int v : a) a2 += static_cast<double>(v) * v;
        return 0.5 * sigma * sigma * kTwoPi * kTwoPi * a2;
    };
    m.exact_increment = true;
    m.lambda_min = m.lambda_max = sigma * sigma;
    m.stationary_sampler = [d](RandomStream& rng) {
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) x[i] = rng.uniform01();
        return x;
    };
    return m;
}

DiffusionModel DiffusionModel::langevin_torus(
    int d, double sigma, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_potential,
    double rho_hat, double burn_in_override) {
    if (d < 1 || !(sigma > 0.0) || !(rho_hat > 0.0))
        throw std::invalid_argument("langevin_torus: bad parameters");
    DiffusionModel m;
    m.d = d;
    m.space = StateSpace::Torus;
    m.name = "langevin-torus";
    m.sigma = sigma;
    const double half_s2 = 0.5 * sigma * sigma;
    m.drift = [grad_potential, half_s2](const Eigen::VectorXd& x) {
        return (-half_s2 * grad_potential(x)).eval();
    };
    m.diffusion_sqrt = [d, sigma](const Eigen::VectorXd&) {
        return (sigma * Eigen::MatrixXd::Identity(d, d)).eval();
    };
    m.lambda_min = m.lambda_max = sigma * sigma;
    m.burn_in_time =
        burn_in_override >= 0.0 ? burn_in_override : 10.0 / (m.lambda_min * rho_hat);
    // No exact stationary sampler: start uniform and rely on the burn-in.
    m.stationary_sampler = [d](RandomStream& rng) {
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) x[i] = rng.uniform01();
        return x;
    };
    return m;
}

DiffusionModel DiffusionModel::ou_euclidean(int d, double rate, double sigma) {
    if (d < 1 || !(rate > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("ou_euclidean: bad parameters");
    DiffusionModel m;
    m.d = d;
    m.space = StateSpace::Euclidean;
    m.name = "ou";
    m.sigma = sigma;
    m.drift = [rate](const Eigen::VectorXd& x) { return (-rate * x).eval(); };
    m.diffusion_sqrt = [d, sigma](const Eigen::VectorXd&) {
        return (sigma * Eigen::MatrixXd::Identity(d, d)).eval();
    };
    m.lambda_min = m.lambda_max = sigma * sigma;
    const double sd = sigma / std::sqrt(2.0 * rate);
    m.stationary_sampler = [d, sd](RandomStream& rng) {
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) x[i] = sd * rng.gaussian();
        return x;
    };
    return m;
}

double eval_fourier_sum(const CoeffMap& coeffs, const Eigen::VectorXd& x) {
    double v = 0.0;
    for (const auto& [alpha, c] : coeffs) {
        bool zero = true, positive = false;
        for (int a : alpha) {
            if (a != 0) {
                zero = false;
                positive = a > 0;
                break;
            }
        }
        if (zero) {
            v += c;
            continue;
        }
        double phase = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i)
            phase += kTwoPi * (positive ? alpha[i] : -alpha[i]) * x[static_cast<long>(i)];
        v += c * M_SQRT2 * (positive ? std::cos(phase) : std::sin(phase));
    }
    return v;
}

RewardSpec RewardSpec::from_fourier(const CoeffMap& coeffs, double eps_noise) {
    RewardSpec r;
    r.eps_noise = eps_noise;
    r.fourier_coeffs = coeffs;
    r.mean_reward = [coeffs](const Eigen::VectorXd& x) { return eval_fourier_sum(coeffs, x); };
    double bound = 0.0;
    for (const auto& [alpha, c] : coeffs) {
        bool zero = true;
        for (int a : alpha)
            if (a != 0) { zero = false; break; }
        bound += std::abs(c) * (zero ? 1.0 : M_SQRT2);
    }
    r.sup_bound = bound;
    return r;
}

RewardSpec RewardSpec::constant(double c, double eps_noise) {
    CoeffMap m;
    m[MultiIndex{0}] = c; // placeholder dimension; evaluator ignores x
    RewardSpec r;
    r.eps_noise = eps_noise;
    r.fourier_coeffs = m;
    r.mean_reward = [c](const Eigen::VectorXd&) { return c; };
    r.sup_bound = std::abs(c);
    return r;
}

std::string Trajectory::to_csv() const {
    std::ostringstream os;
    os << "k,t";
    for (long i = 0; i < observations.cols(); ++i) os << ",x_" << i;
    os << ",reward\n";
    for (long k = 0; k < observations.rows(); ++k) {
        os << k << "," << format_g17(k * eta);
        for (long i = 0; i < observations.cols(); ++i) os << "," << format_g17(observations(k, i));
        os << "," << format_g17(rewards[k]) << "\n";
    }
    return os.str();
}

std::string Trajectory::inner_to_csv() const {
    std::ostringstream os;
    os << "j,t";
    for (long i = 0; i < inner_states.cols(); ++i) os << ",x_" << i;
    os << "\n";
    const double h = eta / substeps;
    for (long j = 0; j < inner_states.rows(); ++j) {
        os << j << "," << format_g17(j * h);
        for (long i = 0; i < inner_states.cols(); ++i) os << "," << format_g17(inner_states(j, i));
        os << "\n";
    }
    return os.str();
}

Trajectory Trajectory::drop_first_observation() const {
    Trajectory t = *this;
    const long K = observations.rows() - 1;
    t.observations = observations.bottomRows(K);
    t.rewards = rewards.tail(K);
    t.total_time = total_time - eta;
    if (has_inner()) t.inner_states = inner_states.bottomRows(inner_states.rows() - substeps);
    return t;
}

Trajectory simulate_trajectory(const DiffusionModel& model, const RewardSpec& reward, double T,
                               double eta, int substeps, std::uint64_t seed, bool keep_inner) {
    if (!(eta > 0.0)) throw std::invalid_argument("simulate: eta must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("simulate: T must be positive");
    if (substeps < 1) throw std::invalid_argument("simulate: substeps must be >= 1");
    if (reward.sup_bound + reward.eps_noise > 1.0 + 1e-12)
        throw std::invalid_argument("simulate: sup|r| + eps_noise exceeds 1");

    const long K = tolerant_floor_ratio(T, eta);
    if (K < 1) throw std::invalid_argument("simulate: T shorter than one step");

    RandomStream base(seed);
    RandomStream init_rng = base.split(Purpose::Init);
    RandomStream path_rng = base.split(Purpose::Path);
    RandomStream reward_rng = base.split(Purpose::Reward);

    const int d = model.d;
    const double h = eta / substeps;
    const double sqrt_h = std::sqrt(h);
    Eigen::VectorXd x = model.stationary_sampler(init_rng);
    Eigen::VectorXd z(d);

    auto advance = [&](Eigen::VectorXd& state) {
        for (int i = 0; i < d; ++i) z[i] = path_rng.gaussian();
        if (model.exact_increment) {
            state += (model.sigma * sqrt_h) * z;
        } else {
            state += h * model.drift(state) + sqrt_h * (model.diffusion_sqrt(state) * z);
        }
        if (model.space == StateSpace::Torus) state = mod1(std::move(state));
    };

    if (model.burn_in_time > 0.0) {
        const long burn_steps = static_cast<long>(std::ceil(model.burn_in_time / h));
        for (long j = 0; j < burn_steps; ++j) advance(x);
    }

    Trajectory traj;
    traj.eta = eta;
    traj.substeps = substeps;
    traj.seed = seed;
    traj.total_time = T;
    traj.model = &model;
    traj.observations.resize(K + 1, d);
    traj.rewards.resize(K + 1);
    if (keep_inner) traj.inner_states.resize(K * substeps + 1, d);

    auto record_obs = [&](long k) {
        traj.observations.row(k) = x.transpose();
        traj.rewards[k] =
            reward.mean_reward(x) + reward_rng.uniform(-reward.eps_noise, reward.eps_noise);
    };

    record_obs(0);
    if (keep_inner) traj.inner_states.row(0) = x.transpose();
    for (long k = 1; k <= K; ++k) {
        for (int s = 0; s < substeps; ++s) {
            advance(x);
            if (keep_inner) traj.inner_states.row((k - 1) * substeps + s + 1) = x.transpose();
        }
        record_obs(k);
    }
    return traj;
}

double integrate_path_functional(const Trajectory& traj,
                                 const std::function<double(const Eigen::VectorXd&)>& phi, long k,
                                 double beta, int window_obs) {
    if (!traj.has_inner())
        throw std::invalid_argument("integrate_path_functional: inner states absent");
    if (window_obs < 1) throw std::invalid_argument("integrate_path_functional: bad window");
    const long s = traj.substeps;
    const long first = k * s;
    const long last = (k + window_obs) * s;
    if (k < 0 || last >= traj.inner_states.rows())
        throw std::out_of_range("integrate_path_functional: window exceeds trajectory");
    const double h = traj.eta / traj.substeps;
    double acc = 0.0;
    for (long j = first; j <= last; ++j) {
        const double t = (j - first) * h;
        const double v = std::exp(-beta * t) * phi(traj.inner_states.row(j).transpose());
        acc += (j == first || j == last) ? 0.5 * v : v;
    }
    return acc * h;
}

} // namespace ctpe
