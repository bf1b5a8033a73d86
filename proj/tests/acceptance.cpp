// Acceptance harness: every advertised behavior of the toolkit, one line per
// criterion with the measured quantities, exit code = number of failures.
// Everything here runs against closed-form oracles or frozen constants;
// statistical checks state their standard-error budget explicitly.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctpe/advantage.hpp"
#include "ctpe/basis.hpp"
#include "ctpe/covariance.hpp"
#include "ctpe/diffusion.hpp"
#include "ctpe/discretization.hpp"
#include "ctpe/harness.hpp"
#include "ctpe/lstd.hpp"
#include "ctpe/metrics.hpp"
#include "ctpe/population.hpp"
#include "ctpe/rng.hpp"

using namespace ctpe;

namespace {

int g_failures = 0;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(int id, const char* label, bool pass, const std::string& detail, double elapsed,
            double budget) {
    const bool in_budget = elapsed < budget;
    const bool ok = pass && in_budget;
    if (!ok) ++g_failures;
    std::printf("[%s] %d %s: %s (%.1fs%s)\n", ok ? "PASS" : "FAIL", id, label, detail.c_str(),
                elapsed, in_budget ? "" : ", over budget");
    std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ------------------------------------------------------------- criterion 1

void criterion_discretization_order() {
    Timer t;
    DiffusionModel model = DiffusionModel::torus_brownian(1, 1.0);
    CoeffMap rhat;
    rhat[MultiIndex{1}] = 1.0;
    const double beta = 1.0;
    const CoeffMap cstar = true_value_coeffs(model.spectrum, rhat, beta);
    const std::vector<double> etas{0.08, 0.04, 0.02, 0.01};

    bool pass = true;
    std::string detail;
    for (int nu : {2, 3}) {
        std::vector<double> errs;
        for (double eta : etas) {
            const auto scheme = DiscretizationScheme::build(nu, eta, beta);
            const CoeffMap cbar = discretized_fixed_point_coeffs(scheme, model.spectrum, rhat);
            errs.push_back(sobolev_norm(coeff_diff(cbar, cstar), 1));
        }
        const double slope = fit_rate(etas, errs).slope;
        const bool ok = std::abs(slope - nu) <= 0.3;
        pass = pass && ok;
        detail += fmt("nu=%d slope=%.4f want %.1f+-0.3%s%s", nu, slope, double(nu),
                      ok ? "" : " VIOLATED", nu == 2 ? "; " : "");
    }
    report(1, "discretization-order", pass, detail, t.seconds(), 1.0);
}

// ------------------------------------------------------------- criterion 2

void criterion_statistical_rate() {
    Timer t;
    ExperimentConfig c;
    c.model_kind = "torus-brownian";
    c.d = 1;
    c.reward_coeffs[MultiIndex{1}] = 0.4; // inside the n=2 span: well-specified
    c.eps_noise = 0.1;
    c.nus = {2};
    c.etas = {0.05};
    c.beta = 1.0;
    c.ns = {2};
    c.Ts = {64.0, 128.0, 256.0};
    c.seed_base = 1;
    c.num_seeds = 50;
    c.admissibility_c0 = 1000.0;

    const auto rows = run_experiment(c);
    const auto agg = aggregate_and_fit(
        rows, [](const ResultRow& r) { return r.T; },
        [](const ResultRow& r) { return r.stat_h1; });
    const double slope = agg.fit.slope;
    const bool pass = slope >= -0.65 && slope <= -0.35;
    report(2, "statistical-rate", pass,
           fmt("RMS |f_hat - f_bar|_H1 vs T slope=%.4f want [-0.65,-0.35], r2=%.3f, %zu rows",
               slope, agg.fit.r2, rows.size()),
           t.seconds(), 300.0);
}

// ------------------------------------------------------------- criterion 3

void criterion_trace_growth() {
    Timer t;
    bool pass = true;
    std::string detail;

    // d=1: the tail is summable, quadrupling n moves the trace barely.
    const double inc = trace_ratio(FourierBasis::build(1, 64)) -
                       trace_ratio(FourierBasis::build(1, 16));
    const bool ok1 = inc > 0.0 && inc < 0.05;
    pass = pass && ok1;
    detail += fmt("d=1 increase=%.5f<0.05%s; ", inc, ok1 ? "" : " VIOLATED");

    // d=2: affine growth in ln m.
    std::vector<double> lx, ty;
    for (int n : {8, 16, 32, 64}) {
        const FourierBasis b = FourierBasis::build(2, n);
        lx.push_back(std::log(double(b.m())));
        ty.push_back(trace_ratio(b));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ty[i];
    }
    mx /= double(lx.size());
    my /= double(ty.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ty[i] - my);
        syy += (ty[i] - my) * (ty[i] - my);
    }
    const double r2 = 1.0 - (syy - (sxy / sxx) * sxy) / syy;
    const bool ok2 = r2 >= 0.95;
    pass = pass && ok2;
    detail += fmt("d=2 affine r2=%.4f>=0.95%s; ", r2, ok2 ? "" : " VIOLATED");

    // d=3: power law in m.
    std::vector<double> ms, ts;
    for (int n : {4, 8, 16}) {
        const FourierBasis b = FourierBasis::build(3, n);
        ms.push_back(double(b.m()));
        ts.push_back(trace_ratio(b));
    }
    const double slope3 = fit_rate(ms, ts).slope;
    const bool ok3 = slope3 >= 0.18 && slope3 <= 0.48;
    pass = pass && ok3;
    detail += fmt("d=3 slope=%.4f in [0.18,0.48]%s", slope3, ok3 ? "" : " VIOLATED");

    report(3, "trace-growth", pass, detail, t.seconds(), 10.0);
}

// ------------------------------------------------------------- criterion 4

void criterion_exact_recovery() {
    Timer t;
    DiffusionModel model = DiffusionModel::torus_brownian(1, 1.0);
    const double cval = 0.5, beta = 1.0;
    FourierBasis basis = FourierBasis::build(1, 1);

    double worst = 0.0;
    for (int nu : {2, 3}) {
        for (double eta : {0.1, 0.01}) {
            const auto traj = simulate_trajectory(model, RewardSpec::constant(cval, 0.0), 20.0,
                                                  eta, 1, 42u);
            const auto scheme = DiscretizationScheme::build(nu, eta, beta);
            const auto est = lstd_estimate(traj, basis, scheme);
            Eigen::VectorXd want = Eigen::VectorXd::Zero(basis.m());
            want[0] = cval / beta;
            worst = std::max(worst, (est.theta_hat - want).cwiseAbs().maxCoeff());
        }
    }
    const bool pass = worst <= 1e-10;
    report(4, "exact-recovery", pass,
           fmt("noiseless constant reward, max |theta_hat - (c/beta)e0| = %.2e want <= 1e-10",
               worst),
           t.seconds(), 1.0);
}

// ------------------------------------------------------------- criterion 5

void criterion_oracle_equivalence() {
    Timer t;
    DiffusionModel model = DiffusionModel::torus_brownian(1, 1.0);
    CoeffMap rhat;
    rhat[MultiIndex{1}] = 0.4;
    rhat[MultiIndex{2}] = 0.2;
    const RewardSpec reward = RewardSpec::from_fourier(rhat, 0.1);
    const double beta = 1.0, eta = 0.05, T = 50.0;
    const auto scheme = DiscretizationScheme::build(2, eta, beta);
    FourierBasis basis = FourierBasis::build(1, 2);
    const long m = basis.m();

    const Eigen::VectorXd a_diag = population_A_bar_diag(basis, scheme, model.spectrum);
    const Eigen::VectorXd theta_bar = population_theta_bar(basis, scheme, model.spectrum, rhat);

    const int R = 200;
    Eigen::MatrixXd a_sum = Eigen::MatrixXd::Zero(m, m), a_sq = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd r_sum = Eigen::VectorXd::Zero(m), r_sq = Eigen::VectorXd::Zero(m);
    for (int r = 0; r < R; ++r) {
        const auto traj = simulate_trajectory(model, reward, T, eta, 1, 1000u + r);
        const AssembledSystem sys = assemble(traj, basis, scheme);
        a_sum += sys.A;
        a_sq += sys.A.cwiseProduct(sys.A);
        // A_bar^{-1}(b_hat - A_hat theta_bar) has exact mean zero when the
        // sampled moments are unbiased for the population ones.
        const Eigen::VectorXd resid = (sys.b - sys.A * theta_bar).cwiseQuotient(a_diag);
        r_sum += resid;
        r_sq += resid.cwiseProduct(resid);
    }

    double worst_za = 0.0, worst_zr = 0.0;
    bool pass = true;
    for (long i = 0; i < m; ++i) {
        for (long j = 0; j < m; ++j) {
            const double mean = a_sum(i, j) / R;
            const double want = i == j ? a_diag[i] : 0.0;
            const double var = (a_sq(i, j) / R - mean * mean) / (R - 1.0);
            const double tol = 5.0 * std::sqrt(std::max(var, 0.0)) +
                               1e-12 * std::max(1.0, std::abs(want));
            const double gap = std::abs(mean - want);
            if (var > 0.0)
                worst_za = std::max(worst_za, gap / std::sqrt(std::max(var, 1e-300)));
            pass = pass && gap <= tol;
        }
        const double mean = r_sum[i] / R;
        const double var = (r_sq[i] / R - mean * mean) / (R - 1.0);
        const double tol = 5.0 * std::sqrt(std::max(var, 0.0)) + 1e-12;
        worst_zr = std::max(worst_zr, std::abs(mean) / std::sqrt(std::max(var, 1e-300)));
        pass = pass && std::abs(mean) <= tol;
    }
    report(5, "oracle-equivalence", pass,
           fmt("200 replicates: max |z| = %.2f for A entries, %.2f for theta residuals, "
               "want <= 5",
               worst_za, worst_zr),
           t.seconds(), 120.0);
}

// ------------------------------------------------------------- criterion 6

void criterion_covariance_diagnostics() {
    Timer t;
    DiffusionModel model = DiffusionModel::torus_brownian(1, 1.0);
    const double beta = 1.0, eta = 0.05, lam1 = 2.0 * M_PI * M_PI;
    const auto scheme = DiscretizationScheme::build(2, eta, beta);
    const auto traj = simulate_trajectory(model, RewardSpec::constant(0.1, 0.0), 750.0, eta, 16,
                                          777u, true);
    FourierBasis basis = FourierBasis::build(1, 1);
    Eigen::VectorXd tf = Eigen::VectorXd::Zero(basis.m()), tg = Eigen::VectorXd::Zero(basis.m());
    tf[1] = 1.0;
    tg[0] = 0.7;
    const FunctionInSpan f{tf, &basis}, g{tg, &basis};

    const double amp = 0.7 * (1.0 - std::exp(-beta * eta)) / eta;
    bool pass = true;
    std::string detail;
    for (int k : {1, 2}) {
        const auto est = estimate_mu_k(traj, f, g, scheme, k);
        const double want = amp * amp * std::exp(-lam1 * k * eta);
        const double z = std::abs(est.value - want) / est.se;
        pass = pass && z <= 3.0;
        detail += fmt("lag %d z=%.2f; ", k, z);
    }
    // k eta = 10 / lam1 is ~10 mixing times of the first mode.
    const int k_far = int(std::lround(10.0 / lam1 / eta));
    const auto far = estimate_mu_k(traj, f, g, scheme, k_far);
    const double zfar = std::abs(far.value) / far.se;
    pass = pass && zfar < 3.0;
    detail += fmt("lag %d (k*eta=10/lam1) |z|=%.2f, all want <= 3", k_far, zfar);
    report(6, "covariance-diagnostics", pass, detail, t.seconds(), 120.0);
}

// ------------------------------------------------------------- criterion 7

void criterion_martingale_scaling() {
    Timer t;
    DiffusionModel model = DiffusionModel::torus_brownian(1, 1.0);
    const double beta = 0.75, eta = 0.05;
    const auto scheme = DiscretizationScheme::build(2, eta, beta);
    const auto traj = simulate_trajectory(model, RewardSpec::constant(0.1, 0.0), 400.0, eta, 16,
                                          888u, true);

    CoeffMap rhat;
    rhat[MultiIndex{1}] = 0.4;
    const CoeffMap cbar = discretized_fixed_point_coeffs(scheme, model.spectrum, rhat);
    const double cbar1 = cbar.at(MultiIndex{1});

    std::vector<double> traces, proxies;
    for (int n : {1, 2, 4, 8, 16}) {
        FourierBasis bn = FourierBasis::build(1, n);
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(bn.m());
        theta[1] = cbar1; // the same fbar in every span
        proxies.push_back(martingale_variance_proxy(traj, theta, bn, scheme).first);
        traces.push_back(trace_ratio(bn));
    }
    const double slope = fit_rate(traces, proxies).slope;
    const bool pass = slope >= 0.8 && slope <= 1.2;
    report(7, "martingale-scaling", pass,
           fmt("proxy vs trace_ratio over n in {1,2,4,8,16}: slope=%.4f want 1.0+-0.2", slope),
           t.seconds(), 120.0);
}

// ------------------------------------------------------------- criterion 8

void criterion_error_tradeoff() {
    Timer t;
    ExperimentConfig c;
    c.model_kind = "torus-brownian";
    c.d = 1;
    for (int a = 1; a <= 8; ++a)
        c.reward_coeffs[MultiIndex{a}] = 0.5 / (double(a) * a * a); // ~|alpha|^{-3} decay
    c.eps_noise = 0.1;
    c.nus = {2};
    c.etas = {0.05};
    c.beta = 1.0;
    c.ns = {1, 2, 4, 8};
    c.Ts = {100.0};
    c.seed_base = 500;
    c.num_seeds = 20;
    // The point of this criterion is that n=8 at this stepsize is already
    // past the useful regime; keep the advisory quiet and let the measured
    // errors tell the story.
    c.admissibility_c0 = 1e5;

    const auto rows = run_experiment(c);
    auto rms_of = [&](int n, auto&& field) {
        double s = 0.0;
        long cnt = 0;
        for (const ResultRow& r : rows)
            if (r.n == n && r.flag == 0) {
                const double v = field(r);
                s += v * v;
                ++cnt;
            }
        return std::sqrt(s / double(cnt));
    };

    const std::vector<int> ns{1, 2, 4, 8};
    std::vector<double> total;
    std::string detail = "RMS H1 err:";
    for (int n : ns) {
        total.push_back(rms_of(n, [](const ResultRow& r) { return r.h1_err; }));
        detail += fmt(" n=%d %.4f", n, total.back());
    }
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < total.size(); ++i)
        if (total[i] < total[argmin]) argmin = i;
    const bool interior = argmin != 0 && argmin + 1 != total.size();

    const double stat8 = rms_of(8, [](const ResultRow& r) { return r.stat_h1; });
    const double approx8 = rms_of(8, [](const ResultRow& r) { return r.approx_h1; });
    const bool noise_dominated = stat8 > approx8;
    detail += fmt("; argmin n=%d%s; at n=8 stat=%.4f vs approx=%.4f%s", ns[argmin],
                  interior ? " (interior)" : "", stat8, approx8,
                  noise_dominated ? " (noise-dominated)" : "");

    report(8, "error-tradeoff", interior || noise_dominated, detail, t.seconds(), 600.0);
}

// ------------------------------------------------------------- criterion 9

void criterion_property_suites() {
    Timer t;
    bool pass = true;
    std::string detail;

    // Partition of unity across every order.
    {
        RandomStream rng(9001u, 1u);
        double worst = 0.0;
        for (int nu = 2; nu <= 8; ++nu) {
            const auto scheme = DiscretizationScheme::build(nu, 0.05, 1.0);
            for (int i = 0; i < 64; ++i) {
                const double s = rng.uniform01() * scheme.horizon();
                double sum = 0.0;
                for (int w = 0; w < nu; ++w) sum += scheme.eval_weight(w, s);
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
        const bool ok = worst <= 1e-10;
        pass = pass && ok;
        detail += fmt("partition-of-unity %.1e%s; ", worst, ok ? "" : " VIOLATED");
    }

    // kappa sum identities, beta > 0 and beta = 0.
    {
        double worst = 0.0;
        for (int nu = 2; nu <= 8; ++nu) {
            for (double beta : {0.5, 1.0, 5.0}) {
                for (double eta : {1e-3, 0.1}) {
                    const auto k = kappa_coefficients(nu, eta, beta);
                    double sum = 0.0;
                    for (double v : k) sum += v;
                    const double want = (1.0 - std::exp(-beta * (nu - 1) * eta)) / (beta * eta);
                    worst = std::max(worst, std::abs(sum - want) / want);
                }
            }
            const auto k0 = kappa_coefficients(nu, 0.1, 0.0);
            double sum0 = 0.0;
            for (double v : k0) sum0 += v;
            worst = std::max(worst, std::abs(sum0 - (nu - 1.0)) / (nu - 1.0));
        }
        const bool ok = worst <= 1e-12;
        pass = pass && ok;
        detail += fmt("kappa-sums %.1e%s; ", worst, ok ? "" : " VIOLATED");
    }

    // Orthonormality of the feature system under the stationary law.
    {
        FourierBasis basis = FourierBasis::build(2, 2);
        const long m = basis.m();
        RandomStream rng(9002u, 2u);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m), sq = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd psi(m), x(2);
        const int M = 1000000;
        for (int i = 0; i < M; ++i) {
            x << rng.uniform01(), rng.uniform01();
            basis.eval(x, psi);
            sum.noalias() += psi * psi.transpose();
            sq += (psi * psi.transpose()).cwiseAbs2();
        }
        double worst_z = 0.0;
        bool ok = true;
        for (long i = 0; i < m; ++i)
            for (long j = 0; j < m; ++j) {
                const double mean = sum(i, j) / M;
                const double want = i == j ? 1.0 : 0.0;
                const double var = (sq(i, j) / M - mean * mean) / (M - 1.0);
                const double gap = std::abs(mean - want);
                ok = ok && gap <= 5.0 * std::sqrt(std::max(var, 0.0)) + 1e-12;
                if (var > 0.0) worst_z = std::max(worst_z, gap / std::sqrt(var));
            }
        pass = pass && ok;
        detail += fmt("gram-mc max|z|=%.2f%s; ", worst_z, ok ? "" : " VIOLATED");
    }

    // Sobolev norm ordering on random coefficient draws.
    {
        RandomStream rng(9003u, 3u);
        bool ok = true;
        for (int rep = 0; rep < 20; ++rep) {
            CoeffMap cm;
            cm[MultiIndex{0, 0}] = rng.uniform(-1.0, 1.0);
            cm[MultiIndex{1, 0}] = rng.uniform(-1.0, 1.0);
            cm[MultiIndex{-1, 2}] = rng.uniform(-1.0, 1.0);
            cm[MultiIndex{2, 2}] = rng.uniform(-1.0, 1.0);
            const double l2 = sobolev_norm(cm, 0), h1 = sobolev_norm(cm, 1),
                         h2 = sobolev_norm(cm, 2);
            ok = ok && l2 <= h1 && h1 <= h2;
        }
        pass = pass && ok;
        detail += fmt("norm-ordering %s; ", ok ? "ok" : "VIOLATED");
    }

    // Advantage bound conformance at sampled states/actions.
    {
        FourierBasis basis = FourierBasis::build(1, 2);
        CoeffMap truth;
        truth[MultiIndex{1}] = 0.15;
        truth[MultiIndex{2}] = -0.1;
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(basis.m());
        theta[1] = 0.15 + 0.05;
        theta[3] = -0.1;
        ControlAffinePolicy policy;
        policy.lo = Eigen::VectorXd::Constant(1, -1.0);
        policy.hi = Eigen::VectorXd::Constant(1, 1.0);
        policy.mean_action = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
        policy.base_drift = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
        RandomStream rng(9004u, 4u);
        std::vector<Eigen::VectorXd> states;
        for (int i = 0; i < 100; ++i) {
            Eigen::VectorXd x(1);
            x << rng.uniform01();
            states.push_back(x);
        }
        const auto rep =
            advantage_error_bound_check(FunctionInSpan{theta, &basis}, truth, policy, states, 100,
                                        rng);
        pass = pass && rep.holds;
        detail += fmt("advantage-bound %s; ", rep.holds ? "holds" : "VIOLATED");
    }

    // Determinism: identical seeds reproduce tables and trajectories byte
    // for byte.
    {
        ExperimentConfig c;
        c.reward_coeffs[MultiIndex{1}] = 0.4;
        c.Ts = {8.0};
        c.etas = {0.05, 0.1};
        c.num_seeds = 2;
        c.admissibility_c0 = 1000.0;
        const bool tables = rows_to_csv(run_experiment(c)) == rows_to_csv(run_experiment(c));

        DiffusionModel model = DiffusionModel::torus_brownian(2, 0.7);
        const auto t1 = simulate_trajectory(model, RewardSpec::constant(0.3, 0.1), 4.0, 0.1, 8,
                                            31415u, true);
        const auto t2 = simulate_trajectory(model, RewardSpec::constant(0.3, 0.1), 4.0, 0.1, 8,
                                            31415u, true);
        const bool trajs = t1.to_csv() == t2.to_csv() && t1.inner_to_csv() == t2.inner_to_csv();
        pass = pass && tables && trajs;
        detail += fmt("determinism %s", tables && trajs ? "ok" : "VIOLATED");
    }

    report(9, "property-suites", pass, detail, t.seconds(), 30.0);
}

} // namespace

int main() {
    std::printf("acceptance harness\n");
    criterion_discretization_order();
    criterion_statistical_rate();
    criterion_trace_growth();
    criterion_exact_recovery();
    criterion_oracle_equivalence();
    criterion_covariance_diagnostics();
    criterion_martingale_scaling();
    criterion_error_tradeoff();
    criterion_property_suites();
    std::printf("%d/9 criteria passed\n", 9 - g_failures);
    return g_failures;
}
