#include "ctpe/discretization.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "ctpe/harness.hpp" // format_g17

namespace ctpe {

namespace {

// Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
// Used only while assembling kappa: the monomial-moment sum cancels by up
// to ~1e7 at nu = 8, which plain doubles cannot push below 1e-12.
struct DD {
    double hi = 0.0;
    double lo = 0.0;
};

DD two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

DD two_prod(double a, double b) {
    const double p = a * b;
    const double err = std::fma(a, b, -p);
    return {p, err};
}

DD dd_norm(double hi, double lo) {
    const DD s = two_sum(hi, lo);
    return s;
}

DD dd_add(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return dd_norm(s.hi, s.lo);
}

DD dd_add(DD a, double b) { return dd_add(a, DD{b, 0.0}); }

DD dd_mul(DD a, DD b) {
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_norm(p.hi, p.lo);
}

DD dd_mul(DD a, double b) { return dd_mul(a, DD{b, 0.0}); }

DD dd_div(DD a, double b) {
    const double q1 = a.hi / b;
    DD p = two_prod(q1, b);
    const double r = ((a.hi - p.hi) - p.lo) + a.lo;
    const double q2 = r / b;
    return dd_norm(q1, q2);
}

DD dd_neg(DD a) { return {-a.hi, -a.lo}; }

// J_k(g, M) = int_0^M e^{-g u} u^k du. Alternating series for g M <= 4,
// upward recurrence above (each branch is stable in its regime; the naive
// recurrence alone loses all digits as g M -> 0).
DD exp_moment(int k, double g, double M) {
    if (g == 0.0) {
        DD p{1.0, 0.0};
        for (int j = 0; j <= k; ++j) p = dd_mul(p, M);
        return dd_div(p, static_cast<double>(k + 1));
    }
    if (g * M <= 4.0) {
        // M^{k+1} sum_j (-gM)^j / (j! (k+j+1))
        DD t{1.0, 0.0};
        DD s = dd_div(DD{1.0, 0.0}, static_cast<double>(k + 1));
        const DD x = dd_mul(DD{-g, 0.0}, M);
        for (int j = 1; j <= 400; ++j) {
            t = dd_div(dd_mul(t, x), static_cast<double>(j));
            const DD term = dd_div(t, static_cast<double>(k + j + 1));
            s = dd_add(s, term);
            if (std::abs(term.hi) < 1e-34 * std::abs(s.hi)) break;
        }
        DD p{1.0, 0.0};
        for (int j = 0; j <= k; ++j) p = dd_mul(p, M);
        return dd_mul(p, s);
    }
    if (k == 0) {
        return dd_div(dd_add(DD{1.0, 0.0}, -std::exp(-g * M)), g);
    }
    const DD prev = exp_moment(k - 1, g, M);
    DD mk{1.0, 0.0};
    for (int j = 0; j < k; ++j) mk = dd_mul(mk, M);
    const DD top = dd_add(dd_mul(prev, static_cast<double>(k)),
                          dd_neg(dd_mul(mk, std::exp(-g * M))));
    return dd_div(top, g);
}

// Integer monomial coefficients of prod_{j != i} (u - j) on the scaled
// nodes {0..nu-1}, smallest factors first, plus the exact denominator
// prod_{j != i} (i - j). Everything stays well inside int64 for nu <= 8.
void scaled_coefficients(int nu, int i, std::vector<std::int64_t>& coeffs,
                         std::int64_t& denom) {
    coeffs.assign(1, 1);
    denom = 1;
    for (int j = 0; j < nu; ++j) {
        if (j == i) continue;
        coeffs.push_back(0);
        for (int k = static_cast<int>(coeffs.size()) - 1; k > 0; --k)
            coeffs[static_cast<std::size_t>(k)] =
                coeffs[static_cast<std::size_t>(k - 1)] -
                static_cast<std::int64_t>(j) * coeffs[static_cast<std::size_t>(k)];
        coeffs[0] *= -static_cast<std::int64_t>(j);
        denom *= static_cast<std::int64_t>(i - j);
    }
}

void check_scheme_args(int nu, double eta, double beta) {
    if (nu < 2) throw std::invalid_argument("order nu must be >= 2");
    if (nu > 8) throw std::invalid_argument("order nu capped at 8 (equispaced interpolation)");
    if (!(eta > 0.0)) throw std::invalid_argument("stepsize eta must be positive");
    if (!(beta >= 0.0)) throw std::invalid_argument("discount beta must be nonnegative");
}

} // namespace

std::vector<std::vector<double>> lagrange_weights(int nu, double eta) {
    check_scheme_args(nu, eta, 0.0);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(nu));
    std::vector<std::int64_t> c;
    std::int64_t denom = 0;
    for (int i = 0; i < nu; ++i) {
        scaled_coefficients(nu, i, c, denom);
        auto& w = out[static_cast<std::size_t>(i)];
        w.resize(c.size());
        // W_i(s) = V_i(s / eta): physical coefficient k is c_k / (denom eta^k).
        double scale = 1.0 / static_cast<double>(denom);
        for (std::size_t k = 0; k < c.size(); ++k) {
            w[k] = static_cast<double>(c[k]) * scale;
            scale /= eta;
        }
    }
    return out;
}

std::vector<double> kappa_coefficients(int nu, double eta, double beta) {
    check_scheme_args(nu, eta, beta);
    // kappa_i = (1/eta) int_0^{(nu-1)eta} e^{-beta s} W_i(s) ds
    //         = int_0^{nu-1} e^{-(beta eta) u} V_i(u) du
    // with V_i the Lagrange polynomial on the integer nodes {0..nu-1}.
    const double g = beta * eta;
    const double M = static_cast<double>(nu - 1);
    std::vector<DD> J(static_cast<std::size_t>(nu));
    for (int k = 0; k < nu; ++k) J[static_cast<std::size_t>(k)] = exp_moment(k, g, M);

    std::vector<double> kappas(static_cast<std::size_t>(nu));
    std::vector<std::int64_t> c;
    std::int64_t denom = 0;
    for (int i = 0; i < nu; ++i) {
        scaled_coefficients(nu, i, c, denom);
        DD acc{0.0, 0.0};
        for (std::size_t k = 0; k < c.size(); ++k)
            acc = dd_add(acc, dd_mul(J[k], static_cast<double>(c[k])));
        kappas[static_cast<std::size_t>(i)] = dd_div(acc, static_cast<double>(denom)).hi;
    }
    return kappas;
}

DiscretizationScheme DiscretizationScheme::build(int nu, double eta, double beta) {
    check_scheme_args(nu, eta, beta);
    DiscretizationScheme s;
    s.nu = nu;
    s.eta = eta;
    s.beta = beta;
    s.weights = lagrange_weights(nu, eta);
    s.kappas = kappa_coefficients(nu, eta, beta);
    return s;
}

double DiscretizationScheme::eval_weight(int i, double s) const {
    const auto& w = weights[static_cast<std::size_t>(i)];
    double v = 0.0;
    for (std::size_t k = w.size(); k-- > 0;) v = v * s + w[k];
    return v;
}

std::string DiscretizationScheme::to_json() const {
    std::ostringstream os;
    os << "{\"nu\":" << nu << ",\"eta\":" << format_g17(eta) << ",\"beta\":" << format_g17(beta)
       << ",\"kappas\":[";
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        if (i) os << ",";
        os << format_g17(kappas[i]);
    }
    os << "]}";
    return os.str();
}

} // namespace ctpe
