#include "ctpe/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ctpe {

double sobolev_mode_weight(const MultiIndex& alpha, int order) {
    if (order < 0 || order > 2) throw std::invalid_argument("sobolev_mode_weight: order in {0,1,2}");
    if (order == 0) return 1.0;
    const double w = 4.0 * M_PI * M_PI * l2_norm_sq(alpha); // (2 pi)^2 |alpha|^2
    if (order == 1) return 1.0 + w;
    return 1.0 + w + w * w; // Hessian Frobenius weight (2 pi)^4 |alpha|^4
}

double sobolev_norm(const CoeffMap& coeffs, int order) {
    double s = 0.0;
    for (const auto& [alpha, c] : coeffs) s += c * c * sobolev_mode_weight(alpha, order);
    return std::sqrt(s);
}

CoeffMap coeff_map_of(const Eigen::VectorXd& theta, const FourierBasis& basis) {
    if (theta.size() != basis.m()) throw std::invalid_argument("coeff_map_of: dimension mismatch");
    CoeffMap out;
    for (long j = 0; j < basis.m(); ++j) out[basis.index(j)] = theta[j];
    return out;
}

CoeffMap coeff_diff(const CoeffMap& a, const CoeffMap& b) {
    CoeffMap out = a;
    for (const auto& [alpha, c] : b) out[alpha] -= c;
    return out;
}

double trace_ratio(const FourierBasis& basis) {
    double s = 0.0;
    const Eigen::VectorXd& h1 = basis.h1_diag();
    for (long j = 0; j < basis.m(); ++j) s += 1.0 / h1[j];
    return s;
}

FitResult fit_rate(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_rate: length mismatch");
    if (xs.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_rate: inputs must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate: degenerate abscissae");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = syy - fit.slope * sxy;
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

ErrorReport measure_errors(const Eigen::VectorXd& theta_hat, const FourierBasis& basis,
                           const CoeffMap& cbar, const CoeffMap& cstar) {
    const CoeffMap hat = coeff_map_of(theta_hat, basis);
    const CoeffMap total = coeff_diff(hat, cstar);

    // The population target within the span: cbar truncated to the basis
    // index set. Mass of cbar (and of cstar) outside the span belongs to the
    // approximation component; the statistical component is pure in-span.
    CoeffMap cbar_proj;
    for (long j = 0; j < basis.m(); ++j) {
        auto it = cbar.find(basis.index(j));
        if (it != cbar.end()) cbar_proj[it->first] = it->second;
    }

    ErrorReport rep;
    rep.l2_err = sobolev_norm(total, 0);
    rep.h1_err = sobolev_norm(total, 1);
    rep.h2_err = sobolev_norm(total, 2);
    rep.approx_h1 = sobolev_norm(coeff_diff(cbar_proj, cstar), 1);
    rep.stat_h1 = sobolev_norm(coeff_diff(hat, cbar_proj), 1);
    rep.n = basis.n();
    rep.m = basis.m();
    return rep;
}

} // namespace ctpe
