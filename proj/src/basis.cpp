#include "ctpe/basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ctpe {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

void enumerate(int d, int n, int coord, int budget, MultiIndex& cur,
               std::vector<MultiIndex>& out) {
    if (coord == d) {
        out.push_back(cur);
        return;
    }
    for (int v = -budget; v <= budget; ++v) {
        cur[static_cast<std::size_t>(coord)] = v;
        enumerate(d, n, coord + 1, budget - std::abs(v), cur, out);
    }
}

} // namespace

int l1_norm(const MultiIndex& a) {
    int s = 0;
    for (int v : a) s += std::abs(v);
    return s;
}

double l2_norm_sq(const MultiIndex& a) {
    double s = 0.0;
    for (int v : a) s += static_cast<double>(v) * v;
    return s;
}

bool is_positive_rep(const MultiIndex& a) {
    for (int v : a) {
        if (v > 0) return true;
        if (v < 0) return false;
    }
    return false; // the zero index is neither
}

MultiIndexSet MultiIndexSet::build(int d, int n) {
    if (d < 1) throw std::invalid_argument("dimension d must be >= 1");
    if (n < 0) throw std::invalid_argument("degree n must be >= 0");
    MultiIndexSet set;
    set.d = d;
    set.n = n;
    MultiIndex cur(static_cast<std::size_t>(d), 0);
    enumerate(d, n, 0, n, cur, set.indices);
    // Zero first; pairs ordered by (l1, lex of positive representative);
    // within a pair the positive representative (cos slot) comes first.
    auto rep_of = [](const MultiIndex& a) {
        if (is_positive_rep(a)) return a;
        MultiIndex r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
        return r;
    };
    std::sort(set.indices.begin(), set.indices.end(),
              [&](const MultiIndex& a, const MultiIndex& b) {
                  const int la = l1_norm(a), lb = l1_norm(b);
                  if (la != lb) return la < lb;
                  const MultiIndex ra = rep_of(a), rb = rep_of(b);
                  if (ra != rb) return ra < rb;
                  return is_positive_rep(a) && !is_positive_rep(b);
              });
    return set;
}

FourierBasis FourierBasis::build(int d, int n, std::size_t cap) {
    FourierBasis b;
    b.set_ = MultiIndexSet::build(d, n);
    if (b.set_.size() > cap) throw std::invalid_argument("basis size exceeds cap");
    const long m = b.m();
    b.h1_diag_.resize(m);
    for (long j = 0; j < m; ++j)
        b.h1_diag_[j] = 1.0 + kTwoPi * kTwoPi * l2_norm_sq(b.index(j));
    for (long j = 1; j + 1 < m; j += 2) {
        const MultiIndex& a = b.index(j);
        if (!is_positive_rep(a))
            throw std::logic_error("canonical ordering violated: cos slot not a positive rep");
        Pair p;
        p.cos_idx = j;
        p.sin_idx = j + 1;
        p.alpha.resize(d);
        for (int i = 0; i < d; ++i) p.alpha[i] = a[static_cast<std::size_t>(i)];
        p.l2sq = l2_norm_sq(a);
        b.pairs_.push_back(std::move(p));
    }
    return b;
}

void FourierBasis::eval(const Eigen::VectorXd& x, Eigen::VectorXd& psi) const {
    psi.resize(m());
    psi[0] = 1.0;
    for (const Pair& p : pairs_) {
        const double phase = kTwoPi * p.alpha.dot(x);
        psi[p.cos_idx] = M_SQRT2 * std::cos(phase);
        psi[p.sin_idx] = M_SQRT2 * std::sin(phase);
    }
}

Eigen::VectorXd FourierBasis::eval(const Eigen::VectorXd& x) const {
    Eigen::VectorXd psi;
    eval(x, psi);
    return psi;
}

void FourierBasis::eval_with_grad(const Eigen::VectorXd& x, Eigen::VectorXd& psi,
                                  Eigen::MatrixXd& grad) const {
    psi.resize(m());
    grad.setZero(m(), d());
    psi[0] = 1.0;
    for (const Pair& p : pairs_) {
        const double phase = kTwoPi * p.alpha.dot(x);
        const double c = std::cos(phase), s = std::sin(phase);
        psi[p.cos_idx] = M_SQRT2 * c;
        psi[p.sin_idx] = M_SQRT2 * s;
        grad.row(p.cos_idx) = (-kTwoPi * M_SQRT2 * s) * p.alpha.transpose();
        grad.row(p.sin_idx) = (kTwoPi * M_SQRT2 * c) * p.alpha.transpose();
    }
}

Eigen::VectorXd FourierBasis::generator_action(const DiffusionModel& model,
                                               const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(m());
    if (model.has_spectrum()) {
        Eigen::VectorXd psi;
        eval(x, psi);
        out[0] = 0.0;
        for (long j = 0; j < m(); ++j) out[j] = -model.spectrum(index(j)) * psi[j];
        return out;
    }
    Eigen::VectorXd psi;
    Eigen::MatrixXd grad;
    eval_with_grad(x, psi, grad);
    const Eigen::VectorXd b = model.drift(x);
    const Eigen::MatrixXd S = model.diffusion_sqrt(x);
    const Eigen::MatrixXd lambda = S * S.transpose();
    out[0] = 0.0;
    // Hessian of a trig feature is -(2pi)^2 alpha alpha^T times the feature,
    // so (1/2) Tr(Lambda Hess) = -(1/2)(2pi)^2 (alpha^T Lambda alpha) psi.
    for (const Pair& p : pairs_) {
        const double quad = 0.5 * kTwoPi * kTwoPi * p.alpha.dot(lambda * p.alpha);
        out[p.cos_idx] = b.dot(grad.row(p.cos_idx)) - quad * psi[p.cos_idx];
        out[p.sin_idx] = b.dot(grad.row(p.sin_idx)) - quad * psi[p.sin_idx];
    }
    return out;
}

std::string FourierBasis::to_json() const {
    std::ostringstream os;
    os << "{\"d\":" << d() << ",\"n\":" << n() << ",\"ordering\":[";
    for (long j = 0; j < m(); ++j) {
        if (j) os << ",";
        os << "[";
        const MultiIndex& a = index(j);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i) os << ",";
            os << a[i];
        }
        os << "]";
    }
    os << "]}";
    return os.str();
}

double FunctionInSpan::eval(const Eigen::VectorXd& x) const {
    return theta.dot(basis->eval(x));
}

Eigen::VectorXd FunctionInSpan::grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd psi;
    Eigen::MatrixXd g;
    basis->eval_with_grad(x, psi, g);
    return g.transpose() * theta;
}

double FunctionInSpan::norm_l2() const { return theta.norm(); }

double FunctionInSpan::norm_h1() const {
    return std::sqrt(theta.cwiseProduct(basis->h1_diag().cwiseProduct(theta)).sum());
}

double FunctionInSpan::norm_h2() const {
    double s = 0.0;
    const double tp2 = kTwoPi * kTwoPi;
    for (long j = 0; j < basis->m(); ++j) {
        const double a2 = l2_norm_sq(basis->index(j));
        s += (1.0 + tp2 * a2 + tp2 * tp2 * a2 * a2) * theta[j] * theta[j];
    }
    return std::sqrt(s);
}

CoeffMap FunctionInSpan::to_coeff_map() const {
    CoeffMap out;
    for (long j = 0; j < basis->m(); ++j)
        if (theta[j] != 0.0) out[basis->index(j)] = theta[j];
    return out;
}

} // namespace ctpe
