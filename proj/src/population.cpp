#include "ctpe/population.hpp"

#include <cmath>
#include <stdexcept>

namespace ctpe {

CoeffMap true_value_coeffs(const SpectrumFn& spectrum, const CoeffMap& rhat, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("true_value_coeffs: beta must be positive");
    if (!spectrum) throw std::invalid_argument("true_value_coeffs: spectrum required");
    CoeffMap out;
    for (const auto& [alpha, r] : rhat) out[alpha] = r / (beta + spectrum(alpha));
    return out;
}

CoeffMap discretized_fixed_point_coeffs(const DiscretizationScheme& scheme,
                                        const SpectrumFn& spectrum, const CoeffMap& rhat) {
    if (!(scheme.beta > 0.0))
        throw std::invalid_argument("discretized_fixed_point_coeffs: beta must be positive");
    if (!spectrum)
        throw std::invalid_argument("discretized_fixed_point_coeffs: spectrum required");
    const double L = scheme.horizon();
    CoeffMap out;
    for (const auto& [alpha, r] : rhat) {
        const double lam = spectrum(alpha);
        double reward_side = 0.0;
        for (int i = 0; i < scheme.nu; ++i)
            reward_side += scheme.kappas[static_cast<std::size_t>(i)] * std::exp(-lam * i * scheme.eta);
        const double denom = 1.0 - std::exp(-(scheme.beta + lam) * L);
        out[alpha] = scheme.eta * reward_side * r / denom;
    }
    return out;
}

Eigen::VectorXd population_A_bar_diag(const FourierBasis& basis,
                                      const DiscretizationScheme& scheme,
                                      const SpectrumFn& spectrum) {
    if (!spectrum) throw std::invalid_argument("population_A_bar_diag: spectrum required");
    const double L = scheme.horizon();
    Eigen::VectorXd diag(basis.m());
    for (long j = 0; j < basis.m(); ++j) {
        const double lam = spectrum(basis.index(j));
        diag[j] = (1.0 - std::exp(-(scheme.beta + lam) * L)) / scheme.eta;
    }
    return diag;
}

Eigen::VectorXd population_b_bar(const FourierBasis& basis, const DiscretizationScheme& scheme,
                                 const SpectrumFn& spectrum, const CoeffMap& rhat) {
    if (!spectrum) throw std::invalid_argument("population_b_bar: spectrum required");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(basis.m());
    for (long j = 0; j < basis.m(); ++j) {
        auto it = rhat.find(basis.index(j));
        if (it == rhat.end()) continue;
        const double lam = spectrum(basis.index(j));
        double s = 0.0;
        for (int i = 0; i < scheme.nu; ++i)
            s += scheme.kappas[static_cast<std::size_t>(i)] * std::exp(-lam * i * scheme.eta);
        b[j] = s * it->second;
    }
    return b;
}

Eigen::VectorXd population_theta_bar(const FourierBasis& basis, const DiscretizationScheme& scheme,
                                     const SpectrumFn& spectrum, const CoeffMap& rhat) {
    const Eigen::VectorXd diag = population_A_bar_diag(basis, scheme, spectrum);
    const Eigen::VectorXd b = population_b_bar(basis, scheme, spectrum, rhat);
    Eigen::VectorXd theta(basis.m());
    for (long j = 0; j < basis.m(); ++j) {
        if (!(diag[j] > 0.0))
            throw std::logic_error("population_theta_bar: singular diagonal entry");
        theta[j] = b[j] / diag[j];
    }
    return theta;
}

ValueOracle ValueOracle::build(const FourierBasis& basis, const DiscretizationScheme& scheme,
                               const SpectrumFn& spectrum, const CoeffMap& rhat) {
    ValueOracle o;
    o.true_coeffs = true_value_coeffs(spectrum, rhat, scheme.beta);
    o.discretized_coeffs = discretized_fixed_point_coeffs(scheme, spectrum, rhat);
    o.theta_bar = population_theta_bar(basis, scheme, spectrum, rhat);
    return o;
}

} // namespace ctpe
