#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "ctpe/diffusion.hpp"

namespace ctpe {

int l1_norm(const MultiIndex& a);
double l2_norm_sq(const MultiIndex& a);

// All alpha in Z^d with |alpha|_1 <= n. Canonical order: the zero index
// first, then +/- pairs sorted by (|alpha|_1, lexicographic order of the
// positive representative), positive representative before its negation.
// The positive representative of a pair is the member whose first nonzero
// coordinate is positive.
struct MultiIndexSet {
    int d = 1;
    int n = 1;
    std::vector<MultiIndex> indices;

    static MultiIndexSet build(int d, int n);
    std::size_t size() const { return indices.size(); }
};

bool is_positive_rep(const MultiIndex& a);

// Real Fourier features on the torus: feature 0 is the constant 1; each
// +/- pair {a, -a} contributes sqrt2*cos(2pi<a,x>) at the positive
// representative's slot and sqrt2*sin(2pi<a,x>) at the negation's slot.
// Under the uniform law the features are orthonormal (H0 = I) and the
// first-order Gram is diagonal: H1 = diag(1 + (2pi)^2 |alpha|_2^2).
class FourierBasis {
  public:
    static FourierBasis build(int d, int n, std::size_t cap = 20000);

    int d() const { return set_.d; }
    int n() const { return set_.n; }
    long m() const { return static_cast<long>(set_.size()); }
    const MultiIndexSet& index_set() const { return set_; }
    const MultiIndex& index(long j) const { return set_.indices[static_cast<std::size_t>(j)]; }
    double regularity_exponent() const { return 1.0 / set_.d; }

    const Eigen::VectorXd& h1_diag() const { return h1_diag_; }
    Eigen::VectorXd h0_diag() const { return Eigen::VectorXd::Ones(m()); }

    void eval(const Eigen::VectorXd& x, Eigen::VectorXd& psi) const;
    Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
    // grad is m x d; row j holds the gradient of feature j.
    void eval_with_grad(const Eigen::VectorXd& x, Eigen::VectorXd& psi,
                        Eigen::MatrixXd& grad) const;

    // (A psi)_j(x) for the model's generator. Spectrum-bearing models use
    // the diagonal action -lambda_alpha psi_j; otherwise the analytic
    // drift/Hessian formula with Lambda = S S^T.
    Eigen::VectorXd generator_action(const DiffusionModel& model, const Eigen::VectorXd& x) const;

    std::string to_json() const; // {d, n, ordering:[[...],...]}

  private:
    struct Pair {
        long cos_idx;
        long sin_idx;
        Eigen::VectorXd alpha; // positive representative, as doubles
        double l2sq;
    };

    MultiIndexSet set_;
    std::vector<Pair> pairs_;
    Eigen::VectorXd h1_diag_;
};

// f(x) = <theta, psi(x)> with exact coefficient-space Sobolev norms.
struct FunctionInSpan {
    Eigen::VectorXd theta;
    const FourierBasis* basis = nullptr;

    double eval(const Eigen::VectorXd& x) const;
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
    double norm_l2() const;
    double norm_h1() const;
    double norm_h2() const;
    CoeffMap to_coeff_map() const;
};

} // namespace ctpe
