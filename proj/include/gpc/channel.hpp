#pragma once

#include <cmath>
#include <string>

#include "gpc/errors.hpp"
#include "gpc/linalg.hpp"
#include "gpc/mub.hpp"

namespace gpc {

// Rounding slack when certifying complete positivity. Genuine violations in
// the mixtures studied here are of order 1e-2 and above.
inline constexpr double kCpTol = 1e-10;
inline constexpr double kNormalizationTol = 1e-9;

/// p_0 = [1 + (d-1) sum lambda] / d^2,  p_a = (d-1) [1 + d lambda_a - sum lambda] / d^2.
inline RealVector probs_from_eigenvalues(const RealVector& lambda, int d) {
    if (lambda.size() != d + 1)
        throw Error(Errc::DimensionMismatch, "expected " + std::to_string(d + 1) + " eigenvalues");
    const double dd = d;
    const double sum = lambda.sum();
    RealVector p(d + 2);
    p(0) = (1.0 + (dd - 1.0) * sum) / (dd * dd);
    for (int a = 0; a <= d; ++a) p(a + 1) = (dd - 1.0) * (1.0 + dd * lambda(a) - sum) / (dd * dd);
    return p;
}

/// Inverse map: lambda_a = [d (p_0 + p_a) - 1] / (d - 1).
inline RealVector eigenvalues_from_probs(const RealVector& p, int d) {
    if (p.size() != d + 2)
        throw Error(Errc::DimensionMismatch, "expected " + std::to_string(d + 2) + " probabilities");
    if (std::abs(p.sum() - 1.0) > kNormalizationTol)
        throw Error(Errc::NotNormalized, "sum p = " + std::to_string(p.sum()));
    const double dd = d;
    RealVector lambda(d + 1);
    for (int a = 0; a <= d; ++a) lambda(a) = (dd * (p(0) + p(a + 1)) - 1.0) / (dd - 1.0);
    return lambda;
}

/// Generalized Pauli channel at a fixed time. The eigenvalue vector is the
/// source of truth; the probability vector is derived once at construction.
class ChannelState {
public:
    static ChannelState from_eigenvalues(int d, RealVector lambda) {
        if (d < 2) throw Error(Errc::DimensionTooSmall, "d = " + std::to_string(d));
        RealVector p = probs_from_eigenvalues(lambda, d);
        return ChannelState(d, std::move(lambda), std::move(p));
    }

    static ChannelState from_probs(int d, const RealVector& p) {
        if (d < 2) throw Error(Errc::DimensionTooSmall, "d = " + std::to_string(d));
        return from_eigenvalues(d, eigenvalues_from_probs(p, d));
    }

    static ChannelState identity(int d) { return from_eigenvalues(d, RealVector::Ones(d + 1)); }

    int dim() const noexcept { return dim_; }
    const RealVector& eigenvalues() const noexcept { return lambda_; }
    const RealVector& probs() const noexcept { return probs_; }

    bool completely_positive(double tol = kCpTol) const { return probs_.minCoeff() >= -tol; }

private:
    ChannelState(int d, RealVector lambda, RealVector p)
        : dim_(d), lambda_(std::move(lambda)), probs_(std::move(p)) {}

    int dim_;
    RealVector lambda_;
    RealVector probs_;
};

/// Sequential composition; generalized Pauli channels over one MUB set commute
/// and their eigenvalues multiply.
inline ChannelState compose(const ChannelState& outer, const ChannelState& inner) {
    if (outer.dim() != inner.dim()) throw Error(Errc::DimensionMismatch, "channel dimensions differ");
    return ChannelState::from_eigenvalues(outer.dim(), outer.eigenvalues().cwiseProduct(inner.eigenvalues()));
}

class DensityMatrix {
public:
    explicit DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
        if (rho_.rows() != rho_.cols() || rho_.rows() < 1)
            throw Error(Errc::InvalidArgument, "density matrix must be square");
        if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kExactTol)
            throw Error(Errc::InvalidArgument, "density matrix is not Hermitian");
        if (std::abs(rho_.trace() - cplx(1.0)) > kExactTol)
            throw Error(Errc::InvalidArgument, "density matrix trace is not 1");
        if (hermitian_eigenvalues(rho_).minCoeff() < -kCpTol)
            throw Error(Errc::InvalidArgument, "density matrix is not positive semidefinite");
    }

    static DensityMatrix maximally_mixed(int d) {
        return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
    }

    int dim() const noexcept { return static_cast<int>(rho_.rows()); }
    const Matrix& matrix() const noexcept { return rho_; }

private:
    Matrix rho_;
};

/// Linear action on an arbitrary d x d matrix:
///   Lambda[X] = (d p_0 - 1)/(d - 1) X + d/(d - 1) sum_a p_a Phi_a[X].
inline Matrix apply_map(const ChannelState& ch, const Matrix& x, const MubSet& m) {
    const int d = ch.dim();
    if (m.dim() != d || x.rows() != d || x.cols() != d)
        throw Error(Errc::DimensionMismatch, "channel, MUB set and operand must share dimension");
    const double dd = d;
    const RealVector& p = ch.probs();
    Matrix out = ((dd * p(0) - 1.0) / (dd - 1.0)) * x;
    for (int a = 0; a <= d; ++a) out += (dd / (dd - 1.0)) * p(a + 1) * m.pinch(a, x);
    return out;
}

inline DensityMatrix apply(const ChannelState& ch, const DensityMatrix& rho, const MubSet& m) {
    if (!ch.completely_positive())
        throw Error(Errc::PreconditionUnmet, "channel is not completely positive");
    return DensityMatrix(apply_map(ch, rho.matrix(), m));
}

/// Choi matrix (id (x) Lambda)(|Omega><Omega|) with |Omega> = sum_i |ii>/sqrt(d);
/// trace one, input factor first.
inline Matrix choi_matrix(const ChannelState& ch, const MubSet& m) {
    const int d = ch.dim();
    Matrix c = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Matrix e = Matrix::Zero(d, d);
            e(i, j) = 1.0;
            c.block(i * d, j * d, d, d) = apply_map(ch, e, m) / static_cast<double>(d);
        }
    return c;
}

} // namespace gpc
