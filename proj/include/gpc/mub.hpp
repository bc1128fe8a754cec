#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gpc/errors.hpp"
#include "gpc/linalg.hpp"

namespace gpc {

/// Complete set of d+1 mutually unbiased bases for a prime dimension d.
///
/// Basis order: index 0 is the computational basis; index a+1 (a = 0..d-1)
/// is the Fourier-type basis with quadratic phase parameter a,
///   psi_k^{(a+1)}(j) = omega^{a j^2 + k j} / sqrt(d)      (odd d)
///   psi_k^{(a+1)}(j) = i^{a j^2 + 2 k j} / sqrt(2)        (d = 2)
/// For d = 2 this yields the eigenbases of sigma_3, sigma_1, sigma_2 in that
/// order. Vector phases are a by-product of the construction; consumers
/// should only depend on the projectors.
class MubSet {
public:
    int dim() const noexcept { return dim_; }
    int basis_count() const noexcept { return dim_ + 1; }

    const CVector& vector(int alpha, int k) const { return vectors_.at(alpha).at(k); }
    const Matrix& projector(int alpha, int k) const { return projectors_.at(alpha).at(k); }

    /// Pinching map Phi_alpha[X] = sum_k P_k X P_k, valid for any d x d matrix.
    Matrix pinch(int alpha, const Matrix& x) const {
        Matrix out = Matrix::Zero(dim_, dim_);
        for (int k = 0; k < dim_; ++k) {
            const CVector& v = vector(alpha, k);
            const cplx coeff = v.dot(x * v); // <v|X|v>
            out.noalias() += coeff * (v * v.adjoint());
        }
        return out;
    }

private:
    friend MubSet build_mubs(int d);

    int dim_ = 0;
    std::vector<std::vector<CVector>> vectors_;
    std::vector<std::vector<Matrix>> projectors_;
};

inline MubSet build_mubs(int d) {
    if (d < 2) throw Error(Errc::DimensionTooSmall, "d = " + std::to_string(d) + " (need d >= 2)");
    if (!is_prime(d))
        throw Error(Errc::NonPrimeDimension,
                    "d = " + std::to_string(d) + " is not prime; no full MUB construction available");

    MubSet set;
    set.dim_ = d;
    set.vectors_.assign(d + 1, std::vector<CVector>(d));
    set.projectors_.assign(d + 1, std::vector<Matrix>(d));

    for (int k = 0; k < d; ++k) set.vectors_[0][k] = CVector::Unit(d, k);

    // Phases are exact rationals of a full turn: exponent / period.
    const int period = (d == 2) ? 4 : d;
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int a = 0; a < d; ++a) {
        for (int k = 0; k < d; ++k) {
            CVector v(d);
            for (int j = 0; j < d; ++j) {
                const long long e = (d == 2) ? (a * j * j + 2 * k * j) : (a * j * j + k * j);
                const int reduced = static_cast<int>(e % period);
                v(j) = std::polar(norm, 2.0 * std::numbers::pi * reduced / period);
            }
            set.vectors_[a + 1][k] = std::move(v);
        }
    }
    for (int alpha = 0; alpha <= d; ++alpha)
        for (int k = 0; k < d; ++k) {
            const CVector& v = set.vectors_[alpha][k];
            set.projectors_[alpha][k] = v * v.adjoint();
        }
    return set;
}

/// Unitary operators U_alpha^k = sum_l omega^{k l} P_l^{(alpha)}, k = 1..d-1.
/// Together with the identity they form a Hilbert-Schmidt orthogonal basis of
/// the d x d matrices, and every generalized Pauli channel is diagonal in it.
class WeylEigenbasis {
public:
    int dim() const noexcept { return dim_; }
    cplx omega() const noexcept { return std::polar(1.0, 2.0 * std::numbers::pi / dim_); }

    /// alpha in [0, d], k in [1, d-1].
    const Matrix& op(int alpha, int k) const { return ops_.at(alpha).at(k - 1); }

private:
    friend WeylEigenbasis build_eigenbasis(const MubSet& m);

    int dim_ = 0;
    std::vector<std::vector<Matrix>> ops_;
};

inline WeylEigenbasis build_eigenbasis(const MubSet& m) {
    const int d = m.dim();
    WeylEigenbasis eb;
    eb.dim_ = d;
    eb.ops_.assign(d + 1, std::vector<Matrix>(d - 1));
    for (int alpha = 0; alpha <= d; ++alpha)
        for (int k = 1; k < d; ++k) {
            Matrix u = Matrix::Zero(d, d);
            for (int l = 0; l < d; ++l)
                u += std::polar(1.0, 2.0 * std::numbers::pi * ((k * l) % d) / d) * m.projector(alpha, l);
            eb.ops_[alpha][k - 1] = std::move(u);
        }
    return eb;
}

} // namespace gpc
