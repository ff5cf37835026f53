#pragma once

// Core linear-algebra layer: validated matrix types (unitary, density,
// projector), named unitary families, Haar sampling, eigendecomposition of
// unitaries, and the handful of tensor utilities everything else builds on.
// Backed by Eigen; all functions are pure and deterministic for fixed inputs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vndisc/errors.hpp"

namespace vndisc {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTau = 2.0 * kPi;

// Validation tolerances, applied to max-abs entry residuals.
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kDensityTol = 1e-10;
inline constexpr double kProjectorTol = 1e-9;
inline constexpr double kEigRecTol = 1e-8;

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

inline double max_abs(const CMat& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

inline bool is_finite(const CMat& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const Complex& z = m(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
    return true;
}

inline void require_square_finite(const CMat& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw NotSquareError(std::string(what) + ": matrix must be square and nonempty");
    if (!is_finite(m))
        throw BadParamsError(std::string(what) + ": matrix has non-finite entries");
}

// Wraps an angle into [0, 2*pi).
inline double wrap_phase(double a) {
    double r = std::fmod(a, kTau);
    if (r < 0.0) r += kTau;
    if (r >= kTau) r = 0.0;
    return r;
}

// Circular distance between two angles, result in [0, pi].
inline double circ_dist(double a, double b) {
    double d = std::fabs(wrap_phase(a) - wrap_phase(b));
    return std::min(d, kTau - d);
}

// Counter-based seed derivation (splitmix64 finalizer).  Per-sample seeds in
// Monte Carlo studies come from here so results do not depend on evaluation
// order.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Validated matrix types
// ---------------------------------------------------------------------------

class Unitary {
  public:
    explicit Unitary(CMat m) : m_(std::move(m)) {
        require_square_finite(m_, "Unitary");
        const Eigen::Index d = m_.rows();
        const double res = max_abs(m_.adjoint() * m_ - CMat::Identity(d, d));
        if (res > kUnitaryTol)
            throw NotUnitaryError("Unitary: U^dag U deviates from identity by " +
                                  std::to_string(res));
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMat& mat() const { return m_; }

  private:
    CMat m_;
};

inline Unitary make_unitary(const CMat& entries) { return Unitary(entries); }

class DensityMatrix {
  public:
    explicit DensityMatrix(CMat m) : m_(std::move(m)) {
        require_square_finite(m_, "DensityMatrix");
        if (max_abs(m_ - m_.adjoint()) > kDensityTol)
            throw NotDensityError("DensityMatrix: not Hermitian within tolerance");
        if (std::fabs(m_.trace().real() - 1.0) > kDensityTol ||
            std::fabs(m_.trace().imag()) > kDensityTol)
            throw NotDensityError("DensityMatrix: trace differs from 1");
        Eigen::SelfAdjointEigenSolver<CMat> es(m_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kDensityTol)
            throw NotDensityError("DensityMatrix: negative eigenvalue " +
                                  std::to_string(es.eigenvalues().minCoeff()));
    }

    static DensityMatrix pure(const CVec& psi) {
        const double n = psi.norm();
        if (!(n > 0.0) || std::fabs(n - 1.0) > 1e-8)
            throw NotPureError("DensityMatrix::pure: vector norm is " + std::to_string(n));
        CVec v = psi / n;
        return DensityMatrix(v * v.adjoint());
    }

    static DensityMatrix maximally_mixed(int d) {
        if (d < 1) throw BadParamsError("maximally_mixed: dimension must be >= 1");
        return DensityMatrix(CMat::Identity(d, d) / static_cast<double>(d));
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMat& mat() const { return m_; }

  private:
    CMat m_;
};

class Projector {
  public:
    explicit Projector(CMat m) : m_(std::move(m)) {
        require_square_finite(m_, "Projector");
        if (max_abs(m_ - m_.adjoint()) > kProjectorTol)
            throw NotProjectorError("Projector: not Hermitian within tolerance");
        if (max_abs(m_ * m_ - m_) > kProjectorTol)
            throw NotProjectorError("Projector: not idempotent within tolerance");
    }

    static Projector zero(int d) { return Projector(CMat::Zero(d, d)); }
    static Projector identity(int d) { return Projector(CMat::Identity(d, d)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    // Trace of a projector is its rank; round to the nearest integer.
    int rank() const { return static_cast<int>(std::lround(m_.trace().real())); }
    const CMat& mat() const { return m_; }

  private:
    CMat m_;
};

// Eigenphases sorted ascending in [0, 2*pi); vectors.col(k) belongs to
// phases[k] and the columns form an orthonormal basis.
struct EigenSystem {
    RVec phases;
    CMat vectors;
};

// ---------------------------------------------------------------------------
// Named families
// ---------------------------------------------------------------------------

enum class Family { identity, hadamard, fourier, rotation, permutation, diag_phases };

inline Family family_from_name(std::string_view name) {
    if (name == "identity") return Family::identity;
    if (name == "hadamard") return Family::hadamard;
    if (name == "fourier") return Family::fourier;
    if (name == "rotation") return Family::rotation;
    if (name == "permutation") return Family::permutation;
    if (name == "diag-phases" || name == "diag_phases") return Family::diag_phases;
    throw UnknownFamilyError("unknown unitary family '" + std::string(name) + "'");
}

inline Unitary named_family(Family f, int dim, const std::vector<double>& params = {}) {
    switch (f) {
        case Family::identity: {
            if (dim < 1) throw BadParamsError("identity: dimension must be >= 1");
            if (!params.empty()) throw BadParamsError("identity: takes no parameters");
            return Unitary(CMat::Identity(dim, dim));
        }
        case Family::hadamard: {
            if (dim != 2) throw BadParamsError("hadamard: defined for dimension 2");
            if (!params.empty()) throw BadParamsError("hadamard: takes no parameters");
            CMat h(2, 2);
            const double s = 1.0 / std::sqrt(2.0);
            h << s, s, s, -s;
            return Unitary(h);
        }
        case Family::fourier: {
            if (dim < 1) throw BadParamsError("fourier: dimension must be >= 1");
            if (!params.empty()) throw BadParamsError("fourier: takes no parameters");
            CMat w(dim, dim);
            const double s = 1.0 / std::sqrt(static_cast<double>(dim));
            for (int j = 0; j < dim; ++j)
                for (int k = 0; k < dim; ++k)
                    w(j, k) = s * std::polar(1.0, kTau * j * k / dim);
            return Unitary(w);
        }
        case Family::rotation: {
            if (dim != 2) throw BadParamsError("rotation: defined for dimension 2");
            if (params.size() != 1) throw BadParamsError("rotation: expects one angle parameter");
            const double c = std::cos(params[0]), s = std::sin(params[0]);
            CMat r(2, 2);
            r << Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0);
            return Unitary(r);
        }
        case Family::permutation: {
            if (dim < 1) throw BadParamsError("permutation: dimension must be >= 1");
            if (static_cast<int>(params.size()) != dim)
                throw BadParamsError("permutation: expects exactly dim parameters");
            std::vector<int> p(dim);
            std::vector<bool> seen(dim, false);
            for (int j = 0; j < dim; ++j) {
                const double rounded = std::round(params[j]);
                if (std::fabs(params[j] - rounded) > 1e-9 || rounded < 1 || rounded > dim)
                    throw BadParamsError("permutation: entries must be integers in 1..dim");
                p[j] = static_cast<int>(rounded) - 1;
                if (seen[p[j]]) throw BadParamsError("permutation: entries must be distinct");
                seen[p[j]] = true;
            }
            CMat u = CMat::Zero(dim, dim);
            for (int j = 0; j < dim; ++j) u(p[j], j) = 1.0;  // maps |j> to |p(j)>
            return Unitary(u);
        }
        case Family::diag_phases: {
            if (dim < 1) throw BadParamsError("diag-phases: dimension must be >= 1");
            if (static_cast<int>(params.size()) != dim)
                throw BadParamsError("diag-phases: expects exactly dim phase parameters");
            CMat u = CMat::Zero(dim, dim);
            for (int j = 0; j < dim; ++j) u(j, j) = std::polar(1.0, params[j]);
            return Unitary(u);
        }
    }
    throw UnknownFamilyError("unhandled family enum value");
}

inline Unitary named_family(std::string_view name, int dim,
                            const std::vector<double>& params = {}) {
    return named_family(family_from_name(name), dim, params);
}

// ---------------------------------------------------------------------------
// Random sampling
// ---------------------------------------------------------------------------

namespace detail {

inline CMat ginibre(int rows, int cols, std::mt19937_64& gen) {
    std::normal_distribution<double> n01(0.0, 1.0);
    CMat z(rows, cols);
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double re = n01(gen);
            const double im = n01(gen);
            z(i, j) = Complex(re * s, im * s);
        }
    return z;
}

// QR of a Ginibre matrix with the R-diagonal phase correction; without the
// correction the distribution of Q is not Haar.
inline CMat haar_from_gen(int dim, std::mt19937_64& gen) {
    CMat z = ginibre(dim, dim, gen);
    Eigen::HouseholderQR<CMat> qr(z);
    CMat q = qr.householderQ() * CMat::Identity(dim, dim);
    CMat r = qr.matrixQR();
    for (int j = 0; j < dim; ++j) {
        const Complex rjj = r(j, j);
        const double a = std::abs(rjj);
        q.col(j) *= (a > 0.0) ? rjj / a : Complex(1.0, 0.0);
    }
    return q;
}

}  // namespace detail

inline Unitary haar_unitary(int dim, std::uint64_t seed) {
    if (dim < 1) throw BadParamsError("haar_unitary: dimension must be >= 1");
    std::mt19937_64 gen(seed);
    return Unitary(detail::haar_from_gen(dim, gen));
}

inline DensityMatrix random_density(int dim, std::uint64_t seed) {
    if (dim < 1) throw BadParamsError("random_density: dimension must be >= 1");
    std::mt19937_64 gen(seed);
    CMat g = detail::ginibre(dim, dim, gen);
    CMat rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint().eval());
    return DensityMatrix(rho);
}

inline CVec random_pure(int dim, std::uint64_t seed) {
    if (dim < 1) throw BadParamsError("random_pure: dimension must be >= 1");
    std::mt19937_64 gen(seed);
    CVec v = detail::ginibre(dim, 1, gen).col(0);
    return v / v.norm();
}

// ---------------------------------------------------------------------------
// Eigendecomposition of a unitary
// ---------------------------------------------------------------------------

// Schur of a normal matrix is already an eigendecomposition with an exactly
// orthonormal basis, which is what downstream spectral projectors need.
inline EigenSystem eig_unitary(const Unitary& u) {
    const int d = u.dim();
    Eigen::ComplexSchur<CMat> schur(u.mat(), /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        throw ConvergenceError("eig_unitary: Schur iteration failed");

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> ph(d);
    for (int k = 0; k < d; ++k) {
        const Complex lam = schur.matrixT()(k, k);
        ph[k] = wrap_phase(std::arg(lam));
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ph[a] < ph[b]; });

    EigenSystem sys;
    sys.phases = RVec(d);
    sys.vectors = CMat(d, d);
    for (int k = 0; k < d; ++k) {
        sys.phases[k] = ph[order[k]];
        CVec v = schur.matrixU().col(order[k]);
        // Fix the free global phase: largest-modulus component real positive.
        int imax = 0;
        for (int i = 1; i < d; ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        const Complex c = v[imax];
        if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
        sys.vectors.col(k) = v;
    }

    CMat rec = CMat::Zero(d, d);
    for (int k = 0; k < d; ++k)
        rec += std::polar(1.0, sys.phases[k]) *
               (sys.vectors.col(k) * sys.vectors.col(k).adjoint());
    if (max_abs(rec - u.mat()) > kEigRecTol)
        throw ConvergenceError("eig_unitary: reconstruction residual above tolerance");
    return sys;
}

// Sum of |v_k><v_k| over eigenvectors whose phase lies within tol of target
// (circular distance).  Used for spectral projectors onto phase clusters.
inline Projector phase_cluster_projector(const EigenSystem& sys, double target,
                                         double tol = 1e-9) {
    const int d = static_cast<int>(sys.phases.size());
    CMat p = CMat::Zero(d, d);
    int hits = 0;
    for (int k = 0; k < d; ++k) {
        if (circ_dist(sys.phases[k], target) <= tol) {
            p += sys.vectors.col(k) * sys.vectors.col(k).adjoint();
            ++hits;
        }
    }
    if (hits == 0)
        throw OutOfRangeError("phase_cluster_projector: no eigenphase near target");
    return Projector(p);
}

// ---------------------------------------------------------------------------
// Tensor and norm utilities
// ---------------------------------------------------------------------------

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline CMat kron_pow(const CMat& a, int n) {
    if (n < 0) throw BadParamsError("kron_pow: exponent must be >= 0");
    CMat out = CMat::Identity(1, 1);
    for (int k = 0; k < n; ++k) out = kron(out, a);
    return out;
}

// Trace norm (sum of singular values).  Hermitian inputs take the faster and
// more accurate eigenvalue route.
inline double trace_norm(const CMat& m) {
    require_square_finite(m, "trace_norm");
    const double scale = std::max(1.0, max_abs(m));
    if (max_abs(m - m.adjoint()) <= 1e-13 * scale) {
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint().eval()),
                                               Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().sum();
    }
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues().sum();
}

// Zeroes all off-diagonal entries (the completely dephasing channel).
inline CMat dephase(const CMat& m) {
    require_square_finite(m, "dephase");
    return m.diagonal().asDiagonal();
}

namespace detail {

// Thin orthonormal basis for the column space, rank-revealing.
inline CMat orthonormal_basis(const CMat& a, double rank_tol = 1e-12) {
    if (a.cols() == 0) return CMat(a.rows(), 0);
    Eigen::ColPivHouseholderQR<CMat> qr(a);
    qr.setThreshold(rank_tol);
    const Eigen::Index r = qr.rank();
    if (r == 0) return CMat(a.rows(), 0);
    return qr.householderQ() * CMat::Identity(a.rows(), r);
}

}  // namespace detail

// Orthogonal projector onto span(basis_a) \cap span(basis_b) via principal
// angles: keep singular directions of Qa^dag Qb with sigma >= 1 - tol.  A
// couple of alternating-projection sweeps then polish the kept directions so
// the projector satisfies P*Pa = P and P*Pb = P to far better than the
// selection cutoff.
inline Projector subspace_intersection(const CMat& basis_a, const CMat& basis_b,
                                       double tol = 1e-8) {
    if (basis_a.rows() != basis_b.rows())
        throw DimensionMismatchError("subspace_intersection: ambient dimensions differ");
    const Eigen::Index d = basis_a.rows();
    if (d < 1) throw BadParamsError("subspace_intersection: empty ambient space");
    if (!is_finite(basis_a) || !is_finite(basis_b))
        throw BadParamsError("subspace_intersection: non-finite basis entries");

    const CMat qa = detail::orthonormal_basis(basis_a);
    const CMat qb = detail::orthonormal_basis(basis_b);
    if (qa.cols() == 0 || qb.cols() == 0) return Projector::zero(static_cast<int>(d));

    Eigen::JacobiSVD<CMat> svd(qa.adjoint() * qb, Eigen::ComputeThinU);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()[k] >= 1.0 - tol) keep.push_back(k);
    if (keep.empty()) return Projector::zero(static_cast<int>(d));

    CMat w(d, static_cast<Eigen::Index>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) w.col(k) = qa * svd.matrixU().col(keep[k]);

    for (int pass = 0; pass < 2; ++pass) {
        w = qb * (qb.adjoint() * w);
        w = qa * (qa.adjoint() * w);
        w = detail::orthonormal_basis(w);
        if (w.cols() == 0) return Projector::zero(static_cast<int>(d));
    }
    return Projector(w * w.adjoint());
}

}  // namespace vndisc
