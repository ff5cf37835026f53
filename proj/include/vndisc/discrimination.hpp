#pragma once

// Minimum-error discrimination of a von Neumann measurement (or unitary)
// against the computational-basis one: diamond-norm distances, the multi-shot
// scaling law driven by upsilon, perfect-discrimination query counts,
// explicit discriminator input states, and a direct variational oracle for
// the diamond norm used only for cross-checks.

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "vndisc/arc.hpp"
#include "vndisc/core.hpp"

namespace vndisc {

// Tolerance convention for the perfect-discrimination threshold N*upsilon
// >= pi; shared by every predicate below so query counts, saturation and
// witness construction can never disagree at the boundary.
inline constexpr double kPerfectSlack = 1e-9;

inline bool perfect_at(double upsilon_value, int shots) {
    return shots * upsilon_value >= kPi - kPerfectSlack;
}

struct QueryCount {
    bool unbounded;
    int n;  // meaningful only when !unbounded

    static QueryCount finite(int k) { return {false, k}; }
    static QueryCount never() { return {true, 0}; }
};

// ---------------------------------------------------------------------------
// Distances and query counts
// ---------------------------------------------------------------------------

inline double unitary_diamond_distance(const Unitary& u) {
    const double v = nu(u);
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - v * v));
}

inline double multishot_distance_from_upsilon(double upsilon_value, int shots) {
    if (shots < 1) throw BadShotCountError("multishot distance: N must be >= 1");
    if (perfect_at(upsilon_value, shots)) return 2.0;
    return 2.0 * std::sin(shots * upsilon_value / 2.0);
}

inline double measurement_diamond_distance(const UpsilonResult& r) {
    return multishot_distance_from_upsilon(r.upsilon, 1);
}

inline double measurement_diamond_distance(const Unitary& u,
                                           const OptimizerOptions& opts = {}) {
    return measurement_diamond_distance(upsilon(u, opts));
}

inline double multishot_distance(const Unitary& u, int shots,
                                 const OptimizerOptions& opts = {}) {
    if (shots < 1) throw BadShotCountError("multishot_distance: N must be >= 1");
    return multishot_distance_from_upsilon(upsilon(u, opts).upsilon, shots);
}

inline QueryCount queries_from_upsilon(double upsilon_value) {
    if (upsilon_value <= 1e-8) return QueryCount::never();
    int k = static_cast<int>(std::ceil((kPi - kPerfectSlack) / upsilon_value));
    if (k < 1) k = 1;
    // Snap against the shared predicate so the count is exactly the smallest
    // N that multishot_distance reports as saturated.
    while (k > 1 && perfect_at(upsilon_value, k - 1)) --k;
    while (!perfect_at(upsilon_value, k)) ++k;
    return QueryCount::finite(k);
}

inline QueryCount queries_for_perfect(const Unitary& u, const OptimizerOptions& opts = {}) {
    return queries_from_upsilon(upsilon(u, opts).upsilon);
}

inline double helstrom_probability(double distance) {
    if (!(distance >= 0.0 && distance <= 2.0))
        throw OutOfRangeError("helstrom_probability: distance must lie in [0, 2]");
    return 0.5 + distance / 4.0;
}

inline bool is_perfectly_distinguishable(const Unitary& u, int shots,
                                         const OptimizerOptions& opts = {}) {
    if (shots < 1) throw BadShotCountError("is_perfectly_distinguishable: N must be >= 1");
    return perfect_at(upsilon(u, opts).upsilon, shots);
}

struct DiscriminationReport {
    double unitary_distance;
    double measurement_distance;
    double helstrom_probability;
    double upsilon;
    QueryCount queries_for_perfect;
    int shots;
    double multishot_distance;
    bool upsilon_uncertain;  // optimizer hit its sweep cap somewhere
};

inline DiscriminationReport discrimination_report(const Unitary& u, int shots = 1,
                                                  const OptimizerOptions& opts = {}) {
    if (shots < 1) throw BadShotCountError("discrimination_report: N must be >= 1");
    const UpsilonResult r = upsilon(u, opts);
    const double md = multishot_distance_from_upsilon(r.upsilon, 1);
    return DiscriminationReport{unitary_diamond_distance(u),
                                md,
                                helstrom_probability(md),
                                r.upsilon,
                                queries_from_upsilon(r.upsilon),
                                shots,
                                multishot_distance_from_upsilon(r.upsilon, shots),
                                !r.converged};
}

// ---------------------------------------------------------------------------
// Discriminator states (Theorem-1-style inputs)
// ---------------------------------------------------------------------------

struct DiscriminatorState {
    enum class Kind { imperfect, perfect };

    DensityMatrix state;          // on (C^d)^{tensor N}
    std::vector<double> weights;  // convex weights of the tensor terms
    std::vector<int> low_copies;  // term m = rho_low^{k_m} (x) rho_high^{N-k_m}
    DensityMatrix rho_low;        // supported on the low extreme eigenspace
    DensityMatrix rho_high;
    Kind kind;
    Unitary e0;
    double upsilon_value;
    int shots;
    bool upsilon_uncertain;
};

namespace detail {

// A unit vector spanning a rank-1 projector: its largest column, normalized.
inline CVec projector_direction(const CMat& p) {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
        const double n = p.col(j).norm();
        if (n > best_norm) {
            best_norm = n;
            best = j;
        }
    }
    return p.col(best) / best_norm;
}

inline CMat psd_clip(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (a + a.adjoint().eval()));
    RVec lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

// Finds density matrices supported on the two extreme eigenspaces with equal
// computational-basis diagonals.  Fast path uses the pure extreme vectors
// when their moduli already match; otherwise alternating projections between
// the affine diagonal constraint and the two supported PSD cones.
inline std::pair<CMat, CMat> equal_diagonal_pair(const Projector& plow,
                                                 const Projector& phigh,
                                                 int max_iter = 10000,
                                                 double tol = 1e-8) {
    const int d = plow.dim();
    if (plow.rank() == 1 && phigh.rank() == 1) {
        const CVec v1 = projector_direction(plow.mat());
        const CVec vd = projector_direction(phigh.mat());
        bool moduli_match = true;
        for (int i = 0; i < d; ++i)
            if (std::fabs(std::abs(v1[i]) - std::abs(vd[i])) > 1e-6) moduli_match = false;
        if (moduli_match) return {v1 * v1.adjoint(), vd * vd.adjoint()};
    }

    CMat a = plow.mat() / std::max(1, plow.rank());
    CMat b = phigh.mat() / std::max(1, phigh.rank());
    for (int it = 0; it < max_iter; ++it) {
        // Affine step: common diagonal, total trace 1.
        RVec target = 0.5 * (a.diagonal().real() + b.diagonal().real());
        target.array() += (1.0 - target.sum()) / d;
        for (int i = 0; i < d; ++i) {
            a(i, i) = target[i];
            b(i, i) = target[i];
        }
        // Cone step: compress onto the eigenspaces, then clip to PSD.
        a = psd_clip(plow.mat() * a * plow.mat());
        b = psd_clip(phigh.mat() * b * phigh.mat());
        const double mismatch =
            (a.diagonal().real() - b.diagonal().real()).cwiseAbs().maxCoeff();
        const double off = std::fabs(a.trace().real() + b.trace().real() - 2.0);
        if (mismatch <= tol && off <= 2 * tol) {
            a /= a.trace().real();
            b /= b.trace().real();
            return {0.5 * (a + a.adjoint().eval()), 0.5 * (b + b.adjoint().eval())};
        }
    }
    throw SaddleInfeasibleError(
        "equal_diagonal_pair: no equal-diagonal eigenspace-supported pair within "
        "tolerance; the phase optimum is likely inaccurate");
}

// Convex weights over three unit-modulus points summing to zero, if any.
inline std::optional<std::array<double, 3>> zero_triangle(Complex a, Complex b, Complex c) {
    Eigen::Matrix3d m;
    m << a.real(), b.real(), c.real(), a.imag(), b.imag(), c.imag(), 1, 1, 1;
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::Vector3d p = lu.solve(Eigen::Vector3d(0, 0, 1));
    if (p.minCoeff() < -1e-10) return std::nullopt;
    std::array<double, 3> w{std::max(0.0, p[0]), std::max(0.0, p[1]), std::max(0.0, p[2])};
    const double s = w[0] + w[1] + w[2];
    for (double& x : w) x /= s;
    if (std::abs(w[0] * a + w[1] * b + w[2] * c) > 1e-9) return std::nullopt;
    return w;
}

// Last-resort single-copy witness: a density matrix with diag(rho U) = 0,
// found by alternating projections between the affine set {Hermitian, trace
// 1, diag(XU) = 0} and the PSD cone.  Such a rho exists whenever the
// minimized arc reaches pi (the eigenvalue hull of UE0 swallows the origin),
// but in general it is not a mixture of extreme-eigenspace states, e.g. for
// d = 3 with upsilon > pi at a single query.
inline std::optional<CMat> zero_diag_witness(const Unitary& u) {
    const int d = u.dim();
    // Hermitian constraint matrices: Re/Im of (XU)_ii = tr(X U e_i e_i^dag),
    // plus the trace.  Orthogonal projection onto the affine set goes through
    // the (pseudo-inverted) Gram matrix of the constraints.
    std::vector<CMat> basis;
    std::vector<double> rhs;
    for (int i = 0; i < d; ++i) {
        CMat m = CMat::Zero(d, d);
        m.col(i) = u.mat().col(i);  // U e_i e_i^dag
        basis.push_back(0.5 * (m + m.adjoint().eval()));
        rhs.push_back(0.0);
        basis.push_back((m - m.adjoint().eval()) / Complex(0, 2));
        rhs.push_back(0.0);
    }
    basis.push_back(CMat::Identity(d, d));
    rhs.push_back(1.0);
    const int nc = static_cast<int>(basis.size());
    Eigen::MatrixXd gram(nc, nc);
    for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) gram(a, b) = (basis[a] * basis[b]).trace().real();
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> gram_pinv(gram);

    CMat x = CMat::Identity(d, d) / d;
    for (int it = 0; it < 20000; ++it) {
        Eigen::VectorXd viol(nc);
        for (int a = 0; a < nc; ++a)
            viol[a] = (basis[a] * x).trace().real() - rhs[static_cast<size_t>(a)];
        const Eigen::VectorXd alpha = gram_pinv.solve(viol);
        for (int a = 0; a < nc; ++a) x -= alpha[a] * basis[a];
        x = psd_clip(x);
        if ((x * u.mat()).diagonal().cwiseAbs().maxCoeff() <= 1e-9 &&
            std::fabs(x.trace().real() - 1.0) <= 1e-9)
            break;
    }
    const double tr = x.trace().real();
    if (tr <= 0.5) return std::nullopt;
    x /= tr;
    x = 0.5 * (x + x.adjoint().eval());
    if ((x * u.mat()).diagonal().cwiseAbs().sum() > 1e-7) return std::nullopt;
    return x;
}

}  // namespace detail

// Input state that optimally tells P_U^{(x)N} from P_1^{(x)N}.  Imperfect
// regime: the half-half mixture of tensor powers of an equal-diagonal extreme
// pair.  Perfect regime: convex weights over terms rho_low^k (x)
// rho_high^(N-k) whose eigenvalue points lambda_low^k lambda_high^(N-k)
// combine to zero; candidates are scanned deterministically, preferring the
// two-term antipodal pair, then the (k = N, 1, 0) triangle, then remaining
// pairs and triangles in decreasing-k order.
inline DiscriminatorState discriminator_state(const Unitary& u, int shots,
                                              const OptimizerOptions& opts = {}) {
    if (shots < 1) throw BadShotCountError("discriminator_state: N must be >= 1");
    const int d = u.dim();
    double dims = 1;
    for (int k = 0; k < shots; ++k) dims *= d;
    if (dims > 1024)
        throw DimensionTooLargeError("discriminator_state: d^N exceeds 1024");

    const UpsilonResult r = upsilon(u, opts);
    if (r.upsilon <= 1e-8)
        throw SaddleInfeasibleError(
            "discriminator_state: upsilon is zero; the measurements coincide");

    auto assemble = [&](const CMat& lo, const CMat& hi, const std::vector<double>& w,
                        const std::vector<int>& klist, DiscriminatorState::Kind kind) {
        const Eigen::Index big = static_cast<Eigen::Index>(dims);
        CMat acc = CMat::Zero(big, big);
        for (size_t m = 0; m < w.size(); ++m) {
            CMat term = CMat::Identity(1, 1);
            for (int c = 0; c < shots; ++c) term = kron(term, c < klist[m] ? lo : hi);
            acc += w[m] * term;
        }
        acc = 0.5 * (acc + acc.adjoint().eval());
        return DiscriminatorState{DensityMatrix(acc), w,      klist,
                                  DensityMatrix(lo),  DensityMatrix(hi),
                                  kind,               r.e0,   r.upsilon,
                                  shots,              !r.converged};
    };

    if (!perfect_at(r.upsilon, shots)) {
        auto [lo, hi] = detail::equal_diagonal_pair(r.proj_low, r.proj_high);
        return assemble(lo, hi, {0.5, 0.5}, {shots, 0}, DiscriminatorState::Kind::imperfect);
    }

    // Perfect case.  Eigenvalue point of a term with k low factors:
    const auto point = [&](int k) {
        return std::polar(1.0, k * r.phase_low + (shots - k) * r.phase_high);
    };
    auto [lo, hi] = detail::equal_diagonal_pair(r.proj_low, r.proj_high);

    // Two-term antipodal pair (k_a, k_b); (N, 0) first, then decreasing.
    std::vector<std::pair<int, int>> pairs;
    pairs.emplace_back(shots, 0);
    for (int ka = shots; ka >= 0; --ka)
        for (int kb = ka - 1; kb >= 0; --kb)
            if (!(ka == shots && kb == 0)) pairs.emplace_back(ka, kb);
    for (auto [ka, kb] : pairs) {
        if (std::fabs(circ_dist(std::arg(point(ka)), std::arg(point(kb))) - kPi) <= 1e-9) {
            if (ka == shots && kb == 0 && shots >= 1) {
                // Emit in the canonical three-slot form with the middle term empty.
                return assemble(lo, hi, {0.5, 0.0, 0.5}, {shots, 1, 0},
                                DiscriminatorState::Kind::perfect);
            }
            return assemble(lo, hi, {0.5, 0.5}, {ka, kb}, DiscriminatorState::Kind::perfect);
        }
    }

    // Canonical triangle (k = N, 1, 0), then every triangle in decreasing-k order.
    std::vector<std::array<int, 3>> triangles;
    if (shots >= 2) triangles.push_back({shots, 1, 0});
    for (int ka = shots; ka >= 2; --ka)
        for (int kb = ka - 1; kb >= 1; --kb)
            for (int kc = kb - 1; kc >= 0; --kc)
                if (!(ka == shots && kb == 1 && kc == 0)) triangles.push_back({ka, kb, kc});
    for (const auto& t : triangles) {
        if (auto w = detail::zero_triangle(point(t[0]), point(t[1]), point(t[2]))) {
            return assemble(lo, hi, {(*w)[0], (*w)[1], (*w)[2]}, {t[0], t[1], t[2]},
                            DiscriminatorState::Kind::perfect);
        }
    }

    // Extreme-pair combinations cannot reach zero (possible when upsilon
    // exceeds pi); fall back to a feasibility solve for diag(sigma U) = 0.
    if (auto sigma = detail::zero_diag_witness(u)) {
        return assemble(*sigma, *sigma, {1.0}, {shots}, DiscriminatorState::Kind::perfect);
    }
    throw NoConvexCombinationError(
        "discriminator_state: no convex combination of eigenvalue points reaches zero");
}

// Residual report: perfect case, the l1 norm of diag(rho0 (UE0)^{(x)N}) (zero
// means unambiguous labels); imperfect case, the gap between |tr(rho0
// (UE0)^{(x)N})| and cos(N*upsilon/2).  Works factor-by-factor, so no large
// tensor product is ever materialized.
inline double verify_discriminator(const Unitary& u, int shots, const DiscriminatorState& s) {
    if (shots != s.shots)
        throw DimensionMismatchError("verify_discriminator: shot count differs from state");
    const int d = u.dim();
    double dims = 1;
    for (int k = 0; k < shots; ++k) dims *= d;
    if (s.state.dim() != static_cast<int>(dims))
        throw DimensionMismatchError("verify_discriminator: state dimension mismatch");
    const CMat v = u.mat() * s.e0.mat();

    // diag(A (x) B) = diag(A) (x) diag(B); accumulate the weighted diagonal.
    const CVec diag_lo = (s.rho_low.mat() * v).diagonal();
    const CVec diag_hi = (s.rho_high.mat() * v).diagonal();
    CVec total = CVec::Zero(static_cast<Eigen::Index>(dims));
    for (size_t m = 0; m < s.weights.size(); ++m) {
        CVec term = CVec::Ones(1);
        for (int c = 0; c < shots; ++c) {
            const CVec& f = (c < s.low_copies[m]) ? diag_lo : diag_hi;
            CVec next(term.size() * f.size());
            for (Eigen::Index i = 0; i < term.size(); ++i)
                next.segment(i * f.size(), f.size()) = term[i] * f;
            term = std::move(next);
        }
        total += s.weights[m] * term;
    }
    if (s.kind == DiscriminatorState::Kind::perfect) return total.cwiseAbs().sum();
    return std::fabs(std::abs(total.sum()) - std::cos(shots * s.upsilon_value / 2.0));
}

// ---------------------------------------------------------------------------
// Direct diamond-norm oracle (variational lower bound)
// ---------------------------------------------------------------------------

enum class ChannelKind { unitary_channel, measurement_channel };

namespace detail {

inline CMat hermitian_sign(const CMat& z) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (z + z.adjoint().eval()));
    RVec s(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        s[i] = es.eigenvalues()[i] >= 0.0 ? 1.0 : -1.0;
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

inline CVec top_eigenvector(const CMat& h) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint().eval()));
    return es.eigenvectors().col(es.eigenvalues().size() - 1);
}

// || x x^dag - y y^dag ||_1 in closed form.
inline double rank2_trace_norm(const CVec& x, const CVec& y) {
    const double p = x.squaredNorm(), q = y.squaredNorm();
    const double c = std::abs(x.dot(y));  // Eigen's dot conjugates the left factor
    return std::sqrt(std::max(0.0, (p + q) * (p + q) - 4.0 * c * c));
}

}  // namespace detail

// Maximizes ||((Phi_U - Phi_1) (x) 1)(|psi><psi|)||_1 over pure bipartite
// inputs by alternating the trace-norm witness and the input state; each
// start ascends monotonically, starts are reduced in fixed order.  Always a
// lower bound on the diamond distance.
inline double direct_diamond_oracle(const Unitary& u, ChannelKind kind, int shots = 1,
                                    int starts = 8,
                                    std::uint64_t seed = 0x13198A2E03707344ull) {
    if (shots < 1) throw BadShotCountError("direct_diamond_oracle: shots must be >= 1");
    const int d = u.dim();
    double dims = 1;
    for (int k = 0; k < shots; ++k) dims *= d;
    if (dims > 16) throw DimensionTooLargeError("direct_diamond_oracle: d^shots > 16");
    const Eigen::Index big = static_cast<Eigen::Index>(dims);

    const CMat un = kron_pow(u.mat(), shots);
    const Eigen::Index full = big * big;  // system (x) equal-size ancilla
    const CMat uext = kron(un, CMat::Identity(big, big));

    // With the optimal witness W = sign(Z(psi)) plugged in, tr(W Z) equals
    // the trace-norm objective at psi, and the W-linearized problem over psi
    // is a top-eigenvector computation; alternating the two never decreases
    // the objective.
    auto ascend = [&](CVec psi) {
        double val = 0.0;
        for (int it = 0; it < 120; ++it) {
            CMat kmat = CMat::Zero(full, full);
            double cur = 0.0;
            if (kind == ChannelKind::unitary_channel) {
                const CVec upsi = uext * psi;
                const CMat z = upsi * upsi.adjoint() - psi * psi.adjoint();
                const CMat w = detail::hermitian_sign(z);
                cur = (w * z).trace().real();
                kmat = uext.adjoint() * w * uext - w;
            } else {
                for (Eigen::Index i = 0; i < big; ++i) {
                    // Ancilla blocks x_i = (<i| (x) 1)psi and y_i with <i|U^dag.
                    CVec x(big), y(big);
                    for (Eigen::Index a = 0; a < big; ++a) {
                        x[a] = psi[i * big + a];
                        Complex acc = 0.0;
                        for (Eigen::Index r = 0; r < big; ++r)
                            acc += std::conj(un(r, i)) * psi[r * big + a];
                        y[a] = acc;
                    }
                    const CMat z = x * x.adjoint() - y * y.adjoint();
                    const CMat w = detail::hermitian_sign(z);
                    cur += (w * z).trace().real();
                    CVec ei = CVec::Zero(big);
                    ei[i] = 1.0;
                    const CVec ui = un * ei;
                    kmat += kron(CMat(ei * ei.adjoint()), w) -
                            kron(CMat(ui * ui.adjoint()), w);
                }
            }
            if (cur <= val + 1e-10 && it > 0) return std::max(val, cur);
            val = std::max(val, cur);
            psi = detail::top_eigenvector(kmat);
        }
        return val;
    };

    double best = 0.0;
    for (int s = 0; s <= starts; ++s) {
        CVec psi;
        if (s == 0) {
            psi = CVec::Zero(full);  // maximally entangled start
            for (Eigen::Index i = 0; i < big; ++i)
                psi[i * big + i] = 1.0 / std::sqrt(static_cast<double>(big));
        } else {
            psi = random_pure(static_cast<int>(full),
                              split_seed(seed, static_cast<std::uint64_t>(s)));
        }
        best = std::max(best, ascend(std::move(psi)));
    }
    return best;
}

}  // namespace vndisc
