#pragma once

// Unambiguous discrimination of the measure-in-basis-U channel against the
// computational-basis one: entanglement-assisted optimum 1 - min_rho sum_i
// |<i|rho U|i>|, the entanglement-free subset optimum, qubit closed forms,
// the Jaeger-Shimony two-state bound, and parallel (tensor-power) variants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "arc.hpp"
#include "core.hpp"
#include "discrimination.hpp"
#include "errors.hpp"

namespace vndisc {

// Subset pair (Gamma, Delta) of outcome labels: a final result in Gamma
// certifies the identity basis, one in Delta certifies U.  Indices are
// 0-based in code and serialized 1-based at the CLI boundary.
struct SubsetStrategy {
    std::vector<int> gamma;
    std::vector<int> delta;
    double value;
    DensityMatrix input;
};

// Three-outcome POVM on the ancilla conditioned on observing label i:
// t_identity concludes the identity basis, t_unitary concludes U, and
// t_inconclusive absorbs the rest.  gamma is the common scale from the
// largest-equal-pair rule.
struct LabelEffects {
    CMat t_identity;
    CMat t_unitary;
    CMat t_inconclusive;
    double gamma;
};

struct UnambiguousResult {
    double probability;
    bool assisted;
    DensityMatrix optimal_input;
    std::optional<SubsetStrategy> strategy;  // unassisted route only
    std::vector<LabelEffects> effects;       // assisted route only
    std::vector<double> overlap_c;           // per-label |<x_i|y_i>|
    std::vector<double> prior_eta;           // per-label p_i / (p_i + q_i)
    std::vector<double> p_label;             // label weight under the identity
    std::vector<double> q_label;             // label weight under U
    bool converged;
    double gap_estimate;  // |probability - closed-form certificate|
};

// Two pure states with overlap c and priors (eta, 1-eta): optimal unambiguous
// success probability, piecewise in eta (conclusive projections saturate at
// the edges, the symmetric branch rules the middle band).
inline double jaeger_shimony(double c, double eta) {
    if (!(c >= 0.0 && c <= 1.0)) throw OutOfRangeError("jaeger_shimony: c must lie in [0,1]");
    if (!(eta > 0.0 && eta < 1.0))
        throw OutOfRangeError("jaeger_shimony: eta must lie in (0,1)");
    const double c2 = c * c;
    if (eta < c2 / (1.0 + c2)) return 1.0 - eta - (1.0 - eta) * c2;
    if (eta <= 1.0 / (1.0 + c2)) return 1.0 - 2.0 * c * std::sqrt(eta * (1.0 - eta));
    return 1.0 - (1.0 - eta) - eta * c2;
}

// Closed form 1 - sqrt(1 - D^2/4) with D the single-query measurement
// distance; algebraically 1 - cos(upsilon/2) below the perfect threshold.
inline double entassisted_closed_from_upsilon(double ups) {
    const double dist = multishot_distance_from_upsilon(ups, 1);
    return 1.0 - std::sqrt(std::max(0.0, 1.0 - 0.25 * dist * dist));
}

inline double unambiguous_entassisted_closed(const Unitary& u,
                                             const OptimizerOptions& opts = {}) {
    return entassisted_closed_from_upsilon(upsilon(u, opts).upsilon);
}

namespace detail {

// Euclidean projection onto the probability simplex.
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, thr = 0.0;
    for (int k = 0; k < n; ++k) {
        css += u[static_cast<size_t>(k)];
        const double t = (css - 1.0) / (k + 1);
        if (u[static_cast<size_t>(k)] > t) thr = t;
    }
    return (v.array() - thr).cwiseMax(0.0).matrix();
}

// Nearest density matrix in Frobenius distance: clip the spectrum onto the
// simplex in the eigenbasis of the Hermitian part.
inline CMat density_project(const CMat& h) {
    const CMat herm = 0.5 * (h + h.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<CMat> es(herm);
    const Eigen::VectorXd lam = project_simplex(es.eigenvalues());
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

inline double sum_abs_diag(const CMat& rho, const CMat& u) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) s += std::abs((rho.row(i) * u.col(i)).value());
    return s;
}

// Projected subgradient descent for f(rho) = sum_i |(rho U)_ii| with |z|
// smoothed as sqrt(|z|^2 + eps^2); diminishing steps 0.5/sqrt(k), best
// iterate kept (the start itself counts as iterate zero).
inline std::pair<CMat, double> minimize_sum_abs_diag(const CMat& u, const CMat& start,
                                                     int iters) {
    constexpr double kStep = 0.5;
    constexpr double kEps = 1e-9;
    const Eigen::Index d = u.rows();
    CMat rho = start, best = start;
    double fbest = sum_abs_diag(start, u);
    for (int k = 1; k <= iters; ++k) {
        CVec w(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const Complex z = (rho.row(i) * u.col(i)).value();
            w[i] = z / std::sqrt(std::norm(z) + kEps * kEps);
        }
        const CMat s = u * w.conjugate().asDiagonal();
        const CMat grad = 0.5 * (s + s.adjoint().eval());
        rho = density_project(rho - (kStep / std::sqrt(static_cast<double>(k))) * grad);
        const double f = sum_abs_diag(rho, u);
        if (f < fbest) {
            fbest = f;
            best = rho;
        }
    }
    return {best, fbest};
}

// Conditional ancilla POVM for label i.  T_identity annihilates the post-U
// state y, T_unitary annihilates the post-identity state x, both scaled by
// the largest equal gamma keeping the inconclusive effect PSD (bisection).
inline LabelEffects label_effects(const std::optional<CVec>& x, const std::optional<CVec>& y,
                                  Eigen::Index d) {
    const CMat id = CMat::Identity(d, d);
    if (!x && !y) return {CMat::Zero(d, d), CMat::Zero(d, d), id, 0.0};
    if (!y) return {id, CMat::Zero(d, d), CMat::Zero(d, d), 1.0};
    if (!x) return {CMat::Zero(d, d), id, CMat::Zero(d, d), 1.0};
    const CMat base1 = id - (*y) * y->adjoint();
    const CMat base2 = id - (*x) * x->adjoint();
    const auto feasible = [&](double g) {
        Eigen::SelfAdjointEigenSolver<CMat> es(id - g * base1 - g * base2);
        return es.eigenvalues().minCoeff() >= -1e-12;
    };
    double lo = 0.0, hi = 1.0;
    if (feasible(hi)) {
        lo = hi;
    } else {
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? lo : hi) = mid;
        }
    }
    return {lo * base1, lo * base2, id - lo * base1 - lo * base2, lo};
}

// Assisted result assembly from the minimizing rho = X X^dag: purification
// X = rho^{1/2}, conditional states x_i = X^T|i>/sqrt(p_i) and y_i =
// X^T conj(U)|i>/sqrt(q_i), per-label effects and diagnostics.
inline UnambiguousResult assemble_assisted(const CMat& umat, const CMat& rho, double fbest,
                                           double closed) {
    const Eigen::Index d = umat.rows();
    Eigen::SelfAdjointEigenSolver<CMat> es(rho);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const CMat x = es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    const CMat xt = x.transpose();
    const CMat yt = xt * umat.conjugate();
    const CMat uru = umat.adjoint() * rho * umat;

    UnambiguousResult out{std::clamp(1.0 - fbest, 0.0, 1.0),
                          true,
                          DensityMatrix(rho),
                          std::nullopt,
                          {},
                          {},
                          {},
                          {},
                          {},
                          false,
                          std::fabs((1.0 - fbest) - closed)};
    out.converged = out.gap_estimate <= 1e-6;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double p = std::max(0.0, rho(i, i).real());
        const double q = std::max(0.0, uru(i, i).real());
        std::optional<CVec> xi, yi;
        if (p > 1e-14) xi = CVec(xt.col(i) / std::sqrt(p));
        if (q > 1e-14) yi = CVec(yt.col(i) / std::sqrt(q));
        const double c =
            (xi && yi) ? std::min(1.0, std::abs((rho.row(i) * umat.col(i)).value()) /
                                           std::sqrt(p * q))
                       : 0.0;
        out.effects.push_back(label_effects(xi, yi, d));
        out.overlap_c.push_back(c);
        out.prior_eta.push_back(p + q > 1e-14 ? p / (p + q) : 0.5);
        out.p_label.push_back(p);
        out.q_label.push_back(q);
    }
    return out;
}

// Multi-start driver.  Extra structured starts go first, then the maximally
// mixed state, then random densities up to eight starts total; a start whose
// value already matches the closed-form certificate short-circuits the rest.
inline UnambiguousResult entassisted_core(const Unitary& u, std::vector<CMat> starts,
                                          double closed, std::uint64_t seed) {
    constexpr int kStarts = 8;
    constexpr int kIters = 10000;
    const int d = u.dim();
    starts.push_back(CMat::Identity(d, d) / static_cast<double>(d));
    for (int s = static_cast<int>(starts.size()); s < kStarts; ++s)
        starts.push_back(random_density(d, split_seed(seed, 7000 + static_cast<std::uint64_t>(s)))
                             .mat());

    CMat best = starts.front();
    double fbest = sum_abs_diag(best, u.mat());
    for (const CMat& s0 : starts) {
        if (std::fabs((1.0 - fbest) - closed) <= 1e-9) break;
        auto [rho, f] = minimize_sum_abs_diag(u.mat(), s0, kIters);
        if (f < fbest) {
            fbest = f;
            best = rho;
        }
    }
    return assemble_assisted(u.mat(), best, fbest, closed);
}

// Structured starts for the single-copy problem: the equal-diagonal extreme
// mixture (optimal below the perfect threshold) and, past it, a state with
// vanishing diagonal of rho U.
inline std::vector<CMat> structured_starts(const Unitary& u, const UpsilonResult& r) {
    std::vector<CMat> starts;
    try {
        auto [lo, hi] = equal_diagonal_pair(r.proj_low, r.proj_high);
        starts.push_back(0.5 * (lo + hi));
    } catch (const SaddleInfeasibleError&) {
        const CMat mix = r.proj_low.mat() / static_cast<double>(std::max(1, r.proj_low.rank())) +
                         r.proj_high.mat() / static_cast<double>(std::max(1, r.proj_high.rank()));
        starts.push_back(0.5 * mix);
    }
    if (perfect_at(r.upsilon, 1)) {
        if (auto w = zero_diag_witness(u)) starts.push_back(*w);
    }
    return starts;
}

// Candidate value of the subset pair (Gamma, Delta): half the operator norm
// of P (Pi_Gamma + Theta_Delta) P on the admissible subspace, together with
// the compressed operator and its projector.  The admissible subspace is the
// intersection of span{U|i> : i not in Gamma} and span{|j> : j not in Delta}.
struct SubsetCandidate {
    double value;
    CMat compressed;
    CMat projector;
};

inline SubsetCandidate subset_candidate(const Unitary& u, const std::vector<int>& gamma,
                                        const std::vector<int>& delta) {
    const int d = u.dim();
    std::vector<bool> in_gamma(static_cast<size_t>(d), false),
        in_delta(static_cast<size_t>(d), false);
    for (int i : gamma) in_gamma[static_cast<size_t>(i)] = true;
    for (int j : delta) in_delta[static_cast<size_t>(j)] = true;

    std::vector<int> gamma_c, delta_c;
    for (int i = 0; i < d; ++i) {
        if (!in_gamma[static_cast<size_t>(i)]) gamma_c.push_back(i);
        if (!in_delta[static_cast<size_t>(i)]) delta_c.push_back(i);
    }
    const CMat zero = CMat::Zero(d, d);
    if (gamma_c.empty() || delta_c.empty()) return {0.0, zero, zero};

    CMat span_u(d, static_cast<Eigen::Index>(gamma_c.size()));
    for (size_t k = 0; k < gamma_c.size(); ++k)
        span_u.col(static_cast<Eigen::Index>(k)) = u.mat().col(gamma_c[k]);
    CMat span_e = CMat::Zero(d, static_cast<Eigen::Index>(delta_c.size()));
    for (size_t k = 0; k < delta_c.size(); ++k)
        span_e(delta_c[k], static_cast<Eigen::Index>(k)) = 1.0;

    const CMat pp = subspace_intersection(span_u, span_e).mat();
    if (pp.norm() < 1e-12) return {0.0, zero, zero};

    CMat score = CMat::Zero(d, d);
    for (int i : gamma) score(i, i) += 1.0;
    for (int j : delta) score += u.mat().col(j) * u.mat().col(j).adjoint();
    CMat m = pp * score * pp;
    m = 0.5 * (m + m.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    return {0.5 * std::max(0.0, es.eigenvalues().maxCoeff()), m, pp};
}

inline bool lexicographic_before(const std::vector<int>& ga, const std::vector<int>& da,
                                 const std::vector<int>& gb, const std::vector<int>& db) {
    if (ga != gb) return ga < gb;
    return da < db;
}

}  // namespace detail

// Entanglement-assisted optimum 1 - min_rho sum_i |<i|rho U|i>|.  The
// minimization is a projected subgradient descent; the closed form from the
// measurement distance certifies the result (gap_estimate), so a convergence
// shortfall is reported through the flag rather than an exception.
inline UnambiguousResult unambiguous_entassisted(const Unitary& u,
                                                 const OptimizerOptions& opts = {}) {
    const UpsilonResult r = upsilon(u, opts);
    const double closed = entassisted_closed_from_upsilon(r.upsilon);
    return detail::entassisted_core(u, detail::structured_starts(u, r), closed, opts.seed);
}

// Entanglement-free optimum over disjoint certifying subsets: exhaustive scan
// of all 3^d assignments (each label joins Gamma, Delta, or neither), ties
// broken by the lexicographically smallest (Gamma, Delta).
inline UnambiguousResult unambiguous_no_ent(const Unitary& u) {
    const int d = u.dim();
    if (d > 12)
        throw DimensionTooLargeError("unambiguous_no_ent: subset enumeration needs dim <= 12");

    double best_value = -1.0;
    std::vector<int> best_gamma, best_delta;
    CMat best_m = CMat::Zero(d, d);
    std::uint64_t total = 1;
    for (int i = 0; i < d; ++i) total *= 3;
    for (std::uint64_t code = 0; code < total; ++code) {
        std::vector<int> gamma, delta;
        std::uint64_t rest = code;
        for (int i = 0; i < d; ++i, rest /= 3) {
            const int digit = static_cast<int>(rest % 3);
            if (digit == 1) gamma.push_back(i);
            if (digit == 2) delta.push_back(i);
        }
        const auto cand = detail::subset_candidate(u, gamma, delta);
        const bool better = cand.value > best_value + 1e-12;
        const bool tie = !better && cand.value > best_value - 1e-12 &&
                         detail::lexicographic_before(gamma, delta, best_gamma, best_delta);
        if (better || tie) {
            best_value = cand.value;
            best_gamma = gamma;
            best_delta = delta;
            best_m = cand.compressed;
        }
    }

    CMat sigma;
    if (best_value <= 1e-15) {
        sigma = CMat::Zero(d, d);
        sigma(0, 0) = 1.0;
    } else {
        Eigen::SelfAdjointEigenSolver<CMat> es(best_m);
        Eigen::Index top;
        es.eigenvalues().maxCoeff(&top);
        const CVec v = es.eigenvectors().col(top);
        sigma = v * v.adjoint();
    }
    const double value = std::clamp(best_value, 0.0, 1.0);
    return UnambiguousResult{value,
                             false,
                             DensityMatrix(sigma),
                             SubsetStrategy{best_gamma, best_delta, value, DensityMatrix(sigma)},
                             {},
                             {},
                             {},
                             {},
                             {},
                             true,
                             0.0};
}

// Pseudo-inverse route to the same subset value: with G = Pi_{Delta^c} +
// Theta_{Gamma^c}, evaluates 2 || Pi_{Delta^c} G^+ Theta_Delta G^+
// Pi_{Delta^c} + Theta_{Gamma^c} G^+ Pi_Gamma G^+ Theta_{Gamma^c} ||.  This
// agrees exactly with half the compressed norm: the intersection projector
// is 2 Pi_{Delta^c} G^+ Theta_{Gamma^c}, and its factor 2 squares against
// the 1/2 prefactor.
inline double unambiguous_no_ent_pinv(const Unitary& u, const std::vector<int>& gamma,
                                      const std::vector<int>& delta) {
    const int d = u.dim();
    auto check = [&](const std::vector<int>& s) {
        for (int i : s)
            if (i < 0 || i >= d)
                throw BadParamsError("unambiguous_no_ent_pinv: subset index out of range");
    };
    check(gamma);
    check(delta);
    for (int i : gamma)
        for (int j : delta)
            if (i == j)
                throw BadParamsError("unambiguous_no_ent_pinv: subsets must be disjoint");

    std::vector<bool> in_gamma(static_cast<size_t>(d), false),
        in_delta(static_cast<size_t>(d), false);
    for (int i : gamma) in_gamma[static_cast<size_t>(i)] = true;
    for (int j : delta) in_delta[static_cast<size_t>(j)] = true;

    CMat pi_gamma = CMat::Zero(d, d), pi_delta_c = CMat::Zero(d, d);
    CMat theta_delta = CMat::Zero(d, d), theta_gamma_c = CMat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const CMat proj = u.mat().col(i) * u.mat().col(i).adjoint();
        if (in_gamma[static_cast<size_t>(i)]) pi_gamma(i, i) = 1.0;
        else theta_gamma_c += proj;
        if (in_delta[static_cast<size_t>(i)]) theta_delta += proj;
        else pi_delta_c(i, i) = 1.0;
    }

    Eigen::SelfAdjointEigenSolver<CMat> es(pi_delta_c + theta_gamma_c);
    Eigen::VectorXd inv = es.eigenvalues();
    for (Eigen::Index k = 0; k < inv.size(); ++k) {
        const double lam = es.eigenvalues()[k];
        if (lam > 1e-12 && lam < 1e-8)
            throw SingularPencilError(
                "unambiguous_no_ent_pinv: pencil eigenvalue inside the pseudo-inverse "
                "tolerance band");
        inv[k] = lam >= 1e-8 ? 1.0 / lam : 0.0;
    }
    const CMat gpinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
    CMat total = pi_delta_c * gpinv * theta_delta * gpinv * pi_delta_c +
                 theta_gamma_c * gpinv * pi_gamma * gpinv * theta_gamma_c;
    total = 0.5 * (total + total.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<CMat> norm_es(total);
    return 2.0 * std::max(0.0, norm_es.eigenvalues().maxCoeff());
}

// Qubit closed forms.  Unassisted is discontinuous at |U_12|^2 = 1 (a swap
// admits perfect certification both ways); assisted is 1 - |U_11|.
inline double qubit_unambiguous(const Unitary& u, bool assisted) {
    if (u.dim() != 2) throw DimensionMismatchError("qubit_unambiguous: dim must be 2");
    if (assisted) return 1.0 - std::abs(u.mat()(0, 0));
    const double off = std::norm(u.mat()(0, 1));
    if (std::fabs(off - 1.0) <= 1e-12) return 1.0;
    return 0.5 * off;
}

// N parallel queries: the single-shot machinery applied to U^(x)N.  The
// assisted route reuses the single-copy geometry (discriminator state as the
// structured start, multishot law as the certificate) instead of a fresh
// d^N-dimensional phase optimization.
inline UnambiguousResult unambiguous_parallel(const Unitary& u, int n, bool assisted,
                                              const OptimizerOptions& opts = {}) {
    if (n < 1) throw BadShotCountError("unambiguous_parallel: N must be >= 1");
    const int d = u.dim();
    double dims = 1;
    for (int k = 0; k < n; ++k) dims *= d;
    if (dims > 16) throw DimensionTooLargeError("unambiguous_parallel: d^N exceeds 16");

    const Unitary big(kron_pow(u.mat(), n));
    if (!assisted) return unambiguous_no_ent(big);

    const UpsilonResult r = upsilon(u, opts);
    const double dist = multishot_distance_from_upsilon(r.upsilon, n);
    const double closed = 1.0 - std::sqrt(std::max(0.0, 1.0 - 0.25 * dist * dist));
    std::vector<CMat> starts;
    if (r.upsilon > 1e-8) starts.push_back(discriminator_state(u, n, opts).state.mat());
    return detail::entassisted_core(big, std::move(starts), closed, opts.seed);
}

}  // namespace vndisc
