#pragma once

// Spectral-arc geometry of a unitary: the shortest circular arc containing
// all eigenphases (theta), the distance from the origin to the convex hull of
// the eigenvalues (nu), and the minimization of theta over right diagonal
// phase factors (upsilon).  The optimizer is a multi-start cyclic coordinate
// descent; a brute-force grid oracle is provided for cross-checks in low
// dimension.

#include <cstdint>
#include <utility>
#include <vector>

#include "vndisc/core.hpp"

namespace vndisc {

struct ArcResult {
    double theta;        // arc length in [0, 2*pi)
    double start_phase;  // arc start in [0, 2*pi); ties pick the smallest
    RVec eigenphases;    // sorted ascending
};

namespace detail {

// Arc length of the shortest closed arc covering the given phases
// (complement of the largest circular gap).  Phases need not be sorted.
inline double arc_length_of_phases(std::vector<double> ph) {
    const size_t n = ph.size();
    if (n <= 1) return 0.0;
    std::sort(ph.begin(), ph.end());
    double gmax = kTau - ph[n - 1] + ph[0];
    for (size_t i = 0; i + 1 < n; ++i) gmax = std::max(gmax, ph[i + 1] - ph[i]);
    return kTau - gmax;
}

inline std::vector<double> eigenphases_only(const CMat& m) {
    Eigen::ComplexSchur<CMat> schur(m, /*computeU=*/false);
    if (schur.info() != Eigen::Success)
        throw ConvergenceError("eigenphases: Schur iteration failed");
    std::vector<double> ph(static_cast<size_t>(m.rows()));
    for (Eigen::Index k = 0; k < m.rows(); ++k)
        ph[static_cast<size_t>(k)] = wrap_phase(std::arg(schur.matrixT()(k, k)));
    return ph;
}

}  // namespace detail

inline ArcResult theta(const Unitary& u) {
    const EigenSystem sys = eig_unitary(u);
    const int d = u.dim();
    ArcResult arc;
    arc.eigenphases = sys.phases;
    if (d == 1) {
        arc.theta = 0.0;
        arc.start_phase = sys.phases[0];
        return arc;
    }
    // Gap i sits after sorted phase i; the wrap-around gap is index d-1.
    std::vector<double> gap(d);
    for (int i = 0; i + 1 < d; ++i) gap[i] = sys.phases[i + 1] - sys.phases[i];
    gap[d - 1] = kTau - sys.phases[d - 1] + sys.phases[0];
    double gmax = *std::max_element(gap.begin(), gap.end());
    double start = kTau;  // larger than any wrapped phase
    for (int i = 0; i < d; ++i) {
        if (gmax - gap[i] <= 1e-12) {
            const double s = sys.phases[(i + 1) % d];
            start = std::min(start, s);
        }
    }
    arc.theta = kTau - gmax;
    arc.start_phase = start;
    return arc;
}

inline double nu_from_theta(double theta_value) {
    return (theta_value < kPi) ? std::cos(theta_value / 2.0) : 0.0;
}

// Distance from the origin to the convex hull of the eigenvalues.  Equals
// cos(theta/2) for arcs shorter than pi and 0 once the hull swallows the
// origin.
inline double nu(const Unitary& u) { return nu_from_theta(theta(u).theta); }

// ---------------------------------------------------------------------------
// Upsilon: min over diagonal unitaries E of theta(U * E)
// ---------------------------------------------------------------------------

struct OptimizerOptions {
    int starts = 16;        // random multi-starts in addition to the identity start
    int max_sweeps = 500;   // coordinate sweeps per start
    double tol = 1e-10;     // stop once a full sweep improves by less than this
    std::uint64_t seed = 0x243F6A8885A308D3ull;
    int scan_points = 48;   // coarse circle scan per coordinate update
};

struct UpsilonResult {
    double upsilon;      // theta(U * e0)
    Unitary e0;          // minimizing diagonal unitary (first phase gauged to 0)
    double phase_low;    // arc start of U * e0
    double phase_high;   // arc end, wrapped into [0, 2*pi)
    Projector proj_low;  // spectral projector onto the low-end phase cluster
    Projector proj_high;
    std::vector<std::pair<int, double>> trace;  // (sweep, objective) of the winner
    bool converged;
};

namespace detail {

inline double arc_objective(const CMat& base, const std::vector<double>& phi) {
    CMat m = base;
    for (size_t j = 0; j < phi.size(); ++j)
        m.col(static_cast<Eigen::Index>(j)) *= std::polar(1.0, phi[j]);
    return arc_length_of_phases(eigenphases_only(m));
}

// Minimizes the objective along one phase coordinate: coarse scan over
// [center - halfwidth, center + halfwidth], then golden-section refinement
// around the best grid point.  The objective is piecewise smooth with kinks
// where the covering arc swaps endpoints, so derivative-free refinement is
// the safe choice.  Never returns a worse point than the current one.
inline void refine_coordinate(const CMat& base, std::vector<double>& phi, size_t j,
                              double center, double halfwidth, int scan_points) {
    const double step = 2.0 * halfwidth / scan_points;
    double best_phi = phi[j];
    double best_val = arc_objective(base, phi);
    for (int k = 0; k < scan_points; ++k) {
        phi[j] = center - halfwidth + k * step;
        const double v = arc_objective(base, phi);
        if (v < best_val) {
            best_val = v;
            best_phi = phi[j];
        }
    }
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = best_phi - step, hi = best_phi + step;
    if (hi - lo <= 1e-12) {
        phi[j] = best_phi;
        return;
    }
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    phi[j] = x1;
    double f1 = arc_objective(base, phi);
    phi[j] = x2;
    double f2 = arc_objective(base, phi);
    while (hi - lo > 1e-12) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            phi[j] = x1;
            f1 = arc_objective(base, phi);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            phi[j] = x2;
            f2 = arc_objective(base, phi);
        }
    }
    const double mid = wrap_phase(0.5 * (lo + hi));
    phi[j] = mid;
    if (arc_objective(base, phi) > best_val) phi[j] = best_phi;  // keep the scan winner
}

}  // namespace detail

inline UpsilonResult upsilon(const Unitary& u, const OptimizerOptions& opts = {}) {
    const int d = u.dim();

    // Finish the result from an optimized phase vector: recompute the arc of
    // U*E0 exactly and read off the extreme-phase spectral projectors.
    auto finish = [&](const std::vector<double>& phi, std::vector<std::pair<int, double>> tr,
                      bool conv) {
        CMat e = CMat::Zero(d, d);
        for (int j = 0; j < d; ++j) e(j, j) = std::polar(1.0, phi[static_cast<size_t>(j)]);
        const Unitary e0(e);
        const Unitary ue(u.mat() * e);
        const EigenSystem sys = eig_unitary(ue);
        std::vector<double> ph(sys.phases.data(), sys.phases.data() + d);
        ArcResult arc = theta(ue);
        const double lo = arc.start_phase;
        const double hi = wrap_phase(arc.start_phase + arc.theta);
        return UpsilonResult{arc.theta,
                             e0,
                             lo,
                             hi,
                             phase_cluster_projector(sys, lo),
                             phase_cluster_projector(sys, hi),
                             std::move(tr),
                             conv};
    };

    if (d == 1 || max_abs(u.mat() - dephase(u.mat())) <= 1e-12) {
        // Diagonal input: align every entry onto the first one.  The first
        // phase stays gauged to 0; a common global rotation costs nothing.
        std::vector<double> phi(static_cast<size_t>(d), 0.0);
        const double a0 = std::arg(u.mat()(0, 0));
        for (int j = 1; j < d; ++j)
            phi[static_cast<size_t>(j)] = a0 - std::arg(u.mat()(j, j));
        return finish(phi, {{0, 0.0}}, true);
    }

    std::vector<double> best_phi;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, double>> best_trace;
    bool best_conv = false;

    for (int s = 0; s <= opts.starts; ++s) {
        std::vector<double> phi(static_cast<size_t>(d), 0.0);
        if (s > 0) {
            std::mt19937_64 gen(split_seed(opts.seed, static_cast<std::uint64_t>(s)));
            std::uniform_real_distribution<double> u01(0.0, kTau);
            for (int j = 1; j < d; ++j) phi[static_cast<size_t>(j)] = u01(gen);
        }
        std::vector<std::pair<int, double>> tr;
        double prev = detail::arc_objective(u.mat(), phi);
        tr.emplace_back(0, prev);
        bool conv = false;
        for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
            for (size_t j = 1; j < phi.size(); ++j)
                detail::refine_coordinate(u.mat(), phi, j, kPi, kPi, opts.scan_points);
            const double cur = detail::arc_objective(u.mat(), phi);
            tr.emplace_back(sweep, cur);
            if (prev - cur < opts.tol) {
                conv = true;
                break;
            }
            prev = cur;
        }
        // Polish with shrinking local windows: the coordinate-wise stall
        // level of the main stage (~1e-5 along flat directions) is not
        // enough for the downstream eigenspace constructions, which need the
        // phase optimum itself to ~1e-10.
        double width = 1e-3;
        for (int sweep = 0; sweep < 80 && width > 1e-12; ++sweep) {
            double moved = 0.0;
            for (size_t j = 1; j < phi.size(); ++j) {
                const double old = phi[j];
                detail::refine_coordinate(u.mat(), phi, j, old, width, 24);
                moved = std::max(moved, std::fabs(phi[j] - old));
            }
            if (moved <= 1e-10) width *= 0.1;
        }
        const double val = detail::arc_objective(u.mat(), phi);
        if (val < best_val - 1e-15 || best_phi.empty()) {
            best_val = val;
            best_phi = phi;
            best_trace = std::move(tr);
            best_conv = conv;
        }
    }
    return finish(best_phi, std::move(best_trace), best_conv);
}

// Exhaustive minimum of theta(U*E) over a uniform phase grid with the first
// phase gauged to zero.  Exponential in the dimension; guarded accordingly.
inline double upsilon_grid_oracle(const Unitary& u, int resolution) {
    const int d = u.dim();
    if (resolution < 2) throw BadParamsError("upsilon_grid_oracle: resolution must be >= 2");
    const double combos = std::pow(static_cast<double>(resolution), d - 1);
    if (combos > 2.0e8)
        throw DimensionTooLargeError("upsilon_grid_oracle: grid of " +
                                     std::to_string(combos) + " points is too large");
    std::vector<double> phi(static_cast<size_t>(d), 0.0);
    double best = detail::arc_objective(u.mat(), phi);
    std::vector<int> idx(static_cast<size_t>(d > 1 ? d - 1 : 0), 0);
    const double step = kTau / resolution;
    if (d == 1) return 0.0;
    while (true) {
        for (int j = 1; j < d; ++j)
            phi[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] * step;
        best = std::min(best, detail::arc_objective(u.mat(), phi));
        int carry = 0;
        while (carry < d - 1 && ++idx[static_cast<size_t>(carry)] == resolution) {
            idx[static_cast<size_t>(carry)] = 0;
            ++carry;
        }
        if (carry == d - 1) break;
    }
    return best;
}

}  // namespace vndisc
