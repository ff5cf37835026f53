#pragma once

// Sequential (adaptive) discrimination of a von Neumann measurement against
// the identity measurement.  The N queries are interleaved with unitaries
// controlled on the labels produced so far; deferring every readout to one
// final dephasing turns the whole strategy into conjugation by a single
// matrix A_U followed by Delta on the label registers.  The point of the
// module is numerical evidence that adaptivity never beats handing all N
// queries one joint (possibly entangled) input.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vndisc/core.hpp"
#include "vndisc/discrimination.hpp"
#include "vndisc/errors.hpp"
#include "vndisc/io.hpp"

namespace vndisc {

namespace detail {

inline int adaptive_total_dim(int dim, int shots, int ancilla) {
    if (dim < 2) throw BadParamsError("AdaptiveNetwork: system dimension must be >= 2");
    if (shots < 1) throw BadShotCountError("AdaptiveNetwork: shots must be >= 1");
    if (ancilla < 1) throw BadParamsError("AdaptiveNetwork: ancilla dimension must be >= 1");
    long long total = ancilla;
    for (int k = 0; k < shots; ++k) {
        total *= dim;
        if (total > 256)
            throw DimensionTooLargeError(
                "AdaptiveNetwork: d^N * ancilla exceeds the working limit of 256");
    }
    return static_cast<int>(total);
}

}  // namespace detail

// Label-controlled processing network for N sequential queries.  Registers
// are ordered (query 1, ..., query N, ancilla); the ancilla dimension
// defaults to d, which already suffices for an optimal strategy at this
// scale, and can be raised for stress tests.  After query k the labels
// (i_1, ..., i_k) select a unitary V^(k) acting on registers k+1..N and the
// ancilla; tuples without an entry default to the identity, so a freshly
// constructed network is exactly the parallel scheme.
class AdaptiveNetwork {
  public:
    using Level = std::map<std::vector<int>, Unitary>;

    AdaptiveNetwork(int dim, int shots, int ancilla_dim)
        : dim_(dim),
          shots_(shots),
          ancilla_(ancilla_dim),
          total_(detail::adaptive_total_dim(dim, shots, ancilla_dim)),
          levels_(static_cast<size_t>(shots - 1)) {}

    AdaptiveNetwork(int dim, int shots) : AdaptiveNetwork(dim, shots, dim) {}

    int dim() const { return dim_; }
    int shots() const { return shots_; }
    int ancilla_dim() const { return ancilla_; }
    int total_dim() const { return total_; }

    // Dimension a level-k control acts on: registers k+1..N plus the ancilla.
    int control_dim(int level) const {
        require_level(level);
        int out = ancilla_;
        for (int j = level; j < shots_; ++j) out *= dim_;
        return out;
    }

    const Level& level(int k) const {
        require_level(k);
        return levels_[static_cast<size_t>(k - 1)];
    }

    void set_control(const std::vector<int>& labels, Unitary v) {
        const int k = static_cast<int>(labels.size());
        if (k < 1 || k >= shots_)
            throw BadParamsError("set_control: tuple length must lie in 1..N-1");
        for (int i : labels)
            if (i < 0 || i >= dim_)
                throw BadParamsError("set_control: label outside 0..d-1");
        if (v.dim() != control_dim(k))
            throw DimensionMismatchError("set_control: level " + std::to_string(k) +
                                         " control must have dimension " +
                                         std::to_string(control_dim(k)));
        levels_[static_cast<size_t>(k - 1)].insert_or_assign(labels, std::move(v));
    }

    bool trivial() const {
        for (const auto& lv : levels_)
            if (!lv.empty()) return false;
        return true;
    }

  private:
    void require_level(int k) const {
        if (k < 1 || k >= shots_)
            throw BadParamsError("AdaptiveNetwork: control level must lie in 1..N-1");
    }

    int dim_, shots_, ancilla_, total_;
    std::vector<Level> levels_;
};

// Haar-random controls on every label tuple; the workhorse behind property
// tests and search restarts.
inline AdaptiveNetwork random_adaptive_network(int dim, int shots, int ancilla_dim,
                                               std::uint64_t seed) {
    AdaptiveNetwork net(dim, shots, ancilla_dim);
    std::uint64_t idx = 0;
    for (int k = 1; k < shots; ++k) {
        long long tuples = 1;
        for (int j = 0; j < k; ++j) tuples *= dim;
        std::vector<int> labels(static_cast<size_t>(k), 0);
        for (long long t = 0; t < tuples; ++t) {
            long long rem = t;
            for (int j = k - 1; j >= 0; --j) {
                labels[static_cast<size_t>(j)] = static_cast<int>(rem % dim);
                rem /= dim;
            }
            net.set_control(labels, haar_unitary(net.control_dim(k), split_seed(seed, ++idx)));
        }
    }
    return net;
}

inline AdaptiveNetwork random_adaptive_network(int dim, int shots, std::uint64_t seed) {
    return random_adaptive_network(dim, shots, dim, seed);
}

namespace detail {

// 1 (x) U (x) 1 with U on query register reg (1-based).
inline CMat adaptive_query_layer(const Unitary& u, const AdaptiveNetwork& net, int reg) {
    int left = 1;
    for (int j = 1; j < reg; ++j) left *= net.dim();
    const int right = net.total_dim() / (left * net.dim());
    return kron(kron(CMat::Identity(left, left), u.mat()), CMat::Identity(right, right));
}

// sum_t |t><t| (x) V_t over the level-k label tuples.  Block diagonal
// because the registers the controls act on sit contiguously to the right
// of the control registers.
inline CMat adaptive_control_layer(const AdaptiveNetwork& net, int k) {
    const int total = net.total_dim();
    const Eigen::Index block = net.control_dim(k);
    CMat c = CMat::Identity(total, total);
    for (const auto& [labels, v] : net.level(k)) {
        Eigen::Index t = 0;
        for (int i : labels) t = t * net.dim() + i;
        c.block(t * block, t * block, block, block) = v.mat();
    }
    return c;
}

}  // namespace detail

// The full network matrix: U on query 1 first, then for k = 1..N-1 the
// level-k controlled layer followed by U on query k+1.
inline CMat build_adaptive_matrix(const Unitary& u, const AdaptiveNetwork& net) {
    if (u.dim() != net.dim())
        throw DimensionMismatchError("build_adaptive_matrix: U has dimension " +
                                     std::to_string(u.dim()) + " but the network expects " +
                                     std::to_string(net.dim()));
    CMat a = detail::adaptive_query_layer(u, net, 1);
    for (int k = 1; k < net.shots(); ++k)
        a = detail::adaptive_query_layer(u, net, k + 1) *
            (detail::adaptive_control_layer(net, k) * a);
    return a;
}

// Delta (x) 1 on the label registers: the matrix splits into labels x labels
// blocks of equal size and every block coupling two different label tuples
// is zeroed.  Coherence inside a block (the ancilla) survives.
inline CMat dephase_labels(const CMat& m, int labels) {
    require_square_finite(m, "dephase_labels");
    if (labels < 1 || m.rows() % labels != 0)
        throw DimensionMismatchError("dephase_labels: dimension " + std::to_string(m.rows()) +
                                     " does not split into " + std::to_string(labels) +
                                     " label blocks");
    const Eigen::Index block = m.rows() / labels;
    CMat out = m;
    for (Eigen::Index p = 0; p < labels; ++p)
        for (Eigen::Index q = 0; q < labels; ++q)
            if (p != q) out.block(p * block, q * block, block, block).setZero();
    return out;
}

// One use of the sequential network as a channel: conjugate by A, then read
// the N query registers (dephase their joint computational basis).
inline DensityMatrix sequential_channel_apply(const CMat& a, const DensityMatrix& rho,
                                              int shots, int label_dim) {
    require_square_finite(a, "sequential_channel_apply");
    if (a.rows() != rho.dim())
        throw DimensionMismatchError("sequential_channel_apply: matrix acts on dimension " +
                                     std::to_string(a.rows()) + " but the state has " +
                                     std::to_string(rho.dim()));
    if (shots < 1) throw BadShotCountError("sequential_channel_apply: shots must be >= 1");
    if (label_dim < 2)
        throw BadParamsError("sequential_channel_apply: label dimension must be >= 2");
    long long labels = 1;
    for (int k = 0; k < shots; ++k) {
        labels *= label_dim;
        if (labels > a.rows())
            throw DimensionMismatchError(
                "sequential_channel_apply: label registers exceed the matrix dimension");
    }
    return DensityMatrix(
        dephase_labels(a * rho.mat() * a.adjoint(), static_cast<int>(labels)));
}

// || (Psi_U - Psi_1)(rho) ||_1 for one network and one input.  Psi_1 keeps
// the same controls; only the queried measurement changes.
inline double adaptive_value(const Unitary& u, const AdaptiveNetwork& net,
                             const DensityMatrix& rho) {
    if (rho.dim() != net.total_dim())
        throw DimensionMismatchError("adaptive_value: input must live on dimension " +
                                     std::to_string(net.total_dim()));
    const CMat au = build_adaptive_matrix(u, net);
    const CMat a1 =
        build_adaptive_matrix(Unitary(CMat::Identity(net.dim(), net.dim())), net);
    const int labels = net.total_dim() / net.ancilla_dim();
    return trace_norm(dephase_labels(
        au * rho.mat() * au.adjoint() - a1 * rho.mat() * a1.adjoint(), labels));
}

// Upper bound on the entanglement-assisted unambiguous success probability
// of one sequential strategy: 1 - sum_t |<x_t|y_t>| where x_t and y_t are
// the label-t branches of A_1 |psi> and A_U |psi>.  The derivation behind
// the bound fixes the diagonal gauge in which the eigenphase arc of U is
// already minimal, so the queried measurement is replaced by U*E0 before
// the branches are formed; without that normalization the expression is
// still a bound for the given strategy but stops being comparable to the
// parallel optimum (a diagonal U with entangling controls already breaks
// the comparison).
inline double unambiguous_adaptive_bound(const Unitary& u, int shots,
                                         const AdaptiveNetwork& net,
                                         const DensityMatrix& input,
                                         const OptimizerOptions& opts = {}) {
    if (u.dim() != net.dim() || shots != net.shots())
        throw DimensionMismatchError(
            "unambiguous_adaptive_bound: measurement, shot count and network disagree");
    if (input.dim() != net.total_dim())
        throw DimensionMismatchError("unambiguous_adaptive_bound: input must live on dimension " +
                                     std::to_string(net.total_dim()));
    const int total = input.dim();
    Eigen::SelfAdjointEigenSolver<CMat> es(input.mat());
    if (es.eigenvalues()(total - 2) > 1e-9)
        throw NotPureError("unambiguous_adaptive_bound: input is not pure within 1e-9");
    const CVec psi = es.eigenvectors().col(total - 1);

    const Unitary gauged(u.mat() * upsilon(u, opts).e0.mat());
    const CVec x =
        build_adaptive_matrix(Unitary(CMat::Identity(net.dim(), net.dim())), net) * psi;
    const CVec y = build_adaptive_matrix(gauged, net) * psi;

    const Eigen::Index block = net.ancilla_dim();
    const Eigen::Index labels = net.total_dim() / block;
    double overlap = 0.0;
    for (Eigen::Index t = 0; t < labels; ++t)
        overlap += std::abs(
            (x.segment(t * block, block).adjoint() * y.segment(t * block, block)).value());
    return 1.0 - overlap;
}

struct AdaptiveSearchResult {
    double value;
    AdaptiveNetwork net;
    DensityMatrix input;
};

namespace detail {

// Hermitian sign of a Hermitian matrix: the dual witness with tr(W X) equal
// to the trace norm of X.
inline CMat trace_norm_witness(const CMat& x) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (x + x.adjoint().eval()));
    const Eigen::VectorXd sgn =
        es.eigenvalues().unaryExpr([](double t) { return t >= 0.0 ? 1.0 : -1.0; });
    return es.eigenvectors() * sgn.asDiagonal() * es.eigenvectors().adjoint();
}

// Unitary polar factor, the retraction used for control updates.
inline CMat polar_unitary(const CMat& m) {
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

// Partial products around the level-k control layer, a = left * C_k * right.
struct LayerSplit {
    CMat left, right;
};

inline LayerSplit split_at_level(const Unitary& u, const AdaptiveNetwork& net, int k) {
    LayerSplit s;
    s.right = adaptive_query_layer(u, net, 1);
    for (int j = 1; j < k; ++j)
        s.right = adaptive_query_layer(u, net, j + 1) *
                  (adaptive_control_layer(net, j) * s.right);
    s.left = adaptive_query_layer(u, net, k + 1);
    for (int j = k + 1; j < net.shots(); ++j)
        s.left = adaptive_query_layer(u, net, j + 1) *
                 (adaptive_control_layer(net, j) * s.left);
    return s;
}

}  // namespace detail

// Best-effort maximization of adaptive_value over controls and input.
// Alternates a trace-norm see-saw on the input (dual witness, then the top
// eigenvector of the witness pulled back through both networks) with one
// gradient-ascent pass per controlled layer, retracting each control to the
// unitary group through its polar factor.  Start 0 is the parallel warm
// start (trivial controls, best parallel discriminator, idle ancilla), so
// the result never falls below the parallel scheme.
inline AdaptiveSearchResult adaptive_search(const Unitary& u, int shots,
                                            const OptimizerOptions& opts = {}) {
    const int d = u.dim();
    AdaptiveNetwork best_net(d, shots);
    const int total = best_net.total_dim();
    const int labels = total / best_net.ancilla_dim();
    const Unitary one(CMat::Identity(d, d));
    const double tol = std::max(opts.tol, 1e-12);

    const auto value_of = [&](const CMat& au, const CMat& a1, const CMat& rho) {
        return trace_norm(
            dephase_labels(au * rho * au.adjoint() - a1 * rho * a1.adjoint(), labels));
    };

    CMat best_rho = CMat::Identity(total, total) / static_cast<double>(total);
    double best = -1.0;

    const int starts = std::max(1, opts.starts);
    const int rounds = std::max(1, opts.max_sweeps);

    for (int s = 0; s < starts && best < 2.0 - tol; ++s) {
        AdaptiveNetwork net(d, shots);
        CMat rho;
        if (s == 0) {
            // Parallel warm start: the certificate state of the parallel
            // discriminator lives on the query registers; the physical input
            // is a purification of its pulled-back version U^dag..U sigma,
            // entangled with the ancilla.  Truncate to the top ancilla-many
            // eigendirections when the rank does not fit; the ascent
            // recovers the remainder.
            try {
                const DiscriminatorState ds = discriminator_state(u, shots, opts);
                const CMat m = kron_pow(u.mat(), shots);
                const CMat sigma = m.adjoint() * ds.state.mat() * m;
                Eigen::SelfAdjointEigenSolver<CMat> es(sigma);
                const int anc = net.ancilla_dim();
                const int queries = total / anc;
                CVec psi = CVec::Zero(total);
                for (int j = 0; j < std::min(anc, queries); ++j) {
                    const double lam = es.eigenvalues()(queries - 1 - j);
                    if (lam <= 0.0) break;
                    for (int i = 0; i < queries; ++i)
                        psi[static_cast<Eigen::Index>(i) * anc + j] +=
                            std::sqrt(lam) * es.eigenvectors()(i, queries - 1 - j);
                }
                const double norm = psi.norm();
                if (!(norm > 0.5)) throw ConvergenceError("degenerate warm start");
                psi /= norm;
                rho = psi * psi.adjoint();
            } catch (const Error&) {
                rho = CMat::Identity(total, total) / static_cast<double>(total);
            }
        } else {
            const std::uint64_t mix =
                split_seed(opts.seed, 9100 + static_cast<std::uint64_t>(s));
            if (shots > 1) net = random_adaptive_network(d, shots, d, mix);
            const CVec psi = random_pure(total, split_seed(mix, 17));
            rho = psi * psi.adjoint();
        }

        CMat au = build_adaptive_matrix(u, net);
        CMat a1 = build_adaptive_matrix(one, net);
        double cur = value_of(au, a1, rho);
        if (cur > best) {
            best = cur;
            best_net = net;
            best_rho = rho;
        }

        for (int r = 0; r < rounds; ++r) {
            const double before = cur;

            // Input update.
            CMat x = dephase_labels(au * rho * au.adjoint() - a1 * rho * a1.adjoint(), labels);
            CMat w = detail::trace_norm_witness(x);
            const CMat pulled = au.adjoint() * w * au - a1.adjoint() * w * a1;
            Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (pulled + pulled.adjoint().eval()));
            const CVec psi = es.eigenvectors().col(total - 1);
            rho = psi * psi.adjoint();
            cur = value_of(au, a1, rho);
            if (cur > best) {
                best = cur;
                best_net = net;
                best_rho = rho;
            }

            // Control updates, one backtracking gradient pass per level.
            for (int k = 1; k < shots; ++k) {
                x = dephase_labels(au * rho * au.adjoint() - a1 * rho * a1.adjoint(), labels);
                w = detail::trace_norm_witness(x);
                const detail::LayerSplit su = detail::split_at_level(u, net, k);
                const detail::LayerSplit s1 = detail::split_at_level(one, net, k);
                const CMat c = detail::adaptive_control_layer(net, k);
                const CMat g =
                    su.left.adjoint() * w * su.left * c * (su.right * rho * su.right.adjoint()) -
                    s1.left.adjoint() * w * s1.left * c * (s1.right * rho * s1.right.adjoint());
                const Eigen::Index block = net.control_dim(k);
                const double scale = std::max(1e-12, max_abs(g));
                long long tuples = 1;
                for (int j = 0; j < k; ++j) tuples *= d;

                for (double eta : {2.0, 0.6, 0.2, 0.05}) {
                    AdaptiveNetwork cand = net;
                    std::vector<int> lbl(static_cast<size_t>(k), 0);
                    for (long long t = 0; t < tuples; ++t) {
                        long long rem = t;
                        for (int j = k - 1; j >= 0; --j) {
                            lbl[static_cast<size_t>(j)] = static_cast<int>(rem % d);
                            rem /= d;
                        }
                        const auto it = net.level(k).find(lbl);
                        const CMat vt = it == net.level(k).end()
                                            ? CMat(CMat::Identity(block, block))
                                            : it->second.mat();
                        const CMat gt = g.block(t * block, t * block, block, block);
                        cand.set_control(
                            lbl, Unitary(detail::polar_unitary(vt + (eta / scale) * gt)));
                    }
                    const CMat cc = detail::adaptive_control_layer(cand, k);
                    const CMat cau = su.left * cc * su.right;
                    const CMat ca1 = s1.left * cc * s1.right;
                    const double cv = value_of(cau, ca1, rho);
                    if (cv > cur + tol) {
                        net = cand;
                        au = cau;
                        a1 = ca1;
                        cur = cv;
                        if (cur > best) {
                            best = cur;
                            best_net = net;
                            best_rho = rho;
                        }
                        break;
                    }
                }
            }

            if (cur - before <= tol) break;
        }
    }

    return AdaptiveSearchResult{best, best_net,
                                DensityMatrix(0.5 * (best_rho + best_rho.adjoint().eval()))};
}

// ---------------------------------------------------------------------------
// Network (de)serialization
// ---------------------------------------------------------------------------
//
// {"d": 2, "N": 2, "ancilla": 2, "controls": {"1": {..}, "2,1": {..}}}
// Control keys are the label tuples, comma-joined and 1-based like every
// index that crosses a file boundary; matrices use the shared d/re/im
// layout.  Tuples absent from the map stay identity controls.

inline std::string network_to_json(const AdaptiveNetwork& net) {
    std::string out = "{\n  \"d\": " + std::to_string(net.dim()) +
                      ",\n  \"N\": " + std::to_string(net.shots()) +
                      ",\n  \"ancilla\": " + std::to_string(net.ancilla_dim()) +
                      ",\n  \"controls\": {";
    bool first = true;
    for (int k = 1; k < net.shots(); ++k) {
        for (const auto& [labels, v] : net.level(k)) {
            out += first ? "\n" : ",\n";
            first = false;
            std::string key;
            for (size_t i = 0; i < labels.size(); ++i) {
                key += std::to_string(labels[i] + 1);
                if (i + 1 < labels.size()) key += ",";
            }
            out += "    \"" + key + "\": " + write_matrix_json(v.mat(), 4);
        }
    }
    out += first ? "}\n}" : "\n  }\n}";
    return out;
}

inline AdaptiveNetwork network_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("d") || !j.contains("N"))
        throw ParseError("network JSON: expected object with keys d, N");
    if (!j["d"].is_number_integer() || !j["N"].is_number_integer())
        throw ParseError("network JSON: d and N must be integers");
    const int d = j["d"].get<int>();
    const int n = j["N"].get<int>();
    int anc = d;
    if (j.contains("ancilla")) {
        if (!j["ancilla"].is_number_integer())
            throw ParseError("network JSON: ancilla must be an integer");
        anc = j["ancilla"].get<int>();
    }
    AdaptiveNetwork net(d, n, anc);
    if (j.contains("controls")) {
        if (!j["controls"].is_object())
            throw ParseError("network JSON: controls must be an object");
        for (const auto& [key, val] : j["controls"].items()) {
            std::vector<int> labels;
            std::istringstream ks(key);
            std::string token;
            while (std::getline(ks, token, ',')) {
                size_t used = 0;
                int lbl = 0;
                try {
                    lbl = std::stoi(token, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used == 0 || used != token.size() || lbl < 1 || lbl > d)
                    throw ParseError("network JSON: bad control key '" + key + "'");
                labels.push_back(lbl - 1);
            }
            if (labels.empty())
                throw ParseError("network JSON: empty control key");
            net.set_control(labels, Unitary(parse_matrix_json(val.dump())));
        }
    }
    return net;
}

}  // namespace vndisc
