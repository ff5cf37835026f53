// Command-line front end.  Every subcommand loads a unitary (a named family
// or a matrix JSON file), runs one library computation, and writes a JSON or
// CSV report to stdout or --out.  Exit codes: 0 success, 2 validation or
// usage error (one-line message on stderr), 3 convergence warning (the
// report is still written).  Identical argv reruns are byte-identical:
// every stochastic subcommand requires --seed and echoes it in the report.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vndisc/adaptive.hpp"
#include "vndisc/arc.hpp"
#include "vndisc/core.hpp"
#include "vndisc/discrimination.hpp"
#include "vndisc/ensembles.hpp"
#include "vndisc/errors.hpp"
#include "vndisc/io.hpp"
#include "vndisc/unambiguous.hpp"

namespace {

using namespace vndisc;

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

// Ordered key/value list rendered either as a JSON object or as a two-row
// CSV (header + values).  Raw fields hold pre-rendered JSON (matrices,
// arrays) and are omitted from the CSV rendering, which stays rectangular.
class Report {
  public:
    Report& real(const std::string& key, double v) { return push(key, fmt17(v), false, false); }
    Report& integer(const std::string& key, long long v) {
        return push(key, std::to_string(v), false, false);
    }
    Report& uinteger(const std::string& key, std::uint64_t v) {
        return push(key, std::to_string(v), false, false);
    }
    Report& boolean(const std::string& key, bool v) {
        return push(key, v ? "true" : "false", false, false);
    }
    Report& text(const std::string& key, const std::string& v) { return push(key, v, true, false); }
    Report& raw(const std::string& key, std::string v) {
        fields_.push_back({key, std::move(v), false, true});
        return *this;
    }

    std::string json() const {
        std::string out = "{\n";
        for (size_t i = 0; i < fields_.size(); ++i) {
            const Field& f = fields_[i];
            out += "  \"" + f.key + "\": ";
            out += f.quoted ? "\"" + f.value + "\"" : f.value;
            out += (i + 1 < fields_.size()) ? ",\n" : "\n";
        }
        return out + "}\n";
    }

    std::string csv() const {
        std::vector<std::string> head, row;
        for (const Field& f : fields_) {
            if (f.json_only) continue;
            head.push_back(f.key);
            row.push_back(f.value);
        }
        return csv_row(head) + csv_row(row);
    }

  private:
    struct Field {
        std::string key;
        std::string value;
        bool quoted;
        bool json_only;
    };

    Report& push(const std::string& key, std::string value, bool quoted, bool json_only) {
        fields_.push_back({key, std::move(value), quoted, json_only});
        return *this;
    }

    std::vector<Field> fields_;
};

std::string json_real_array(const std::vector<double>& v) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        out += fmt17(v[i]);
        if (i + 1 < v.size()) out += ", ";
    }
    return out + "]";
}

// Index lists cross the file boundary 1-based, like everything else.
std::string json_index_array(const std::vector<int>& v) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        out += std::to_string(v[i] + 1);
        if (i + 1 < v.size()) out += ", ";
    }
    return out + "]";
}

std::string json_histogram(const std::vector<HistogramBin>& bins) {
    if (bins.empty()) return "[]";
    std::string out = "[";
    for (size_t i = 0; i < bins.size(); ++i) {
        out += "\n    {\"left\": " + fmt17(bins[i].left) + ", \"right\": " + fmt17(bins[i].right) +
               ", \"count\": " + std::to_string(bins[i].count) + "}";
        if (i + 1 < bins.size()) out += ",";
    }
    return out + "\n  ]";
}

// ---------------------------------------------------------------------------
// Shared flags
// ---------------------------------------------------------------------------

struct InputOpts {
    std::string family;
    std::string path;
    int dim = 2;
    std::vector<double> params;
};

void add_input_flags(CLI::App* sub, InputOpts& in) {
    auto* fam = sub->add_option(
        "--family", in.family,
        "named family: identity, hadamard, fourier, rotation, permutation, diag-phases");
    auto* file = sub->add_option("--in", in.path, "matrix JSON file {\"d\", \"re\", \"im\"}");
    fam->excludes(file);
    file->excludes(fam);
    sub->add_option("--dim", in.dim, "dimension for --family (default 2)")->needs(fam);
    sub->add_option("--param", in.params, "family parameter, repeatable, in documented order")
        ->needs(fam);
}

Unitary load_unitary(const InputOpts& in) {
    if (in.family.empty() && in.path.empty())
        throw BadParamsError("provide exactly one input source: --family or --in");
    if (!in.path.empty()) return Unitary(read_matrix_file(in.path));
    return named_family(in.family, in.dim, in.params);
}

struct OutputOpts {
    std::string path;
    std::string format = "json";
};

void add_output_flags(CLI::App* sub, OutputOpts& out) {
    sub->add_option("--out", out.path, "write the report to this file instead of stdout");
    sub->add_option("--format", out.format, "report format (default json)")
        ->check(CLI::IsMember({"json", "csv"}));
}

int emit_text(const std::string& text, const std::string& path, bool warn) {
    if (path.empty())
        std::cout << text;
    else
        write_file(path, text);
    return warn ? 3 : 0;
}

int emit(const Report& rep, const OutputOpts& out, bool warn) {
    return emit_text(out.format == "csv" ? rep.csv() : rep.json(), out.path, warn);
}

void add_query_count(Report& rep, const QueryCount& q) {
    if (q.unbounded)
        rep.text("queries_for_perfect", "unbounded");
    else
        rep.integer("queries_for_perfect", q.n);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct DistanceOpts {
    InputOpts in;
    OutputOpts out;
    int shots = 1;
};

int run_distance(const DistanceOpts& o) {
    const Unitary u = load_unitary(o.in);
    const DiscriminationReport r = discrimination_report(u, o.shots);
    Report rep;
    rep.integer("dim", u.dim())
        .integer("N", r.shots)
        .real("unitary_distance", r.unitary_distance)
        .real("measurement_distance", r.measurement_distance)
        .real("helstrom_probability", r.helstrom_probability)
        .real("upsilon", r.upsilon);
    add_query_count(rep, r.queries_for_perfect);
    rep.real("multishot_distance", r.multishot_distance);
    return emit(rep, o.out, r.upsilon_uncertain);
}

struct QueriesOpts {
    InputOpts in;
    OutputOpts out;
};

int run_queries(const QueriesOpts& o) {
    const Unitary u = load_unitary(o.in);
    const UpsilonResult r = upsilon(u);
    Report rep;
    rep.integer("dim", u.dim()).real("upsilon", r.upsilon);
    add_query_count(rep, queries_from_upsilon(r.upsilon));
    return emit(rep, o.out, !r.converged);
}

struct DiscriminatorOpts {
    InputOpts in;
    OutputOpts out;
    int shots = 1;
};

int run_discriminator(const DiscriminatorOpts& o) {
    const Unitary u = load_unitary(o.in);
    const DiscriminatorState s = discriminator_state(u, o.shots);
    const double residual = verify_discriminator(u, o.shots, s);
    Report rep;
    rep.integer("dim", u.dim())
        .integer("N", s.shots)
        .real("upsilon", s.upsilon_value)
        .text("kind", s.kind == DiscriminatorState::Kind::perfect ? "perfect" : "imperfect")
        .real("multishot_distance", multishot_distance_from_upsilon(s.upsilon_value, s.shots))
        .real("residual", residual)
        .raw("weights", json_real_array(s.weights))
        .raw("low_copies", json_real_array({s.low_copies.begin(), s.low_copies.end()}))
        .raw("state", write_matrix_json(s.state.mat(), 2))
        .raw("rho_low", write_matrix_json(s.rho_low.mat(), 2))
        .raw("rho_high", write_matrix_json(s.rho_high.mat(), 2))
        .raw("e0", write_matrix_json(s.e0.mat(), 2));
    return emit(rep, o.out, s.upsilon_uncertain);
}

struct UnambiguousOpts {
    InputOpts in;
    OutputOpts out;
    int shots = 1;
    bool assisted = false;
};

int run_unambiguous(const UnambiguousOpts& o) {
    const Unitary u = load_unitary(o.in);
    const UnambiguousResult res =
        o.shots == 1 ? (o.assisted ? unambiguous_entassisted(u) : unambiguous_no_ent(u))
                     : unambiguous_parallel(u, o.shots, o.assisted);
    Report rep;
    rep.integer("dim", u.dim())
        .integer("N", o.shots)
        .boolean("assisted", res.assisted)
        .real("probability", res.probability)
        .real("gap_estimate", res.gap_estimate)
        .boolean("converged", res.converged);
    if (res.strategy) {
        rep.raw("gamma", json_index_array(res.strategy->gamma));
        rep.raw("delta", json_index_array(res.strategy->delta));
    }
    rep.raw("overlap_c", json_real_array(res.overlap_c));
    rep.raw("optimal_input", write_matrix_json(res.optimal_input.mat(), 2));
    return emit(rep, o.out, !res.converged);
}

struct StudyOpts {
    OutputOpts out;
    int dim = 5;
    int samples = 0;
    std::uint64_t seed = 0;
};

int run_haar_study(const StudyOpts& o) {
    const EnsembleStudy st = two_query_failure_rate(o.dim, o.samples, o.seed);
    Report rep;
    rep.integer("dim", st.dim)
        .integer("samples", st.samples)
        .uinteger("seed", st.seed)
        .real("empirical_failure_rate", st.empirical_failure_rate)
        .real("bound", st.bound)
        .real("wilson_low", st.wilson_interval.first)
        .real("wilson_high", st.wilson_interval.second)
        .raw("histogram", json_histogram(st.histogram));
    return emit(rep, o.out, false);
}

int run_beta_check(const StudyOpts& o) {
    const BetaCheck b = u11_beta_check(o.dim, o.samples, o.seed);
    Report rep;
    rep.integer("dim", b.dim)
        .integer("samples", b.samples)
        .uinteger("seed", b.seed)
        .real("ks_statistic", b.ks_statistic)
        .real("ks_critical", b.ks_critical)
        .boolean("ks_pass", b.ks_pass)
        .real("tail_empirical", b.tail_empirical)
        .real("tail_expected", b.tail_expected)
        .boolean("insufficient_samples", b.insufficient_samples)
        .raw("histogram", json_histogram(b.histogram));
    return emit(rep, o.out, false);
}

struct AdaptiveOpts {
    InputOpts in;
    OutputOpts out;
    int shots = 2;
    int samples = 20;
    int ancilla = 0;
    std::uint64_t seed = 0;
    std::string net_path;
    bool ancilla_given = false;
    bool shots_given = false;
};

// Draws random (network, input) pairs, or reuses a network file with random
// inputs, and checks adaptive values against the parallel certificates: the
// multishot distance for the dephased channels and the closed-form parallel
// optimum for the unambiguous branch bound.
int run_adaptive_check(const AdaptiveOpts& o) {
    const Unitary u = load_unitary(o.in);
    if (o.samples < 1) throw BadParamsError("--samples must be >= 1");
    const UpsilonResult r = upsilon(u);

    int shots = o.shots;
    int ancilla = o.ancilla_given ? o.ancilla : u.dim();
    std::optional<AdaptiveNetwork> fixed;
    if (!o.net_path.empty()) {
        fixed = network_from_json(read_file(o.net_path));
        if (o.shots_given && o.shots != fixed->shots())
            throw BadParamsError("--N conflicts with the N stored in the network file");
        shots = fixed->shots();
        ancilla = fixed->ancilla_dim();
    }

    const double par_dist = multishot_distance_from_upsilon(r.upsilon, shots);
    const double par_unamb = 1.0 - std::sqrt(std::max(0.0, 1.0 - 0.25 * par_dist * par_dist));

    double max_value = 0.0, max_bound = 0.0;
    int value_violations = 0, bound_violations = 0;
    for (int t = 0; t < o.samples; ++t) {
        const AdaptiveNetwork net =
            fixed ? *fixed
                  : random_adaptive_network(u.dim(), shots, ancilla,
                                            split_seed(o.seed, 1000 + static_cast<std::uint64_t>(t)));
        const DensityMatrix rho =
            random_density(net.total_dim(), split_seed(o.seed, 2000 + static_cast<std::uint64_t>(t)));
        const double value = adaptive_value(u, net, rho);
        max_value = std::max(max_value, value);
        if (value > par_dist + 1e-8) ++value_violations;

        const CVec psi =
            random_pure(net.total_dim(), split_seed(o.seed, 3000 + static_cast<std::uint64_t>(t)));
        const double bound = unambiguous_adaptive_bound(u, shots, net, DensityMatrix::pure(psi));
        max_bound = std::max(max_bound, bound);
        if (bound > par_unamb + 1e-6) ++bound_violations;
    }

    Report rep;
    rep.integer("dim", u.dim())
        .integer("N", shots)
        .integer("ancilla", ancilla)
        .integer("samples", o.samples)
        .uinteger("seed", o.seed);
    if (!o.net_path.empty()) rep.text("net", o.net_path);
    rep.real("parallel_distance", par_dist)
        .real("parallel_unambiguous", par_unamb)
        .real("max_adaptive_value", max_value)
        .integer("adaptive_violations", value_violations)
        .real("max_unambiguous_bound", max_bound)
        .integer("bound_violations", bound_violations)
        .boolean("pass", value_violations == 0 && bound_violations == 0);
    return emit(rep, o.out, !r.converged);
}

struct OracleOpts {
    InputOpts in;
    OutputOpts out;
    std::string kind = "measurement";
    int shots = 1;
    int starts = 8;
    int resolution = 400;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int run_oracle(const OracleOpts& o) {
    const Unitary u = load_unitary(o.in);
    if (o.kind == "upsilon-grid") {
        const UpsilonResult r = upsilon(u);
        const double grid = upsilon_grid_oracle(u, o.resolution);
        Report rep;
        rep.integer("dim", u.dim())
            .text("kind", o.kind)
            .integer("resolution", o.resolution)
            .real("upsilon_grid", grid)
            .real("upsilon_optimizer", r.upsilon)
            .real("certification_gap", std::fabs(grid - r.upsilon))
            .real("grid_step_bound", 2.0 * kTau / o.resolution);
        return emit(rep, o.out, !r.converged);
    }

    if (!o.seed_given) throw BadParamsError("oracle --kind " + o.kind + " requires --seed");
    const ChannelKind kind = o.kind == "unitary" ? ChannelKind::unitary_channel
                                                 : ChannelKind::measurement_channel;
    const double value = direct_diamond_oracle(u, kind, o.shots, o.starts, o.seed);
    double closed = 0.0;
    bool warn = false;
    if (kind == ChannelKind::measurement_channel) {
        const UpsilonResult r = upsilon(u);
        closed = multishot_distance_from_upsilon(r.upsilon, o.shots);
        warn = !r.converged;
    } else {
        closed = unitary_diamond_distance(Unitary(kron_pow(u.mat(), o.shots)));
    }
    Report rep;
    rep.integer("dim", u.dim())
        .text("kind", o.kind)
        .integer("N", o.shots)
        .integer("starts", o.starts)
        .uinteger("seed", o.seed)
        .real("oracle_value", value)
        .real("closed_form", closed)
        .real("gap", std::fabs(value - closed));
    return emit(rep, o.out, warn);
}

struct FigureOpts {
    std::string kind;
    std::string family;
    std::string path_in;
    int dim = 2;
    std::vector<double> params;
    int max_shots = 4;
    int samples = 0;
    std::uint64_t seed = 0;
    std::string path_out;
    bool samples_given = false;
    bool seed_given = false;
};

// CSV data behind the figures: the eigenphase arc with its chord and
// inconclusive-probability annotations, the multishot distance curve, or the
// Haar two-query histogram.  Always CSV; --format does not apply here.
int run_figure(const FigureOpts& o) {
    if (o.kind == "haar_histogram") {
        if (!o.family.empty() || !o.path_in.empty())
            throw BadParamsError("--family/--in do not apply to --kind haar_histogram");
        if (!o.samples_given) throw BadParamsError("figure --kind haar_histogram requires --samples");
        if (!o.seed_given) throw BadParamsError("figure --kind haar_histogram requires --seed");
        const EnsembleStudy st = two_query_failure_rate(o.dim, o.samples, o.seed);
        std::string text = csv_row({"bin_left", "bin_right", "count"});
        for (const HistogramBin& b : st.histogram)
            text += csv_row({fmt17(b.left), fmt17(b.right), std::to_string(b.count)});
        return emit_text(text, o.path_out, false);
    }

    const Unitary u = load_unitary({o.family, o.path_in, o.dim, o.params});
    const UpsilonResult r = upsilon(u);
    std::string text;
    if (o.kind == "multishot_curve") {
        if (o.max_shots < 1) throw BadParamsError("--N must be >= 1");
        text = csv_row({"N", "distance"});
        for (int n = 1; n <= o.max_shots; ++n)
            text += csv_row({std::to_string(n), fmt17(multishot_distance_from_upsilon(r.upsilon, n))});
    } else {  // arc_geometry
        const ArcResult arc = theta(Unitary(u.mat() * r.e0.mat()));
        text = csv_row({"item", "value"});
        for (size_t i = 0; i < arc.eigenphases.size(); ++i)
            text += csv_row({"eigenphase_" + std::to_string(i + 1), fmt17(arc.eigenphases[i])});
        text += csv_row({"arc_start", fmt17(r.phase_low)});
        text += csv_row({"arc_end", fmt17(r.phase_high)});
        text += csv_row({"upsilon", fmt17(r.upsilon)});
        text += csv_row({"chord", fmt17(2.0 * std::sin(0.5 * r.upsilon))});
        text += csv_row({"p_u", fmt17(1.0 - std::cos(0.5 * r.upsilon))});
    }
    return emit_text(text, o.path_out, !r.converged);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"von Neumann measurement discrimination toolkit"};
    app.require_subcommand(1);

    int rc = 0;

    DistanceOpts dist_opts;
    auto* dist = app.add_subcommand("distance", "diamond distances and the Helstrom probability");
    add_input_flags(dist, dist_opts.in);
    dist->add_option("--N", dist_opts.shots, "number of queries (default 1)");
    add_output_flags(dist, dist_opts.out);
    dist->callback([&] { rc = run_distance(dist_opts); });

    QueriesOpts query_opts;
    auto* queries = app.add_subcommand("queries", "queries needed for perfect discrimination");
    add_input_flags(queries, query_opts.in);
    add_output_flags(queries, query_opts.out);
    queries->callback([&] { rc = run_queries(query_opts); });

    DiscriminatorOpts disc_opts;
    auto* disc = app.add_subcommand("discriminator", "optimal input state with its certificate");
    add_input_flags(disc, disc_opts.in);
    disc->add_option("--N", disc_opts.shots, "number of queries (default 1)");
    add_output_flags(disc, disc_opts.out);
    disc->callback([&] { rc = run_discriminator(disc_opts); });

    UnambiguousOpts unamb_opts;
    auto* unamb = app.add_subcommand("unambiguous", "unambiguous discrimination probability");
    add_input_flags(unamb, unamb_opts.in);
    unamb->add_option("--N", unamb_opts.shots, "number of parallel queries (default 1)");
    unamb->add_flag("--assisted", unamb_opts.assisted, "allow an entangled ancilla");
    add_output_flags(unamb, unamb_opts.out);
    unamb->callback([&] { rc = run_unambiguous(unamb_opts); });

    StudyOpts study_opts;
    auto* study = app.add_subcommand("haar-study", "two-query failure rate over Haar samples");
    study->add_option("--dim", study_opts.dim, "ensemble dimension (default 5)");
    study->add_option("--samples", study_opts.samples, "number of Haar samples")->required();
    study->add_option("--seed", study_opts.seed, "RNG seed, echoed in the report")->required();
    add_output_flags(study, study_opts.out);
    study->callback([&] { rc = run_haar_study(study_opts); });

    StudyOpts beta_opts;
    auto* beta = app.add_subcommand("beta-check", "|U_11|^2 against the Beta(1, d-1) law");
    beta->add_option("--dim", beta_opts.dim, "ensemble dimension (default 5)");
    beta->add_option("--samples", beta_opts.samples, "number of Haar samples")->required();
    beta->add_option("--seed", beta_opts.seed, "RNG seed, echoed in the report")->required();
    add_output_flags(beta, beta_opts.out);
    beta->callback([&] { rc = run_beta_check(beta_opts); });

    AdaptiveOpts adapt_opts;
    auto* adapt = app.add_subcommand("adaptive-check",
                                     "adaptive networks against the parallel certificates");
    add_input_flags(adapt, adapt_opts.in);
    auto* adapt_n = adapt->add_option("--N", adapt_opts.shots, "number of queries (default 2)");
    auto* adapt_net = adapt->add_option("--net", adapt_opts.net_path, "network JSON file");
    auto* adapt_anc =
        adapt->add_option("--ancilla", adapt_opts.ancilla, "ancilla dimension (default dim)");
    adapt_anc->excludes(adapt_net);
    adapt->add_option("--samples", adapt_opts.samples,
                      "number of random (network, input) pairs (default 20)");
    adapt->add_option("--seed", adapt_opts.seed, "RNG seed, echoed in the report")->required();
    add_output_flags(adapt, adapt_opts.out);
    adapt->callback([&] {
        adapt_opts.shots_given = adapt_n->count() > 0;
        adapt_opts.ancilla_given = adapt_anc->count() > 0;
        rc = run_adaptive_check(adapt_opts);
    });

    OracleOpts oracle_opts;
    auto* oracle = app.add_subcommand("oracle", "independent checks of the closed forms");
    add_input_flags(oracle, oracle_opts.in);
    oracle->add_option("--kind", oracle_opts.kind,
                       "measurement, unitary, or upsilon-grid (default measurement)")
        ->check(CLI::IsMember({"measurement", "unitary", "upsilon-grid"}));
    oracle->add_option("--N", oracle_opts.shots, "number of queries (default 1)");
    oracle->add_option("--starts", oracle_opts.starts, "ascent restarts (default 8)");
    oracle->add_option("--resolution", oracle_opts.resolution,
                       "phase grid resolution for upsilon-grid (default 400)");
    auto* oracle_seed = oracle->add_option("--seed", oracle_opts.seed,
                                           "RNG seed for the ascent restarts, echoed in the report");
    add_output_flags(oracle, oracle_opts.out);
    oracle->callback([&] {
        oracle_opts.seed_given = oracle_seed->count() > 0;
        rc = run_oracle(oracle_opts);
    });

    FigureOpts fig_opts;
    auto* fig = app.add_subcommand("figure", "CSV data for figures");
    fig->add_option("--kind", fig_opts.kind,
                    "arc_geometry, multishot_curve, or haar_histogram")
        ->required()
        ->check(CLI::IsMember({"arc_geometry", "multishot_curve", "haar_histogram"}));
    auto* fig_fam = fig->add_option("--family", fig_opts.family, "named family");
    auto* fig_file = fig->add_option("--in", fig_opts.path_in, "matrix JSON file");
    fig_fam->excludes(fig_file);
    fig_file->excludes(fig_fam);
    fig->add_option("--param", fig_opts.params, "family parameter, repeatable")->needs(fig_fam);
    fig->add_option("--dim", fig_opts.dim,
                    "family dimension, or ensemble dimension for haar_histogram (default 2)");
    fig->add_option("--N", fig_opts.max_shots, "largest query count for multishot_curve (default 4)");
    auto* fig_samples =
        fig->add_option("--samples", fig_opts.samples, "Haar samples for haar_histogram");
    auto* fig_seed = fig->add_option("--seed", fig_opts.seed, "RNG seed for haar_histogram");
    fig->add_option("--out", fig_opts.path_out, "write the CSV to this file instead of stdout");
    fig->callback([&] {
        fig_opts.samples_given = fig_samples->count() > 0;
        fig_opts.seed_given = fig_seed->count() > 0;
        rc = run_figure(fig_opts);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
