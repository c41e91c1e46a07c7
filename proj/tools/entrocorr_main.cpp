// entrocorr — command-line surface of the toolkit.
//
// One subcommand per capability: entropy, decorrelate, mi, chain, mixture,
// maxent, maxwell-demo, bin-sweep.  Human-readable tables by default,
// --json for the machine envelope.  Reports go to stdout or --out; all
// diagnostics go to stderr.  Exit codes: 0 success, 1 usage, 2 data or
// validation error, 3 solver non-convergence.

#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <entrocorr/entrocorr.hpp>

namespace ec = entrocorr;

namespace {

struct OutputConfig {
    std::string unit = "nats";
    std::string out_path;  // empty = stdout
    bool json = false;
};

double unit_scale(const std::string& unit)
{
    return unit == "bits" ? 1.0 / std::numbers::ln2 : 1.0;
}

// Every value at 17 significant digits: the table is as exact as the JSON.
void print_row(std::ostream& os, const std::string& name, double v, const std::string& suffix = "")
{
    os << "  " << name;
    for (std::size_t i = name.size(); i < 18; ++i) os << ' ';
    os << ec::format_full(v);
    if (!suffix.empty()) os << ' ' << suffix;
    os << '\n';
}

void emit(const OutputConfig& cfg, const ec::ReportMeta& meta, const nlohmann::json& result,
          const std::function<void(std::ostream&)>& table)
{
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!cfg.out_path.empty()) {
        file.open(cfg.out_path);
        if (!file) ec::fail(ec::errc::io_error, "cannot write " + cfg.out_path);
        os = &file;
    }
    if (cfg.json)
        ec::write_report_json(result, meta, *os);
    else
        table(*os);
    os->flush();
    if (!*os) ec::fail(ec::errc::io_error, "write failed");
}

ec::Marginal read_marginal_csv(const std::string& path)
{
    const auto values = ec::read_samples_csv(path);
    return ec::Marginal(values, ec::Normalize::strict);
}

// Feature matrix orientation: rows are features when the row count matches
// the target count; otherwise columns are.  Square and matching both ways
// resolves to rows.
std::vector<std::vector<double>> orient_features(std::vector<std::vector<double>> grid,
                                                 std::size_t n_targets)
{
    if (grid.empty()) ec::fail(ec::errc::empty_input, "features file: no data");
    if (grid.size() == n_targets) return grid;
    if (grid.front().size() == n_targets) {
        std::vector<std::vector<double>> t(grid.front().size(),
                                           std::vector<double>(grid.size()));
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (std::size_t j = 0; j < grid[i].size(); ++j) t[j][i] = grid[i][j];
        return t;
    }
    ec::fail(ec::errc::shape_mismatch,
             "features file: neither rows nor columns match the " +
                 std::to_string(n_targets) + " target(s)");
}

int run(int argc, char** argv)
{
    CLI::App app{"discrete-probability information toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ec::kVersion));

    OutputConfig cfg;
    std::string joint_path;
    auto add_common = [&](CLI::App* sub, bool with_unit = true) {
        if (with_unit)
            sub->add_option("--unit", cfg.unit, "entropy unit for display")
                ->check(CLI::IsMember({"nats", "bits"}))
                ->capture_default_str();
        sub->add_flag("--json", cfg.json, "emit the JSON report envelope");
        sub->add_option("--out", cfg.out_path, "write the report to a file instead of stdout");
    };

    auto* c_entropy = app.add_subcommand("entropy", "entropy of a joint and its marginals");
    c_entropy->add_option("--joint", joint_path, "joint distribution CSV")->required();
    add_common(c_entropy);

    auto* c_decorr = app.add_subcommand("decorrelate",
                                        "replace a joint by the product of its marginals");
    c_decorr->add_option("--joint", joint_path, "joint distribution CSV")->required();
    c_decorr->add_option("--out", cfg.out_path, "write the product joint CSV to a file");

    auto* c_mi = app.add_subcommand("mi", "mutual information as the decorrelation entropy gap");
    c_mi->add_option("--joint", joint_path, "joint distribution CSV")->required();
    add_common(c_mi);

    auto* c_chain = app.add_subcommand("chain", "chain decomposition S(p) = S(P) + sum P_i S(row_i)");
    c_chain->add_option("--joint", joint_path, "joint distribution CSV")->required();
    add_common(c_chain);

    std::vector<std::string> dist_paths;
    std::vector<double> weights;
    auto* c_mix = app.add_subcommand("mixture", "weighted mixture of distributions");
    c_mix->add_option("--dists", dist_paths, "distribution CSV files")
        ->required()
        ->delimiter(',');
    c_mix->add_option("--weights", weights, "nonnegative weights")->required()->delimiter(',');
    add_common(c_mix);

    std::string features_path;
    std::vector<double> targets;
    double tol = 1e-10;
    auto* c_maxent = app.add_subcommand("maxent",
                                        "least-biased distribution under expectation constraints");
    c_maxent->add_option("--features", features_path, "feature matrix CSV")->required();
    c_maxent->add_option("--targets", targets, "required expectations")->required()->delimiter(',');
    c_maxent->add_option("--tol", tol, "residual tolerance")->capture_default_str();
    add_common(c_maxent);

    double alpha = 0.5;
    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 1;
    std::size_t bins = 50;
    auto* c_maxwell = app.add_subcommand("maxwell-demo",
                                         "verify the two Maxwell assumptions on sampled velocities");
    c_maxwell->add_option("--alpha", alpha, "exponent coefficient of exp(-alpha v^2)")
        ->capture_default_str();
    c_maxwell->add_option("--n", n_samples, "sample count")->capture_default_str();
    c_maxwell->add_option("--seed", seed, "RNG seed")->capture_default_str();
    c_maxwell->add_option("--bins", bins, "histogram bins per axis")->capture_default_str();
    add_common(c_maxwell);

    std::string samples_path, generate;
    std::vector<std::size_t> sweep_bins;
    std::vector<double> range{-6.0, 6.0};
    auto* c_sweep = app.add_subcommand("bin-sweep",
                                       "plug-in entropy vs bin count for a sample stream");
    auto* opt_samples = c_sweep->add_option("--samples", samples_path, "sample CSV file");
    auto* opt_generate = c_sweep->add_option("--generate", generate, "built-in stream: normal")
                             ->check(CLI::IsMember({"normal"}));
    opt_samples->excludes(opt_generate);
    c_sweep->add_option("--bins", sweep_bins, "ascending bin counts")->required()->delimiter(',');
    c_sweep->add_option("--range", range, "binning range LO,HI")
        ->delimiter(',')
        ->expected(2)
        ->capture_default_str();
    c_sweep->add_option("--n", n_samples, "sample count for --generate")->capture_default_str();
    c_sweep->add_option("--seed", seed, "RNG seed for --generate")->capture_default_str();
    add_common(c_sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 1;
    }

    const double scale = unit_scale(cfg.unit);
    ec::ReportMeta meta;
    meta.unit = cfg.unit;

    if (*c_entropy) {
        const auto j = ec::read_joint_csv(joint_path);
        const double sj = ec::entropy(j).nats();
        const double sa = ec::entropy(ec::marginal_a(j)).nats();
        const double sb = ec::entropy(ec::marginal_b(j)).nats();
        nlohmann::json result{{"s_joint", sj * scale}, {"s_marg_a", sa * scale},
                              {"s_marg_b", sb * scale}};
        emit(cfg, meta, result, [&](std::ostream& os) {
            print_row(os, "S(p)", sj * scale, cfg.unit);
            print_row(os, "S(P)", sa * scale, cfg.unit);
            print_row(os, "S(Q)", sb * scale, cfg.unit);
        });
        return 0;
    }
    if (*c_decorr) {
        const auto pi = ec::decorrelate(ec::read_joint_csv(joint_path));
        if (cfg.out_path.empty())
            ec::write_joint_csv(pi, std::cout);
        else
            ec::write_joint_csv(pi, std::filesystem::path(cfg.out_path));
        return 0;
    }
    if (*c_mi) {
        const double mi = ec::mutual_information(ec::read_joint_csv(joint_path)).nats();
        nlohmann::json result{{"mi", mi * scale}};
        emit(cfg, meta, result,
             [&](std::ostream& os) { print_row(os, "MI", mi * scale, cfg.unit); });
        return 0;
    }
    if (*c_chain) {
        const auto j = ec::read_joint_csv(joint_path);
        const auto cd = ec::chain_decompose(j);
        const auto fam = ec::condition_on_a(j);
        emit(cfg, meta, ec::to_result_json(cd, scale), [&](std::ostream& os) {
            print_row(os, "S(P)", cd.s_base.nats() * scale, cfg.unit);
            print_row(os, "sum P_i S(row_i)", cd.s_cond.nats() * scale, cfg.unit);
            print_row(os, "S(p)", cd.s_total.nats() * scale, cfg.unit);
            for (std::size_t i = 0; i < fam.num_rows(); ++i) {
                const std::string name = "S(row_" + std::to_string(i) + ")";
                if (fam.defined(i))
                    print_row(os, name, ec::entropy(fam.row(i)).nats() * scale, cfg.unit);
                else
                    os << "  " << name << std::string(18 - name.size(), ' ')
                       << "(zero-mass row)\n";
            }
        });
        return 0;
    }
    if (*c_mix) {
        std::vector<ec::Marginal> dists;
        dists.reserve(dist_paths.size());
        for (const auto& p : dist_paths) dists.push_back(read_marginal_csv(p));
        const ec::MixtureWeights w(weights);
        const auto mixed = ec::mixture(dists, w);
        const double s_mix = ec::entropy(mixed).nats();
        const double gap = ec::averaging_gap(dists, w);
        nlohmann::json result{
            {"dist", std::vector<double>(mixed.probs().begin(), mixed.probs().end())},
            {"entropy", s_mix * scale},
            {"gap", gap * scale}};
        emit(cfg, meta, result, [&](std::ostream& os) {
            for (std::size_t i = 0; i < mixed.size(); ++i)
                print_row(os, "p[" + std::to_string(i) + "]", mixed[i]);
            print_row(os, "entropy", s_mix * scale, cfg.unit);
            print_row(os, "gap", gap * scale, cfg.unit);
        });
        return 0;
    }
    if (*c_maxent) {
        std::ifstream in(features_path);
        if (!in) ec::fail(ec::errc::io_error, "cannot open " + features_path);
        const auto features = orient_features(ec::parse_numeric_grid(in), targets.size());
        const ec::MaxEntProblem prob(features.front().size(), features, targets);
        const auto sol = ec::solve_maxent(prob, tol);
        emit(cfg, meta, ec::to_result_json(sol, scale), [&](std::ostream& os) {
            for (std::size_t i = 0; i < sol.dist.size(); ++i)
                print_row(os, "p[" + std::to_string(i) + "]", sol.dist[i]);
            for (std::size_t k = 0; k < sol.multipliers.size(); ++k)
                print_row(os, "lambda[" + std::to_string(k) + "]", sol.multipliers[k]);
            print_row(os, "entropy", sol.entropy.nats() * scale, cfg.unit);
            print_row(os, "residual", sol.residual);
            os << "  iterations        " << sol.iterations << '\n';
        });
        return 0;
    }
    if (*c_maxwell) {
        meta.seed = seed;
        meta.rng = ec::kRngId;
        ec::MaxwellParams params;
        params.alpha = alpha;
        params.n_samples = n_samples;
        params.seed = seed;
        const auto samples = ec::sample_maxwell(params);
        const auto rep = ec::maxwell_assumption_report(samples, bins);
        emit(cfg, meta, ec::to_result_json(rep, scale), [&](std::ostream& os) {
            os << "  seed              " << seed << '\n';
            print_row(os, "MI(vx,vy)", rep.mi_xy * scale, cfg.unit);
            print_row(os, "MI(vx,vz)", rep.mi_xz * scale, cfg.unit);
            print_row(os, "MI(vy,vz)", rep.mi_yz * scale, cfg.unit);
            print_row(os, "speed mode", rep.speed_mode);
            print_row(os, "angular deviation", rep.angular_deviation);
        });
        return 0;
    }
    if (*c_sweep) {
        std::vector<double> samples;
        if (!generate.empty()) {
            meta.seed = seed;
            meta.rng = ec::kRngId;
            ec::NormalSampler sampler(seed, 0.0, 1.0);
            samples.resize(n_samples);
            for (auto& v : samples) v = sampler.next();
        } else if (!samples_path.empty()) {
            samples = ec::read_samples_csv(samples_path);
        } else {
            std::cerr << "error: bin-sweep needs --samples or --generate\n";
            return 1;
        }
        const auto table = ec::bin_sweep(samples, sweep_bins, range[0], range[1]);
        emit(cfg, meta, ec::to_result_json(std::span<const ec::SweepRow>(table), scale),
             [&](std::ostream& os) {
                 if (meta.seed) os << "  seed              " << *meta.seed << '\n';
                 os << "  bins    delta                s_binned             s_corrected\n";
                 for (const auto& r : table) {
                     std::string b = std::to_string(r.bins);
                     os << "  " << b << std::string(8 - b.size(), ' ');
                     std::string d = ec::format_full(r.delta);
                     os << d << std::string(d.size() < 21 ? 21 - d.size() : 1, ' ');
                     std::string sb = ec::format_full(r.s_binned * scale);
                     os << sb << std::string(sb.size() < 21 ? 21 - sb.size() : 1, ' ');
                     os << ec::format_full(r.s_corrected * scale) << '\n';
                 }
             });
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const ec::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ec::errc::no_convergence ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
