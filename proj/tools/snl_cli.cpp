// snl: command-line front end for sieve analyses of two-arm failure tables.
//
//   snl analyze   <table.csv> --target 2 --methods lrt-2phase,fisher ...
//   snl posterior <table.csv> --target 1 --grid 101 ...
//   snl simulate  --builtin --replicates 200 --seed 1 ...
//   snl scan      <table.csv> [--candidates "1;2;1,2"] ...
//
// Exit status: 0 ok, 2 bad input, 3 infeasible model, 4 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "snl/bayes.hpp"
#include "snl/fisher.hpp"
#include "snl/fit.hpp"
#include "snl/io.hpp"
#include "snl/permutation.hpp"
#include "snl/plugin.hpp"
#include "snl/sim.hpp"

namespace fs = std::filesystem;
using snl::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<int> parse_indices(const std::string& text) {
    std::vector<int> out;
    for (const auto& s : split_list(text, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw snl::InputError("target index '" + s + "' is not an integer");
        }
    }
    if (out.empty()) throw snl::InputError("empty target list");
    return out;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

struct Common {
    std::string table_path;
    std::string target = "1";
    bool replacement_only = false;
    std::string variant;
    std::uint64_t seed = 1;
    int n_mc = 1000;
    std::string out_dir;
    std::string zero_cell = "auto";
    unsigned threads = 1;
};

snl::Variant chosen_variant(const Common& c) {
    if (c.replacement_only) return snl::Variant::replacement_only;
    if (!c.variant.empty()) return snl::parse_variant(c.variant);
    return snl::Variant::some_or_none;
}

snl::ZeroCellCorrection zero_cell(const std::string& text) {
    snl::ZeroCellCorrection z;
    if (text == "auto" || text == "none" || text == "always" || text == "when_needed") {
        z.mode = snl::parse_zero_cell_mode(text);
        return z;
    }
    try {
        z.pseudocount = std::stod(text);
    } catch (const std::logic_error&) {
        throw snl::InputError("--zero-cell expects auto, none, always or a positive pseudocount");
    }
    if (!(z.pseudocount > 0.0)) throw snl::InputError("zero-cell pseudocount must be positive");
    z.mode = snl::ZeroCellCorrection::Mode::when_needed;
    return z;
}

Json table_block(const snl::FailureTable& table, const snl::TargetSpec& target, const snl::ZeroCellCorrection& zc) {
    Json j = snl::to_json(table);
    j["J"] = table.J();
    std::vector<std::string> target_labels;
    for (int t : target.targets()) target_labels.push_back(table.label(t));
    j["target"] = target.targets();
    j["target_labels"] = target_labels;
    j["target_reindexing"] = target.reindexing();
    j["placebo_p_c"] = snl::placebo_plugin_pc(table, zc);
    return j;
}

Json plugin_block(const snl::FailureTable& table, const snl::TargetSpec& target, bool replacement_only) {
    Json j;
    try {
        const snl::PluginEstimate est = snl::plugin_estimates(table, target, replacement_only);
        j["I_E"] = est.I_E;
        j["I_E_raw"] = est.I_E_raw;
        j["I_E_clamped"] = est.ie_clamped;
        j["p_s"] = est.p_s;
        j["p_t"] = est.p_t;
        j["p_2"] = est.p_2;
        j["q"] = est.q ? Json(*est.q) : Json(nullptr);
        j["r_c0"] = est.r_c0;
        j["r_v0"] = est.r_v0;
        j["valid"] = est.valid();
        j["violations"] = est.violations;
    } catch (const snl::Error& e) {
        j["error"] = e.what();
    }
    return j;
}

void emit(const Common& c, const std::string& command, const std::vector<std::string>& argv, const Json& config,
          const std::vector<std::pair<std::string, std::string>>& files, const std::string& stdout_text,
          const std::string& started) {
    std::cout << stdout_text;
    if (c.out_dir.empty()) return;
    const fs::path dir(c.out_dir);
    Json outputs = Json::array();
    for (const auto& [name, body] : files) {
        snl::write_text(dir / name, body);
        outputs.push_back((dir / name).string());
    }
    Json manifest;
    manifest["command"] = command;
    manifest["argv"] = argv;
    manifest["inputs"] = c.table_path.empty() ? Json::array() : Json::array({c.table_path});
    manifest["config"] = config;
    manifest["seed"] = c.seed;
    manifest["tool_version"] = SNL_VERSION;
    manifest["started_utc"] = started;
    manifest["finished_utc"] = utc_now();
    manifest["outputs"] = outputs;
    snl::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

void add_common(CLI::App* app, Common& c, bool needs_table) {
    if (needs_table) app->add_option("table", c.table_path, "failure table CSV")->required();
    app->add_option("--target", c.target, "targeted failure types, comma separated (1-based)");
    app->add_flag("--replacement-only", c.replacement_only, "fix I_E = 0");
    app->add_option("--variant", c.variant, "some_or_none | replacement_only | insert_only");
    app->add_option("--seed", c.seed, "random seed");
    app->add_option("--n-mc", c.n_mc, "Monte-Carlo draws per Bayes factor or grid point");
    app->add_option("--out", c.out_dir, "output directory for reports and manifest");
    app->add_option("--zero-cell", c.zero_cell, "placebo zero-cell correction: auto | none | always | <pseudocount>");
    app->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

int run_analyze(const Common& c, const std::string& methods_text, int B, bool hier_only,
                const std::vector<std::string>& argv, const std::string& started) {
    (void)hier_only;
    const snl::FailureTable table = snl::read_table_csv(c.table_path);
    const snl::TargetSpec target(parse_indices(c.target), table.J());
    const snl::Variant variant = chosen_variant(c);
    const snl::ZeroCellCorrection zc = zero_cell(c.zero_cell);
    const auto methods = split_list(methods_text, ',');

    snl::FitOptions fo;
    fo.seed = c.seed;
    fo.zero_cell = zc;
    snl::BayesOptions bo;
    bo.n_mc = c.n_mc;
    bo.seed = c.seed;
    bo.zero_cell = zc;
    bo.threads = c.threads;
    snl::PriorSpec priors;

    Json results = Json::array();
    for (const auto& m : methods) {
        snl::TestResult r;
        Json extra;
        if (m == "lrt-1phase" || m == "lrt-2phase") {
            const auto phase = m == "lrt-1phase" ? snl::Phase::one_phase : snl::Phase::two_phase;
            r = snl::lrt(table, target, variant, phase, fo);
            extra["alternative"] = snl::to_json(snl::fit_mle(table, target, variant, phase, fo));
            extra["null"] = snl::to_json(snl::fit_null(table, target, variant, phase, fo));
        } else if (m == "perm-lrt") {
            snl::PermutationOptions po;
            po.B = B;
            po.seed = c.seed;
            po.threads = c.threads;
            r = snl::permutation_null(
                table,
                [&](const snl::FailureTable& t) { return snl::lrt(t, target, variant, snl::Phase::two_phase, fo).statistic; },
                po);
            r.method = "perm-lrt-2phase-" + snl::to_string(variant);
            extra["B"] = B;
            if (!c.out_dir.empty()) extra["null_draws_file"] = "perm_null_draws.csv";
        } else if (m == "bf-1ph" || m == "bf-2ph" || m == "bf-hier") {
            snl::PriorSpec p = priors;
            p.hierarchical = m != "bf-2ph";
            r = snl::bayes_factor(table, target, variant, m == "bf-1ph" ? snl::Phase::one_phase : snl::Phase::two_phase,
                                  p, bo);
            extra["priors"] = snl::to_json(p);
            extra["n_mc"] = c.n_mc;
            extra["I_E"] = snl::analysis_efficacy(table, variant, bo);
        } else if (m == "mbs") {
            r = snl::mbs_bayes_factor(table, target, bo);
            extra["n_mc"] = c.n_mc;
        } else if (m == "fisher") {
            r = snl::fisher_test(table);
        } else {
            throw snl::InputError("unknown method '" + m + "'");
        }
        Json j = snl::to_json(r);
        j["seed"] = c.seed;
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
        results.push_back(j);
        if (m == "perm-lrt" && !c.out_dir.empty()) {
            snl::write_text(fs::path(c.out_dir) / "perm_null_draws.csv", snl::column_csv("statistic", r.null_draws));
        }
    }

    Json report;
    report["command"] = "analyze";
    report["input"] = c.table_path;
    report["variant"] = snl::to_string(variant);
    report["table"] = table_block(table, target, zc);
    report["plugin"] = plugin_block(table, target, variant == snl::Variant::replacement_only);
    report["results"] = results;

    Json config;
    config["target"] = target.targets();
    config["variant"] = snl::to_string(variant);
    config["methods"] = methods;
    config["B"] = B;
    config["n_mc"] = c.n_mc;
    config["zero_cell"] = c.zero_cell;
    config["priors"] = snl::to_json(priors);
    const std::string body = report.dump(2) + "\n";
    emit(c, "analyze", argv, config, {{"report.json", body}}, body, started);
    return kExitOk;
}

int run_posterior(const Common& c, int grid_points, bool non_hier, const std::vector<std::string>& argv,
                  const std::string& started) {
    const snl::FailureTable table = snl::read_table_csv(c.table_path);
    const snl::TargetSpec target(parse_indices(c.target), table.J());
    const snl::Variant variant = chosen_variant(c);
    snl::PriorSpec priors;
    priors.hierarchical = !non_hier;
    snl::BayesOptions bo;
    bo.n_mc = c.n_mc;
    bo.seed = c.seed;
    bo.zero_cell = zero_cell(c.zero_cell);
    bo.threads = c.threads;
    const snl::PosteriorCurve curve = snl::ps_posterior(table, target, variant, priors, snl::uniform_grid(grid_points), bo);

    const std::string csv = snl::posterior_to_csv(curve);
    Json summary;
    summary["command"] = "posterior";
    summary["input"] = c.table_path;
    summary["variant"] = snl::to_string(variant);
    summary["target"] = target.targets();
    summary["I_E"] = curve.I_E;
    summary["argmax"] = curve.argmax;
    summary["grid_points"] = grid_points;
    summary["mc_draws_per_point"] = curve.mc_draws_per_point;
    summary["priors"] = snl::to_json(priors);
    Json config;
    config["target"] = target.targets();
    config["variant"] = snl::to_string(variant);
    config["grid"] = grid_points;
    config["n_mc"] = c.n_mc;
    config["priors"] = snl::to_json(priors);
    const std::string json = summary.dump(2) + "\n";
    emit(c, "posterior", argv, config, {{"posterior.csv", csv}, {"posterior.json", json}},
         c.out_dir.empty() ? csv : json, started);
    return kExitOk;
}

int run_simulate(const Common& c, const std::string& config_path, bool builtin, int replicates,
                 const std::string& methods_text, int B, bool roc, double roc_ps,
                 const std::vector<std::string>& external, const std::vector<std::string>& argv,
                 const std::string& started) {
    if (builtin == !config_path.empty()) throw snl::InputError("pass exactly one of --builtin or --config");
    std::vector<snl::ScenarioConfig> scenarios =
        builtin ? snl::builtin_scenarios(replicates > 0 ? replicates : 1000, c.seed) : snl::read_scenarios(config_path);
    if (!builtin && replicates > 0)
        for (auto& s : scenarios) s.replicates = replicates;
    for (const auto& s : scenarios) s.validate();

    snl::GridOptions go;
    go.n_mc = c.n_mc;
    go.B = B;
    go.seed = c.seed;
    go.threads = c.threads;
    auto methods = split_list(methods_text, ',');
    if (roc) {
        for (const char* m : {"BF1ph", "BF2ph", "MBS-BF"})
            if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
    }
    for (const auto& spec : external) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw snl::InputError("--external expects method=file.csv");
        const std::string name = spec.substr(0, eq);
        std::ifstream in(spec.substr(eq + 1));
        if (!in) throw snl::InputError("cannot open '" + spec.substr(eq + 1) + "'");
        // long format: scenario,replicate,decision
        std::string line;
        std::getline(in, line);
        auto& table = go.external[name];
        while (std::getline(in, line)) {
            const auto f = split_list(line, ',');
            if (f.size() != 3) continue;
            auto& col = table[f[0]];
            const auto r = static_cast<std::size_t>(std::stoul(f[1]));
            if (col.size() <= r) col.resize(r + 1, 0);
            col[r] = std::stoi(f[2]);
        }
        if (std::find(methods.begin(), methods.end(), name) == methods.end()) methods.push_back(name);
    }

    const snl::GridReport report = snl::run_grid(scenarios, methods, go, [](const std::string& label) {
        std::cerr << "finished " << label << "\n";
    });

    std::vector<std::pair<std::string, std::string>> files;
    const std::string heatmap = snl::grid_to_csv(report);
    files.emplace_back("heatmap.csv", heatmap);
    std::ostringstream log;
    log << "scenario,method,replicate,decision,score\n";
    for (std::size_t r = 0; r < report.rows.size(); ++r)
        for (std::size_t m = 0; m < report.cols.size(); ++m)
            for (std::size_t i = 0; i < report.decisions[r][m].size(); ++i)
                log << report.rows[r] << ',' << report.cols[m] << ',' << i << ',' << report.decisions[r][m][i] << ','
                    << snl::format_double(report.scores[r][m][i]) << '\n';
    files.emplace_back("decisions.csv", log.str());
    Json errors;
    for (std::size_t r = 0; r < report.rows.size(); ++r)
        for (std::size_t m = 0; m < report.cols.size(); ++m)
            if (report.errors[r][m] > 0) errors[report.rows[r]][report.cols[m]] = report.errors[r][m];

    std::string stdout_text = heatmap;
    if (roc) {
        std::vector<std::string> positives, negatives;
        for (const auto& s : scenarios) {
            if (s.null_mode != snl::NullMode::none) {
                negatives.push_back(s.label);
            } else if (std::abs(s.p_s - roc_ps) < 1e-12) {
                positives.push_back(s.label);
            }
        }
        const auto panels = snl::roc_panels(report, positives, negatives, {"BF1ph", "BF2ph", "MBS-BF"});
        Json arr = Json::array();
        std::ostringstream csv;
        csv << "positive,negative,method,auc,n_pos,n_neg\n";
        for (const auto& p : panels) {
            arr.push_back({{"positive", p.positive}, {"negative", p.negative}, {"method", p.method},
                           {"auc", p.auc}, {"n_pos", p.n_pos}, {"n_neg", p.n_neg}});
            csv << p.positive << ',' << p.negative << ',' << p.method << ',' << snl::format_double(p.auc) << ','
                << p.n_pos << ',' << p.n_neg << '\n';
        }
        files.emplace_back("roc.json", Json{{"p_s", roc_ps}, {"panels", arr}}.dump(2) + "\n");
        files.emplace_back("roc.csv", csv.str());
        stdout_text += csv.str();
    }

    Json config;
    Json sc = Json::array();
    for (const auto& s : scenarios) sc.push_back(snl::to_json(s));
    config["scenarios"] = sc;
    config["methods"] = methods;
    config["alpha"] = go.alpha;
    config["bf_threshold"] = go.bf_threshold;
    config["n_mc"] = go.n_mc;
    config["B"] = go.B;
    config["fit_starts"] = go.fit_starts;
    config["errors"] = errors;
    if (roc) config["roc_p_s"] = roc_ps;
    emit(c, "simulate", argv, config, files, stdout_text, started);
    return kExitOk;
}

int run_scan(const Common& c, const std::string& candidates_text, double prior_null, bool non_hier,
             const std::vector<std::string>& argv, const std::string& started) {
    const snl::FailureTable table = snl::read_table_csv(c.table_path);
    std::vector<snl::TargetSpec> candidates;
    bool include_null = true;
    if (candidates_text.empty()) {
        candidates = snl::all_target_sets(table.J());
    } else {
        include_null = false;
        for (const auto& spec : split_list(candidates_text, ';')) {
            if (spec == "null")
                include_null = true;
            else
                candidates.emplace_back(parse_indices(spec), table.J());
        }
        if (candidates.empty()) throw snl::InputError("--candidates lists no target set");
    }
    std::vector<double> prior;
    if (prior_null >= 0.0) {
        if (prior_null > 1.0) throw snl::InputError("--prior-null must lie in [0, 1]");
        if (!include_null) throw snl::InputError("--prior-null needs the null among the candidates");
        prior.assign(candidates.size(), (1.0 - prior_null) / static_cast<double>(candidates.size()));
        prior.push_back(prior_null);
    }
    const snl::Variant variant = chosen_variant(c);
    snl::PriorSpec priors;
    priors.hierarchical = !non_hier;
    snl::BayesOptions bo;
    bo.n_mc = c.n_mc;
    bo.seed = c.seed;
    bo.zero_cell = zero_cell(c.zero_cell);
    bo.threads = c.threads;
    const auto entries = snl::model_scan(table, candidates, variant, snl::Phase::two_phase, priors, prior, bo, include_null);

    Json ranked = Json::array();
    std::ostringstream csv;
    csv << "rank,model,labels,prior,log10_bf,posterior,posterior_se\n";
    int rank = 0;
    for (const auto& e : entries) {
        std::string labels;
        if (e.target)
            for (int t : e.target->targets()) labels += (labels.empty() ? "" : "+") + table.label(t);
        else
            labels = "all-or-none";
        Json j{{"model", e.label}, {"labels", labels}, {"prior", e.prior},
               {"log10_bayes_factor", std::isfinite(e.log_bayes_factor) ? Json(e.log_bayes_factor / std::log(10.0)) : Json(nullptr)},
               {"posterior", e.posterior}, {"posterior_se", e.posterior_se}};
        if (!e.error.empty()) j["error"] = e.error;
        ranked.push_back(j);
        csv << ++rank << ',' << '"' << e.label << '"' << ',' << labels << ',' << snl::format_double(e.prior) << ','
            << snl::format_double(e.log_bayes_factor / std::log(10.0)) << ',' << snl::format_double(e.posterior) << ','
            << snl::format_double(e.posterior_se) << '\n';
    }
    Json report{{"command", "scan"}, {"input", c.table_path}, {"variant", snl::to_string(variant)}, {"models", ranked}};
    Json config{{"candidates", candidates_text.empty() ? Json("all") : Json(candidates_text)},
                {"include_null", include_null},
                {"prior_null", prior_null}, {"n_mc", c.n_mc}, {"priors", snl::to_json(priors)}};
    const std::string body = report.dump(2) + "\n";
    emit(c, "scan", argv, config, {{"scan.json", body}, {"scan.csv", csv.str()}}, csv.str(), started);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    const std::string started = utc_now();

    CLI::App app{"Sieve analysis of two-arm failure tables under some-or-none intervention models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SNL_VERSION);

    Common analyze_c, posterior_c, simulate_c, scan_c;
    std::string methods = "lrt-2phase,fisher";
    int B = 1000;
    auto* analyze = app.add_subcommand("analyze", "tests for a sieve effect on one table");
    add_common(analyze, analyze_c, true);
    analyze->add_option("--methods", methods,
                        "comma list of lrt-1phase, lrt-2phase, perm-lrt, bf-1ph, bf-2ph, bf-hier, mbs, fisher");
    analyze->add_option("--B", B, "permutation replicates");

    int grid = 101;
    bool non_hier = false;
    auto* posterior = app.add_subcommand("posterior", "posterior curve of the sieve-effect strength p_s");
    add_common(posterior, posterior_c, true);
    posterior->add_option("--grid", grid, "number of equally spaced grid points on [0, 1]");
    posterior->add_flag("--non-hierarchical", non_hier, "fix p_c at placebo frequencies instead of updating priors");

    std::string config_path;
    bool builtin = false, roc = false;
    int replicates = 0;
    int sim_B = 100;
    double roc_ps = 0.15;
    std::string sim_methods = "1phase,2phase,BF1ph,BF2ph,MBS-BF,BF1ph-perm,BF2ph-perm,MBS,Fisher";
    std::vector<std::string> external;
    auto* simulate = app.add_subcommand("simulate", "simulation study over scenario configurations");
    add_common(simulate, simulate_c, false);
    simulate->add_option("--config", config_path, "scenario JSON (object, array, or {\"scenarios\": [...]})");
    simulate->add_flag("--builtin", builtin, "use the eleven built-in scenarios");
    simulate->add_option("--replicates", replicates, "replicates per scenario (overrides the config)");
    simulate->add_option("--methods", sim_methods, "comma list of methods");
    simulate->add_option("--B", sim_B, "permutations per -perm decision");
    simulate->add_flag("--roc", roc, "also emit ROC AUCs for the Bayes-factor methods");
    simulate->add_option("--ps", roc_ps, "p_s of the ROC positive scenarios");
    simulate->add_option("--external", external, "externally computed decisions: method=file.csv");

    std::string candidates;
    double prior_null = -1.0;
    auto* scan = app.add_subcommand("scan", "posterior probabilities over candidate target sets");
    add_common(scan, scan_c, true);
    scan->add_option("--candidates", candidates, "semicolon-separated target sets, \"null\" for the all-or-none model, e.g. \"1;2;1,2;null\"");
    scan->add_option("--prior-null", prior_null, "prior probability of the all-or-none null (default: even odds)");
    scan->add_flag("--non-hierarchical", non_hier, "fix p_c at placebo frequencies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*analyze) return run_analyze(analyze_c, methods, B, false, args, started);
        if (*posterior) return run_posterior(posterior_c, grid, non_hier, args, started);
        if (*simulate)
            return run_simulate(simulate_c, config_path, builtin, replicates, sim_methods, sim_B, roc, roc_ps, external,
                                args, started);
        if (*scan) return run_scan(scan_c, candidates, prior_null, non_hier, args, started);
    } catch (const snl::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const snl::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const snl::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
