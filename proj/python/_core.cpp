#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snl/bayes.hpp"
#include "snl/fisher.hpp"
#include "snl/fit.hpp"
#include "snl/io.hpp"
#include "snl/likelihood.hpp"
#include "snl/permutation.hpp"
#include "snl/plugin.hpp"
#include "snl/profile.hpp"
#include "snl/sim.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

snl::TargetSpec as_target(const std::vector<int>& targets, const snl::FailureTable& table) {
    return snl::TargetSpec(targets, table.J());
}

snl::ZeroCellCorrection zero_cell(const std::string& mode) {
    snl::ZeroCellCorrection z;
    z.mode = snl::parse_zero_cell_mode(mode);
    return z;
}

snl::BayesOptions bayes_options(int n_mc, std::uint64_t seed, unsigned threads, const std::string& zc) {
    snl::BayesOptions o;
    o.n_mc = n_mc;
    o.seed = seed;
    o.threads = threads;
    o.zero_cell = zero_cell(zc);
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "sieve analysis of two-arm failure-type tables";
    m.attr("__version__") = SNL_VERSION;

    auto base = py::register_exception<snl::Error>(m, "SnlError", PyExc_RuntimeError);
    py::register_exception<snl::InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<snl::InfeasibleError>(m, "InfeasibleError", base.ptr());
    py::register_exception<snl::NumericalError>(m, "NumericalError", base.ptr());

    py::class_<snl::FailureTable>(m, "FailureTable")
        .def(py::init<std::vector<snl::Count>, std::vector<snl::Count>, std::vector<std::string>>(),
             "placebo"_a, "vaccine"_a, "labels"_a = std::vector<std::string>{})
        .def_property_readonly("J", &snl::FailureTable::J)
        .def_property_readonly("placebo", [](const snl::FailureTable& t) {
            return std::vector<snl::Count>(t.placebo().begin(), t.placebo().end());
        })
        .def_property_readonly("vaccine", [](const snl::FailureTable& t) {
            return std::vector<snl::Count>(t.vaccine().begin(), t.vaccine().end());
        })
        .def_property_readonly("labels", &snl::FailureTable::labels)
        .def("to_csv", &snl::table_to_csv)
        .def("__eq__", &snl::FailureTable::operator==)
        .def("__repr__", [](const snl::FailureTable& t) { return "FailureTable(J=" + std::to_string(t.J()) + ")"; });

    m.def("read_table_csv", [](const std::string& path) { return snl::read_table_csv(path); }, "path"_a);
    m.def("parse_table_csv", &snl::parse_table_csv, "text"_a, "source"_a = "<input>");

    py::class_<snl::SnlParams>(m, "SnlParams")
        .def(py::init([](std::vector<double> p_c, double p_s, double I_E, double r_c0, std::vector<double> q) {
                 return snl::SnlParams{std::move(p_c), p_s, I_E, r_c0, std::move(q)};
             }),
             "p_c"_a, "p_s"_a, "I_E"_a, "r_c0"_a = 0.9, "q"_a)
        .def_readwrite("p_c", &snl::SnlParams::p_c)
        .def_readwrite("p_s", &snl::SnlParams::p_s)
        .def_readwrite("I_E", &snl::SnlParams::I_E)
        .def_readwrite("r_c0", &snl::SnlParams::r_c0)
        .def_readwrite("q", &snl::SnlParams::q);

    py::class_<snl::FeasibilityReport>(m, "FeasibilityReport")
        .def_readonly("feasible", &snl::FeasibilityReport::feasible)
        .def_readonly("slack", &snl::FeasibilityReport::slack)
        .def_readonly("ie_upper", &snl::FeasibilityReport::ie_upper)
        .def_readonly("pcg_lower", &snl::FeasibilityReport::pcg_lower)
        .def_readonly("ps_lower", &snl::FeasibilityReport::ps_lower)
        .def("describe", &snl::FeasibilityReport::describe);
    m.def("feasibility_check", &snl::feasibility_check, "I_E"_a, "p_cG"_a, "p_s"_a);

    py::class_<snl::DerivedRates>(m, "DerivedRates")
        .def_readonly("p_t", &snl::DerivedRates::p_t)
        .def_readonly("p_2", &snl::DerivedRates::p_2)
        .def_readonly("p_v", &snl::DerivedRates::p_v)
        .def_readonly("r_v0", &snl::DerivedRates::r_v0);
    m.def("vaccine_profile",
          [](const snl::SnlParams& p, const std::vector<int>& targets) {
              return snl::vaccine_profile(p, snl::TargetSpec(targets, static_cast<int>(p.p_c.size())));
          },
          "params"_a, "targets"_a);

    py::class_<snl::PluginEstimate>(m, "PluginEstimate")
        .def_readonly("p_c", &snl::PluginEstimate::p_c)
        .def_readonly("p_v", &snl::PluginEstimate::p_v)
        .def_readonly("r_c0", &snl::PluginEstimate::r_c0)
        .def_readonly("r_v0", &snl::PluginEstimate::r_v0)
        .def_readonly("I_E", &snl::PluginEstimate::I_E)
        .def_readonly("I_E_raw", &snl::PluginEstimate::I_E_raw)
        .def_readonly("p_s", &snl::PluginEstimate::p_s)
        .def_readonly("p_t", &snl::PluginEstimate::p_t)
        .def_readonly("p_2", &snl::PluginEstimate::p_2)
        .def_readonly("q", &snl::PluginEstimate::q)
        .def_readonly("violations", &snl::PluginEstimate::violations)
        .def_property_readonly("valid", &snl::PluginEstimate::valid);
    m.def("plugin_estimates",
          [](const snl::FailureTable& t, const std::vector<int>& targets, bool replacement_only) {
              return snl::plugin_estimates(t, as_target(targets, t), replacement_only);
          },
          "table"_a, "targets"_a, "replacement_only"_a = false);

    m.def("log_likelihood",
          [](const snl::FailureTable& t, const snl::SnlParams& p, const std::vector<int>& targets,
             const std::string& phase) {
              return snl::log_likelihood(t, p, as_target(targets, t),
                                         snl::parse_phase(phase) == snl::Phase::one_phase
                                             ? snl::LikelihoodScope::one_phase
                                             : snl::LikelihoodScope::two_phase_conditional,
                                         true);
          },
          "table"_a, "params"_a, "targets"_a, "phase"_a = "one_phase");

    py::class_<snl::TestResult>(m, "TestResult")
        .def_readonly("method", &snl::TestResult::method)
        .def_readonly("statistic", &snl::TestResult::statistic)
        .def_readonly("raw_statistic", &snl::TestResult::raw_statistic)
        .def_readonly("p_value", &snl::TestResult::p_value)
        .def_readonly("bayes_factor", &snl::TestResult::bayes_factor)
        .def_readonly("log_bayes_factor", &snl::TestResult::log_bayes_factor)
        .def_readonly("mc_se", &snl::TestResult::mc_se)
        .def_readonly("null_draws", &snl::TestResult::null_draws)
        .def_readonly("boundary", &snl::TestResult::boundary)
        .def_readonly("notes", &snl::TestResult::notes)
        .def("to_json", [](const snl::TestResult& r) { return snl::to_json(r).dump(); });

    py::class_<snl::FitResult>(m, "FitResult")
        .def_readonly("params", &snl::FitResult::params)
        .def_readonly("p_v", &snl::FitResult::p_v)
        .def_readonly("r_v0", &snl::FitResult::r_v0)
        .def_readonly("log_lik", &snl::FitResult::log_lik)
        .def_readonly("converged", &snl::FitResult::converged)
        .def_readonly("boundary", &snl::FitResult::boundary)
        .def_property_readonly("variant", [](const snl::FitResult& f) { return snl::to_string(f.variant); })
        .def_property_readonly("phase", [](const snl::FitResult& f) { return snl::to_string(f.phase); });

    auto fit_options = [](int starts, std::uint64_t seed, const std::string& zc) {
        snl::FitOptions o;
        o.starts = starts;
        o.seed = seed;
        o.zero_cell = zero_cell(zc);
        return o;
    };
    m.def("fit_mle",
          [=](const snl::FailureTable& t, const std::vector<int>& targets, const std::string& variant,
              const std::string& phase, int starts, std::uint64_t seed, const std::string& zc) {
              return snl::fit_mle(t, as_target(targets, t), snl::parse_variant(variant), snl::parse_phase(phase),
                                  fit_options(starts, seed, zc));
          },
          "table"_a, "targets"_a, "variant"_a = "some_or_none", "phase"_a = "two_phase", "starts"_a = 8,
          "seed"_a = 1, "zero_cell"_a = "auto");
    m.def("fit_null",
          [=](const snl::FailureTable& t, const std::vector<int>& targets, const std::string& variant,
              const std::string& phase, int starts, std::uint64_t seed, const std::string& zc) {
              return snl::fit_null(t, as_target(targets, t), snl::parse_variant(variant), snl::parse_phase(phase),
                                   fit_options(starts, seed, zc));
          },
          "table"_a, "targets"_a, "variant"_a = "some_or_none", "phase"_a = "two_phase", "starts"_a = 8,
          "seed"_a = 1, "zero_cell"_a = "auto");
    m.def("lrt",
          [=](const snl::FailureTable& t, const std::vector<int>& targets, const std::string& variant,
              const std::string& phase, int starts, std::uint64_t seed, const std::string& zc) {
              return snl::lrt(t, as_target(targets, t), snl::parse_variant(variant), snl::parse_phase(phase),
                              fit_options(starts, seed, zc));
          },
          "table"_a, "targets"_a, "variant"_a = "some_or_none", "phase"_a = "two_phase", "starts"_a = 8,
          "seed"_a = 1, "zero_cell"_a = "auto");
    m.def("chi2_sf_1df", &snl::chi2_sf_1df, "x"_a);

    m.def("permutation_lrt",
          [=](const snl::FailureTable& t, const std::vector<int>& targets, const std::string& variant, int B,
              std::uint64_t seed, unsigned threads) {
              const snl::TargetSpec target = as_target(targets, t);
              const snl::Variant v = snl::parse_variant(variant);
              const snl::FitOptions fo = fit_options(8, seed, "auto");
              snl::PermutationOptions po;
              po.B = B;
              po.seed = seed;
              po.threads = threads;
              py::gil_scoped_release nogil;
              return snl::permutation_null(
                  t, [&](const snl::FailureTable& x) { return snl::lrt(x, target, v, snl::Phase::two_phase, fo).statistic; },
                  po);
          },
          "table"_a, "targets"_a, "variant"_a = "some_or_none", "B"_a = 1000, "seed"_a = 1, "threads"_a = 1);

    m.def("fisher_test",
          [](const snl::FailureTable& t, std::uint64_t seed) {
              snl::FisherOptions o;
              o.seed = seed;
              return snl::fisher_test(t, o);
          },
          "table"_a, "seed"_a = 1);

    py::class_<snl::PriorSpec>(m, "PriorSpec")
        .def(py::init<>())
        .def_readwrite("p_c_concentration", &snl::PriorSpec::p_c_concentration)
        .def_readwrite("q_concentration", &snl::PriorSpec::q_concentration)
        .def_readwrite("hierarchical", &snl::PriorSpec::hierarchical)
        .def_readwrite("mbs_pseudocount", &snl::PriorSpec::mbs_pseudocount);

    m.def("bayes_factor",
          [](const snl::FailureTable& t, const std::vector<int>& targets, const std::string& variant,
             const std::string& phase, const snl::PriorSpec& priors, int n_mc, std::uint64_t seed, unsigned threads,
             const std::string& zc) {
              py::gil_scoped_release nogil;
              return snl::bayes_factor(t, as_target(targets, t), snl::parse_variant(variant), snl::parse_phase(phase),
                                       priors, bayes_options(n_mc, seed, threads, zc));
          },
          "table"_a, "targets"_a, "variant"_a = "some_or_none", "phase"_a = "two_phase",
          "priors"_a = snl::PriorSpec{}, "n_mc"_a = 1000, "seed"_a = 1, "threads"_a = 1, "zero_cell"_a = "auto");
    m.def("mbs_bayes_factor",
          [](const snl::FailureTable& t, const std::vector<int>& targets, int n_mc, std::uint64_t seed,
             double pseudocount) {
              return snl::mbs_bayes_factor(t, as_target(targets, t), bayes_options(n_mc, seed, 1, "auto"), pseudocount);
          },
          "table"_a, "targets"_a, "n_mc"_a = 1000, "seed"_a = 1, "pseudocount"_a = 0.0);

    py::class_<snl::PosteriorCurve>(m, "PosteriorCurve")
        .def_readonly("grid", &snl::PosteriorCurve::grid)
        .def_readonly("log_density", &snl::PosteriorCurve::log_density)
        .def_readonly("argmax", &snl::PosteriorCurve::argmax)
        .def_readonly("I_E", &snl::PosteriorCurve::I_E)
        .def_readonly("mc_draws_per_point", &snl::PosteriorCurve::mc_draws_per_point);
    m.def("ps_posterior",
          [](const snl::FailureTable& t, const std::vector<int>& targets, const std::string& variant,
             const snl::PriorSpec& priors, int grid, int n_mc, std::uint64_t seed) {
              return snl::ps_posterior(t, as_target(targets, t), snl::parse_variant(variant), priors,
                                       snl::uniform_grid(grid), bayes_options(n_mc, seed, 1, "auto"));
          },
          "table"_a, "targets"_a, "variant"_a = "some_or_none", "priors"_a = snl::PriorSpec{}, "grid"_a = 101,
          "n_mc"_a = 1000, "seed"_a = 1);

    py::class_<snl::ScanEntry>(m, "ScanEntry")
        .def_readonly("label", &snl::ScanEntry::label)
        .def_readonly("prior", &snl::ScanEntry::prior)
        .def_readonly("log_bayes_factor", &snl::ScanEntry::log_bayes_factor)
        .def_readonly("posterior", &snl::ScanEntry::posterior)
        .def_readonly("posterior_se", &snl::ScanEntry::posterior_se)
        .def_readonly("error", &snl::ScanEntry::error)
        .def_property_readonly("targets", [](const snl::ScanEntry& e) {
            return e.target ? e.target->targets() : std::vector<int>{};
        });
    m.def("model_scan",
          [](const snl::FailureTable& t, std::optional<std::vector<std::vector<int>>> candidates,
             const std::string& variant, const std::vector<double>& prior_probs, int n_mc, std::uint64_t seed,
             bool include_null) {
              std::vector<snl::TargetSpec> specs;
              if (candidates)
                  for (const auto& c : *candidates) specs.emplace_back(c, t.J());
              else
                  specs = snl::all_target_sets(t.J());
              return snl::model_scan(t, specs, snl::parse_variant(variant), snl::Phase::two_phase, snl::PriorSpec{},
                                     prior_probs, bayes_options(n_mc, seed, 1, "auto"), include_null);
          },
          "table"_a, "candidates"_a = py::none(), "variant"_a = "some_or_none",
          "prior_probs"_a = std::vector<double>{}, "n_mc"_a = 1000, "seed"_a = 1, "include_null"_a = true);

    py::class_<snl::ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("label", &snl::ScenarioConfig::label)
        .def_readwrite("n_p", &snl::ScenarioConfig::n_p)
        .def_readwrite("n_v", &snl::ScenarioConfig::n_v)
        .def_readwrite("r_c0", &snl::ScenarioConfig::r_c0)
        .def_readwrite("p_c", &snl::ScenarioConfig::p_c)
        .def_readwrite("targets", &snl::ScenarioConfig::targets)
        .def_readwrite("I_E", &snl::ScenarioConfig::I_E)
        .def_readwrite("p_s", &snl::ScenarioConfig::p_s)
        .def_readwrite("replicates", &snl::ScenarioConfig::replicates)
        .def_readwrite("seed", &snl::ScenarioConfig::seed)
        .def_property(
            "q_mode", [](const snl::ScenarioConfig& c) { return snl::to_string(c.q_mode); },
            [](snl::ScenarioConfig& c, const std::string& s) { c.q_mode = snl::parse_q_mode(s); })
        .def_property(
            "null_mode", [](const snl::ScenarioConfig& c) { return snl::to_string(c.null_mode); },
            [](snl::ScenarioConfig& c, const std::string& s) { c.null_mode = snl::parse_null_mode(s); })
        .def("validate", &snl::ScenarioConfig::validate);
    m.def("builtin_scenarios", &snl::builtin_scenarios, "replicates"_a = 1000, "seed"_a = 1);
    m.def("published_p_c", &snl::published_p_c);
    m.def("simulate_dataset", &snl::simulate_dataset, "config"_a, "replicate"_a);
    m.def("known_methods", &snl::known_methods);

    py::class_<snl::GridReport>(m, "GridReport")
        .def_readonly("rows", &snl::GridReport::rows)
        .def_readonly("cols", &snl::GridReport::cols)
        .def_readonly("rejection_rate", &snl::GridReport::rejection_rate)
        .def_readonly("errors", &snl::GridReport::errors)
        .def_readonly("scores", &snl::GridReport::scores)
        .def_readonly("decisions", &snl::GridReport::decisions)
        .def("to_csv", &snl::grid_to_csv);
    m.def("run_grid",
          [](const std::vector<snl::ScenarioConfig>& scenarios, const std::vector<std::string>& methods, double alpha,
             int n_mc, int B, std::uint64_t seed, unsigned threads) {
              snl::GridOptions o;
              o.alpha = alpha;
              o.n_mc = n_mc;
              o.B = B;
              o.seed = seed;
              o.threads = threads;
              py::gil_scoped_release nogil;
              return snl::run_grid(scenarios, methods, o);
          },
          "scenarios"_a, "methods"_a, "alpha"_a = 0.05, "n_mc"_a = 1000, "B"_a = 100, "seed"_a = 1, "threads"_a = 0);
}
