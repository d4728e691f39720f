#include "snl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace snl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, int column, const std::string& what)
    : InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line), column_(column) {}

FailureTable parse_table_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::vector<std::string> header;
    int header_line = 0;
    std::vector<Count> placebo, vaccine;
    bool have_p = false, have_v = false;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line);
        if (header.empty()) {
            header = fields;
            header_line = line_no;
            for (auto& h : header)
                for (auto& c : h) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (header[0] != "arm") throw ParseError(source, line_no, 1, "header must start with 'arm'");
            if (header.size() < 4) throw ParseError(source, line_no, static_cast<int>(header.size()),
                                                    "need columns cat0..catJ with J >= 2");
            for (std::size_t k = 1; k < header.size(); ++k)
                if (header[k] != "cat" + std::to_string(k - 1))
                    throw ParseError(source, line_no, static_cast<int>(k + 1),
                                     "expected column 'cat" + std::to_string(k - 1) + "', found '" + header[k] + "'");
            continue;
        }
        if (fields.size() != header.size())
            throw ParseError(source, line_no, static_cast<int>(std::min(fields.size(), header.size()) + 1),
                             "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
        std::string arm = fields[0];
        for (auto& c : arm) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (arm != "P" && arm != "V") throw ParseError(source, line_no, 1, "arm must be P or V, found '" + fields[0] + "'");
        if ((arm == "P" && have_p) || (arm == "V" && have_v))
            throw ParseError(source, line_no, 1, "duplicate row for arm " + arm);
        std::vector<Count> counts;
        for (std::size_t k = 1; k < fields.size(); ++k) {
            Count v = 0;
            const auto& f = fields[k];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
                throw ParseError(source, line_no, static_cast<int>(k + 1), "'" + f + "' is not an integer count");
            if (v < 0) throw ParseError(source, line_no, static_cast<int>(k + 1), "negative count");
            counts.push_back(v);
        }
        if (arm == "P") {
            placebo = std::move(counts);
            have_p = true;
        } else {
            vaccine = std::move(counts);
            have_v = true;
        }
    }
    if (header.empty()) throw ParseError(source, std::max(1, line_no), 1, "empty table");
    if (!have_p || !have_v)
        throw ParseError(source, line_no + 1, 1, std::string("missing row for arm ") + (have_p ? "V" : "P"));
    (void)header_line;
    try {
        return FailureTable(std::move(placebo), std::move(vaccine));
    } catch (const InputError& e) {
        throw ParseError(source, line_no, 1, e.what());
    }
}

FailureTable read_table_csv(const std::filesystem::path& path) {
    const FailureTable base = parse_table_csv(read_file(path), path.string());
    std::filesystem::path sidecar = path;
    sidecar.replace_extension(".labels.json");
    if (!std::filesystem::exists(sidecar)) return base;
    Json j;
    try {
        j = Json::parse(read_file(sidecar));
    } catch (const Json::exception& e) {
        throw InputError("label sidecar '" + sidecar.string() + "': " + e.what());
    }
    std::vector<std::string> labels;
    const Json& arr = j.is_array() ? j : j.at("labels");
    for (const auto& v : arr) labels.push_back(v.get<std::string>());
    return FailureTable(std::vector<Count>(base.placebo().begin(), base.placebo().end()),
                        std::vector<Count>(base.vaccine().begin(), base.vaccine().end()), labels);
}

std::string table_to_csv(const FailureTable& table) {
    std::ostringstream out;
    out << "arm";
    for (int k = 0; k <= table.J(); ++k) out << ",cat" << k;
    out << "\nP";
    for (Count c : table.placebo()) out << ',' << c;
    out << "\nV";
    for (Count c : table.vaccine()) out << ',' << c;
    out << '\n';
    return out.str();
}

Json to_json(const FailureTable& table) {
    Json j;
    j["n_p"] = std::vector<Count>(table.placebo().begin(), table.placebo().end());
    j["n_v"] = std::vector<Count>(table.vaccine().begin(), table.vaccine().end());
    if (!table.labels().empty()) j["labels"] = table.labels();
    return j;
}

Json to_json(const SnlParams& params) {
    Json j;
    j["p_c"] = params.p_c;
    j["p_s"] = params.p_s;
    j["I_E"] = params.I_E;
    j["r_c0"] = params.r_c0;
    j["q"] = params.q;
    return j;
}

SnlParams params_from_json(const Json& j) {
    try {
        SnlParams p;
        p.p_c = j.at("p_c").get<std::vector<double>>();
        p.p_s = j.at("p_s").get<double>();
        p.I_E = j.at("I_E").get<double>();
        p.r_c0 = j.value("r_c0", 0.9);
        p.q = j.at("q").get<std::vector<double>>();
        return p;
    } catch (const Json::exception& e) {
        throw InputError(std::string("parameter JSON: ") + e.what());
    }
}

Json to_json(const TestResult& r) {
    Json j;
    j["method"] = r.method;
    j["statistic"] = number_or_null(r.statistic);
    if (r.raw_statistic != r.statistic) j["raw_statistic"] = number_or_null(r.raw_statistic);
    j["p_value"] = r.p_value ? number_or_null(*r.p_value) : Json(nullptr);
    j["bayes_factor"] = r.bayes_factor ? number_or_null(*r.bayes_factor) : Json(nullptr);
    if (r.log_bayes_factor) j["log10_bayes_factor"] = number_or_null(*r.log_bayes_factor / std::log(10.0));
    j["mc_se"] = r.mc_se ? number_or_null(*r.mc_se) : Json(nullptr);
    if (r.boundary) j["boundary"] = true;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

Json to_json(const FitResult& fit) {
    Json j;
    j["variant"] = to_string(fit.variant);
    j["phase"] = to_string(fit.phase);
    j["params"] = to_json(fit.params);
    j["p_v"] = fit.p_v;
    j["r_v0"] = fit.r_v0;
    j["log_lik"] = number_or_null(fit.log_lik);
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["boundary"] = fit.boundary;
    return j;
}

Json to_json(const PriorSpec& priors) {
    Json j;
    j["p_c_concentration"] = priors.p_c_concentration.empty() ? Json("ones") : Json(priors.p_c_concentration);
    j["q_concentration"] = priors.q_concentration.empty() ? Json("ones") : Json(priors.q_concentration);
    j["hierarchical"] = priors.hierarchical;
    j["p_s_prior"] = "uniform(0,1) truncated to the feasible interval";
    j["mbs_pseudocount"] = priors.mbs_pseudocount > 0.0 ? Json(priors.mbs_pseudocount) : Json("1/J");
    return j;
}

Json to_json(const ScenarioConfig& c) {
    Json j;
    j["label"] = c.label;
    j["n_p"] = c.n_p;
    j["n_v"] = c.n_v;
    j["r_c0"] = c.r_c0;
    j["p_c"] = c.p_c;
    j["targets"] = c.targets;
    j["I_E"] = c.I_E;
    j["p_s"] = c.p_s;
    j["q_mode"] = to_string(c.q_mode);
    j["null_mode"] = to_string(c.null_mode);
    j["replicates"] = c.replicates;
    j["seed"] = c.seed;
    return j;
}

ScenarioConfig scenario_from_json(const Json& j) {
    try {
        ScenarioConfig c;
        c.label = j.value("label", std::string("scenario"));
        c.n_p = j.value("n_p", Count{1000});
        c.n_v = j.value("n_v", Count{1000});
        c.r_c0 = j.value("r_c0", 0.9);
        c.p_c = j.contains("p_c") ? normalized_simplex(j.at("p_c").get<std::vector<double>>(), "p_c") : published_p_c();
        c.targets = j.value("targets", std::vector<int>{1});
        c.I_E = j.value("I_E", 0.0);
        c.p_s = j.value("p_s", 0.0);
        c.q_mode = parse_q_mode(j.value("q_mode", std::string("uniform")));
        c.null_mode = parse_null_mode(j.value("null_mode", std::string("none")));
        c.replicates = j.value("replicates", 1000);
        c.seed = j.value("seed", std::uint64_t{1});
        return c;
    } catch (const Json::exception& e) {
        throw InputError(std::string("scenario JSON: ") + e.what());
    }
}

std::vector<ScenarioConfig> read_scenarios(const std::filesystem::path& path) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw InputError("scenario file '" + path.string() + "': " + e.what());
    }
    std::vector<ScenarioConfig> out;
    const Json& arr = j.is_object() && j.contains("scenarios") ? j.at("scenarios") : j;
    if (arr.is_array())
        for (const auto& s : arr) out.push_back(scenario_from_json(s));
    else
        out.push_back(scenario_from_json(arr));
    return out;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string posterior_to_csv(const PosteriorCurve& curve) {
    std::ostringstream out;
    out << "p_s,log_density\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << format_double(curve.grid[i]) << ',' << format_double(curve.log_density[i]) << '\n';
    return out.str();
}

std::string grid_to_csv(const GridReport& report) {
    std::ostringstream out;
    out << "scenario";
    for (const auto& c : report.cols) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
        out << report.rows[r];
        for (double v : report.rejection_rate[r]) out << ',' << format_double(v);
        out << '\n';
    }
    return out.str();
}

std::string column_csv(const std::string& header, const std::vector<double>& values) {
    std::ostringstream out;
    out << header << '\n';
    for (double v : values) out << format_double(v) << '\n';
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace snl
