#include "kfwer/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace kfwer::io {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

template <class Int>
bool parse_int(std::string_view text, Int& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size();
}

bool valid_id(std::string_view id) {
    if (id.empty()) return false;
    for (char c : id) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-';
        if (!ok) return false;
    }
    return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    return in;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
    std::filesystem::path p(file);
    if (p.is_relative() && !base.empty()) p = base / p;
    return p;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

template <class T>
T get_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": key '" + key + "' has the wrong type");
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    return get_field<T>(obj, key, where);
}

int get_int(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!obj.at(key).is_number_integer()) throw ConfigError(where + ": key '" + key + "' must be an integer");
    return obj.at(key).get<int>();
}

NullModel parse_model_json(const json& m, const std::string& where, const std::filesystem::path& base) {
    if (!m.is_object()) throw ConfigError(where + ": model must be an object");
    reject_unknown_keys(m, {"kind", "rho", "loadings", "loadings_file", "dof", "samples", "seed"}, where);
    const auto kind = get_field<std::string>(m, "kind", where);
    if (kind == "independent") return NullModel::independent();
    if (kind == "equicorrelated_normal" || kind == "equicorr") {
        return NullModel::equicorrelated_normal(get_field<double>(m, "rho", where));
    }
    if (kind == "factor_normal" || kind == "factor") {
        if (m.contains("loadings")) return NullModel::factor_normal(get_field<std::vector<double>>(m, "loadings", where));
        if (m.contains("loadings_file")) {
            return NullModel::factor_normal(read_loadings_file(resolve(base, get_field<std::string>(m, "loadings_file", where))));
        }
        throw ConfigError(where + ": factor model needs 'loadings' or 'loadings_file'");
    }
    if (kind == "equicorrelated_t" || kind == "t") {
        const long samples = get_or<long>(m, "samples", NullModel::kDefaultTSamples, where);
        const auto seed = get_or<std::uint64_t>(m, "seed", 1, where);
        return NullModel::equicorrelated_t(get_field<double>(m, "rho", where), get_int(m, "dof", where), samples, seed);
    }
    throw ConfigError(where + ": unknown model kind '" + kind + "'");
}

ExperimentConfig parse_config_json(const json& j, std::size_t index, const std::filesystem::path& base) {
    std::string where = "config " + std::to_string(index);
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    reject_unknown_keys(j,
                        {"schema_version", "name", "n", "k", "alpha", "model", "critical_model", "mu", "n1", "effect",
                         "placement", "procedures", "reps", "seed", "metrics"},
                        where);
    if (j.contains("schema_version") && !(j.at("schema_version").is_number_integer() && j.at("schema_version") == 1)) {
        throw ConfigError(where + ": unsupported schema_version (expected 1)");
    }
    ExperimentConfig c;
    c.name = get_or<std::string>(j, "name", "config" + std::to_string(index), where);
    where = "config '" + c.name + "'";
    c.n = get_int(j, "n", where);
    c.k = get_int(j, "k", where);
    c.alpha = get_field<double>(j, "alpha", where);
    c.model = parse_model_json(get_field<json>(j, "model", where), where, base);
    if (j.contains("critical_model")) c.critical_model = parse_model_json(j.at("critical_model"), where, base);
    if (j.contains("mu")) {
        if (j.contains("n1") || j.contains("effect") || j.contains("placement")) {
            throw ConfigError(where + ": give either 'mu' or 'n1'/'effect', not both");
        }
        c.mu = get_field<std::vector<double>>(j, "mu", where);
    } else {
        c.n1 = j.contains("n1") ? get_int(j, "n1", where) : 0;
        c.effect = get_or<double>(j, "effect", 2.0, where);
        const auto placement = get_or<std::string>(j, "placement", "first", where);
        if (placement == "first") c.placement = Placement::first;
        else if (placement == "last") c.placement = Placement::last;
        else throw ConfigError(where + ": placement must be 'first' or 'last'");
    }
    c.procedures.clear();
    for (const auto& p : get_field<std::vector<std::string>>(j, "procedures", where)) {
        c.procedures.push_back(parse_procedure(p));
    }
    if (!j.contains("reps") || !j.at("reps").is_number_integer()) throw ConfigError(where + ": 'reps' must be an integer");
    c.reps = j.at("reps").get<long>();
    c.seed = get_or<std::uint64_t>(j, "seed", 1, where);
    c.metrics.clear();
    for (const auto& m : get_field<std::vector<std::string>>(j, "metrics", where)) c.metrics.push_back(parse_metric(m));
    c.validate();
    return c;
}

}  // namespace

std::string format_real(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

NullModel parse_model_spec(std::string_view spec) {
    const std::string s = trim(spec);
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (!s.empty() && s.back() == ':') parts.emplace_back();
    const auto bad = [&](const std::string& why) {
        return ConfigError("invalid model spec '" + s + "': " + why);
    };
    if (parts.empty()) throw bad("empty");
    const std::string& kind = parts[0];
    if (kind == "independent") {
        if (parts.size() != 1) throw bad("independent takes no parameters");
        return NullModel::independent();
    }
    if (kind == "equicorr") {
        double rho = 0.0;
        if (parts.size() != 2 || !parse_double(parts[1], rho)) throw bad("expected equicorr:RHO");
        return NullModel::equicorrelated_normal(rho);
    }
    if (kind == "factor") {
        // The file name may itself contain ':'.
        if (parts.size() < 2 || s.size() <= 7) throw bad("expected factor:FILE");
        return NullModel::factor_normal(read_loadings_file(s.substr(7)));
    }
    if (kind == "t") {
        double rho = 0.0;
        int dof = 0;
        long samples = 0;
        std::uint64_t seed = 0;
        if (parts.size() != 5 || !parse_double(parts[1], rho) || !parse_int(parts[2], dof) ||
            !parse_int(parts[3], samples) || !parse_int(parts[4], seed)) {
            throw bad("expected t:RHO:DOF:SAMPLES:SEED");
        }
        return NullModel::equicorrelated_t(rho, dof, samples, seed);
    }
    throw bad("unknown kind '" + kind + "'");
}

std::vector<double> read_loadings(std::istream& in, const std::string& source) {
    std::vector<double> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        double v = 0.0;
        if (!parse_double(t, v)) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": not a number: '" + t + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError(source + ": no loadings found");
    return out;
}

std::vector<double> read_loadings_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_loadings(in, path.string());
}

std::vector<PValueEntry> read_pvalues(std::istream& in, const std::string& source) {
    std::string line;
    int lineno = 0;
    const auto fail = [&](const std::string& why) {
        return ConfigError(source + ":" + std::to_string(lineno) + ": " + why);
    };
    if (!std::getline(in, line)) {
        lineno = 1;
        throw fail("empty file, expected header 'id,p'");
    }
    ++lineno;
    if (trim(line) != "id,p") throw fail("expected header 'id,p'");
    std::vector<PValueEntry> out;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto comma = t.find(',');
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
            throw fail("expected two fields 'id,p'");
        }
        PValueEntry e;
        e.id = trim(std::string_view(t).substr(0, comma));
        if (!valid_id(e.id)) throw fail("id must match [A-Za-z0-9_-]+");
        if (!parse_double(std::string_view(t).substr(comma + 1), e.p)) throw fail("p is not a number");
        if (!(e.p >= 0.0 && e.p <= 1.0)) throw fail("p outside [0,1]");
        if (!seen.insert(e.id).second) throw fail("duplicate id '" + e.id + "'");
        out.push_back(std::move(e));
    }
    if (out.empty()) throw ConfigError(source + ": no p-values found");
    return out;
}

std::vector<PValueEntry> read_pvalues_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_pvalues(in, path.string());
}

void write_critvals_csv(std::ostream& out, const CriticalValueSet& set) {
    out << "i,alpha_i,padded_c_i\n";
    for (int i = 1; i <= set.n; ++i) {
        out << i << ',' << (i < set.k ? std::string("NA") : format_real(set.alpha_at(i))) << ','
            << format_real(set.padded_at(i)) << '\n';
    }
}

void write_decision_csv(std::ostream& out, const DecisionReport& report) {
    out << "id,p,rank,critical_value,rejected\n";
    for (const auto& r : report.rows) {
        out << r.id << ',' << format_real(r.p) << ',' << r.rank << ',' << format_real(r.critical_value) << ','
            << (r.rejected ? 1 : 0) << '\n';
    }
    out << "# procedure=" << procedure_name(report.procedure) << ", n=" << report.n << ", k=" << report.k
        << ", alpha=" << format_real(report.alpha) << ", i0="
        << (report.cutoff ? std::to_string(*report.cutoff) : std::string("none")) << '\n';
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports) {
    out << "study,procedure,metric,estimate,std_error,reps,seed\n";
    for (const auto& rep : reports) {
        if (!rep.ok()) {
            out << "# error study=" << rep.study << (rep.numerical_failure ? " (numerical)" : "") << ": " << rep.error
                << '\n';
            continue;
        }
        for (const auto& r : rep.rows) {
            out << r.study << ',' << procedure_name(r.procedure) << ',' << metric_name(r.metric) << ','
                << (r.estimate ? format_real(*r.estimate) : "NA") << ','
                << (r.std_error ? format_real(*r.std_error) : "NA") << ',' << r.reps << ',' << r.seed << '\n';
        }
    }
}

std::vector<ExperimentConfig> parse_experiment_json(std::string_view text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    std::vector<ExperimentConfig> out;
    if (doc.is_object() && doc.contains("configs")) {
        reject_unknown_keys(doc, {"schema_version", "configs"}, "document");
        if (doc.contains("schema_version") && doc.at("schema_version") != 1) {
            throw ConfigError("document: unsupported schema_version (expected 1)");
        }
        const json& list = doc.at("configs");
        if (!list.is_array() || list.empty()) throw ConfigError("document: 'configs' must be a non-empty array");
        for (std::size_t i = 0; i < list.size(); ++i) out.push_back(parse_config_json(list[i], i, base_dir));
    } else {
        out.push_back(parse_config_json(doc, 0, base_dir));
    }
    return out;
}

std::vector<ExperimentConfig> read_experiment_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment_json(buf.str(), path.parent_path());
}

}  // namespace kfwer::io
