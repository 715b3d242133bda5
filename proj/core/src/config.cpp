#include "rhc/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rhc/errors.hpp"

namespace rhc {

namespace pt = boost::property_tree;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_number(const std::string& key, const std::string& text) {
    double v = 0.0;
    const std::string t = trim(text);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key, "expected a number, got '" + text + "'");
    }
    if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
    return v;
}

Vector parse_list(const std::string& key, const std::string& text) {
    const auto parts = split(text, ',');
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_number(key, parts[i]);
    return v;
}

std::string format_list(const Vector& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        out += format_double(v(i));
    }
    return out;
}

std::string format_signal(const ParamSignal& sig) {
    if (const auto* s = std::get_if<SinusoidSignal>(&sig.variant())) {
        return "sinusoid:" + format_double(s->base) + "," + format_double(s->depth) + "," + format_double(s->omega);
    }
    return format_double(sig.at(0.0));
}

ParamSignal parse_signal(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    constexpr std::string_view prefix = "sinusoid:";
    if (t.starts_with(prefix)) {
        const Vector v = parse_list(key, t.substr(prefix.size()));
        if (v.size() != 3) throw ConfigError(key, "sinusoid needs base,depth,omega");
        return SinusoidSignal{v(0), v(1), v(2)};
    }
    return ConstantSignal{parse_number(key, t)};
}

Vector diagonal_of(const Matrix& M, const std::string& key) {
    if (!(M - Matrix(M.diagonal().asDiagonal())).isZero(0.0)) {
        throw ConfigError(key, "only diagonal weights can be written to a scenario file");
    }
    return M.diagonal();
}

// Keys accepted in each section.
const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"model", {"s", "d", "beta", "mu1", "k", "mu2", "unknown"}},
        {"init", {"x0", "y0", "theta0"}},
        {"nrhc", {"Q", "R", "T_f", "alpha", "A_s", "t_s", "N_tau", "stepper", "divergence_threshold"}},
        {"estimator", {"gain", "pe_window"}},
        {"run", {"duration", "measurements"}},
        {"output", {"csv", "svg"}},
    };
    return keys;
}

class TreeReader {
public:
    explicit TreeReader(const pt::ptree& tree) : tree_(tree) {}

    [[nodiscard]] std::optional<std::string> optional(const std::string& key) const {
        if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return *v;
        return std::nullopt;
    }
    [[nodiscard]] std::string required(const std::string& key) const {
        if (auto v = optional(key)) return *v;
        throw ConfigError(key, "missing required key");
    }

private:
    const pt::ptree& tree_;
};

}  // namespace

pt::ptree scenario_to_tree(const Scenario& sc) {
    pt::ptree tree;
    for (HivParam which : kAllHivParams) {
        tree.put("model." + std::string(to_string(which)), format_signal(sc.truth[which]));
    }
    std::string unknown;
    for (std::size_t i = 0; i < sc.unknown.size(); ++i) {
        if (i > 0) unknown += ',';
        unknown += to_string(sc.unknown[i]);
    }
    tree.put("model.unknown", unknown);

    tree.put("init.x0", format_list(sc.x0));
    tree.put("init.y0", format_list(sc.y0));
    tree.put("init.theta0", format_list(sc.theta0));

    tree.put("nrhc.Q", format_list(diagonal_of(sc.nrhc.Q, "nrhc.Q")));
    tree.put("nrhc.R", format_list(diagonal_of(sc.nrhc.R, "nrhc.R")));
    const Vector a = diagonal_of(sc.nrhc.A_s, "nrhc.A_s");
    if (a.size() > 0 && (a.array() != a(0)).any()) {
        throw ConfigError("nrhc.A_s", "only scalar multiples of the identity can be written");
    }
    tree.put("nrhc.A_s", format_double(a.size() > 0 ? a(0) : 0.0));
    tree.put("nrhc.T_f", format_double(sc.nrhc.T_f));
    tree.put("nrhc.alpha", format_double(sc.nrhc.alpha));
    tree.put("nrhc.t_s", format_double(sc.nrhc.t_s));
    tree.put("nrhc.N_tau", std::to_string(sc.nrhc.N_tau));
    tree.put("nrhc.stepper", std::string(to_string(sc.nrhc.stepper)));
    tree.put("nrhc.divergence_threshold", format_double(sc.nrhc.divergence_threshold));

    tree.put("estimator.gain", format_double(sc.estimator.gain));
    tree.put("estimator.pe_window", format_double(sc.estimator.pe_window));

    tree.put("run.duration", format_double(sc.duration));
    if (!sc.measurements.empty()) tree.put("run.measurements", sc.measurements);

    tree.put("output.csv", sc.output.csv);
    tree.put("output.svg", sc.output.svg);
    return tree;
}

Scenario scenario_from_tree(const pt::ptree& tree, const std::string& name) {
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) throw ConfigError(section, "unknown section");
        if (!body.data().empty() && body.empty()) throw ConfigError(section, "expected a [section]");
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
        }
    }

    const TreeReader r(tree);
    Scenario sc;
    sc.name = name;

    for (HivParam which : kAllHivParams) {
        const std::string key = "model." + std::string(to_string(which));
        sc.truth[which] = parse_signal(key, r.required(key));
    }
    for (const auto& item : split(r.required("model.unknown"), ',')) {
        const auto p = parse_hiv_param(item);
        if (!p) throw ConfigError("model.unknown", "'" + item + "' is not one of s,d,beta,mu1,k,mu2");
        sc.unknown.push_back(*p);
    }

    sc.x0 = parse_list("init.x0", r.required("init.x0"));
    sc.y0 = parse_list("init.y0", r.required("init.y0"));
    sc.theta0 = parse_list("init.theta0", r.required("init.theta0"));

    sc.nrhc = NrhcConfig::identity_weights(3);
    if (auto v = r.optional("nrhc.Q")) {
        const Vector q = parse_list("nrhc.Q", *v);
        if (q.size() != 3) throw ConfigError("nrhc.Q", "expected 3 diagonal entries");
        sc.nrhc.Q = q.asDiagonal();
    }
    if (auto v = r.optional("nrhc.R")) {
        const Vector rr = parse_list("nrhc.R", *v);
        if (rr.size() != 3) throw ConfigError("nrhc.R", "expected 3 diagonal entries");
        sc.nrhc.R = rr.asDiagonal();
    }
    if (auto v = r.optional("nrhc.A_s")) sc.nrhc.A_s = parse_number("nrhc.A_s", *v) * Matrix::Identity(3, 3);
    if (auto v = r.optional("nrhc.T_f")) sc.nrhc.T_f = parse_number("nrhc.T_f", *v);
    if (auto v = r.optional("nrhc.alpha")) sc.nrhc.alpha = parse_number("nrhc.alpha", *v);
    if (auto v = r.optional("nrhc.t_s")) sc.nrhc.t_s = parse_number("nrhc.t_s", *v);
    if (auto v = r.optional("nrhc.N_tau")) {
        const double N = parse_number("nrhc.N_tau", *v);
        if (N != std::floor(N) || N < 1 || N > 1e6) throw ConfigError("nrhc.N_tau", "must be a positive integer");
        sc.nrhc.N_tau = static_cast<int>(N);
    }
    if (auto v = r.optional("nrhc.stepper")) {
        const auto kind = parse_stepper(trim(*v));
        if (!kind) throw ConfigError("nrhc.stepper", "expected rk4 or euler");
        sc.nrhc.stepper = *kind;
    }
    if (auto v = r.optional("nrhc.divergence_threshold")) {
        sc.nrhc.divergence_threshold = parse_number("nrhc.divergence_threshold", *v);
    }

    if (auto v = r.optional("estimator.gain")) sc.estimator.gain = parse_number("estimator.gain", *v);
    if (auto v = r.optional("estimator.pe_window")) sc.estimator.pe_window = parse_number("estimator.pe_window", *v);

    sc.duration = parse_number("run.duration", r.required("run.duration"));
    if (auto v = r.optional("run.measurements")) sc.measurements = trim(*v);

    sc.output.csv = trim(r.optional("output.csv").value_or(name + ".csv"));
    sc.output.svg = trim(r.optional("output.svg").value_or(name));

    sc.validate();
    return sc;
}

void apply_override(pt::ptree& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(assignment, "override must look like section.key=value");
    const std::string key = trim(std::string_view(assignment).substr(0, eq));
    const std::string value = trim(std::string_view(assignment).substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() || key.find('.', dot + 1) != std::string::npos) {
        throw ConfigError(key, "override key must look like section.key");
    }
    const std::string section = key.substr(0, dot);
    const auto it = schema().find(section);
    if (it == schema().end() || !it->second.contains(key.substr(dot + 1))) {
        throw ConfigError(key, "unknown key");
    }
    tree.put(pt::ptree::path_type(key, '.'), value);
}

Scenario load_scenario(const std::string& preset_or_path, const std::vector<std::string>& overrides) {
    pt::ptree tree;
    std::string name;
    if (auto preset = find_preset(preset_or_path)) {
        tree = scenario_to_tree(*preset);
        name = preset->name;
    } else {
        std::ifstream in(preset_or_path);
        if (!in) throw ConfigError(preset_or_path, "no such preset or readable scenario file");
        try {
            pt::read_ini(in, tree);
        } catch (const pt::ini_parser_error& err) {
            throw ConfigError(preset_or_path, std::string("malformed scenario file: ") + err.message() +
                                                  " (line " + std::to_string(err.line()) + ")");
        }
        name = std::filesystem::path(preset_or_path).stem().string();
    }
    for (const auto& o : overrides) apply_override(tree, o);
    return scenario_from_tree(tree, name);
}

void write_scenario_file(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path, "cannot write scenario file");
    pt::write_ini(out, scenario_to_tree(scenario));
}

}  // namespace rhc
