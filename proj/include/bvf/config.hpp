#pragma once

#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bvf/classify.hpp"
#include "bvf/expr.hpp"

namespace bvf {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Flat dotted-key configuration. Accepts "key = value" lines (with '#'
/// comments) or a JSON object (nested objects flatten to dotted keys). The
/// canonical echo is the sorted key-value rendering; parse(echo(parse(x)))
/// is a fixed point.
struct RunConfig {
    std::map<std::string, std::string> kv;

    static RunConfig parse_text(const std::string& text) {
        RunConfig cfg;
        std::string body = text;
        std::size_t first = body.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && body[first] == '{') {
            nlohmann::json j = nlohmann::json::parse(body);
            flatten(j, "", cfg.kv);
            return cfg;
        }
        std::istringstream in(body);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            const auto trim = [](std::string s) {
                const char* ws = " \t\r\n";
                auto b = s.find_first_not_of(ws);
                if (b == std::string::npos) return std::string();
                auto e = s.find_last_not_of(ws);
                return s.substr(b, e - b + 1);
            };
            std::string t = trim(line);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            cfg.kv[key] = value;
        }
        return cfg;
    }

    static RunConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_text(ss.str());
    }

    std::string echo() const {
        std::string out;
        for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
        return out;
    }

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    std::string get(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError("missing config key: " + key);
        return it->second;
    }
    std::string get_or(const std::string& key, const std::string& dflt) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : it->second;
    }
    double get_double(const std::string& key) const {
        try {
            return std::stod(get(key));
        } catch (const std::invalid_argument&) {
            throw ConfigError("config key " + key + " is not a number");
        }
    }
    double get_double_or(const std::string& key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }
    long get_int(const std::string& key) const {
        try {
            return std::stol(get(key));
        } catch (const std::invalid_argument&) {
            throw ConfigError("config key " + key + " is not an integer");
        }
    }
    long get_int_or(const std::string& key, long dflt) const { return has(key) ? get_int(key) : dflt; }

    std::vector<double> get_list(const std::string& key) const {
        std::vector<double> out;
        std::istringstream in(get(key));
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty()) out.push_back(std::stod(item));
        return out;
    }

  private:
    static void flatten(const nlohmann::json& j, const std::string& prefix,
                        std::map<std::string, std::string>& out) {
        if (j.is_object()) {
            for (auto it = j.begin(); it != j.end(); ++it)
                flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        } else if (j.is_string()) {
            out[prefix] = j.get<std::string>();
        } else {
            out[prefix] = j.dump();
        }
    }
};

/// Builds the chart geometry named by the config.
inline ChartGeometry make_geometry(const RunConfig& cfg) {
    const std::string kind = cfg.get("manifold.kind");
    const int n = static_cast<int>(cfg.get_int("manifold.n"));
    const int res = static_cast<int>(cfg.get_int("manifold.res"));
    if (kind == "flat_torus") return make_flat_torus(n, res);
    if (kind == "warped_torus") return make_warped_torus(n, res, cfg.get_double_or("manifold.amplitude", 0.2));
    if (kind == "sphere_chart") return make_sphere_chart(n, res, cfg.get_double_or("manifold.cutoff", 1.0));
    throw ConfigError("unknown manifold.kind: " + kind);
}

inline Eigen::MatrixXd parse_matrix(const std::string& text, int n) {
    Eigen::MatrixXd m(n, n);
    std::istringstream rows(text);
    std::string row;
    int r = 0;
    while (std::getline(rows, row, ';')) {
        if (r >= n) throw ConfigError("structure.matrix: too many rows");
        std::istringstream cols(row);
        std::string cell;
        int c = 0;
        while (std::getline(cols, cell, ',')) {
            if (c >= n) throw ConfigError("structure.matrix: too many columns");
            m(r, c++) = std::stod(cell);
        }
        if (c != n) throw ConfigError("structure.matrix: wrong column count");
        ++r;
    }
    if (r != n) throw ConfigError("structure.matrix: wrong row count");
    return m;
}

inline ACStructure make_structure(const RunConfig& cfg, const ChartGeometry& geo) {
    const std::string kind = cfg.get("structure.kind");
    if (kind == "constant") {
        if (cfg.has("structure.matrix")) return make_constant_ac(geo, parse_matrix(cfg.get("structure.matrix"), geo.dim()));
        return make_constant_ac(geo, standard_complex_matrix(geo.dim()));
    }
    if (kind == "octonionic") return make_s6_octonionic_ac(geo);
    if (kind == "perturbed")
        return make_perturbed_ac(geo, standard_complex_matrix(geo.dim()),
                                 cfg.get_double_or("structure.epsilon", 0.1),
                                 static_cast<std::uint64_t>(cfg.get_int_or("structure.seed", 1)));
    throw ConfigError("unknown structure.kind: " + kind);
}

inline AuxiliaryOneForm make_aux_form(const RunConfig& cfg, const ChartGeometry& geo) {
    const std::string kind = cfg.get_or("alpha.kind", "axis");
    if (kind == "axis") return make_alpha_axis(geo, static_cast<int>(cfg.get_int_or("alpha.axis", 0)));
    if (kind == "gradient") {
        Expr f = Expr::parse(cfg.get("alpha.f"));
        return make_alpha_gradient(geo, [f](std::span<const double> x) { return f.eval(x); });
    }
    throw ConfigError("unknown alpha.kind: " + kind);
}

inline FunctionalVariant make_variant(const RunConfig& cfg) {
    const std::string family = cfg.get("variant.family");
    const std::string mask = cfg.get_or("variant.mask", "none");
    if (family == "quasi_alpha" || family == "alpha") {
        bool m5 = false;
        if (mask == "5")
            m5 = true;
        else if (mask != "none")
            throw ConfigError("variant.mask for " + family + " must be none or 5");
        return family == "alpha" ? FunctionalVariant::alpha(m5) : FunctionalVariant::quasi_alpha(m5);
    }
    if (family == "plain") {
        if (mask == "1" || mask == "none") return FunctionalVariant::plain(false);
        if (mask == "1,3") return FunctionalVariant::plain(true);
        throw ConfigError("variant.mask for plain must be 1 or 1,3");
    }
    throw ConfigError("unknown variant.family: " + family);
}

/// The graded field driven by the config: the structure in degree 1, plus
/// optional seeded smooth components in the degrees listed by gamma.extra
/// (the functionals pair the integrability form against those degrees, so a
/// purely degree-1 field always evaluates to zero).
inline GradedField make_gamma(const RunConfig& cfg, const ChartGeometry& geo, const ACStructure& ac) {
    GradedField g = GradedField::from(ac.A);
    if (cfg.has("gamma.extra")) {
        const auto degrees = cfg.get_list("gamma.extra");
        const auto seed = static_cast<std::uint64_t>(cfg.get_int_or("gamma.seed", 1));
        const double amplitude = cfg.get_double_or("gamma.amplitude", 0.3);
        for (double d : degrees) {
            const int deg = static_cast<int>(d);
            if (deg < 0 || deg > geo.dim()) throw ConfigError("gamma.extra degree out of range");
            g.add(random_smooth_field(geo, deg, ValueKind::tangent, 0, seed + deg, 2, amplitude));
        }
    }
    return g;
}

/// Probe path factory; "constant", "conjugation" (constant matrix or spatial)
/// and "linear_drift" (leaves AC(M) for t > 0) are expressible.
inline std::function<ACStructure(double)> make_probe_path(const RunConfig& cfg, const ChartGeometry& geo) {
    const std::string kind = cfg.get_or("probe.path", "constant");
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int_or("probe.seed", 1));
    const double scale = cfg.get_double_or("probe.scale", 0.3);
    const Eigen::MatrixXd J0 = standard_complex_matrix(geo.dim());
    if (kind == "constant") {
        return [&geo, J0](double) { return make_constant_ac(geo, J0); };
    }
    if (kind == "conjugation") {
        const bool spatial = cfg.get_or("probe.spatial", "false") == "true";
        if (spatial) {
            return [&geo, J0, seed, scale](double t) {
                return make_perturbed_ac(geo, J0, scale * t, seed);
            };
        }
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Eigen::MatrixXd S(geo.dim(), geo.dim());
        for (int r = 0; r < geo.dim(); ++r)
            for (int c = 0; c < geo.dim(); ++c) S(r, c) = dist(rng);
        return [&geo, J0, S, scale](double t) {
            Eigen::MatrixXd P = (scale * t * S).exp();
            Eigen::MatrixXd Pm = (-scale * t * S).exp();
            return make_constant_ac(geo, Pm * J0 * P);
        };
    }
    if (kind == "linear_drift") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Eigen::MatrixXd B(geo.dim(), geo.dim());
        for (int r = 0; r < geo.dim(); ++r)
            for (int c = 0; c < geo.dim(); ++c) B(r, c) = dist(rng);
        return [&geo, J0, B, scale](double t) { return make_constant_ac(geo, J0 + scale * t * B); };
    }
    throw ConfigError("unknown probe.path: " + kind);
}

}  // namespace bvf
