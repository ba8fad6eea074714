#include "spectra/config.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace spectra {

namespace {

using VT = ValueType;

KeySpec req(std::string k, VT t, double lo = -1e300, double hi = 1e300) {
    return {std::move(k), t, std::nullopt, lo, hi, "", false};
}
KeySpec def(std::string k, VT t, std::string v, double lo = -1e300, double hi = 1e300) {
    return {std::move(k), t, std::move(v), lo, hi, "", false};
}
KeySpec opt(std::string k, VT t, double lo = -1e300, double hi = 1e300) {
    return {std::move(k), t, std::string{}, lo, hi, "", true};
}

std::vector<KeySpec> common() {
    return {req("kind", VT::text),
            req("seed", VT::text),
            def("name", VT::text, ""),
            def("out_dir", VT::text, "out"),
            def("format", VT::text, "both"),
            def("threads", VT::integer, "0", 0, 4096),
            def("conventions.phase", VT::text, "corrected"),
            def("conventions.scale", VT::text, "gamma")};
}

std::vector<KeySpec> with_common(std::vector<KeySpec> extra) {
    auto v = common();
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
}

const double kAlphaLo = 1e-6, kAlphaHi = 2 - 1e-6;

const std::map<std::string, std::vector<KeySpec>>& schemas() {
    static const std::map<std::string, std::vector<KeySpec>> s = {
        {"solve", with_common({
                      def("solve.alphas", VT::real_list, "1.0", kAlphaLo, kAlphaHi),
                      def("solve.grid", VT::boolean, "true"),
                      def("solve.x_from", VT::real, "-10"),
                      def("solve.x_to", VT::real, "10"),
                      def("solve.x_step", VT::real, "0.5", 1e-9),
                      def("solve.etas", VT::real_list, "1, 0.1, 0.01", 1e-300),
                      def("solve.points", VT::complex_list, ""),
                      opt("assert.min_converged_fraction", VT::real, 0, 1),
                      opt("assert.asymptotic_rel_tol", VT::real, 0),
                  })},
        {"density", with_common({
                        def("density.alphas", VT::real_list, "1.0", kAlphaLo, kAlphaHi),
                        def("density.x_lo", VT::real, "1e-4", 1e-12),
                        def("density.x_bulk", VT::real, "20", 1.0),
                        def("density.x_hi", VT::real, "1e4", 1.0),
                        def("density.per_decade", VT::integer, "20", 1, 1000),
                        def("density.bulk_step", VT::real, "0.1", 1e-6),
                        def("density.tail", VT::boolean, "false"),
                        def("density.support_R", VT::real, "20", 1e-9),
                        opt("assert.symmetry_tol", VT::real, 0),
                        opt("assert.mass_tol", VT::real, 0),
                        opt("assert.support_positive", VT::boolean),
                        opt("assert.tail_spread_max", VT::real, 0),
                        opt("assert.tail_positive", VT::boolean),
                    })},
        {"sample", with_common({
                       def("law.alpha", VT::real, "1.0", kAlphaLo, kAlphaHi),
                       def("law.x_min", VT::real, "1.0", 1e-300),
                       def("law.theta", VT::real, "0.5", 0, 1),
                       def("sample.N", VT::integer, "0", 0, 20000),
                       def("sample.trials", VT::integer, "1", 1, 100000),
                       def("sample.truncation", VT::text, "none"),
                       def("sample.B", VT::real, "1.0", 1e-300),
                       def("sample.kappa", VT::real, "0.2", 1e-300),
                       def("sample.center", VT::boolean, "false"),
                       def("sample.bins", VT::integer, "200", 1, 100000),
                       def("sample.hist_range", VT::real, "10", 1e-9),
                       def("identities.schur_instances", VT::integer, "0", 0, 1000000),
                       def("identities.schur_size", VT::integer, "10", 1, 2000),
                       def("identities.schur_z", VT::complex_list, "0+1i"),
                       def("identities.rank_N", VT::integer, "0", 0, 20000),
                       def("identities.rank_B", VT::real, "4", 1e-300),
                       def("identities.rank_trials", VT::integer, "0", 0, 100000),
                       def("identities.centering_trials", VT::integer, "0", 0, 100000),
                       def("identities.centering_N", VT::integer, "300", 1, 20000),
                       def("identities.repre_points", VT::integer, "0", 0, 100000),
                       def("identities.repre_alphas", VT::real_list, "0.5, 1, 1.5", kAlphaLo, kAlphaHi),
                       opt("assert.schur_tol", VT::real, 0),
                       opt("assert.repre_tol", VT::real, 0),
                       opt("assert.lidskii", VT::boolean),
                       opt("assert.rank_le_rowcount", VT::boolean),
                       opt("assert.rowcount_sigma", VT::real, 0),
                       opt("assert.centering", VT::boolean),
                   })},
        {"compare", with_common({
                        def("law.x_min", VT::real, "1.0", 1e-300),
                        def("law.theta", VT::real, "0.5", 0, 1),
                        def("compare.alphas", VT::real_list, "1.0", kAlphaLo, kAlphaHi),
                        def("compare.N", VT::integer, "2000", 1, 20000),
                        def("compare.trials", VT::integer, "20", 1, 100000),
                        def("compare.z", VT::complex_list, "0+1i, 0+2i, 1+1i"),
                        def("compare.eta", VT::real, "0.01", 1e-9),
                        def("compare.x_max", VT::real, "50", 1e-3),
                        def("compare.x_step", VT::real, "0.005", 1e-6),
                        def("compare.resolvent", VT::boolean, "true"),
                        def("compare.ks", VT::boolean, "true"),
                        def("compare.distances", VT::boolean, "true"),
                        opt("assert.resolvent_tol", VT::real, 0),
                        opt("assert.ks_max", VT::real, 0),
                    })},
        {"moments", with_common({
                        def("law.alpha", VT::real, "1.0", kAlphaLo, kAlphaHi),
                        def("law.x_min", VT::real, "1.0", 1e-300),
                        def("moments.B", VT::real, "1.0", 1e-300),
                        def("moments.k_max", VT::integer, "6", 1, 6),
                        def("moments.N", VT::integer, "2000", 0, 20000),
                        def("moments.trials", VT::integer, "20", 1, 100000),
                        def("moments.mc_k_max", VT::integer, "3", 1, 6),
                        def("moments.thetas", VT::real_list, "0.5, 0, 1", 0, 1),
                        def("moments.center_skewed", VT::boolean, "true"),
                        opt("assert.mc_rel_tol", VT::real_list, 0),
                        opt("assert.theta_sigma", VT::real, 0),
                        opt("assert.catalan", VT::boolean),
                    })},
        {"stable-check", with_common({
                             def("stable.alpha", VT::real, "0.5", kAlphaLo, 1 - 1e-6),
                             def("stable.x_min", VT::real, "1.0", 1e-300),
                             def("stable.N", VT::integer, "10000", 1, 100000000),
                             def("stable.reps", VT::integer, "10000", 1000, 100000000),
                             opt("stable.delta", VT::real, 1e-9),
                             def("stable.fl_t", VT::real_list, "0.5, 1, 2", 1e-300),
                             def("stable.fl_atoms", VT::text, "1+0i:0.5; 0-1i:0.5"),
                             def("stable.fl_N", VT::integer, "2000", 1, 100000000),
                             def("stable.fl_reps", VT::integer, "40000", 1000, 100000000),
                             opt("assert.ks_max", VT::real, 0),
                             opt("assert.fl_tol", VT::real, 0),
                             opt("assert.truncated_ks_max", VT::real, 0),
                         })},
        {"cb-check", with_common({
                         def("cb.alphas", VT::real_list, "1, 1.5", kAlphaLo, kAlphaHi),
                         def("cb.x", VT::real_list, "2, 3, 5", 1e-12),
                         opt("assert.k_tol", VT::real, 0),
                         opt("assert.density_tol", VT::real, 0),
                     })},
    };
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_real(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (...) {
        throw ConfigError(key + ": not a number: '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v)) throw ConfigError(key + ": not a finite number: '" + s + "'");
    return v;
}

void check_range(const KeySpec& spec, double v) {
    if (v < spec.lo || v > spec.hi) {
        std::ostringstream m;
        m << spec.key << ": value " << v << " outside [" << spec.lo << ", " << spec.hi << "]";
        throw ConfigError(m.str());
    }
}

const KeySpec* find_spec(const std::vector<KeySpec>& schema, const std::string& key) {
    for (const auto& s : schema)
        if (s.key == key) return &s;
    return nullptr;
}

}  // namespace

const std::vector<std::string> kExperimentKinds = {"solve",   "density",      "sample",  "compare",
                                                   "moments", "stable-check", "cb-check"};

const std::vector<KeySpec>& schema_for(const std::string& kind) {
    auto it = schemas().find(kind);
    if (it == schemas().end()) throw ConfigError("unknown kind '" + kind + "'");
    return it->second;
}

std::complex<double> parse_complex(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    static const std::regex num(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
    static const std::regex both(R"(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([+-](?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)i)");
    static const std::regex imag_only(R"(([+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)i)");
    std::smatch m;
    auto coef = [](const std::string& c) {
        if (c.empty() || c == "+") return 1.0;
        if (c == "-") return -1.0;
        return std::stod(c);
    };
    if (std::regex_match(s, m, num)) return {std::stod(s), 0.0};
    if (std::regex_match(s, m, both)) return {std::stod(m[1].str()), coef(m[2].str())};
    if (std::regex_match(s, m, imag_only)) return {0.0, coef(m[1].str())};
    throw ConfigError("not a complex number: '" + text + "'");
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::read_ini(path, pt);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot read config: ") + e.what());
    }
    std::map<std::string, std::string> kv;
    for (const auto& [k, v] : pt) {
        if (v.empty()) {
            kv[k] = v.data();
        } else {
            for (const auto& [k2, v2] : v) {
                if (!v2.empty()) throw ConfigError("nested key under " + k + "." + k2);
                kv[k + "." + k2] = v2.data();
            }
        }
    }
    return from_map(kv);
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig c;
    c.values_ = kv;
    c.validate();
    return c;
}

void ExperimentConfig::validate() {
    if (!has("kind")) throw ConfigError("kind: missing");
    const auto& schema = schema_for(values_.at("kind"));
    for (const auto& [k, v] : values_)
        if (!find_spec(schema, k)) throw ConfigError(k + ": unknown key for kind '" + values_.at("kind") + "'");
    for (const auto& spec : schema) {
        if (!has(spec.key)) {
            if (!spec.fallback) throw ConfigError(spec.key + ": missing");
            if (spec.optional) continue;
            values_[spec.key] = *spec.fallback;
        }
        const std::string& v = values_.at(spec.key);
        switch (spec.type) {
            case VT::real:
                check_range(spec, to_real(spec.key, v));
                break;
            case VT::integer: {
                double d = to_real(spec.key, v);
                if (d != std::floor(d)) throw ConfigError(spec.key + ": not an integer: '" + v + "'");
                check_range(spec, d);
                break;
            }
            case VT::boolean:
                if (v != "true" && v != "false") throw ConfigError(spec.key + ": expected true or false");
                break;
            case VT::real_list:
                for (const auto& s : split(v, ',')) check_range(spec, to_real(spec.key, s));
                break;
            case VT::complex_list:
                for (const auto& s : split(v, ',')) parse_complex(s);
                break;
            case VT::text:
            case VT::text_list:
                break;
        }
    }
    seed();
    const std::string& fmt = values_.at("format");
    if (fmt != "csv" && fmt != "json" && fmt != "both") throw ConfigError("format: expected csv, json or both");
    const std::string& ph = values_.at("conventions.phase");
    if (ph != "corrected" && ph != "printed") throw ConfigError("conventions.phase: expected corrected or printed");
    const std::string& sc = values_.at("conventions.scale");
    if (sc != "gamma" && sc != "cosine") throw ConfigError("conventions.scale: expected gamma or cosine");
    if (has("sample.truncation")) {
        const std::string& t = values_.at("sample.truncation");
        if (t != "none" && t != "B" && t != "kappa") throw ConfigError("sample.truncation: expected none, B or kappa");
    }
}

const std::string& ExperimentConfig::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key + ": missing");
    return it->second;
}

const std::string& ExperimentConfig::kind() const { return raw("kind"); }

std::uint64_t ExperimentConfig::seed() const {
    const std::string& s = raw("seed");
    std::size_t pos = 0;
    unsigned long long v;
    try {
        v = std::stoull(s, &pos, 0);
    } catch (...) {
        throw ConfigError("seed: not an unsigned integer: '" + s + "'");
    }
    if (pos != s.size() || s.find('-') != std::string::npos)
        throw ConfigError("seed: not an unsigned integer: '" + s + "'");
    return v;
}

double ExperimentConfig::real(const std::string& key) const { return to_real(key, raw(key)); }
long long ExperimentConfig::integer(const std::string& key) const {
    return static_cast<long long>(std::llround(to_real(key, raw(key))));
}
bool ExperimentConfig::boolean(const std::string& key) const { return raw(key) == "true"; }
std::string ExperimentConfig::text(const std::string& key) const { return raw(key); }

std::vector<double> ExperimentConfig::real_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : split(raw(key), ',')) out.push_back(to_real(key, s));
    return out;
}

std::vector<std::complex<double>> ExperimentConfig::complex_list(const std::string& key) const {
    std::vector<std::complex<double>> out;
    for (const auto& s : split(raw(key), ',')) out.push_back(parse_complex(s));
    return out;
}

std::vector<std::string> ExperimentConfig::text_list(const std::string& key) const {
    return split(raw(key), ',');
}

}  // namespace spectra
