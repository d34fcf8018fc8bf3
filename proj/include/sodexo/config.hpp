#pragma once

// Scenario configuration files: JSON objects with strictly checked keys.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sodexo/abm.hpp"
#include "sodexo/error.hpp"
#include "sodexo/model.hpp"

namespace sodexo::config {

using json = nlohmann::json;

enum class ScenarioKind { ode, abm, stackelberg, deploy, compare };

inline const char* to_string(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::ode: return "ode";
    case ScenarioKind::abm: return "abm";
    case ScenarioKind::stackelberg: return "stackelberg";
    case ScenarioKind::deploy: return "deploy";
    case ScenarioKind::compare: return "compare";
    }
    return "?";
}

struct OdeSettings {
    double t_end = 200.0;
    double step = 0.01;
    double initial_bots = 50.0;
    double initial_honeybots = 0.0;
    std::size_t record_every = 10; ///< integrator steps per CSV row
    std::vector<double> sweep_z;   ///< empty: population.honeybot_reserve only
};

struct AbmSettings {
    abm::SimConfig sim;
    std::vector<double> gamma_sweep; ///< scale-free only
    bool write_replicates = false;
    bool export_graph = false;
    double burn_in_fraction = 0.1;
};

struct StackelbergSettings {
    SubtreeState subtree;
    HoneybotConfig honeybot;
    std::uint64_t n_honeybots = 1;
};

struct DeploySettings {
    DeploymentEconomics economics;
    double z_max = 0.0; ///< combined-mode search bound; 0 means 1% of n_users
    std::vector<double> tau_sweep;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::ode;
    std::uint64_t seed = 1;
    std::string output_dir; ///< empty when the file does not set one
    PopulationParams population;
    OdeSettings ode;
    AbmSettings abm;
    StackelbergSettings stackelberg;
    DeploySettings deploy;
    std::vector<std::string> warnings;
};

namespace detail {

/// Reads typed fields from one JSON object and remembers which keys were used,
/// so that leftovers can be reported by full path.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    template <class T>
    void get(const std::string& key, T& out) {
        if (!obj_.contains(key)) return;
        used_.insert(key);
        const json& v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError("");
                out = v.get<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigError("");
                out = v.get<std::string>();
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0))
                    throw ConfigError("");
                out = v.get<T>();
            } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                if (!v.is_array()) throw ConfigError("");
                out.clear();
                for (const auto& e : v) {
                    if (!e.is_number()) throw ConfigError("");
                    out.push_back(e.get<double>());
                }
            } else {
                if (!v.is_number()) throw ConfigError("");
                out = v.get<T>();
            }
        } catch (const ConfigError&) {
            throw ConfigError(child(key) + ": " + expected<T>());
        }
    }

    Reader object(const std::string& key) {
        used_.insert(key);
        return Reader(obj_.at(key), child(key));
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where() const { return path_.empty() ? "config" : path_; }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError("unknown key \"" + child(it.key()) + "\"");
    }

private:
    template <class T>
    static std::string expected() {
        if constexpr (std::is_same_v<T, bool>) return "expected true or false";
        else if constexpr (std::is_same_v<T, std::string>) return "expected a string";
        else if constexpr (std::is_integral_v<T>) return "expected a nonnegative integer";
        else if constexpr (std::is_same_v<T, std::vector<double>>) return "expected an array of numbers";
        else return "expected a number";
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

inline void read_population(Reader r, PopulationParams& p) {
    r.get("n_users", p.n_users);
    r.get("degree", p.degree);
    r.get("spam_rate", p.spam_rate);
    r.get("click_prob", p.click_prob);
    r.get("link_fraction", p.link_fraction);
    r.get("link_universe", p.link_universe);
    r.get("clean_rate", p.clean_rate);
    r.get("detect_rate", p.detect_rate);
    r.get("honeybot_reserve", p.honeybot_reserve);
    r.finish();
}

inline void read_ode(Reader r, OdeSettings& o) {
    r.get("t_end", o.t_end);
    r.get("step", o.step);
    r.get("initial_bots", o.initial_bots);
    r.get("initial_honeybots", o.initial_honeybots);
    r.get("record_every", o.record_every);
    r.get("sweep_z", o.sweep_z);
    r.finish();
}

struct DegreeSpec {
    std::string kind = "regular";
    double gamma = 2.5;
    int d_min = 30;
    int d_max = 1000;
};

inline void read_degree(Reader r, DegreeSpec& d) {
    r.get("kind", d.kind);
    r.get("gamma", d.gamma);
    r.get("d_min", d.d_min);
    r.get("d_max", d.d_max);
    r.finish();
    if (d.kind != "regular" && d.kind != "scale_free")
        throw ConfigError(r.child("kind") + ": expected \"regular\" or \"scale_free\"");
}

inline void read_abm(Reader r, AbmSettings& a, DegreeSpec& d) {
    auto& s = a.sim;
    r.get("horizon", s.horizon);
    r.get("tick", s.tick);
    r.get("replicates", s.replicates);
    r.get("replacement", s.replacement);
    r.get("initial_bots", s.initial_bots);
    r.get("initial_blacklist", s.initial_blacklist);
    std::string mode = to_string(s.link_mode);
    r.get("link_mode", mode);
    if (mode == "disjoint") s.link_mode = abm::LinkMode::disjoint;
    else if (mode == "recruiter") s.link_mode = abm::LinkMode::recruiter;
    else throw ConfigError(r.child("link_mode") + ": expected \"disjoint\" or \"recruiter\"");
    r.get("inherit_links", s.inherit_links);
    r.get("honeybot_degree", s.honeybot_degree);
    r.get("threads", s.threads);
    r.get("gamma_sweep", a.gamma_sweep);
    r.get("write_replicates", a.write_replicates);
    r.get("export_graph", a.export_graph);
    r.get("burn_in_fraction", a.burn_in_fraction);
    if (r.has("degree_distribution")) read_degree(r.object("degree_distribution"), d);
    r.finish();
}

inline void read_stackelberg(Reader r, StackelbergSettings& s) {
    if (r.has("subtree")) {
        Reader t = r.object("subtree");
        auto& st = s.subtree;
        t.get("capacity", st.capacity);
        t.get("alpha", st.alpha);
        if (t.has("bots")) {
            std::size_t n = 0;
            double trust = 1.0, rate = 1.0, cost = 1.0;
            t.get("bots", n);
            t.get("trust", trust);
            t.get("response_rate", rate);
            t.get("cost", cost);
            st = SubtreeState::homogeneous(n, trust, rate, cost, st.capacity, st.alpha);
        } else {
            t.get("trust", st.trust);
            t.get("response_rates", st.response_rates);
            t.get("costs", st.costs);
        }
        t.finish();
    }
    if (r.has("honeybot")) {
        Reader h = r.object("honeybot");
        h.get("beta", s.honeybot.beta);
        h.get("xi", s.honeybot.xi);
        h.get("rate_cap", s.honeybot.rate_cap);
        h.get("trust", s.honeybot.trust);
        h.get("cost", s.honeybot.cost);
        h.finish();
    }
    r.get("n_honeybots", s.n_honeybots);
    r.finish();
}

inline void read_deploy(Reader r, DeploySettings& d) {
    r.get("benefit", d.economics.benefit);
    r.get("cost", d.economics.cost);
    r.get("zeta", d.economics.zeta);
    r.get("z_max", d.z_max);
    r.get("tau_sweep", d.tau_sweep);
    r.finish();
}

inline void collect(ValidationReport rep, const std::string& block, ValidationReport& all) {
    for (auto& v : rep.items) {
        v.message = block + "." + v.field + ": " + v.message;
        all.items.push_back(std::move(v));
    }
}

inline void check_positive(double x, const std::string& where, ValidationReport& r) {
    if (!(x > 0.0) || !std::isfinite(x)) r.error(where, where + " must be positive");
}

inline ValidationReport validate_scenario(const ScenarioConfig& c) {
    ValidationReport r;
    using K = ScenarioKind;
    const bool uses_population = c.kind != K::stackelberg;
    if (uses_population) collect(validate(c.population), "population", r);

    if (c.kind == K::ode) {
        check_positive(c.ode.t_end, "ode.t_end", r);
        check_positive(c.ode.step, "ode.step", r);
        if (c.ode.step > c.ode.t_end) r.error("ode.step", "ode.step exceeds ode.t_end");
        if (c.ode.record_every == 0) r.error("ode.record_every", "ode.record_every must be positive");
        if (!(c.ode.initial_bots >= 0.0) || !(c.ode.initial_honeybots >= 0.0))
            r.error("ode.initial_bots", "ode initial populations must be nonnegative");
        for (double z : c.ode.sweep_z)
            if (!(z >= 0.0)) r.error("ode.sweep_z", "ode.sweep_z values must be nonnegative");
    }
    if (c.kind == K::compare) {
        check_positive(c.ode.step, "ode.step", r);
    }
    if (c.kind == K::abm || c.kind == K::compare) {
        if (r.ok()) {
            for (auto& v : abm::validate(c.abm.sim).items) {
                v.message = "abm." + v.message;
                r.items.push_back(std::move(v));
            }
        }
        if (!(c.abm.burn_in_fraction >= 0.0 && c.abm.burn_in_fraction < 1.0))
            r.error("abm.burn_in_fraction", "abm.burn_in_fraction out of [0,1)");
        for (double g : c.abm.gamma_sweep)
            if (!(g > 0.0)) r.error("abm.gamma_sweep", "abm.gamma_sweep values must be positive");
        if (!c.abm.gamma_sweep.empty() && c.abm.sim.dist.kind != DegreeKind::scale_free)
            r.error("abm.gamma_sweep", "abm.gamma_sweep requires a scale_free degree_distribution");
    }
    if (c.kind == K::stackelberg) {
        collect(validate(c.stackelberg.subtree), "stackelberg.subtree", r);
        collect(validate(c.stackelberg.honeybot), "stackelberg.honeybot", r);
    }
    if (c.kind == K::deploy) {
        collect(validate(c.deploy.economics), "deploy", r);
        if (!(c.deploy.z_max >= 0.0)) r.error("deploy.z_max", "deploy.z_max must be nonnegative");
        const double rd = c.population.spam_rate * c.population.degree;
        if (r.ok() && !(rd > c.population.clean_rate / c.population.click_prob))
            r.error("population", "deploy needs an endemic botnet (spam_rate * degree > clean_rate / click_prob)");
        if (r.ok() && c.deploy.economics.benefit < c.deploy.economics.cost)
            r.error("deploy.benefit", "deploy.benefit must be at least deploy.cost");
        for (double tau : c.deploy.tau_sweep)
            if (!(tau > 0.0) || tau > c.deploy.economics.benefit)
                r.error("deploy.tau_sweep", "deploy.tau_sweep values must lie in (0, benefit]");
    }
    return r;
}

/// "line L, column C" for a byte offset into `text`.
inline std::string locate(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace detail

/// Parses and validates a scenario from JSON text. `origin` names the source in
/// error messages.
inline ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "config") {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is one past the offending character.
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        std::string what = e.what();
        if (auto p = what.find("parse error"); p != std::string::npos) what = what.substr(p);
        throw ConfigError(origin + ": " + detail::locate(text, at) + ": " + what);
    }

    ScenarioConfig c;
    detail::Reader r(root, "");
    std::string kind;
    if (!r.has("scenario")) throw ConfigError(origin + ": missing required key \"scenario\"");
    r.get("scenario", kind);
    if (kind == "ode") c.kind = ScenarioKind::ode;
    else if (kind == "abm") c.kind = ScenarioKind::abm;
    else if (kind == "stackelberg") c.kind = ScenarioKind::stackelberg;
    else if (kind == "deploy") c.kind = ScenarioKind::deploy;
    else if (kind == "compare") c.kind = ScenarioKind::compare;
    else
        throw ConfigError("scenario: expected one of ode, abm, stackelberg, deploy, compare (got \"" +
                          kind + "\")");
    r.get("seed", c.seed);
    r.get("output_dir", c.output_dir);

    // Simulations default to the desk-scale population.
    if (c.kind == ScenarioKind::abm || c.kind == ScenarioKind::compare) c.population.n_users = 10'000;

    detail::DegreeSpec degree;
    if (r.has("population")) detail::read_population(r.object("population"), c.population);
    if (r.has("ode")) detail::read_ode(r.object("ode"), c.ode);
    if (r.has("abm")) detail::read_abm(r.object("abm"), c.abm, degree);
    if (r.has("stackelberg")) detail::read_stackelberg(r.object("stackelberg"), c.stackelberg);
    if (r.has("deploy")) detail::read_deploy(r.object("deploy"), c.deploy);
    r.finish();

    if (c.ode.sweep_z.empty()) c.ode.sweep_z.push_back(c.population.honeybot_reserve);

    auto& sim = c.abm.sim;
    sim.params = c.population;
    sim.seed = c.seed;
    if (degree.kind == "scale_free") {
        sim.dist = DegreeDistribution::scale_free(degree.gamma, degree.d_min, degree.d_max,
                                                  c.population.n_users);
        if (sim.dist.d_min >= 1 && sim.dist.d_max >= sim.dist.d_min)
            sim.params.degree = sim.dist.law_mean();
    } else {
        sim.dist = DegreeDistribution::regular(c.population.degree, c.population.n_users);
    }

    auto rep = detail::validate_scenario(c);
    rep.throw_if_errors(origin);
    for (const auto& v : rep.items) c.warnings.push_back(v.message);
    return c;
}

inline ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

} // namespace sodexo::config
