#pragma once

// Runs one configured scenario and writes its CSV and JSON artifacts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sodexo/abm.hpp"
#include "sodexo/config.hpp"
#include "sodexo/dynamics.hpp"
#include "sodexo/error.hpp"
#include "sodexo/graph.hpp"
#include "sodexo/pas.hpp"
#include "sodexo/stackelberg.hpp"

namespace sodexo::scenario {

using ordered_json = nlohmann::ordered_json;
using config::ScenarioConfig;
using config::ScenarioKind;

struct RunReport {
    std::string scenario;
    std::filesystem::path output_dir;
    std::vector<std::string> files; ///< relative to output_dir, in write order
    std::vector<std::string> warnings;
    std::vector<std::string> summary; ///< one human-readable line per headline result
    double elapsed_seconds = 0.0;
};

/// Fixed 9-significant-digit text for a finite value.
inline std::string fmt(double x) {
    if (!std::isfinite(x)) throw ModelError("non-finite value reached an output file");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

/// A JSON number rounded to 9 significant digits (null if not finite).
inline ordered_json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::stod(fmt(x));
}

/// Label used inside file names, e.g. 5 -> "5", 2.5 -> "2.5".
inline std::string label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

class Writer {
public:
    Writer(std::filesystem::path dir, RunReport& report) : dir_(std::move(dir)), report_(report) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    std::ofstream open(const std::string& name) {
        std::ofstream os(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot write " + (dir_ / name).string());
        report_.files.push_back(name);
        return os;
    }

    void json(const std::string& name, const ordered_json& j) {
        auto os = open(name);
        os << j.dump(2) << '\n';
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    RunReport& report_;
};

namespace detail {

inline ordered_json population_json(const PopulationParams& p) {
    return {{"n_users", p.n_users},          {"degree", num(p.degree)},
            {"spam_rate", num(p.spam_rate)}, {"click_prob", num(p.click_prob)},
            {"link_fraction", num(p.link_fraction)}, {"link_universe", num(p.link_universe)},
            {"clean_rate", num(p.clean_rate)}, {"detect_rate", num(p.detect_rate)},
            {"honeybot_reserve", num(p.honeybot_reserve)}};
}

inline ordered_json state_json(const dynamics::PopulationState& s) {
    return {{"x1", num(s.bots)}, {"x2", num(s.honeybots)}};
}

inline ordered_json sim_json(const abm::SimConfig& s) {
    ordered_json dist = {{"kind", s.dist.kind == DegreeKind::regular ? "regular" : "scale_free"}};
    if (s.dist.kind == DegreeKind::regular) {
        dist["degree"] = num(s.dist.degree);
    } else {
        dist["gamma"] = num(s.dist.gamma);
        dist["d_min"] = s.dist.d_min;
        dist["d_max"] = s.dist.d_max;
        dist["law_mean"] = num(s.dist.law_mean());
    }
    return {{"horizon", num(s.horizon)},
            {"tick", num(s.tick)},
            {"seed", s.seed},
            {"replicates", s.replicates},
            {"replacement", s.replacement},
            {"initial_bots", s.initial_bots},
            {"initial_blacklist", num(s.initial_blacklist)},
            {"link_mode", abm::to_string(s.link_mode)},
            {"inherit_links", s.inherit_links},
            {"honeybot_degree", s.honeybot_degree},
            {"degree_distribution", dist}};
}

inline void write_trajectory_csv(std::ostream& os, const dynamics::Trajectory& tr, std::size_t every) {
    os << "t,x1,x2\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        if (i % every != 0 && i + 1 != tr.times.size()) continue;
        os << fmt(tr.times[i]) << ',' << fmt(tr.states[i].bots) << ',' << fmt(tr.states[i].honeybots)
           << '\n';
    }
}

inline void write_ensemble_csv(std::ostream& os, const abm::EnsembleStats& st) {
    os << "t,mean_bots,sd_bots,mean_honeybots,sd_honeybots\n";
    for (std::size_t i = 0; i < st.times.size(); ++i)
        os << fmt(st.times[i]) << ',' << fmt(st.mean_bots[i]) << ',' << fmt(st.sd_bots[i]) << ','
           << fmt(st.mean_honeybots[i]) << ',' << fmt(st.sd_honeybots[i]) << '\n';
}

inline void write_replicate_csv(std::ostream& os, const dynamics::Trajectory& tr) {
    os << "t,bots,honeybots\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        os << fmt(tr.times[i]) << ',' << fmt(tr.states[i].bots) << ',' << fmt(tr.states[i].honeybots)
           << '\n';
}

inline ordered_json divergence_json(const abm::DivergenceReport& d) {
    return {{"burn_in_until", num(d.burn_in_until)},
            {"mean_relative_error_bots", num(d.mean_error_bots)},
            {"mean_relative_error_honeybots", num(d.mean_error_honeybots)},
            {"max_relative_error_bots", num(d.max_error_bots)},
            {"max_relative_error_honeybots", num(d.max_error_honeybots)}};
}

inline ordered_json plan_json(const pas::DeploymentPlan& p) {
    return {{"mode", pas::to_string(p.mode)},
            {"reserve", num(p.reserve)},
            {"integer_reserve", num(p.integer_reserve)},
            {"predicted_endemic", state_json(p.predicted_endemic)},
            {"predicted_utility", num(p.predicted_utility)},
            {"integer_utility", num(p.integer_utility)},
            {"benefit", num(p.benefit)},
            {"zeta", num(p.zeta)},
            {"theta", num(p.theta)},
            {"phi", num(p.phi)},
            {"clamped_at_zero", p.clamped_at_zero},
            {"at_upper_bound", p.at_upper_bound}};
}

inline dynamics::Trajectory ode_for(const ScenarioConfig& c, double z) {
    PopulationParams p = c.population;
    p.honeybot_reserve = z;
    return dynamics::integrate(p, {c.ode.initial_bots, c.ode.initial_honeybots}, c.ode.t_end, c.ode.step);
}

inline void run_ode(const ScenarioConfig& c, Writer& w, RunReport& rep) {
    ordered_json runs = ordered_json::array();
    for (double z : c.ode.sweep_z) {
        const auto tr = ode_for(c, z);
        {
            auto os = w.open("ode_z" + label(z) + ".csv");
            write_trajectory_csv(os, tr, c.ode.record_every);
        }
        PopulationParams p = c.population;
        p.honeybot_reserve = z;
        ordered_json eqs = ordered_json::array();
        for (const auto& e : dynamics::equilibria(p)) {
            const auto& r = e.report;
            eqs.push_back({{"kind", dynamics::to_string(e.kind)},
                           {"state", state_json(e.state)},
                           {"stability", dynamics::to_string(r.stability)},
                           {"eigenvalues",
                            {{num(r.eigenvalues[0].real()), num(r.eigenvalues[0].imag())},
                             {num(r.eigenvalues[1].real()), num(r.eigenvalues[1].imag())}}},
                           {"jacobian",
                            {{num(r.jacobian[0][0]), num(r.jacobian[0][1])},
                             {num(r.jacobian[1][0]), num(r.jacobian[1][1])}}}});
        }
        runs.push_back({{"honeybot_reserve", num(z)},
                        {"final_state", state_json(tr.final_state())},
                        {"clamped_steps", tr.clamp_count},
                        {"equilibria", eqs}});
        rep.summary.push_back("z=" + label(z) + ": x1(" + fmt(c.ode.t_end) +
                              ")=" + fmt(tr.final_state().bots) + ", x2=" + fmt(tr.final_state().honeybots));
    }
    w.json("equilibria.json", {{"t_end", num(c.ode.t_end)}, {"step", num(c.ode.step)}, {"runs", runs}});
}

inline ordered_json run_one_ensemble(const abm::SimConfig& sim, const config::AbmSettings& a,
                                     const std::string& stem, Writer& w, RunReport& rep) {
    const auto res = abm::run_ensemble(sim);
    {
        auto os = w.open(stem + ".csv");
        write_ensemble_csv(os, res.stats);
    }
    if (a.write_replicates) {
        for (std::size_t i = 0; i < res.replicates.size(); ++i) {
            auto os = w.open(stem + "_replicate" + std::to_string(i) + ".csv");
            write_replicate_csv(os, res.replicates[i]);
        }
    }
    if (a.export_graph) {
        const auto g = generate_graph(sim.dist, sim.seed);
        auto os = w.open(stem + "_graph.edges");
        g.write_edge_list(os);
    }
    const auto ode = abm::matching_ode(sim);
    const auto d = abm::compare_to_ode(res.stats, ode, a.burn_in_fraction);
    const auto last = res.stats.times.size() - 1;
    rep.summary.push_back(stem + ": final mean bots " + fmt(res.stats.mean_bots[last]) + " (sd " +
                          fmt(res.stats.sd_bots[last]) + "), mean-field " + fmt(ode.final_state().bots));
    ordered_json j = {{"output", stem + ".csv"},
                      {"final_mean_bots", num(res.stats.mean_bots[last])},
                      {"final_sd_bots", num(res.stats.sd_bots[last])},
                      {"final_mean_honeybots", num(res.stats.mean_honeybots[last])},
                      {"final_sd_honeybots", num(res.stats.sd_honeybots[last])},
                      {"mean_field_final", state_json(ode.final_state())},
                      {"divergence", divergence_json(d)}};
    if (sim.dist.kind == DegreeKind::scale_free) j["gamma"] = num(sim.dist.gamma);
    return j;
}

inline void run_abm(const ScenarioConfig& c, Writer& w, RunReport& rep) {
    ordered_json runs = ordered_json::array();
    if (c.abm.gamma_sweep.empty()) {
        runs.push_back(run_one_ensemble(c.abm.sim, c.abm, "abm_ensemble", w, rep));
    } else {
        for (double g : c.abm.gamma_sweep) {
            abm::SimConfig sim = c.abm.sim;
            sim.dist = DegreeDistribution::scale_free(g, sim.dist.d_min, sim.dist.d_max,
                                                      sim.params.n_users);
            sim.params.degree = sim.dist.law_mean();
            runs.push_back(run_one_ensemble(sim, c.abm, "abm_gamma" + label(g), w, rep));
        }
    }
    w.json("divergence.json", {{"runs", runs}});
}

inline void run_compare(const ScenarioConfig& c, Writer& w, RunReport& rep) {
    const auto& sim = c.abm.sim;
    const auto res = abm::run_ensemble(sim);
    const auto ode = abm::matching_ode(sim, c.ode.step);
    const auto d = abm::compare_to_ode(res.stats, ode, c.abm.burn_in_fraction);
    {
        auto os = w.open("compare.csv");
        os << "t,ode_x1,ode_x2,mean_bots,sd_bots,mean_honeybots,sd_honeybots\n";
        std::size_t k = 0;
        for (std::size_t i = 0; i < res.stats.times.size() && k < d.times.size(); ++i) {
            if (res.stats.times[i] != d.times[k]) continue;
            os << fmt(d.times[k]) << ',' << fmt(d.ode_bots[k]) << ',' << fmt(d.ode_honeybots[k]) << ','
               << fmt(res.stats.mean_bots[i]) << ',' << fmt(res.stats.sd_bots[i]) << ','
               << fmt(res.stats.mean_honeybots[i]) << ',' << fmt(res.stats.sd_honeybots[i]) << '\n';
            ++k;
        }
    }
    w.json("divergence.json", {{"replicates", sim.replicates}, {"divergence", divergence_json(d)}});
    rep.summary.push_back("time-averaged relative error: bots " + fmt(d.mean_error_bots) +
                          ", honeybots " + fmt(d.mean_error_honeybots));
}

inline void run_stackelberg(const ScenarioConfig& c, Writer& w, RunReport& rep) {
    const auto& s = c.stackelberg;
    const auto eq = stackelberg::solve_equilibrium(s.subtree, s.honeybot);
    const auto bop = stackelberg::bop_allocate(s.subtree);
    const auto n = static_cast<double>(s.subtree.bot_count());
    double mean_trust = 0, mean_rate = 0, mean_cost = 0;
    for (std::size_t j = 0; j < s.subtree.bot_count(); ++j) {
        mean_trust += s.subtree.trust[j] / n;
        mean_rate += s.subtree.response_rates[j] / n;
        mean_cost += s.subtree.costs[j] / n;
    }
    const double growth =
        stackelberg::info_growth_rate(n, mean_trust, mean_rate, s.honeybot.trust, s.honeybot.beta);
    const auto large = stackelberg::solve_equilibrium_large_botnet(eq.I_minus_H, eq.C_H, s.honeybot);
    const auto sym = stackelberg::symmetric_equilibrium(
        s.subtree.bot_count(), s.n_honeybots, mean_cost, mean_rate, mean_trust, s.honeybot.trust,
        s.subtree.capacity, s.subtree.alpha, s.honeybot.beta);

    auto rates = [](const std::vector<double>& v) {
        ordered_json a = ordered_json::array();
        for (double x : v) a.push_back(num(x));
        return a;
    };
    ordered_json j = {
        {"equilibrium",
         {{"honeybot_rate", num(eq.honeybot_rate)},
          {"cc_to_honeybot_rate", num(eq.cc_to_honeybot_rate)},
          {"honeybot_utility", num(eq.honeybot_utility)},
          {"I_minus_H", num(eq.I_minus_H)},
          {"C_H", num(eq.C_H)},
          {"cap_binding", eq.cap_binding},
          {"zero_response", eq.zero_response},
          {"residual_rates", rates(eq.residual_allocation.rates)},
          {"residual_utility", num(eq.residual_allocation.utility)}}},
        {"allocation_without_honeybot",
         {{"rates", rates(bop.rates)},
          {"multiplier", num(bop.multiplier)},
          {"utility", num(bop.utility)},
          {"clamped", bop.clamped}}},
        {"large_botnet_approximation",
         {{"honeybot_rate", num(large.honeybot_rate)}, {"regime_violated", large.regime_violated}}},
        {"info_growth_rate", num(growth)},
        {"symmetric",
         {{"n_honeybots", s.n_honeybots},
          {"honeybot_rate", num(sym.honeybot_rate)},
          {"cc_to_honeybot_rate", num(sym.cc_to_honeybot_rate())},
          {"independent_term", num(sym.independent_term)},
          {"honeybot_term", num(sym.honeybot_term)}}}};
    w.json("stackelberg.json", j);
    rep.summary.push_back("honeybot rate " + fmt(eq.honeybot_rate) + ", C&C rate to honeybot " +
                          fmt(eq.cc_to_honeybot_rate) + ", info growth rate " + fmt(growth));
}

inline void run_deploy(const ScenarioConfig& c, Writer& w, RunReport& rep) {
    const auto& d = c.deploy;
    const auto closed = pas::optimal_deployment(c.population, d.economics);
    const auto combined = pas::optimal_deployment_combined(c.population, d.economics, d.z_max);
    w.json("deployment_plan.json", {{"economics",
                                     {{"benefit", num(d.economics.benefit)},
                                      {"cost", num(d.economics.cost)},
                                      {"zeta", num(d.economics.zeta)}}},
                                    {"closed_form", plan_json(closed)},
                                    {"combined", plan_json(combined)}});
    rep.summary.push_back("closed form z* = " + fmt(closed.reserve) + " (integer " +
                          fmt(closed.integer_reserve) + "), combined z* = " + fmt(combined.reserve));
    if (combined.at_upper_bound)
        rep.warnings.push_back("combined optimum sits on the search bound z_max; the objective is still "
                               "increasing there");
    if (combined.clamped_at_zero)
        rep.warnings.push_back("combined mode: no reserve improves on z = 0 under the profitability constraint");

    if (!d.tau_sweep.empty()) {
        auto os = w.open("deploy_sweep.csv");
        os << "tau,p,z_star,utility\n";
        for (double tau : d.tau_sweep) {
            DeploymentEconomics e = d.economics;
            e.cost = tau;
            const auto plan = pas::optimal_deployment(c.population, e);
            os << fmt(tau) << ',' << fmt(e.benefit) << ',' << fmt(plan.reserve) << ','
               << fmt(plan.predicted_utility) << '\n';
        }
    }
}

inline ordered_json parameters_json(const ScenarioConfig& c) {
    ordered_json j;
    switch (c.kind) {
    case ScenarioKind::ode:
        j["population"] = population_json(c.population);
        j["ode"] = {{"t_end", num(c.ode.t_end)},
                    {"step", num(c.ode.step)},
                    {"initial_bots", num(c.ode.initial_bots)},
                    {"initial_honeybots", num(c.ode.initial_honeybots)},
                    {"record_every", c.ode.record_every}};
        j["ode"]["sweep_z"] = ordered_json::array();
        for (double z : c.ode.sweep_z) j["ode"]["sweep_z"].push_back(num(z));
        break;
    case ScenarioKind::abm:
    case ScenarioKind::compare:
        j["population"] = population_json(c.abm.sim.params);
        j["abm"] = sim_json(c.abm.sim);
        if (!c.abm.gamma_sweep.empty()) {
            j["abm"]["gamma_sweep"] = ordered_json::array();
            for (double g : c.abm.gamma_sweep) j["abm"]["gamma_sweep"].push_back(num(g));
        }
        break;
    case ScenarioKind::stackelberg: {
        const auto& s = c.stackelberg;
        j["subtree"] = {{"bots", s.subtree.bot_count()},
                        {"capacity", num(s.subtree.capacity)},
                        {"alpha", num(s.subtree.alpha)}};
        j["honeybot"] = {{"beta", num(s.honeybot.beta)},
                         {"xi", num(s.honeybot.xi)},
                         {"rate_cap", num(s.honeybot.effective_rate_cap())},
                         {"trust", num(s.honeybot.trust)},
                         {"cost", num(s.honeybot.cost)}};
        break;
    }
    case ScenarioKind::deploy:
        j["population"] = population_json(c.population);
        j["deploy"] = {{"benefit", num(c.deploy.economics.benefit)},
                       {"cost", num(c.deploy.economics.cost)},
                       {"zeta", num(c.deploy.economics.zeta)},
                       {"z_max", num(c.deploy.z_max > 0 ? c.deploy.z_max : 0.01 * c.population.n())}};
        break;
    }
    return j;
}

} // namespace detail

/// Overrides the seed everywhere it is used.
inline void apply_seed(ScenarioConfig& c, std::uint64_t seed) {
    c.seed = seed;
    c.abm.sim.seed = seed;
}

/// Executes the scenario, writing artifacts and run_report.json into `out`.
inline RunReport run(const ScenarioConfig& c, const std::filesystem::path& out) {
    const auto start = std::chrono::steady_clock::now();
    RunReport rep;
    rep.scenario = config::to_string(c.kind);
    rep.output_dir = out;
    rep.warnings = c.warnings;
    Writer w(out, rep);
    switch (c.kind) {
    case ScenarioKind::ode: detail::run_ode(c, w, rep); break;
    case ScenarioKind::abm: detail::run_abm(c, w, rep); break;
    case ScenarioKind::compare: detail::run_compare(c, w, rep); break;
    case ScenarioKind::stackelberg: detail::run_stackelberg(c, w, rep); break;
    case ScenarioKind::deploy: detail::run_deploy(c, w, rep); break;
    }
    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ordered_json files = ordered_json::array();
    for (const auto& f : rep.files) files.push_back(f);
    ordered_json report = {{"scenario", rep.scenario},
                           {"seed", c.seed},
                           {"parameters", detail::parameters_json(c)},
                           {"outputs", files},
                           {"warnings", rep.warnings},
                           {"elapsed_seconds", num(rep.elapsed_seconds)}};
    w.json("run_report.json", report);
    return rep;
}

} // namespace sodexo::scenario
