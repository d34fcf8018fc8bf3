// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "sodexo/sodexo.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace sodexo;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double time_limit; ///< seconds
    std::function<Verdict()> check;
};

std::string str(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

PopulationParams reference(double z = 0) {
    PopulationParams p;
    p.honeybot_reserve = z;
    return p;
}

Verdict endemic_no_honeybots() {
    const auto p = reference(0);
    const auto end = dynamics::integrate(p, {50, 0}, 200, 0.01, 1000).states.back();
    const auto root = oracle::newton2(
        [&](std::array<double, 2> x) {
            return oracle::population_rhs(x, p.n(), p.degree, p.spam_rate, p.click_prob,
                                          p.link_fraction, p.clean_rate, p.detect_rate, 0);
        },
        {4e5, 0});
    const double err = oracle::rel(end.bots, 5e5);
    const double root_err = oracle::rel(root[0], 5e5);
    return {err < 1e-3 && root_err < 1e-10,
            "x1(200) = " + str("%.3f", end.bots) + ", rel err " + str("%.2e", err) +
                " (tol 1e-3); root finder " + str("%.6f", root[0])};
}

Verdict honeybot_impact() {
    const auto p = reference(5);
    const auto end = dynamics::integrate(p, {50, 0}, 200, 0.01, 1000).states.back();
    const double eb = oracle::rel(end.bots, 500000.0 / 3.0), eh = oracle::rel(end.honeybots, 40.0);
    bool decreasing = true;
    double prev = INFINITY;
    for (int z = 0; z <= 50; ++z) {
        const double b = dynamics::endemic_point(reference(z)).bots;
        decreasing = decreasing && b < prev;
        prev = b;
    }
    return {eb < 1e-3 && eh < 1e-3 && decreasing,
            "(x1, x2) = (" + str("%.3f", end.bots) + ", " + str("%.4f", end.honeybots) +
                "), rel err " + str("%.2e", eb) + " / " + str("%.2e", eh) +
                " (tol 1e-3); x1*(z) strictly decreasing on 0..50: " + (decreasing ? "yes" : "no")};
}

Verdict stability_suite() {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0, 1);
    int ext_ok = 0, end_ok = 0;
    double worst_ext = 0, worst_end = 0;
    auto random_params = [&](bool endemic) {
        PopulationParams p;
        p.n_users = 1'000'000;
        p.link_universe = 1e6;
        p.degree = 20 + 180 * u(rng);
        p.spam_rate = 0.1 + 0.9 * u(rng);
        p.click_prob = 0.002 + 0.02 * u(rng);
        p.link_fraction = 1e-5 + 1e-3 * u(rng);
        p.detect_rate = 0.1 + u(rng);
        p.honeybot_reserve = 50 * u(rng);
        const double rdq = p.recruitment_rate();
        p.clean_rate = endemic ? rdq / (1.2 + 2 * u(rng)) : rdq * (1.2 + 2 * u(rng));
        return p;
    };
    for (int i = 0; i < 100; ++i) {
        const auto p = random_params(false);
        const auto eq = dynamics::equilibria(p);
        const bool stable = eq.size() == 1 && eq[0].report.stability == dynamics::Stability::asymptotically_stable;
        const double slow = std::min(p.clean_rate - p.recruitment_rate(), p.detect_rate);
        const dynamics::PopulationState start{1e3 * u(rng), 20 * u(rng)};
        const auto end = dynamics::integrate(p, start, 40 / slow, 0.05, 1u << 30).states.back();
        const double dist = std::max(std::abs(end.bots), std::abs(end.honeybots));
        worst_ext = std::max(worst_ext, dist);
        ext_ok += stable && dist < 1e-3;
    }
    for (int i = 0; i < 100; ++i) {
        const auto p = random_params(true);
        const auto eq = dynamics::equilibria(p);
        const bool stable = eq.size() == 2 && eq[1].report.stability == dynamics::Stability::asymptotically_stable;
        const auto e = dynamics::endemic_point(p);
        const double slow = std::min(p.recruitment_rate() - p.clean_rate, p.detect_rate);
        const dynamics::PopulationState start{e.bots * (0.8 + 0.4 * u(rng)), e.honeybots * (0.8 + 0.4 * u(rng))};
        const auto end = dynamics::integrate(p, start, 40 / slow, 0.05, 1u << 30).states.back();
        const double err = std::max(oracle::rel(end.bots, e.bots),
                                    std::abs(end.honeybots - e.honeybots) / std::max(1.0, e.honeybots));
        worst_end = std::max(worst_end, err);
        end_ok += stable && err < 5e-3;
    }
    return {ext_ok == 100 && end_ok == 100,
            "extinction " + std::to_string(ext_ok) + "/100 (worst |x| " + str("%.1e", worst_ext) +
                ", tol 1e-3); endemic " + std::to_string(end_ok) + "/100 (worst rel " +
                str("%.1e", worst_end) + ", tol 5e-3)"};
}

Verdict bop_oracle() {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> size(2, 50);
    std::uniform_real_distribution<double> trust(0.1, 1), rate(0.1, 5), cost(0.5, 2), cap(1, 100),
        log_alpha(-1, 6);
    int ok = 0;
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
        SubtreeState s;
        const int n = size(rng);
        for (int j = 0; j < n; ++j) {
            s.trust.push_back(trust(rng));
            s.response_rates.push_back(rate(rng));
            s.costs.push_back(cost(rng));
        }
        s.capacity = cap(rng);
        s.alpha = std::pow(10.0, log_alpha(rng));
        const auto a = stackelberg::bop_allocate(s);
        std::vector<double> w;
        for (int j = 0; j < n; ++j) w.push_back(s.weight(j));
        const auto ref = oracle::allocation_by_bisection(w, s.costs, s.capacity, s.alpha);
        bool match = true;
        for (int j = 0; j < n; ++j) {
            const double e = std::abs(a.rates[j] - ref[j]) / std::max(std::abs(ref[j]), 1e-12);
            if (ref[j] > 1e-12 || a.rates[j] > 1e-12) worst = std::max(worst, e);
            match = match && (e < 1e-6 || std::abs(a.rates[j] - ref[j]) < 1e-12);
        }
        const double ua = oracle::allocation_utility(w, a.rates, s.alpha);
        bool beats = true;
        for (int k = 0; k < 10'000; ++k)
            beats = beats && ua >= oracle::allocation_utility(w, oracle::random_feasible(s.costs, s.capacity, rng), s.alpha) - 1e-12;
        ok += match && beats;
    }
    return {ok == 200, std::to_string(ok) + "/200 subtrees match bisection and beat 1e4 random allocations (worst rel " +
                           str("%.1e", worst) + ", tol 1e-6)"};
}

double honeybot_objective(const SubtreeState& s, const HoneybotConfig& h, double p) {
    double I = 0, sum_c = h.cost;
    for (std::size_t j = 0; j < s.bot_count(); ++j) {
        I += s.trust[j] * s.response_rates[j];
        sum_c += s.costs[j];
    }
    const double CH = (s.capacity + sum_c / s.alpha) / h.cost;
    const double arg = CH * h.trust * p / (h.trust * p + I) - 1 / s.alpha + h.xi;
    return arg > 0 ? std::log(arg) - h.beta * p : -INFINITY;
}

Verdict stackelberg_oracle() {
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<int> size(2, 30);
    std::uniform_real_distribution<double> trust(0.1, 1), rate(0.1, 5), cost(0.5, 2), cap(1, 100),
        beta(0.2, 5), xi(0, 2), log_alpha(-0.5, 4);
    int ok = 0;
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        SubtreeState s;
        const int n = size(rng);
        for (int j = 0; j < n; ++j) {
            s.trust.push_back(trust(rng));
            s.response_rates.push_back(rate(rng));
            s.costs.push_back(cost(rng));
        }
        s.capacity = cap(rng);
        s.alpha = std::pow(10.0, log_alpha(rng));
        HoneybotConfig h;
        h.beta = beta(rng);
        h.xi = xi(rng);
        h.trust = trust(rng);
        h.cost = cost(rng);
        const double p = stackelberg::solve_equilibrium(s, h).honeybot_rate;
        const double ref = oracle::argmax_grid_refine([&](double x) { return honeybot_objective(s, h, x); },
                                                      0, h.effective_rate_cap(), 100'000);
        const double e = ref < 1e-9 ? std::abs(p) : oracle::rel(p, ref);
        worst = std::max(worst, e);
        ok += e < 1e-6;
    }

    // Homogeneous instances: unit alpha, xi = 1/alpha, real bots dominating.
    int sym_ok = 0;
    double sym_worst = 0;
    for (double b : {0.5, 1.0, 2.0, 4.0}) {
        auto s = SubtreeState::homogeneous(1000, 1, 1e4, 1, 50, 1);
        HoneybotConfig h;
        h.beta = b;
        h.xi = 1;
        const auto eq = stackelberg::solve_equilibrium(s, h);
        const double e = oracle::rel(eq.honeybot_rate, 1 / b);
        sym_worst = std::max(sym_worst, e);
        sym_ok += e < 1e-6;
    }

    double slope_err = 0;
    for (std::uint64_t nb : {10u, 1000u, 100000u}) {
        const double g = stackelberg::info_growth_rate(static_cast<double>(nb), 0.8, 2, 0.9, 1.5);
        for (std::uint64_t nh = 0; nh < 10; ++nh) {
            const auto a = stackelberg::symmetric_equilibrium(nb, nh, 1, 2, 0.8, 0.9, 30, 2, 1.5);
            const auto c = stackelberg::symmetric_equilibrium(nb, nh + 1, 1, 2, 0.8, 0.9, 30, 2, 1.5);
            slope_err = std::max(slope_err, std::abs(c.cc_to_honeybot_rate() - a.cc_to_honeybot_rate() - g));
        }
    }
    return {ok == 100 && sym_ok == 4 && slope_err < 1e-8,
            std::to_string(ok) + "/100 match grid+golden (worst rel " + str("%.1e", worst) +
                ", tol 1e-6); 1/beta closed form " + std::to_string(sym_ok) + "/4 (worst " +
                str("%.1e", sym_worst) + "); slope err " + str("%.1e", slope_err) + " (tol 1e-8)"};
}

Verdict deployment_optimizer() {
    auto utility = [](const PopulationParams& p, double benefit, double cost, double z) {
        const double rd = p.spam_rate * p.degree;
        const double x2 = (rd - p.clean_rate / p.click_prob) * z / (rd * p.link_fraction * z + p.detect_rate);
        return benefit * x2 - cost * (x2 + z);
    };
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0, 1);
    int ok = 0;
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        PopulationParams p = reference();
        p.spam_rate = 0.2 + 0.6 * u(rng);
        p.detect_rate = 0.2 + 0.8 * u(rng);
        const double benefit = 0.5 + 1.5 * u(rng);
        const double cost = benefit * (0.02 + 0.5 * u(rng));
        const auto plan = pas::optimal_deployment(p, {benefit, cost, 1e-5});
        const double grid = oracle::argmax_grid([&](double z) { return utility(p, benefit, cost, z); }, 0, 200, 1e-3);
        const double e = std::abs(plan.reserve - grid);
        worst = std::max(worst, e);
        ok += e < 1e-2;
    }
    const auto ref_plan = pas::optimal_deployment(reference(), {1.0, 0.1, 1e-5});
    const bool ref_ok = std::abs(ref_plan.reserve - 22.47) <= 0.01;

    const PopulationParams p = reference();
    const DeploymentEconomics e{1.0, 0.05, 1e-5};
    const auto comb = pas::optimal_deployment_combined(p, e, 200);
    std::function<double(double)> v = [&](double z) {
        PopulationParams q = p;
        q.honeybot_reserve = z;
        const double rd = q.spam_rate * q.degree, rdq = rd * q.click_prob;
        const double x1 = q.n() * q.detect_rate * (rdq - q.clean_rate) /
                          (rdq * q.detect_rate + rd * q.link_fraction * z * q.clean_rate);
        const double x2 = (rd - q.clean_rate / q.click_prob) * z / (rd * q.link_fraction * z + q.detect_rate);
        return (1 / (e.zeta * x1) - e.cost) * x2 - e.cost * z;
    };
    const double comb_grid = oracle::argmax_grid(v, 0, 200, 1e-3);
    const double comb_err = std::abs(comb.reserve - comb_grid);
    return {ok == 100 && ref_ok && comb_err < 1e-2,
            std::to_string(ok) + "/100 closed form vs grid (worst " + str("%.1e", worst) +
                ", tol 1e-2); reference z* = " + str("%.6f", ref_plan.reserve) +
                " (22.47 +- 0.01); combined z* = " + str("%.4f", comb.reserve) + " vs grid " +
                str("%.3f", comb_grid) + (comb.at_upper_bound ? " [search bound active]" : "")};
}

abm::SimConfig regular_sim(double z) {
    abm::SimConfig c;
    c.params.n_users = 10'000;
    c.params.honeybot_reserve = z;
    c.dist = DegreeDistribution::regular(100, 10'000);
    c.horizon = 200;
    c.replicates = 20;
    c.seed = 42;
    c.threads = 0;
    return c;
}

Verdict mean_field_validation() {
    std::string detail;
    bool pass = true;
    for (double z : {0.0, 5.0}) {
        const auto c = regular_sim(z);
        const auto res = abm::run_ensemble(c);
        const auto rep = abm::compare_to_ode(res.stats, abm::matching_ode(c), 0.1);
        const bool ok = rep.mean_error_bots < 0.1 && (z == 0 || rep.mean_error_honeybots < 0.1);
        pass = pass && ok;
        detail += "z=" + str("%g", z) + ": bots " + str("%.3f", rep.mean_error_bots);
        if (z > 0) detail += ", honeybots " + str("%.3f", rep.mean_error_honeybots);
        detail += "; ";
    }
    return {pass, detail + "tol 0.1 after 10% burn-in"};
}

Verdict degree_ordering() {
    std::vector<double> mean, se;
    for (double g : {2.0, 2.5, 3.0}) {
        abm::SimConfig c;
        c.params.n_users = 10'000;
        c.params.honeybot_reserve = 5;
        c.dist = DegreeDistribution::scale_free(g, 30, 1000, 10'000);
        c.horizon = 200;
        c.replicates = 20;
        c.seed = 7;
        c.threads = 0;
        const auto st = abm::run_ensemble(c).stats;
        mean.push_back(st.mean_bots.back());
        se.push_back(st.sd_bots.back() / std::sqrt(static_cast<double>(st.replicates)));
    }
    bool pass = true;
    std::string detail = "final mean bots";
    for (std::size_t i = 0; i < mean.size(); ++i)
        detail += " " + str("%.1f", mean[i]) + " (se " + str("%.1f", se[i]) + ")";
    for (std::size_t i = 0; i + 1 < mean.size(); ++i) {
        const double gap = mean[i] - mean[i + 1];
        const double need = 2 * std::hypot(se[i], se[i + 1]);
        pass = pass && gap > need;
        detail += "; gap " + str("%.1f", gap) + " > " + str("%.1f", need);
    }
    return {pass, detail + " (gamma 2, 2.5, 3)"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict determinism() {
    const fs::path root = fs::temp_directory_path() / ("sodexo_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    int configs = 0, files = 0, mismatched = 0, failed_runs = 0;
    std::vector<fs::path> cfgs;
    for (const auto& e : fs::directory_iterator(SODEXO_CONFIG_DIR))
        if (e.path().extension() == ".json") cfgs.push_back(e.path());
    std::sort(cfgs.begin(), cfgs.end());
    for (const auto& cfg : cfgs) {
        ++configs;
        const auto a = root / cfg.stem() / "a", b = root / cfg.stem() / "b";
        for (const auto& out : {a, b}) {
            const std::string cmd = "\"" SODEXO_CLI_PATH "\" --quiet --config \"" + cfg.string() +
                                    "\" --out \"" + out.string() + "\"";
            const int status = std::system(cmd.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ++failed_runs;
        }
        for (const auto& e : fs::directory_iterator(a)) {
            if (e.path().extension() != ".csv") continue;
            ++files;
            const auto other = b / e.path().filename();
            if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++mismatched;
        }
    }
    fs::remove_all(root);
    return {failed_runs == 0 && mismatched == 0 && files > 0,
            std::to_string(configs) + " scenarios, " + std::to_string(files) + " CSV files compared, " +
                std::to_string(mismatched) + " differ, " + std::to_string(failed_runs) + " failed runs"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "endemic equilibrium without honeybots", 1, endemic_no_honeybots},
        {2, "honeybot impact on the equilibrium", 1, honeybot_impact},
        {3, "stability of extinction and endemic points", 30, stability_suite},
        {4, "allocation matches the bisection oracle", 10, bop_oracle},
        {5, "game equilibrium matches the grid oracle", 60, stackelberg_oracle},
        {6, "deployment optimizer matches grid search", 60, deployment_optimizer},
        {7, "agent-based ensemble tracks the mean-field ODE", 300, mean_field_validation},
        {8, "heavier degree tails give larger botnets", 600, degree_ordering},
        {9, "CLI reruns are byte-identical", 1200, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.time_limit;
        if (!in_time) v.detail += "; over time limit";
        const bool pass = v.pass && in_time;
        failures += !pass;
        std::printf("%s  criterion %d: %s | %s | %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), v.detail.c_str(), secs, c.time_limit);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
