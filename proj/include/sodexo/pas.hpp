#pragma once

// Protection-and-alert layer: trust decay, linking the game and population
// layers, and choosing how many honeybots to keep in reserve.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "sodexo/dynamics.hpp"
#include "sodexo/error.hpp"
#include "sodexo/model.hpp"
#include "sodexo/numeric.hpp"
#include "sodexo/stackelberg.hpp"

namespace sodexo::pas {

struct TrustTimeline {
    double initial_trust = 1.0;
    double start_time = 0.0; ///< days
    double detect_rate = 0.5;
};

/// Trust decays exponentially from its initial value at the detection rate.
inline double trust_at(const TrustTimeline& tl, double t) {
    if (t < tl.start_time) throw ModelError("trust_at: t precedes the timeline start");
    return tl.initial_trust * std::exp(-tl.detect_rate * (t - tl.start_time));
}

/// Detection rate from observed honeybot lifetimes: the reciprocal of the mean.
inline double estimate_detect_rate(const std::vector<double>& lifetimes) {
    if (lifetimes.empty()) throw ModelError("estimate_detect_rate: no lifetimes given");
    double sum = 0.0;
    for (double l : lifetimes) {
        if (!(l > 0.0)) throw ModelError("estimate_detect_rate: lifetimes must be positive");
        sum += l;
    }
    return static_cast<double>(lifetimes.size()) / sum;
}

/// Total bots and honeybots over all C&C subtrees.
inline dynamics::PopulationState link_populations(const std::vector<double>& subtree_bots,
                                                  const std::vector<double>& subtree_honeybots) {
    return {std::accumulate(subtree_bots.begin(), subtree_bots.end(), 0.0),
            std::accumulate(subtree_honeybots.begin(), subtree_honeybots.end(), 0.0)};
}

/// Bot activity level seen by the C&C bot, as a multiple of the spam rate.
inline double activity_link(double spam_rate, double alpha) {
    if (!(spam_rate > 0.0) || !(alpha > 0.0))
        throw ModelError("activity_link: spam_rate and alpha must be positive");
    return alpha * spam_rate;
}

namespace detail {
inline void require_endemic(const PopulationParams& p, const char* who) {
    const double rd = p.spam_rate * p.degree;
    if (!(rd > p.clean_rate / p.click_prob))
        throw ModelError(std::string(who) +
                         ": no endemic botnet (r d <= mu1 / q); deployment model inapplicable");
}
} // namespace detail

/// Net value of a reserve of z honeybots at the population steady state:
/// (p - tau) x2*(z) - tau z.
inline double deployment_utility(double z, const PopulationParams& p,
                                 const DeploymentEconomics& e) {
    detail::require_endemic(p, "deployment_utility");
    const double rd = p.spam_rate * p.degree;
    const double gain = rd - p.clean_rate / p.click_prob;
    return (e.benefit - e.cost) * gain * z / (rd * p.link_fraction * z + p.detect_rate) - e.cost * z;
}

enum class DeploymentMode { closed_form, combined };

inline const char* to_string(DeploymentMode m) {
    return m == DeploymentMode::closed_form ? "closed_form" : "combined";
}

struct DeploymentPlan {
    DeploymentMode mode = DeploymentMode::closed_form;
    double reserve = 0.0;              ///< real-valued optimum z*
    double integer_reserve = 0.0;      ///< better of floor(z*) and ceil(z*)
    dynamics::PopulationState predicted_endemic;
    double predicted_utility = 0.0;
    double integer_utility = 0.0;
    double benefit = 0.0;              ///< per-honeybot benefit used (combined: at z*)
    double zeta = 0.0;
    double theta = 0.0;                ///< x2* - M / (2k)
    double phi = 0.0;                  ///< 1 - k x2* / M
    bool clamped_at_zero = false;      ///< unconstrained optimum was negative or unprofitable
    bool at_upper_bound = false;       ///< combined mode hit the search bound
};

namespace detail {
template <class F>
void fill_integer(DeploymentPlan& plan, F&& utility) {
    const double lo = std::floor(plan.reserve), hi = std::ceil(plan.reserve);
    const double ulo = utility(lo), uhi = utility(hi);
    plan.integer_reserve = uhi > ulo ? hi : lo;
    plan.integer_utility = std::max(ulo, uhi);
}

inline void fill_state(DeploymentPlan& plan, PopulationParams p) {
    p.honeybot_reserve = plan.reserve;
    plan.predicted_endemic = dynamics::endemic_point(p);
    plan.theta = plan.predicted_endemic.honeybots - 0.5 / p.link_fraction;
    plan.phi = 1.0 - p.link_fraction * plan.predicted_endemic.honeybots;
}
} // namespace detail

/// Reserve maximizing deployment_utility, in closed form:
/// z* = (-mu2 + sqrt((p - tau)(r d - mu1/q) mu2 / tau)) / (r d k/M), floored at 0.
inline DeploymentPlan optimal_deployment(const PopulationParams& p, const DeploymentEconomics& e) {
    detail::require_endemic(p, "optimal_deployment");
    if (!(e.cost > 0.0)) throw ModelError("optimal_deployment: cost must be positive");
    const double rd = p.spam_rate * p.degree;
    const double gain = rd - p.clean_rate / p.click_prob;
    const double radicand = (e.benefit - e.cost) * gain * p.detect_rate / e.cost;
    if (radicand < 0.0)
        throw ModelError("optimal_deployment: benefit below cost (negative radicand)");

    DeploymentPlan plan;
    plan.mode = DeploymentMode::closed_form;
    plan.benefit = e.benefit;
    plan.zeta = e.zeta;
    const double z = (-p.detect_rate + std::sqrt(radicand)) / (rd * p.link_fraction);
    plan.reserve = std::max(0.0, z);
    plan.clamped_at_zero = z <= 0.0;
    detail::fill_state(plan, p);
    auto u = [&](double zz) { return deployment_utility(zz, p, e); };
    plan.predicted_utility = u(plan.reserve);
    detail::fill_integer(plan, u);
    return plan;
}

/// Combined objective (1 / (zeta x1*(z)) - tau) x2*(z) - tau z.
inline double combined_utility(double z, const PopulationParams& p, const DeploymentEconomics& e) {
    detail::require_endemic(p, "combined_utility");
    PopulationParams q = p;
    q.honeybot_reserve = z;
    const auto eq = dynamics::endemic_point(q);
    return (1.0 / (e.zeta * eq.bots) - e.cost) * eq.honeybots - e.cost * z;
}

/// Maximizes combined_utility over z in [0, z_max]. When z_max <= 0 the bound
/// defaults to 1% of the user population.
///
/// The objective need not be bounded above as z grows (the dilution benefit
/// rises as the botnet shrinks), so the search domain is explicit and
/// `at_upper_bound` reports when the bound is active.
inline DeploymentPlan optimal_deployment_combined(const PopulationParams& p,
                                                  const DeploymentEconomics& e,
                                                  double z_max = 0.0) {
    detail::require_endemic(p, "optimal_deployment_combined");
    if (!(p.recruitment_rate() > p.clean_rate))
        throw ModelError("optimal_deployment_combined: r d q <= mu1; no endemic bot population");
    if (!(e.zeta > 0.0)) throw ModelError("optimal_deployment_combined: zeta must be positive");
    if (!(e.cost > 0.0)) throw ModelError("optimal_deployment_combined: cost must be positive");
    if (!(z_max > 0.0)) z_max = 0.01 * p.n();

    auto v = [&](double z) { return combined_utility(z, p, e); };
    double z = numeric::scan_then_golden(v, 0.0, z_max, 4000);

    DeploymentPlan plan;
    plan.mode = DeploymentMode::combined;
    plan.zeta = e.zeta;
    plan.at_upper_bound = z >= z_max * (1.0 - 1e-12);

    PopulationParams q = p;
    q.honeybot_reserve = z;
    const double benefit = 1.0 / (e.zeta * dynamics::endemic_point(q).bots);
    if (benefit < e.cost || !(v(z) > 0.0)) {
        z = 0.0;
        plan.clamped_at_zero = true;
        plan.at_upper_bound = false;
    }
    plan.reserve = z;
    detail::fill_state(plan, p);
    plan.benefit = 1.0 / (e.zeta * plan.predicted_endemic.bots);
    plan.predicted_utility = v(z);
    detail::fill_integer(plan, [&](double zz) { return v(std::min(zz, z_max)); });
    return plan;
}

struct ExploitationBenefit {
    double zeta = 0.0;        ///< beta T_bar p_bar / T_H
    double exact = 0.0;       ///< 1 / (1 + zeta x1)
    double approximate = 0.0; ///< 1 / (zeta x1), the large-botnet form
};

/// Per-honeybot information benefit when the C&C bot controls `n_bots` real bots.
inline ExploitationBenefit benefit_from_exploitation(double n_bots, double mean_trust,
                                                     double mean_rate, double honeybot_trust,
                                                     double beta) {
    if (!(honeybot_trust > 0.0))
        throw ModelError("benefit_from_exploitation: honeybot_trust must be positive");
    ExploitationBenefit b;
    b.zeta = beta * mean_trust * mean_rate / honeybot_trust;
    const double load = b.zeta * n_bots;
    b.exact = 1.0 / (1.0 + load);
    b.approximate = load > 0.0 ? 1.0 / load : std::numeric_limits<double>::infinity();
    return b;
}

} // namespace sodexo::pas
