#pragma once

// Exploitation layer: a C&C bot allocating command capacity across the bots
// it controls, and a honeybot that picks its response rate as a Stackelberg
// leader anticipating that allocation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "sodexo/error.hpp"
#include "sodexo/model.hpp"
#include "sodexo/numeric.hpp"

namespace sodexo::stackelberg {

struct Allocation {
    std::vector<double> rates; ///< command rate to each bot
    double multiplier = 0.0;   ///< Lagrange multiplier of the capacity constraint (negative)
    double utility = 0.0;
    bool clamped = false;      ///< true when some closed-form rate was negative and floored at 0
};

/// Sum over bots of weight_j * ln(alpha * rate_j + 1).
inline double allocation_utility(const SubtreeState& s, const std::vector<double>& rates) {
    double u = 0.0;
    for (std::size_t j = 0; j < s.bot_count(); ++j) u += s.weight(j) * std::log1p(s.alpha * rates[j]);
    return u;
}

/// Maximizes sum_j T_j p_j ln(alpha x_j + 1) subject to sum_j c_j x_j <= C, x >= 0.
///
/// Uses the unclamped closed form when every rate is nonnegative. Otherwise
/// solves the water-filling problem exactly: bots are admitted in order of
/// weight-per-cost and the multiplier is recomputed on the active set.
inline Allocation bop_allocate(const SubtreeState& s) {
    const std::size_t n = s.bot_count();
    if (n == 0 || s.response_rates.size() != n || s.costs.size() != n)
        throw ModelError("bop_allocate: trust, response_rates and costs must have equal nonzero length");
    if (!(s.capacity > 0.0)) throw ModelError("bop_allocate: capacity must be positive");
    if (!(s.alpha > 0.0)) throw ModelError("bop_allocate: alpha must be positive");
    for (double c : s.costs)
        if (!(c > 0.0)) throw ModelError("bop_allocate: costs must be positive");
    const double total_w = s.total_weight();
    if (!(total_w > 0.0))
        throw ModelError("bop_allocate: every trust*response product is zero; objective is degenerate");

    const double inv_alpha = 1.0 / s.alpha;
    Allocation a;
    a.rates.resize(n);

    const double budget = s.capacity + inv_alpha * s.total_cost();
    bool all_nonneg = true;
    for (std::size_t j = 0; j < n; ++j) {
        a.rates[j] = (s.weight(j) / total_w) * (budget / s.costs[j]) - inv_alpha;
        all_nonneg = all_nonneg && a.rates[j] >= 0.0;
    }
    if (all_nonneg) {
        a.multiplier = -total_w / budget;
        a.utility = allocation_utility(s, a.rates);
        return a;
    }

    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < n; ++j)
        if (s.weight(j) > 0.0) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return s.weight(i) / s.costs[i] > s.weight(j) / s.costs[j];
    });

    // Active set = longest prefix whose last member still gets a positive rate.
    double sum_w = 0.0, sum_c = 0.0, level = 0.0;
    std::size_t active = 0;
    for (std::size_t m = 0; m < order.size(); ++m) {
        const std::size_t j = order[m];
        const double w = sum_w + s.weight(j);
        const double c = sum_c + s.costs[j];
        const double nu = w / (s.capacity + inv_alpha * c);
        if (s.alpha * s.weight(j) / s.costs[j] <= nu) break;
        sum_w = w;
        sum_c = c;
        level = nu;
        active = m + 1;
    }
    std::fill(a.rates.begin(), a.rates.end(), 0.0);
    for (std::size_t m = 0; m < active; ++m) {
        const std::size_t j = order[m];
        a.rates[j] = std::max(0.0, s.weight(j) / (level * s.costs[j]) - inv_alpha);
    }
    a.multiplier = -level;
    a.clamped = true;
    a.utility = allocation_utility(s, a.rates);
    return a;
}

/// Aggregates the C&C bot uses when it answers the honeybot.
struct GameAggregates {
    double I_minus_H = 0.0; ///< trust-weighted response mass of the real bots
    double C_H = 0.0;       ///< capacity scale available to the honeybot
};

/// `subtree` lists the real bots only; the honeybot is appended implicitly.
inline GameAggregates aggregates(const SubtreeState& subtree, const HoneybotConfig& hb) {
    GameAggregates g;
    g.I_minus_H = subtree.total_weight();
    g.C_H = (subtree.capacity + (subtree.total_cost() + hb.cost) / subtree.alpha) / hb.cost;
    return g;
}

/// The C&C bot's rate toward a honeybot answering at `honeybot_rate`.
inline double best_response(const GameAggregates& g, double alpha, double honeybot_trust,
                            double honeybot_rate) {
    if (!(honeybot_rate >= 0.0)) throw ModelError("best_response: honeybot_rate must be nonnegative");
    const double mass = honeybot_trust * honeybot_rate;
    if (mass + g.I_minus_H == 0.0)
        throw ModelError("best_response: no response mass from any bot; share is undefined");
    return std::max(0.0, g.C_H * mass / (mass + g.I_minus_H) - 1.0 / alpha);
}

inline double best_response(const SubtreeState& subtree, const HoneybotConfig& hb,
                            double honeybot_rate) {
    return best_response(aggregates(subtree, hb), subtree.alpha, hb.trust, honeybot_rate);
}

/// Honeybot utility ln(p_iH + xi) - beta * p_Hi with the C&C bot's best response.
inline double honeybot_utility(const GameAggregates& g, double alpha, const HoneybotConfig& hb,
                               double honeybot_rate) {
    const double reply = best_response(g, alpha, hb.trust, honeybot_rate);
    const double arg = reply + hb.xi;
    if (!(arg > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(arg) - hb.beta * honeybot_rate;
}

/// Honeybot objective with the unclamped best response substituted:
/// ln(C_H * share(p) + xi_bar) - beta * p, where xi_bar = xi - 1/alpha.
/// Coincides with honeybot_utility wherever the best response is positive.
inline double reduced_honeybot_objective(const GameAggregates& g, double alpha,
                                         const HoneybotConfig& hb, double honeybot_rate) {
    const double mass = hb.trust * honeybot_rate;
    const double share = mass + g.I_minus_H > 0.0 ? mass / (mass + g.I_minus_H) : 0.0;
    const double arg = g.C_H * share + (hb.xi - 1.0 / alpha);
    if (!(arg > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(arg) - hb.beta * honeybot_rate;
}

struct GameEquilibrium {
    double honeybot_rate = 0.0;       ///< leader's response rate p*_Hi
    double cc_to_honeybot_rate = 0.0; ///< follower's command rate p*_iH
    Allocation residual_allocation;   ///< command rates to the real bots
    double honeybot_utility = 0.0;
    double I_minus_H = 0.0;
    double C_H = 0.0;
    bool cap_binding = false;
    bool zero_response = false; ///< leader's best move is not to respond
};

/// Stackelberg equilibrium with the honeybot as leader.
///
/// The leader's first-order condition
///   C_H I T = beta (I + pT)(C_H pT + (I + pT) xi_bar)
/// is a quadratic in u = pT. Its admissible roots, the endpoints 0 and
/// rate_cap are compared on the (concave) reduced objective.
inline GameEquilibrium solve_equilibrium(const SubtreeState& subtree, const HoneybotConfig& hb) {
    if (auto r = validate(subtree); !r.ok()) throw ModelError("solve_equilibrium: " + r.summary());
    if (auto r = validate(hb); !r.ok()) throw ModelError("solve_equilibrium: " + r.summary());

    const GameAggregates g = aggregates(subtree, hb);
    const double alpha = subtree.alpha;
    const double T = hb.trust;
    const double beta = hb.beta;
    const double xi_bar = hb.xi - 1.0 / alpha;
    const double cap = hb.effective_rate_cap();
    const double I = g.I_minus_H;

    auto objective = [&](double p) { return reduced_honeybot_objective(g, alpha, hb, p); };

    GameEquilibrium eq;
    eq.I_minus_H = I;
    eq.C_H = g.C_H;

    double best_p = 0.0;
    double best_v = -std::numeric_limits<double>::infinity();
    auto consider = [&](double p) {
        if (!(p >= 0.0) || !std::isfinite(p)) return;
        p = std::min(p, cap);
        const double v = objective(p);
        if (v > best_v || (v == best_v && p < best_p)) {
            best_v = v;
            best_p = p;
        }
    };

    if (T > 0.0) {
        const double a = beta * (g.C_H + xi_bar);
        const double b = beta * I * (g.C_H + 2.0 * xi_bar);
        const double c = beta * xi_bar * I * I - g.C_H * I * T;
        double u1 = 0.0, u2 = 0.0;
        const int roots = numeric::solve_quadratic(a, b, c, u1, u2);
        if (roots >= 1) consider(u1 / T);
        if (roots == 2) consider(u2 / T);
    }
    consider(0.0);
    consider(cap);
    if (!std::isfinite(best_v))
        throw ModelError("solve_equilibrium: no response rate yields a finite honeybot utility");

    eq.honeybot_rate = best_p;
    eq.cap_binding = best_p >= cap;
    eq.zero_response = best_p == 0.0;
    eq.cc_to_honeybot_rate = best_response(g, alpha, T, best_p);
    eq.honeybot_utility = honeybot_utility(g, alpha, hb, best_p);

    // Joint allocation over the real bots and the honeybot; keep the real bots.
    SubtreeState joint = subtree;
    joint.trust.push_back(T);
    joint.response_rates.push_back(best_p);
    joint.costs.push_back(hb.cost);
    Allocation all = bop_allocate(joint);
    all.rates.pop_back();
    eq.residual_allocation = std::move(all);
    return eq;
}

struct LargeBotnetSolution {
    double honeybot_rate = 0.0;
    bool regime_violated = false; ///< T * p / I_minus_H above 1%: large-botnet approximation suspect
};

/// Leader's rate when the real bots' response mass dwarfs the honeybot's:
/// (1/beta - I xi / (C_H T + T xi))^+.
inline LargeBotnetSolution solve_equilibrium_large_botnet(double I_minus_H, double C_H,
                                                          const HoneybotConfig& hb) {
    LargeBotnetSolution s;
    if (!(hb.trust > 0.0)) return s;
    const double p = 1.0 / hb.beta - I_minus_H * hb.xi / (C_H * hb.trust + hb.trust * hb.xi);
    s.honeybot_rate = std::max(0.0, p);
    s.regime_violated = I_minus_H <= 0.0 || hb.trust * s.honeybot_rate > 0.01 * I_minus_H;
    return s;
}

struct SymmetricEquilibrium {
    double honeybot_rate = 0.0;    ///< 1 / beta
    double independent_term = 0.0; ///< part of p*_iH not depending on the honeybot count
    double honeybot_term = 0.0;    ///< part of p*_iH growing with the honeybot count
    double cc_to_honeybot_rate() const { return independent_term + honeybot_term; }
};

/// Rate at which the C&C bot's command flow to the honeybots grows per added
/// honeybot: T_H / (beta n_B T_bar p_bar + T_H).
inline double info_growth_rate(double n_bots, double mean_trust, double mean_rate,
                               double honeybot_trust, double beta) {
    const double den = beta * n_bots * mean_trust * mean_rate + honeybot_trust;
    if (!(den > 0.0)) throw ModelError("info_growth_rate: degenerate inputs (zero denominator)");
    return honeybot_trust / den;
}

/// Closed-form equilibrium for n_B identical real bots, n_H honeybots and a
/// zero effective satiation offset.
inline SymmetricEquilibrium symmetric_equilibrium(std::uint64_t n_bots, std::uint64_t n_honeybots,
                                                  double mean_cost, double mean_rate,
                                                  double mean_trust, double honeybot_trust,
                                                  double capacity, double alpha, double beta) {
    if (!(beta > 0.0) || !(alpha > 0.0) || !(mean_cost > 0.0))
        throw ModelError("symmetric_equilibrium: beta, alpha and mean_cost must be positive");
    const double nb = static_cast<double>(n_bots);
    const double growth = info_growth_rate(nb, mean_trust, mean_rate, honeybot_trust, beta);
    SymmetricEquilibrium s;
    s.honeybot_rate = 1.0 / beta;
    s.independent_term = growth * (capacity / mean_cost + nb / alpha) - 1.0 / alpha;
    s.honeybot_term = static_cast<double>(n_honeybots) * growth;
    return s;
}

} // namespace sodexo::stackelberg
