#pragma once

// Shared parameter types for the exploitation game, the population model,
// the deployment optimizer and the agent-based simulator.
//
// Units: the population, deployment and agent-based layers measure time in
// days; the game layer works in abstract messages per time unit. The two are
// bridged by the unitless activity factor (see pas::activity_link).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sodexo/error.hpp"

namespace sodexo {

/// One command-and-control bot's view of the bots it controls.
struct SubtreeState {
    std::vector<double> trust;          ///< trust in each controlled bot, in [0,1]
    std::vector<double> response_rates; ///< messages per time unit from each bot
    std::vector<double> costs;          ///< cost per command sent to each bot
    double capacity = 1.0;              ///< channel capacity
    double alpha = 1.0;                 ///< marginal-utility scale

    std::size_t bot_count() const { return trust.size(); }

    /// Trust-weighted response mass of bot j.
    double weight(std::size_t j) const { return trust[j] * response_rates[j]; }

    double total_weight() const {
        double s = 0.0;
        for (std::size_t j = 0; j < bot_count(); ++j) s += weight(j);
        return s;
    }

    double total_cost() const { return std::accumulate(costs.begin(), costs.end(), 0.0); }

    /// A subtree of identical bots.
    static SubtreeState homogeneous(std::size_t n, double trust, double rate, double cost,
                                    double capacity, double alpha) {
        SubtreeState s;
        s.trust.assign(n, trust);
        s.response_rates.assign(n, rate);
        s.costs.assign(n, cost);
        s.capacity = capacity;
        s.alpha = alpha;
        return s;
    }
};

/// Honeybot side of the exploitation game.
struct HoneybotConfig {
    double beta = 1.0;     ///< cost per response message
    double xi = 0.0;       ///< satiation offset of the logarithmic utility
    double rate_cap = 0.0; ///< upper bound on the response rate; <= 0 means 10^3 / beta
    double trust = 1.0;    ///< trust the C&C bot places in the honeybot
    double cost = 1.0;     ///< C&C cost per command sent to the honeybot

    double effective_rate_cap() const { return rate_cap > 0.0 ? rate_cap : 1e3 / beta; }
};

/// Macroscopic constants of the bot/honeybot population model.
///
/// Defaults are the reference social-network setting: one million users of
/// average degree 100, 0.4 spam messages per bot per day, 1% click
/// probability, 1% of the link universe per bot, bots cleaned after 5 days
/// and honeybots detected after 2 days on average.
struct PopulationParams {
    std::uint64_t n_users = 1'000'000;
    double degree = 100.0;
    double spam_rate = 0.4;
    double click_prob = 0.01;
    double link_fraction = 0.01;  ///< k / M
    double link_universe = 1e4;   ///< M
    double clean_rate = 0.2;
    double detect_rate = 0.5;
    double honeybot_reserve = 0.0; ///< z

    double n() const { return static_cast<double>(n_users); }
    double links_per_bot() const { return link_fraction * link_universe; }
    /// Rate at which one bot recruits new bots in a fully susceptible network.
    double recruitment_rate() const { return spam_rate * degree * click_prob; }
};

enum class DegreeKind { regular, scale_free };

/// Degree distribution of the social graph together with its class counts N_d.
struct DegreeDistribution {
    DegreeKind kind = DegreeKind::regular;
    double degree = 100.0; ///< regular kind
    double gamma = 2.5;    ///< scale-free exponent
    int d_min = 1;
    int d_max = 1;
    std::map<int, double> class_counts;

    double total() const {
        double s = 0.0;
        for (auto [d, c] : class_counts) s += c;
        return s;
    }

    double mean_degree() const {
        double s = 0.0, w = 0.0;
        for (auto [d, c] : class_counts) {
            s += d * c;
            w += c;
        }
        return w > 0.0 ? s / w : 0.0;
    }

    /// Normalized probability of each degree under the distribution's law.
    std::map<int, double> pmf() const {
        std::map<int, double> p;
        if (kind == DegreeKind::regular) {
            p[static_cast<int>(std::lround(degree))] = 1.0;
            return p;
        }
        double z = 0.0;
        for (int d = d_min; d <= d_max; ++d) z += std::pow(static_cast<double>(d), -gamma);
        for (int d = d_min; d <= d_max; ++d) p[d] = std::pow(static_cast<double>(d), -gamma) / z;
        return p;
    }

    /// Mean of the law (not of the class counts).
    double law_mean() const {
        double m = 0.0;
        for (auto [d, pd] : pmf()) m += d * pd;
        return m;
    }

    static DegreeDistribution regular(double d, std::uint64_t n) {
        DegreeDistribution dist;
        dist.kind = DegreeKind::regular;
        dist.degree = d;
        dist.d_min = dist.d_max = static_cast<int>(std::lround(d));
        dist.class_counts[dist.d_min] = static_cast<double>(n);
        return dist;
    }

    /// Truncated power law P(d) proportional to d^-gamma on [d_min, d_max]; class
    /// counts are N * P(d) rounded by largest remainder so they sum to N.
    static DegreeDistribution scale_free(double gamma, int d_min, int d_max, std::uint64_t n) {
        DegreeDistribution dist;
        dist.kind = DegreeKind::scale_free;
        dist.gamma = gamma;
        dist.d_min = d_min;
        dist.d_max = d_max;
        if (d_min < 1 || d_max < d_min) return dist; // rejected by validate()
        auto p = dist.pmf();
        std::vector<std::pair<double, int>> remainders;
        std::uint64_t assigned = 0;
        for (auto [d, pd] : p) {
            double exact = pd * static_cast<double>(n);
            auto whole = static_cast<std::uint64_t>(std::floor(exact));
            dist.class_counts[d] = static_cast<double>(whole);
            assigned += whole;
            remainders.emplace_back(exact - static_cast<double>(whole), d);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](auto& a, auto& b) { return a.first > b.first; });
        for (std::size_t i = 0; assigned < n && i < remainders.size(); ++i, ++assigned)
            dist.class_counts[remainders[i].second] += 1.0;
        for (auto it = dist.class_counts.begin(); it != dist.class_counts.end();) {
            if (it->second == 0.0)
                it = dist.class_counts.erase(it);
            else
                ++it;
        }
        return dist;
    }
};

/// Per-honeybot benefit and cost used by the deployment optimizer.
struct DeploymentEconomics {
    double benefit = 1.0; ///< p
    double cost = 0.1;    ///< tau
    double zeta = 1e-5;   ///< dilution coefficient, combined mode only
};

enum class Severity { warning, error };

struct Violation {
    Severity severity;
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> items;

    bool empty() const { return items.empty(); }

    bool ok() const {
        for (const auto& v : items)
            if (v.severity == Severity::error) return false;
        return true;
    }

    std::size_t warning_count() const {
        std::size_t n = 0;
        for (const auto& v : items) n += v.severity == Severity::warning;
        return n;
    }

    bool mentions(const std::string& text) const {
        for (const auto& v : items)
            if (v.message.find(text) != std::string::npos) return true;
        return false;
    }

    std::string summary() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) os << "; ";
            os << (items[i].severity == Severity::error ? "error: " : "warning: ")
               << items[i].message;
        }
        return os.str();
    }

    void error(std::string field, std::string message) {
        items.push_back({Severity::error, std::move(field), std::move(message)});
    }
    void warn(std::string field, std::string message) {
        items.push_back({Severity::warning, std::move(field), std::move(message)});
    }

    /// Throws ConfigError listing every error if any are present.
    void throw_if_errors(const std::string& context) const {
        if (ok()) return;
        std::ostringstream os;
        os << context << ": ";
        bool first = true;
        for (const auto& v : items) {
            if (v.severity != Severity::error) continue;
            if (!first) os << "; ";
            os << v.message;
            first = false;
        }
        throw ConfigError(os.str());
    }
};

namespace detail {
inline bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }
} // namespace detail

inline ValidationReport validate(const SubtreeState& s) {
    ValidationReport r;
    const auto n = s.bot_count();
    if (n == 0) r.error("trust", "bot_count must be positive");
    if (s.response_rates.size() != n || s.costs.size() != n)
        r.error("response_rates", "trust, response_rates and costs must have length bot_count");
    for (double t : s.trust)
        if (!(t >= 0.0 && t <= 1.0)) {
            r.error("trust", "trust out of [0,1]");
            break;
        }
    for (double p : s.response_rates)
        if (!(p >= 0.0) || !std::isfinite(p)) {
            r.error("response_rates", "response_rates must be nonnegative");
            break;
        }
    for (double c : s.costs)
        if (!detail::finite_positive(c)) {
            r.error("costs", "costs must be positive");
            break;
        }
    if (!detail::finite_positive(s.capacity)) r.error("capacity", "capacity must be positive");
    if (!detail::finite_positive(s.alpha)) r.error("alpha", "alpha must be positive");
    if (r.ok()) {
        for (std::size_t j = 0; j < n; ++j)
            if (s.weight(j) == 0.0) {
                r.error("trust", "bot " + std::to_string(j) +
                                     " is inactive or untrusted (trust*response_rate == 0)");
                break;
            }
    }
    return r;
}

inline ValidationReport validate(const HoneybotConfig& h) {
    ValidationReport r;
    if (!detail::finite_positive(h.beta)) r.error("beta", "beta must be positive");
    if (!(h.xi >= 0.0) || !std::isfinite(h.xi)) r.error("xi", "xi must be nonnegative");
    if (!std::isfinite(h.rate_cap) || h.rate_cap < 0.0)
        r.error("rate_cap", "rate_cap must be finite and positive");
    if (!(h.trust >= 0.0 && h.trust <= 1.0)) r.error("trust", "trust out of [0,1]");
    if (!detail::finite_positive(h.cost)) r.error("cost", "cost must be positive");
    return r;
}

inline ValidationReport validate(const PopulationParams& p) {
    ValidationReport r;
    if (p.n_users == 0) r.error("n_users", "n_users must be positive");
    if (!detail::finite_positive(p.degree)) r.error("degree", "degree must be positive");
    if (!detail::finite_positive(p.spam_rate)) r.error("spam_rate", "spam_rate must be positive");
    if (!(p.click_prob > 0.0 && p.click_prob <= 1.0))
        r.error("click_prob", "click_prob out of (0,1]");
    if (!(p.link_fraction > 0.0 && p.link_fraction <= 0.1))
        r.error("link_fraction", "link_fraction out of (0,0.1]");
    else if (p.link_fraction > 0.05)
        r.warn("link_fraction", "link_fraction above 0.05: k << M approximation degrades");
    if (!detail::finite_positive(p.link_universe))
        r.error("link_universe", "link_universe must be positive");
    if (!detail::finite_positive(p.clean_rate)) r.error("clean_rate", "clean_rate must be positive");
    if (!detail::finite_positive(p.detect_rate))
        r.error("detect_rate", "detect_rate must be positive");
    if (!(p.honeybot_reserve >= 0.0) || !std::isfinite(p.honeybot_reserve))
        r.error("honeybot_reserve", "honeybot_reserve must be nonnegative");
    else if (p.n_users > 0 && p.honeybot_reserve > 0.01 * p.n())
        r.warn("honeybot_reserve",
               "honeybot_reserve exceeds 1% of n_users: small-reserve approximation violated");
    return r;
}

inline ValidationReport validate(const DegreeDistribution& d) {
    ValidationReport r;
    if (d.kind == DegreeKind::regular) {
        if (!(d.degree >= 1.0) || !std::isfinite(d.degree))
            r.error("degree", "regular degree must be at least 1");
    } else {
        if (!(d.gamma > 0.0) || !std::isfinite(d.gamma)) r.error("gamma", "gamma must be positive");
        if (d.d_min < 1) r.error("d_min", "d_min must be at least 1");
        if (d.d_max < d.d_min) r.error("d_max", "d_max must be at least d_min");
    }
    if (d.class_counts.empty()) r.error("class_counts", "class_counts must be nonempty");
    for (auto [deg, c] : d.class_counts)
        if (deg < 0 || !(c >= 0.0)) {
            r.error("class_counts", "class counts must be nonnegative");
            break;
        }
    if (r.ok() && !(d.mean_degree() > 0.0))
        r.error("class_counts", "average degree must be positive");
    return r;
}

inline ValidationReport validate(const DeploymentEconomics& e) {
    ValidationReport r;
    if (!detail::finite_positive(e.benefit)) r.error("benefit", "benefit must be positive");
    if (!detail::finite_positive(e.cost)) r.error("cost", "cost must be positive");
    if (!detail::finite_positive(e.zeta)) r.error("zeta", "zeta must be positive");
    if (r.ok() && e.benefit <= e.cost)
        r.warn("benefit", "benefit does not exceed cost: optimal reserve is zero");
    return r;
}

} // namespace sodexo
