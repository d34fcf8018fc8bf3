#pragma once

// Stochastic agent-based simulation of bot and honeybot propagation on an
// explicit social graph. Time advances in fixed ticks; every event in a tick
// is drawn against the state at the start of that tick.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "sodexo/dynamics.hpp"
#include "sodexo/error.hpp"
#include "sodexo/graph.hpp"
#include "sodexo/model.hpp"

namespace sodexo::abm {

enum class NodeStatus : std::uint8_t {
    susceptible,
    bot,
    honeybot_reserve,
    honeybot_infiltrated,
    removed,
};

/// Which links an infiltrated honeybot gets to report.
enum class LinkMode {
    /// A fresh set of k links not already on the active blacklist, so that the
    /// active blacklist covers exactly k x2 of the M links.
    disjoint,
    /// The k links of the bot whose message it followed; sets may overlap.
    recruiter,
};

inline const char* to_string(LinkMode m) { return m == LinkMode::disjoint ? "disjoint" : "recruiter"; }

struct SimConfig {
    PopulationParams params;
    DegreeDistribution dist = DegreeDistribution::regular(100, 10'000);
    double horizon = 200.0;   ///< days
    double tick = 0.1;        ///< days
    std::uint64_t seed = 1;
    std::size_t replicates = 20;
    bool replacement = true;  ///< keep the reserve at its initial size
    std::uint64_t initial_bots = 50;
    double initial_blacklist = 0.0; ///< fraction of the M links blacklisted from the start
    LinkMode link_mode = LinkMode::disjoint;
    bool inherit_links = false;     ///< recruits copy their infector's link set
    int honeybot_degree = 0;        ///< 0: round(mean degree of the graph)
    unsigned threads = 1;           ///< 0: one per hardware thread
};

inline ValidationReport validate(const SimConfig& c) {
    ValidationReport r = validate(c.params);
    for (auto& v : validate(c.dist).items) r.items.push_back(v);
    if (!r.ok()) return r;
    if (std::llround(c.dist.total()) != static_cast<long long>(c.params.n_users))
        r.error("dist", "degree distribution size must equal n_users");
    if (!(c.tick > 0.0 && c.tick <= 1.0)) r.error("tick", "tick must lie in (0, 1]");
    if (!(c.horizon >= c.tick) || !std::isfinite(c.horizon))
        r.error("horizon", "horizon must be at least one tick");
    if (c.replicates == 0) r.error("replicates", "replicates must be positive");
    if (c.initial_bots > c.params.n_users)
        r.error("initial_bots", "initial_bots exceeds n_users");
    if (!(c.initial_blacklist >= 0.0 && c.initial_blacklist <= 1.0))
        r.error("initial_blacklist", "initial_blacklist out of [0,1]");
    if (c.honeybot_degree < 0) r.error("honeybot_degree", "honeybot_degree must be nonnegative");
    const double k = c.params.links_per_bot();
    if (!(k >= 1.0)) r.error("link_fraction", "link_fraction * link_universe must be at least 1");
    else if (std::abs(k - std::round(k)) > 1e-9)
        r.warn("link_fraction", "k = link_fraction * link_universe is not integral; rounded");
    if (r.ok() && std::round(k) * c.params.n() > 4e8)
        r.error("link_universe", "per-bot link sets too large to store (n_users * k > 4e8)");
    const double worst = std::max({c.params.spam_rate, c.params.clean_rate, c.params.detect_rate});
    if (r.ok() && worst * c.tick > 1.0)
        r.warn("tick", "rate * tick exceeds 1; per-tick probabilities are clamped");
    return r;
}

struct Honeybot {
    NodeStatus status = NodeStatus::honeybot_reserve;
    std::vector<std::uint32_t> neighbors;
    std::vector<std::uint32_t> links; ///< reported links while infiltrated
};

struct AgentState {
    double time = 0.0;
    std::size_t k = 0;                     ///< links per bot
    std::vector<NodeStatus> status;        ///< regular users: susceptible or bot
    std::vector<std::uint32_t> links;      ///< k entries per node, meaningful for bots
    std::vector<Honeybot> honeybots;
    std::vector<std::uint32_t> blacklist;  ///< active blacklist reference counts, one per link
    std::vector<char> reported;            ///< every link ever blacklisted
    std::size_t active_count = 0;          ///< links with a nonzero reference count
    std::size_t reported_count = 0;
    std::size_t bots = 0;
    std::size_t reserve = 0;
    std::size_t infiltrated = 0;
    std::size_t removed = 0;
    std::size_t initial_reserve = 0;
    std::size_t replacements = 0;
    std::size_t infections = 0;            ///< cumulative recruitments of regular users
    int honeybot_degree = 0;

    std::size_t link_universe() const { return blacklist.size(); }
    bool blacklisted(std::uint32_t link) const { return blacklist[link] > 0; }
    const std::uint32_t* link_set(std::uint32_t node) const { return links.data() + node * k; }
};

/// Returns an empty string when the bookkeeping invariants hold, else a description.
inline std::string check_invariants(const AgentState& s) {
    std::size_t bots = 0, sus = 0;
    for (auto st : s.status) {
        if (st == NodeStatus::bot) ++bots;
        else if (st == NodeStatus::susceptible) ++sus;
        else return "regular user holds a honeybot status";
    }
    if (bots != s.bots) return "bot count out of sync";
    if (bots + sus != s.status.size()) return "susceptible + bots != N";
    std::size_t res = 0, inf = 0, rem = 0;
    for (const auto& h : s.honeybots) {
        res += h.status == NodeStatus::honeybot_reserve;
        inf += h.status == NodeStatus::honeybot_infiltrated;
        rem += h.status == NodeStatus::removed;
    }
    if (res != s.reserve || inf != s.infiltrated || rem != s.removed)
        return "honeybot counts out of sync";
    if (res + inf + rem != s.initial_reserve + s.replacements)
        return "reserve + infiltrated + removed != initial reserve + replacements";
    std::size_t active = 0, reported = 0;
    for (std::size_t l = 0; l < s.blacklist.size(); ++l) {
        active += s.blacklist[l] > 0;
        reported += s.reported[l] != 0;
        if (s.blacklist[l] > 0 && !s.reported[l]) return "active link missing from reported set";
    }
    if (active != s.active_count || reported != s.reported_count) return "blacklist counts out of sync";
    return {};
}

namespace detail {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::uint32_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
}

/// k distinct links, uniform over the universe.
inline void sample_link_set(AgentState& s, std::uint32_t* out, std::vector<char>& mark, Rng& rng) {
    const std::size_t m = s.link_universe();
    for (std::size_t i = 0; i < s.k;) {
        auto l = uniform_index(rng, m);
        if (mark[l]) continue;
        mark[l] = 1;
        out[i++] = l;
    }
    for (std::size_t i = 0; i < s.k; ++i) mark[out[i]] = 0;
}

/// Up to k distinct links that are not on the active blacklist.
inline std::vector<std::uint32_t> sample_free_links(AgentState& s, std::vector<char>& mark, Rng& rng) {
    const std::size_t m = s.link_universe();
    const std::size_t free = m - s.active_count;
    std::vector<std::uint32_t> out;
    if (free <= 2 * s.k) {
        for (std::uint32_t l = 0; l < m; ++l)
            if (!s.blacklisted(l)) out.push_back(l);
        const std::size_t take = std::min(s.k, out.size());
        for (std::size_t i = 0; i < take; ++i)
            std::swap(out[i], out[i + uniform_index(rng, out.size() - i)]);
        out.resize(take);
        return out;
    }
    out.reserve(s.k);
    while (out.size() < s.k) {
        auto l = uniform_index(rng, m);
        if (mark[l] || s.blacklisted(l)) continue;
        mark[l] = 1;
        out.push_back(l);
    }
    for (auto l : out) mark[l] = 0;
    return out;
}

inline void add_to_blacklist(AgentState& s, std::uint32_t l) {
    if (s.blacklist[l]++ == 0) ++s.active_count;
    if (!s.reported[l]) {
        s.reported[l] = 1;
        ++s.reported_count;
    }
}

inline void release_from_blacklist(AgentState& s, std::uint32_t l) {
    if (--s.blacklist[l] == 0) --s.active_count;
}

inline Honeybot make_honeybot(std::size_t n, int degree, Rng& rng) {
    Honeybot h;
    const auto d = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(degree), n));
    h.neighbors.reserve(d);
    while (h.neighbors.size() < d) {
        auto v = uniform_index(rng, n);
        if (std::find(h.neighbors.begin(), h.neighbors.end(), v) == h.neighbors.end())
            h.neighbors.push_back(v);
    }
    std::sort(h.neighbors.begin(), h.neighbors.end());
    return h;
}

struct Scratch {
    std::vector<char> link_mark;
    std::vector<char> pending;
};

inline Scratch& scratch_for(const AgentState& s) {
    thread_local Scratch sc;
    if (sc.link_mark.size() != s.link_universe()) sc.link_mark.assign(s.link_universe(), 0);
    if (sc.pending.size() != s.status.size()) sc.pending.assign(s.status.size(), 0);
    return sc;
}

} // namespace detail

/// Initial state: `initial_bots` random users infected, the honeybot reserve
/// wired to random users, and the initial blacklist fraction applied.
inline AgentState initial_state(const SocialGraph& g, const SimConfig& c, detail::Rng& rng) {
    AgentState s;
    const std::size_t n = g.node_count();
    if (c.initial_bots > n) throw ModelError("initial_state: more initial bots than users");
    s.k = static_cast<std::size_t>(std::llround(c.params.links_per_bot()));
    const auto m = static_cast<std::size_t>(std::llround(c.params.link_universe));
    if (s.k < 1 || s.k > m) throw ModelError("initial_state: need 1 <= k <= M");
    s.status.assign(n, NodeStatus::susceptible);
    s.links.assign(n * s.k, 0);
    s.blacklist.assign(m, 0);
    s.reported.assign(m, 0);
    s.honeybot_degree = c.honeybot_degree > 0
                            ? c.honeybot_degree
                            : static_cast<int>(std::lround(g.degree_stats().mean));

    // Links are exchangeable, so a prefix is a uniformly placed blacklist and
    // larger coverages nest the smaller ones.
    const auto pre = static_cast<std::size_t>(std::llround(c.initial_blacklist * static_cast<double>(m)));
    for (std::size_t l = 0; l < pre; ++l) detail::add_to_blacklist(s, static_cast<std::uint32_t>(l));

    auto& sc = detail::scratch_for(s);
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < c.initial_bots; ++i) {
        std::swap(order[i], order[i + detail::uniform_index(rng, n - i)]);
        const auto v = order[i];
        s.status[v] = NodeStatus::bot;
        detail::sample_link_set(s, s.links.data() + v * s.k, sc.link_mark, rng);
    }
    s.bots = c.initial_bots;

    const auto z = static_cast<std::size_t>(std::llround(c.params.honeybot_reserve));
    for (std::size_t i = 0; i < z; ++i) s.honeybots.push_back(detail::make_honeybot(n, s.honeybot_degree, rng));
    s.reserve = s.initial_reserve = z;
    return s;
}

/// Advances the state by one tick in place.
inline void advance(AgentState& s, const SocialGraph& g, const SimConfig& c, detail::Rng& rng) {
    const auto& p = c.params;
    const std::size_t n = s.status.size();
    const double p_click = std::min(1.0, p.spam_rate * c.tick * p.click_prob);
    const double p_clean = std::min(1.0, p.clean_rate * c.tick);
    const double p_detect = std::min(1.0, p.detect_rate * c.tick);
    auto& sc = detail::scratch_for(s);

    std::vector<std::uint32_t> bots;
    bots.reserve(s.bots);
    for (std::size_t v = 0; v < n; ++v)
        if (s.status[v] == NodeStatus::bot) bots.push_back(static_cast<std::uint32_t>(v));

    // Recruitment: a message to each neighbor with probability r tick, followed
    // with probability q. Only followed messages matter, so neighbors are
    // visited by geometric skipping at the combined probability.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> recruits; // (user, infector)
    if (p_click > 0.0) {
        std::geometric_distribution<std::size_t> skip(p_click);
        for (auto b : bots) {
            const auto& nb = g.adjacency[b];
            for (std::size_t i = p_click >= 1.0 ? 0 : skip(rng); i < nb.size();
                 i += 1 + (p_click >= 1.0 ? 0 : skip(rng))) {
                const auto v = nb[i];
                if (s.status[v] != NodeStatus::susceptible || sc.pending[v]) continue;
                const auto link = s.link_set(b)[detail::uniform_index(rng, s.k)];
                if (s.blacklisted(link)) continue;
                sc.pending[v] = 1;
                recruits.emplace_back(v, b);
            }
        }
    }

    // Reserve honeybots follow every link they receive. Messages reach a reserve
    // honeybot at rate r per bot neighbor, which is often several per tick, so
    // arrivals are drawn in continuous time within the tick. With replacement
    // the new honeybot takes over the slot for the rest of the tick.
    std::vector<std::pair<std::size_t, std::uint32_t>> infiltrations; // (honeybot, sender)
    std::vector<std::size_t> detections;
    const std::size_t start_count = s.honeybots.size();
    std::vector<std::uint32_t> senders;
    for (std::size_t h0 = 0; h0 < start_count; ++h0) {
        if (s.honeybots[h0].status == NodeStatus::honeybot_infiltrated) {
            if (detail::uniform01(rng) < p_detect) detections.push_back(h0);
            continue;
        }
        if (s.honeybots[h0].status != NodeStatus::honeybot_reserve) continue;
        double t = 0.0;
        std::size_t h = h0;
        bool rewire = true;
        while (true) {
            if (rewire) {
                senders.clear();
                for (auto v : s.honeybots[h].neighbors)
                    if (s.status[v] == NodeStatus::bot) senders.push_back(v);
                rewire = false;
            }
            if (senders.empty()) break;
            t += std::exponential_distribution<double>(p.spam_rate *
                                                       static_cast<double>(senders.size()))(rng);
            if (t >= c.tick) break;
            const auto v = senders[detail::uniform_index(rng, senders.size())];
            const auto link = s.link_set(v)[detail::uniform_index(rng, s.k)];
            if (s.blacklisted(link)) continue;
            infiltrations.emplace_back(h, v);
            if (!c.replacement) break;
            s.honeybots.push_back(detail::make_honeybot(n, s.honeybot_degree, rng));
            ++s.reserve;
            ++s.replacements;
            h = s.honeybots.size() - 1;
            rewire = true;
        }
    }

    std::vector<std::uint32_t> cleaned;
    for (auto b : bots)
        if (detail::uniform01(rng) < p_clean) cleaned.push_back(b);

    // Apply everything against the start-of-tick draws.
    for (auto b : cleaned) s.status[b] = NodeStatus::susceptible;
    s.bots -= cleaned.size();
    for (auto [v, from] : recruits) {
        sc.pending[v] = 0;
        s.status[v] = NodeStatus::bot;
        auto* dst = s.links.data() + v * s.k;
        if (c.inherit_links)
            std::copy(s.link_set(from), s.link_set(from) + s.k, dst);
        else
            detail::sample_link_set(s, dst, sc.link_mark, rng);
    }
    s.bots += recruits.size();
    s.infections += recruits.size();

    for (auto h : detections) {
        auto& hb = s.honeybots[h];
        for (auto l : hb.links) detail::release_from_blacklist(s, l);
        hb.links.clear();
        hb.links.shrink_to_fit();
        hb.neighbors.clear();
        hb.neighbors.shrink_to_fit();
        hb.status = NodeStatus::removed;
    }
    s.infiltrated -= detections.size();
    s.removed += detections.size();

    for (auto [h, sender] : infiltrations) {
        auto& hb = s.honeybots[h];
        hb.status = NodeStatus::honeybot_infiltrated;
        if (c.link_mode == LinkMode::recruiter)
            hb.links.assign(s.link_set(sender), s.link_set(sender) + s.k);
        else
            hb.links = detail::sample_free_links(s, sc.link_mark, rng);
        for (auto l : hb.links) detail::add_to_blacklist(s, l);
        hb.neighbors.clear();
        hb.neighbors.shrink_to_fit();
    }
    s.reserve -= infiltrations.size();
    s.infiltrated += infiltrations.size();
    s.time += c.tick;
}

/// Value-returning form of advance().
inline AgentState step(AgentState s, const SocialGraph& g, const SimConfig& c, detail::Rng& rng) {
    advance(s, g, c, rng);
    return s;
}

inline std::size_t tick_count(const SimConfig& c) {
    return static_cast<std::size_t>(std::ceil(c.horizon / c.tick - 1e-9));
}

/// Simulation seed derived from a replicate seed, kept apart from the graph seed.
inline std::uint64_t dynamics_seed(std::uint64_t replicate_seed) {
    return replicate_seed ^ 0x9E3779B97F4A7C15ULL;
}

/// One replicate on a given graph. Records bots and infiltrated honeybots at
/// t = 0 and after every tick.
inline dynamics::Trajectory run_on_graph(const SocialGraph& g, const SimConfig& c, std::uint64_t seed) {
    detail::Rng rng(dynamics_seed(seed));
    AgentState s = initial_state(g, c, rng);
    const std::size_t ticks = tick_count(c);
    dynamics::Trajectory tr;
    tr.step = c.tick;
    tr.params = c.params;
    tr.times.reserve(ticks + 1);
    tr.states.reserve(ticks + 1);
    tr.times.push_back(0.0);
    tr.states.push_back({static_cast<double>(s.bots), static_cast<double>(s.infiltrated)});
    for (std::size_t i = 1; i <= ticks; ++i) {
        advance(s, g, c, rng);
        tr.times.push_back(static_cast<double>(i) * c.tick);
        tr.states.push_back({static_cast<double>(s.bots), static_cast<double>(s.infiltrated)});
    }
    return tr;
}

/// Replicate `index`: its own graph and dynamics, both seeded from seed + index.
inline dynamics::Trajectory run_replicate(const SimConfig& c, std::size_t index) {
    const std::uint64_t seed = c.seed + index;
    const SocialGraph g = generate_graph(c.dist, seed);
    return run_on_graph(g, c, seed);
}

struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> mean_bots, sd_bots;
    std::vector<double> mean_honeybots, sd_honeybots;
    std::size_t replicates = 0;
};

/// Per-time mean and sample standard deviation across equally gridded trajectories.
inline EnsembleStats summarize(const std::vector<dynamics::Trajectory>& runs) {
    EnsembleStats st;
    if (runs.empty()) return st;
    st.replicates = runs.size();
    st.times = runs.front().times;
    const std::size_t t = st.times.size();
    for (const auto& r : runs)
        if (r.times.size() != t) throw ModelError("summarize: replicates have different time grids");
    st.mean_bots.assign(t, 0.0);
    st.sd_bots.assign(t, 0.0);
    st.mean_honeybots.assign(t, 0.0);
    st.sd_honeybots.assign(t, 0.0);
    const double n = static_cast<double>(runs.size());
    for (std::size_t i = 0; i < t; ++i) {
        double sb = 0, sh = 0;
        for (const auto& r : runs) {
            sb += r.states[i].bots;
            sh += r.states[i].honeybots;
        }
        const double mb = sb / n, mh = sh / n;
        double vb = 0, vh = 0;
        for (const auto& r : runs) {
            vb += (r.states[i].bots - mb) * (r.states[i].bots - mb);
            vh += (r.states[i].honeybots - mh) * (r.states[i].honeybots - mh);
        }
        st.mean_bots[i] = mb;
        st.mean_honeybots[i] = mh;
        st.sd_bots[i] = runs.size() > 1 ? std::sqrt(vb / (n - 1)) : 0.0;
        st.sd_honeybots[i] = runs.size() > 1 ? std::sqrt(vh / (n - 1)) : 0.0;
    }
    return st;
}

/// Treats a single trajectory as a one-member ensemble.
inline EnsembleStats from_trajectory(const dynamics::Trajectory& tr) {
    return summarize({tr});
}

struct EnsembleResult {
    EnsembleStats stats;
    std::vector<dynamics::Trajectory> replicates;
};

/// Runs every replicate (possibly on several threads) and summarizes them.
/// Results depend only on (seed, replicates), not on the thread count.
inline EnsembleResult run_ensemble(const SimConfig& c) {
    validate(c).throw_if_errors("abm config");
    EnsembleResult out;
    out.replicates.resize(c.replicates);
    unsigned threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, c.replicates));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < c.replicates;) {
            try {
                out.replicates[i] = run_replicate(c, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    out.stats = summarize(out.replicates);
    return out;
}

struct DivergenceReport {
    std::vector<double> times;
    std::vector<double> ode_bots, ode_honeybots;
    std::vector<double> rel_error_bots, rel_error_honeybots;
    double max_error_bots = 0.0, max_error_honeybots = 0.0;
    double mean_error_bots = 0.0, mean_error_honeybots = 0.0; ///< after burn-in
    double burn_in_until = 0.0;
};

/// Relative error |mean - ode| / max(|ode|, 1) of the ensemble mean against an
/// ODE trajectory, on the ensemble's time grid (the ODE is linearly
/// interpolated). Time averages skip the first `burn_in_fraction` of the
/// overlapping time range.
inline DivergenceReport compare_to_ode(const EnsembleStats& st, const dynamics::Trajectory& ode,
                                       double burn_in_fraction = 0.1) {
    if (st.times.empty() || ode.times.empty()) throw ModelError("compare_to_ode: empty series");
    const double lo = std::max(st.times.front(), ode.times.front());
    const double hi = std::min(st.times.back(), ode.times.back());
    const double eps = 1e-9 * std::max(1.0, std::abs(hi));
    if (hi < lo - eps) throw ModelError("compare_to_ode: time ranges do not overlap");

    DivergenceReport rep;
    rep.burn_in_until = lo + burn_in_fraction * (hi - lo);
    std::size_t j = 0;
    double sum_b = 0, sum_h = 0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < st.times.size(); ++i) {
        const double t = st.times[i];
        if (t < lo - eps || t > hi + eps) continue;
        while (j + 1 < ode.times.size() && ode.times[j + 1] < t) ++j;
        dynamics::PopulationState x = ode.states[j];
        if (j + 1 < ode.times.size() && t > ode.times[j]) {
            const double w = (t - ode.times[j]) / (ode.times[j + 1] - ode.times[j]);
            const auto& a = ode.states[j];
            const auto& b = ode.states[j + 1];
            x = {a.bots + w * (b.bots - a.bots), a.honeybots + w * (b.honeybots - a.honeybots)};
        }
        const double eb = std::abs(st.mean_bots[i] - x.bots) / std::max(std::abs(x.bots), 1.0);
        const double eh =
            std::abs(st.mean_honeybots[i] - x.honeybots) / std::max(std::abs(x.honeybots), 1.0);
        rep.times.push_back(t);
        rep.ode_bots.push_back(x.bots);
        rep.ode_honeybots.push_back(x.honeybots);
        rep.rel_error_bots.push_back(eb);
        rep.rel_error_honeybots.push_back(eh);
        rep.max_error_bots = std::max(rep.max_error_bots, eb);
        rep.max_error_honeybots = std::max(rep.max_error_honeybots, eh);
        if (t >= rep.burn_in_until - eps) {
            sum_b += eb;
            sum_h += eh;
            ++counted;
        }
    }
    if (counted) {
        rep.mean_error_bots = sum_b / static_cast<double>(counted);
        rep.mean_error_honeybots = sum_h / static_cast<double>(counted);
    }
    return rep;
}

/// Mean-field ODE matching a simulation config (same N, rates and initial bots).
inline dynamics::Trajectory matching_ode(const SimConfig& c, double step = 0.01) {
    return dynamics::integrate(c.params, {static_cast<double>(c.initial_bots), 0.0}, c.horizon, step);
}

} // namespace sodexo::abm
