#pragma once

// Mean-field bot/honeybot population model: right-hand side, fixed-step RK4
// integration, equilibria and their local stability, and the degree-class
// extension for heterogeneous networks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "sodexo/error.hpp"
#include "sodexo/model.hpp"
#include "sodexo/numeric.hpp"

namespace sodexo::dynamics {

struct PopulationState {
    double bots = 0.0;      ///< x1
    double honeybots = 0.0; ///< x2
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PopulationState> states;
    double step = 0.0;
    std::size_t clamp_count = 0;
    PopulationParams params;

    const PopulationState& final_state() const { return states.back(); }
};

/// (dx1/dt, dx2/dt) of the homogeneous model.
inline PopulationState rhs(const PopulationState& x, const PopulationParams& p) {
    const double n = p.n();
    const double rd = p.spam_rate * p.degree;
    const double unblocked = 1.0 - p.link_fraction * x.honeybots;
    return {rd * p.click_prob * x.bots * unblocked * (n - x.bots) / n - p.clean_rate * x.bots,
            rd * x.bots * unblocked * p.honeybot_reserve / n - p.detect_rate * x.honeybots};
}

namespace detail {
inline PopulationState axpy(const PopulationState& x, double h, const PopulationState& k) {
    return {x.bots + h * k.bots, x.honeybots + h * k.honeybots};
}
} // namespace detail

/// Classic fixed-step RK4 from t = 0 to t_end. The step is shrunk slightly if
/// needed so that an integer number of steps lands exactly on t_end. States
/// are clamped to [0, N] x [0, inf) after every step; `clamp_count` records
/// how often that fired. Every `record_every`-th state is stored, plus the
/// final one.
inline Trajectory integrate(const PopulationParams& p, PopulationState initial, double t_end,
                            double step, std::size_t record_every = 1) {
    if (!(t_end > 0.0)) throw ModelError("integrate: t_end must be positive");
    if (!(step > 0.0)) throw ModelError("integrate: step must be positive");
    if (step > t_end) throw ModelError("integrate: step exceeds t_end");
    if (record_every == 0) record_every = 1;

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
    const double h = t_end / static_cast<double>(n_steps);
    const double n = p.n();

    Trajectory tr;
    tr.step = h;
    tr.params = p;
    tr.times.reserve(n_steps / record_every + 2);
    tr.states.reserve(n_steps / record_every + 2);
    tr.times.push_back(0.0);
    tr.states.push_back(initial);

    PopulationState x = initial;
    for (std::size_t i = 1; i <= n_steps; ++i) {
        const auto k1 = rhs(x, p);
        const auto k2 = rhs(detail::axpy(x, 0.5 * h, k1), p);
        const auto k3 = rhs(detail::axpy(x, 0.5 * h, k2), p);
        const auto k4 = rhs(detail::axpy(x, h, k3), p);
        x.bots += h / 6.0 * (k1.bots + 2.0 * k2.bots + 2.0 * k3.bots + k4.bots);
        x.honeybots += h / 6.0 * (k1.honeybots + 2.0 * k2.honeybots + 2.0 * k3.honeybots + k4.honeybots);
        if (x.bots < 0.0 || x.bots > n || x.honeybots < 0.0) {
            x.bots = std::clamp(x.bots, 0.0, n);
            x.honeybots = std::max(0.0, x.honeybots);
            ++tr.clamp_count;
        }
        if (i % record_every == 0 || i == n_steps) {
            tr.times.push_back(i == n_steps ? t_end : static_cast<double>(i) * h);
            tr.states.push_back(x);
        }
    }
    return tr;
}

enum class EquilibriumKind { extinction, endemic };
enum class Stability { asymptotically_stable, unstable, indeterminate };

inline const char* to_string(EquilibriumKind k) {
    return k == EquilibriumKind::extinction ? "extinction" : "endemic";
}

inline const char* to_string(Stability s) {
    switch (s) {
    case Stability::asymptotically_stable: return "asymptotically_stable";
    case Stability::unstable: return "unstable";
    default: return "indeterminate";
    }
}

struct StabilityReport {
    numeric::Matrix2 jacobian{};
    std::complex<double> eigenvalues[2];
    Stability stability = Stability::indeterminate;
};

struct EquilibriumPoint {
    PopulationState state;
    EquilibriumKind kind = EquilibriumKind::extinction;
    StabilityReport report;
};

/// Jacobian of rhs by central differences, step 1e-6 * max(1, |x|) per coordinate.
inline numeric::Matrix2 jacobian(const PopulationState& x, const PopulationParams& p) {
    numeric::Matrix2 j{};
    const double h1 = 1e-6 * std::max(1.0, std::abs(x.bots));
    const double h2 = 1e-6 * std::max(1.0, std::abs(x.honeybots));
    const auto f1p = rhs({x.bots + h1, x.honeybots}, p);
    const auto f1m = rhs({x.bots - h1, x.honeybots}, p);
    const auto f2p = rhs({x.bots, x.honeybots + h2}, p);
    const auto f2m = rhs({x.bots, x.honeybots - h2}, p);
    j[0][0] = (f1p.bots - f1m.bots) / (2.0 * h1);
    j[1][0] = (f1p.honeybots - f1m.honeybots) / (2.0 * h1);
    j[0][1] = (f2p.bots - f2m.bots) / (2.0 * h2);
    j[1][1] = (f2p.honeybots - f2m.honeybots) / (2.0 * h2);
    return j;
}

/// Residual tolerance for accepting a point as an equilibrium; grows with N
/// so that rounding in the O(N) rate terms does not trip it.
inline double equilibrium_tolerance(const PopulationParams& p) {
    return 1e-6 * std::max(1.0, p.n() / 1e6);
}

inline StabilityReport classify_stability(const PopulationParams& p, const PopulationState& x) {
    const auto f = rhs(x, p);
    const double residual = std::hypot(f.bots, f.honeybots);
    if (!(residual < equilibrium_tolerance(p)))
        throw ModelError("classify_stability: point is not an equilibrium (residual " +
                         std::to_string(residual) + ")");
    StabilityReport r;
    r.jacobian = jacobian(x, p);
    auto [l1, l2] = numeric::eigenvalues(r.jacobian);
    r.eigenvalues[0] = l1;
    r.eigenvalues[1] = l2;
    const double hi = std::max(l1.real(), l2.real());
    if (hi < -1e-9)
        r.stability = Stability::asymptotically_stable;
    else if (hi > 1e-9)
        r.stability = Stability::unstable;
    else
        r.stability = Stability::indeterminate;
    return r;
}

/// Nonzero steady state; meaningful only when r d q > mu1.
inline PopulationState endemic_point(const PopulationParams& p) {
    const double rd = p.spam_rate * p.degree;
    const double rdq = rd * p.click_prob;
    const double z = p.honeybot_reserve;
    const double bots = p.n() * p.detect_rate * (rdq - p.clean_rate) /
                        (rdq * p.detect_rate + rd * p.link_fraction * z * p.clean_rate);
    const double honeybots =
        (rd - p.clean_rate / p.click_prob) * z / (rd * p.link_fraction * z + p.detect_rate);
    return {bots, honeybots};
}

/// Extinction point and, when r d q > mu1, the endemic point; each classified.
inline std::vector<EquilibriumPoint> equilibria(const PopulationParams& p) {
    std::vector<EquilibriumPoint> out;
    EquilibriumPoint zero;
    zero.state = {0.0, 0.0};
    zero.kind = EquilibriumKind::extinction;
    zero.report = classify_stability(p, zero.state);
    out.push_back(zero);
    if (p.recruitment_rate() > p.clean_rate) {
        EquilibriumPoint e;
        e.state = endemic_point(p);
        e.kind = EquilibriumKind::endemic;
        e.report = classify_stability(p, e.state);
        out.push_back(e);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Heterogeneous degree classes

/// Degree classes with user counts N_d and honeybot reserve z_d.
struct DegreeClasses {
    std::vector<int> degrees;
    std::vector<double> sizes;   ///< N_d
    std::vector<double> reserve; ///< z_d

    std::size_t size() const { return degrees.size(); }

    double mean_degree() const {
        double s = 0.0, w = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            s += degrees[i] * sizes[i];
            w += sizes[i];
        }
        return s / w;
    }

    /// Average degree of the honeybot reserve.
    double reserve_mean_degree() const {
        double s = 0.0, w = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            s += degrees[i] * reserve[i];
            w += reserve[i];
        }
        return w > 0.0 ? s / w : 0.0;
    }
};

/// Classes from a degree distribution with the whole reserve z placed at
/// `honeybot_degree` (default: the distribution's rounded mean degree, the
/// number of random friends a honeybot acquires).
inline DegreeClasses make_classes(const DegreeDistribution& dist, const PopulationParams& p,
                                  int honeybot_degree = 0) {
    if (dist.class_counts.empty()) throw ModelError("make_classes: empty degree distribution");
    if (honeybot_degree <= 0) honeybot_degree = static_cast<int>(std::lround(dist.mean_degree()));
    DegreeClasses c;
    bool placed = false;
    for (auto [d, count] : dist.class_counts) {
        if (!placed && d > honeybot_degree) {
            c.degrees.push_back(honeybot_degree);
            c.sizes.push_back(0.0);
            c.reserve.push_back(p.honeybot_reserve);
            placed = true;
        }
        c.degrees.push_back(d);
        c.sizes.push_back(count);
        c.reserve.push_back(d == honeybot_degree ? p.honeybot_reserve : 0.0);
        placed = placed || d == honeybot_degree;
    }
    if (!placed) {
        c.degrees.push_back(honeybot_degree);
        c.sizes.push_back(0.0);
        c.reserve.push_back(p.honeybot_reserve);
    }
    return c;
}

struct DegreeClassState {
    std::vector<double> bots;      ///< x1^d
    std::vector<double> honeybots; ///< x2^d

    double total_bots() const { return std::accumulate(bots.begin(), bots.end(), 0.0); }
    double total_honeybots() const {
        return std::accumulate(honeybots.begin(), honeybots.end(), 0.0);
    }
};

inline void check_classes(const DegreeClasses& c, const PopulationParams& p) {
    if (c.sizes.size() != c.size() || c.reserve.size() != c.size())
        throw ModelError("degree classes: inconsistent lengths");
    const double total = std::accumulate(c.sizes.begin(), c.sizes.end(), 0.0);
    if (std::abs(total - p.n()) > 0.5)
        throw ModelError("degree classes: class sizes sum to " + std::to_string(total) +
                         ", expected n_users = " + std::to_string(p.n_users));
}

/// Per-class derivatives:
///   dx1^d = (r d q / N) x1 (1 - f x2)(N_d - x1^d) - mu1 x1^d
///   dx2^d = (r d / N) x1 (1 - f x2) z_d - mu2 x2^d
/// with x1, x2 the class totals and f the link fraction.
inline DegreeClassState rhs_heterogeneous(const DegreeClassState& x, const PopulationParams& p,
                                          const DegreeClasses& c) {
    const double n = p.n();
    const double x1 = x.total_bots();
    const double x2 = x.total_honeybots();
    const double pressure = x1 * (1.0 - p.link_fraction * x2) / n;
    DegreeClassState dx;
    dx.bots.resize(c.size());
    dx.honeybots.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double rd = p.spam_rate * c.degrees[i];
        dx.bots[i] = rd * p.click_prob * pressure * (c.sizes[i] - x.bots[i]) - p.clean_rate * x.bots[i];
        dx.honeybots[i] = rd * pressure * c.reserve[i] - p.detect_rate * x.honeybots[i];
    }
    return dx;
}

struct HeterogeneousTrajectory {
    std::vector<double> times;
    std::vector<PopulationState> totals;
    DegreeClassState final_state;
};

inline HeterogeneousTrajectory integrate_heterogeneous(const PopulationParams& p,
                                                       const DegreeClasses& c,
                                                       DegreeClassState x, double t_end,
                                                       double step,
                                                       std::size_t record_every = 1) {
    check_classes(c, p);
    if (!(t_end > 0.0) || !(step > 0.0) || step > t_end)
        throw ModelError("integrate_heterogeneous: need 0 < step <= t_end");
    if (x.bots.size() != c.size() || x.honeybots.size() != c.size())
        throw ModelError("integrate_heterogeneous: state does not match the degree classes");
    if (record_every == 0) record_every = 1;
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
    const double h = t_end / static_cast<double>(n_steps);

    auto add = [&](const DegreeClassState& a, double s, const DegreeClassState& k) {
        DegreeClassState o = a;
        for (std::size_t i = 0; i < c.size(); ++i) {
            o.bots[i] += s * k.bots[i];
            o.honeybots[i] += s * k.honeybots[i];
        }
        return o;
    };

    HeterogeneousTrajectory tr;
    tr.times.push_back(0.0);
    tr.totals.push_back({x.total_bots(), x.total_honeybots()});
    for (std::size_t it = 1; it <= n_steps; ++it) {
        const auto k1 = rhs_heterogeneous(x, p, c);
        const auto k2 = rhs_heterogeneous(add(x, 0.5 * h, k1), p, c);
        const auto k3 = rhs_heterogeneous(add(x, 0.5 * h, k2), p, c);
        const auto k4 = rhs_heterogeneous(add(x, h, k3), p, c);
        for (std::size_t i = 0; i < c.size(); ++i) {
            x.bots[i] += h / 6.0 * (k1.bots[i] + 2 * k2.bots[i] + 2 * k3.bots[i] + k4.bots[i]);
            x.honeybots[i] += h / 6.0 * (k1.honeybots[i] + 2 * k2.honeybots[i] +
                                         2 * k3.honeybots[i] + k4.honeybots[i]);
            x.bots[i] = std::clamp(x.bots[i], 0.0, c.sizes[i]);
            x.honeybots[i] = std::max(0.0, x.honeybots[i]);
        }
        if (it % record_every == 0 || it == n_steps) {
            tr.times.push_back(it == n_steps ? t_end : static_cast<double>(it) * h);
            tr.totals.push_back({x.total_bots(), x.total_honeybots()});
        }
    }
    tr.final_state = std::move(x);
    return tr;
}

struct HeterogeneousEquilibrium {
    DegreeClassState state;
    double total_bots = 0.0;
    double total_honeybots = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0; ///< max-norm of the per-class derivatives at the fixed point
    /// Closed-form per-class values that assume a degree-independent infected
    /// fraction; reported for comparison only.
    DegreeClassState closed_form;
    double closed_form_discrepancy = 0.0; ///< relative gap in total bots
};

/// Nontrivial fixed point of the degree-class model by damped fixed-point
/// iteration on the bot total, with the honeybot total solved exactly at each
/// step; per-class values follow from setting each class derivative to zero.
inline HeterogeneousEquilibrium equilibria_heterogeneous(const PopulationParams& p,
                                                         const DegreeClasses& c,
                                                         double damping = 0.5,
                                                         std::size_t max_iter = 100000) {
    check_classes(c, p);
    const double n = p.n();
    const double f = p.link_fraction;
    const double mu1 = p.clean_rate;
    const double mu2 = p.detect_rate;

    // x2 = A x1 (1 - f x2)  =>  x2 = A x1 / (1 + A f x1)
    double a_coef = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) a_coef += p.spam_rate * c.degrees[i] * c.reserve[i];
    a_coef /= n * mu2;

    auto honeybots_for = [&](double x1) { return a_coef * x1 / (1.0 + a_coef * f * x1); };
    auto classes_for = [&](double x1) {
        DegreeClassState s;
        s.bots.resize(c.size());
        s.honeybots.resize(c.size());
        const double x2 = honeybots_for(x1);
        const double pressure = x1 * (1.0 - f * x2) / n;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double rd = p.spam_rate * c.degrees[i];
            const double force = rd * p.click_prob * pressure;
            s.bots[i] = force > 0.0 ? c.sizes[i] * force / (force + mu1) : 0.0;
            s.honeybots[i] = rd * pressure * c.reserve[i] / mu2;
        }
        return s;
    };

    HeterogeneousEquilibrium eq;
    double x1 = n;
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        const double next = classes_for(x1).total_bots();
        const double updated = (1.0 - damping) * x1 + damping * next;
        const bool done = std::abs(updated - x1) <= 1e-14 * std::max(1.0, x1);
        x1 = updated;
        if (done) break;
    }
    eq.iterations = it;
    eq.state = classes_for(x1);
    eq.total_bots = eq.state.total_bots();
    eq.total_honeybots = eq.state.total_honeybots();
    const auto d = rhs_heterogeneous(eq.state, p, c);
    for (std::size_t i = 0; i < c.size(); ++i)
        eq.residual = std::max({eq.residual, std::abs(d.bots[i]), std::abs(d.honeybots[i])});
    if (it >= max_iter)
        throw ModelError("equilibria_heterogeneous: no convergence after " +
                         std::to_string(max_iter) + " iterations (residual " +
                         std::to_string(eq.residual) + ")");

    // Closed form under a degree-independent infected fraction.
    const double dbar = c.mean_degree();
    const double dz = c.reserve_mean_degree();
    const double z = std::accumulate(c.reserve.begin(), c.reserve.end(), 0.0);
    const double r = p.spam_rate;
    const double endemic_share = 1.0 - mu1 / (r * dbar * p.click_prob);
    const double blocked = f * r * dz * endemic_share * z / (r * f * z * dz + mu2);
    const double bracket = 1.0 - blocked - mu1 / (r * dbar * p.click_prob);
    eq.closed_form.bots.resize(c.size());
    eq.closed_form.honeybots.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double g = r * c.degrees[i] * p.click_prob * bracket;
        eq.closed_form.bots[i] = g > 0.0 ? c.sizes[i] * g / (g + mu1) : 0.0;
        eq.closed_form.honeybots[i] = std::max(0.0, r * c.degrees[i] / mu2 * bracket * c.reserve[i]);
    }
    const double cf = eq.closed_form.total_bots();
    eq.closed_form_discrepancy = std::abs(cf - eq.total_bots) / std::max(1.0, eq.total_bots);
    return eq;
}

} // namespace sodexo::dynamics
