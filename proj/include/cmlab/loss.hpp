#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cmlab {

/// Non-decreasing height-budget function p with p(1) = 1. Closed-form
/// inverse and derivative are optional; registered families supply both.
struct MonotoneFunction {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> inverse; // exact p^-1, optional
    std::function<double(double)> deriv;   // optional

    double operator()(double s) const { return eval(s); }
};

inline MonotoneFunction identity_function() {
    return {"identity", [](double s) { return s; }, [](double j) { return j; },
            [](double) { return 1.0; }};
}

/// p(s) = s^(1/c), the polynomial family.
inline MonotoneFunction power_function(double c) {
    if (!(c > 0)) throw std::invalid_argument("power_function: c must be positive");
    return {"power:" + std::to_string(c),
            [c](double s) { return std::pow(s, 1.0 / c); },
            [c](double j) { return std::pow(j, c); },
            [c](double s) { return std::pow(s, 1.0 / c - 1.0) / c; }};
}

/// p(s) = 1 + log2 s.
inline MonotoneFunction logplus_function() {
    return {"logplus", [](double s) { return 1.0 + std::log2(s); },
            [](double j) { return std::exp2(j - 1.0); },
            [](double s) { return 1.0 / (s * std::log(2.0)); }};
}

inline MonotoneFunction constant_one_function() {
    return {"one", [](double) { return 1.0; }, {}, [](double) { return 0.0; }};
}

/// Piecewise-linear p from sampled (s, p(s)) pairs. The table must be sorted
/// by s, non-decreasing in p, and interpolate p(1) = 1; evaluation clamps to
/// the end values outside the sampled range.
inline MonotoneFunction table_function(std::vector<std::pair<double, double>> table) {
    if (table.size() < 2) throw std::invalid_argument("table_function: need at least two rows");
    for (size_t i = 1; i < table.size(); ++i) {
        if (table[i].first <= table[i - 1].first)
            throw std::invalid_argument("table_function: s column must be strictly increasing");
        if (table[i].second < table[i - 1].second)
            throw std::invalid_argument("table_function: p column must be non-decreasing");
    }
    auto eval = [table](double s) {
        if (s <= table.front().first) return table.front().second;
        if (s >= table.back().first) return table.back().second;
        size_t hi = 1;
        while (table[hi].first < s) ++hi;
        const auto& [s0, p0] = table[hi - 1];
        const auto& [s1, p1] = table[hi];
        return p0 + (p1 - p0) * (s - s0) / (s1 - s0);
    };
    if (std::fabs(eval(1.0) - 1.0) > 1e-9)
        throw std::invalid_argument("table_function: table must satisfy p(1) = 1");
    return {"custom-table", eval, {}, {}};
}

/// Sampled validation of the declared properties: p(1) = 1 and p
/// non-decreasing on a log grid up to `hi`.
inline void validate_monotone(const MonotoneFunction& p, double hi) {
    if (std::fabs(p.eval(1.0) - 1.0) > 1e-12)
        throw std::invalid_argument("MonotoneFunction: p(1) must equal 1");
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 64; ++i) {
        double s = std::exp2(std::log2(std::max(2.0, hi)) * i / 64.0);
        double v = p.eval(s);
        if (v + 1e-12 * std::max(1.0, std::fabs(v)) < prev)
            throw std::invalid_argument("MonotoneFunction: decreasing sample detected");
        prev = v;
    }
}

/// Least s with p(s) >= j (generalized inverse). Uses the registered closed
/// form when available, otherwise bisection to relative tolerance 1e-12.
inline double p_inverse(const MonotoneFunction& p, double j,
                        double domain_lo = 1e-9, double domain_hi = 1e18) {
    if (p.inverse) return p.inverse(j);
    if (p.eval(domain_lo) >= j) return domain_lo;
    double lo = domain_lo, hi = std::max(1.0, 2 * domain_lo);
    while (p.eval(hi) < j) {
        lo = hi;
        hi *= 2;
        if (hi > domain_hi)
            throw std::out_of_range("p_inverse: value exceeds p over the search domain");
    }
    for (int it = 0; it < 300 && (hi - lo) > 1e-13 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (p.eval(mid) >= j) hi = mid;
        else lo = mid;
    }
    return hi;
}

/// The loss of p at n:
///   L_p(n) = min over integer k in [1, p(n)] of (sum_{j<=k} p^-1(j)) / (k p^-1(k)).
inline double loss(const MonotoneFunction& p, double n, long long k_cap = 10'000'000) {
    validate_monotone(p, n);
    double pn = p.eval(n);
    if (!(pn >= 1)) throw std::invalid_argument("loss: p(n) must be at least 1");
    long long kmax = static_cast<long long>(std::floor(pn));
    if (kmax > k_cap) throw std::invalid_argument("loss: k enumeration exceeds cap");
    double prefix = 0;
    double best = std::numeric_limits<double>::infinity();
    for (long long k = 1; k <= kmax; ++k) {
        double inv = p_inverse(p, static_cast<double>(k));
        prefix += inv;
        best = std::min(best, prefix / (static_cast<double>(k) * inv));
    }
    return best;
}

/// Checks p'(cx) >= p'(x)/c on the grid; central finite differences with
/// step x*1e-6 when no analytic derivative is registered. Relative slack of
/// -1e-9 counts as a pass.
inline bool nice_check(const MonotoneFunction& p, double c, const std::vector<double>& grid,
                       double* first_violation = nullptr) {
    if (!(c > 1)) throw std::invalid_argument("nice_check: c must exceed 1");
    auto d = [&](double x) {
        if (p.deriv) return p.deriv(x);
        double h = x * 1e-6;
        return (p.eval(x + h) - p.eval(x - h)) / (2 * h);
    };
    for (double x : grid) {
        double lhs = d(c * x), rhs = d(x) / c;
        if (lhs < rhs - 1e-9 * std::max(1.0, std::fabs(rhs))) {
            if (first_violation) *first_violation = x;
            return false;
        }
    }
    return true;
}

struct LossBoundsReport {
    double loss_value = 0;
    // part (a): 1/p(n) <= L <= 1
    bool lower_a = false, upper_a = false;
    // part (b), power family only: L > 2^-(c+1)
    std::optional<bool> power_b;
    // part (c): L >= min_s (p(s) - p(s/c)) / (c p(s)), computed independently
    double part_c_bound = 0;
    bool holds_c = false;
    // log-family upper bound L < 2/p(n)
    std::optional<bool> log_upper;

    bool all_pass() const {
        return lower_a && upper_a && holds_c && power_b.value_or(true) && log_upper.value_or(true);
    }
};

/// Numeric verification of the loss bounds for one (p, n, c) triple.
/// `power_c` marks the polynomial family p(s) = s^(1/power_c);
/// `is_log_family` enables the 2/p(n) upper bound.
inline LossBoundsReport loss_bounds_check(const MonotoneFunction& p, double n, double c,
                                          std::optional<int> power_c = std::nullopt,
                                          bool is_log_family = false) {
    LossBoundsReport rep;
    rep.loss_value = loss(p, n);
    double pn = p.eval(n);
    rep.lower_a = rep.loss_value >= 1.0 / pn - 1e-9;
    rep.upper_a = rep.loss_value <= 1.0 + 1e-9;

    // part (c) on a log grid with local refinement around the argmin
    const int grid_points = 2000;
    double best = std::numeric_limits<double>::infinity(), best_s = 1;
    auto ratio = [&](double s) { return (p.eval(s) - p.eval(s / c)) / (c * p.eval(s)); };
    for (int i = 0; i <= grid_points; ++i) {
        double s = std::exp2(std::log2(n) * i / grid_points); // 1 .. n
        double v = ratio(s);
        if (v < best) {
            best = v;
            best_s = s;
        }
    }
    double lo = std::max(1.0, best_s / 2), hi = std::min(n, best_s * 2);
    for (int i = 0; i <= 200; ++i) {
        double s = lo + (hi - lo) * i / 200.0;
        best = std::min(best, ratio(s));
    }
    rep.part_c_bound = best;
    rep.holds_c = rep.loss_value >= best - 1e-9;

    if (power_c) rep.power_b = rep.loss_value > std::exp2(-(*power_c + 1.0));
    if (is_log_family) rep.log_upper = rep.loss_value < 2.0 / pn;
    return rep;
}

} // namespace cmlab
