#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmlab {

enum class Verdict { Holds, HypothesesNotMet, Violated };

struct MomentCheck {
    Verdict verdict = Verdict::HypothesesNotMet;
    double sum1 = 0, sum2 = 0, sum3 = 0;
    double margin = 0; // sum3 - sum2
};

/// For non-negative reals, sum x <= sum x^2 forces sum x^3 >= sum x^2.
inline MomentCheck check_moment(const std::vector<double>& xs, double rel_tol = 1e-9) {
    MomentCheck c;
    for (double x : xs) {
        if (x < 0) throw std::invalid_argument("check_moment: negative entry");
        c.sum1 += x;
        c.sum2 += x * x;
        c.sum3 += x * x * x;
    }
    c.margin = c.sum3 - c.sum2;
    if (c.sum1 > c.sum2 * (1 + rel_tol) + 1e-300) {
        c.verdict = Verdict::HypothesesNotMet;
    } else {
        c.verdict = c.sum3 >= c.sum2 * (1 - rel_tol) ? Verdict::Holds : Verdict::Violated;
    }
    return c;
}

/// Positive function p whose ratio q(x) = x/p(x) is increasing and concave.
/// Construction samples both properties and rejects invalid functions before
/// any bound is asserted on them.
class ConcaveRatioFunction {
public:
    ConcaveRatioFunction(std::string name, std::function<double(double)> p,
                         double sample_lo = 1e-3, double sample_hi = 1e6)
        : name_(std::move(name)), p_(std::move(p)) {
        const int samples = 200;
        double prev_q = -std::numeric_limits<double>::infinity();
        std::vector<double> xs, qs;
        for (int i = 0; i <= samples; ++i) {
            double x = sample_lo * std::pow(sample_hi / sample_lo, i / double(samples));
            double qq = q(x);
            if (qq + 1e-12 * std::fabs(qq) < prev_q)
                throw std::invalid_argument("ConcaveRatioFunction: q is not increasing");
            prev_q = qq;
            xs.push_back(x);
            qs.push_back(qq);
        }
        for (size_t i = 0; i + 2 < xs.size(); ++i) {
            double mid_q = q(0.5 * (xs[i] + xs[i + 2]));
            double chord = 0.5 * (qs[i] + qs[i + 2]);
            if (mid_q < chord - 1e-9 * std::max(1.0, std::fabs(chord)))
                throw std::invalid_argument("ConcaveRatioFunction: q fails midpoint concavity");
        }
    }

    const std::string& name() const { return name_; }
    double p(double x) const { return p_(x); }
    double q(double x) const {
        double px = p_(x);
        if (!(px > 0)) throw std::domain_error("ConcaveRatioFunction: p must stay positive");
        return x / px;
    }

private:
    std::string name_;
    std::function<double(double)> p_;
};

/// Bisection inverse of the increasing ratio q, relative tolerance 1e-12.
inline double q_inverse(const ConcaveRatioFunction& f, double y,
                        double lo = 1e-12, double hi_cap = 1e18) {
    if (f.q(lo) >= y) return lo;
    double l = lo, hi = std::max(1.0, 2 * lo);
    while (f.q(hi) < y) {
        l = hi;
        hi *= 2;
        if (hi > hi_cap) throw std::out_of_range("q_inverse: y outside the range of q");
    }
    for (int it = 0; it < 300 && hi - l > 1e-13 * hi; ++it) {
        double mid = 0.5 * (l + hi);
        if (f.q(mid) >= y) hi = mid;
        else l = mid;
    }
    return hi;
}

struct ConcaveBoundCheck {
    Verdict verdict = Verdict::HypothesesNotMet;
    double lhs = 0;   // sum x p(x)
    double bound = 0; // q^-1(K/L) * L
};

/// Checked oracle: sum x >= K and sum p(x) <= L force
/// sum x p(x) >= q^-1(K/L) * L.
inline ConcaveBoundCheck check_concave_bound(const std::vector<double>& xs,
                                             const ConcaveRatioFunction& f, double K, double L,
                                             double rel_tol = 1e-9) {
    ConcaveBoundCheck c;
    double sum = 0, sum_p = 0;
    for (double x : xs) {
        if (x < 0) throw std::invalid_argument("check_concave_bound: negative entry");
        sum += x;
        if (x > 0) {
            sum_p += f.p(x);
            c.lhs += x * f.p(x);
        }
    }
    if (sum < K * (1 - rel_tol) || sum_p > L * (1 + rel_tol)) {
        c.verdict = Verdict::HypothesesNotMet;
        return c;
    }
    c.bound = q_inverse(f, K / L) * L;
    c.verdict = c.lhs >= c.bound * (1 - rel_tol) ? Verdict::Holds : Verdict::Violated;
    return c;
}

/// Solves s / h0(s) = rhs by bisection; s/h0(s) must be increasing (sampled).
inline double solve_sstar(const std::function<double(double)>& h0, double rhs,
                          double lo = 1e-12, double hi_cap = 1e18) {
    auto g = [&](double s) {
        double v = h0(s);
        if (!(v > 0)) throw std::domain_error("solve_sstar: h0 must stay positive");
        return s / v;
    };
    double prev = g(lo);
    for (int i = 1; i <= 64; ++i) {
        double s = lo * std::pow(1e6 / lo, i / 64.0);
        double v = g(s);
        if (v + 1e-12 < prev) throw std::invalid_argument("solve_sstar: s/h0(s) is not increasing");
        prev = v;
    }
    if (g(lo) >= rhs) return lo;
    double l = lo, hi = std::max(1.0, 2 * lo);
    while (g(hi) < rhs) {
        l = hi;
        hi *= 2;
        if (hi > hi_cap) throw std::out_of_range("solve_sstar: rhs unattainable under guard");
    }
    for (int it = 0; it < 300 && hi - l > 1e-13 * hi; ++it) {
        double mid = 0.5 * (l + hi);
        if (g(mid) >= rhs) hi = mid;
        else l = mid;
    }
    return hi;
}

struct CubicLbResult {
    double w3_bound = 0;       // sum w_i^3 >= beta n^(5/2) / (16 T)
    double cm_bound = 0;       // beta^2 n^3 / (256 T)
    long long sampled = 0;
    long long violations = 0;
};

/// Certified cubic-moment bound for the exponential-block constraint system,
/// plus a randomized feasibility sampler confirming no feasible point beats
/// the bound: points satisfy sum w^2 >= n/2 and (beta/4) sqrt(n) sum w <= T.
inline CubicLbResult min_cubic_lb(double T, double n, double beta, long long samples = 0,
                                  uint64_t seed = 1) {
    if (!(T >= n)) throw std::invalid_argument("min_cubic_lb: need T >= n");
    if (!(beta > 0) || beta > 1) throw std::invalid_argument("min_cubic_lb: beta must be in (0,1]");
    CubicLbResult r;
    r.w3_bound = beta * std::pow(n, 2.5) / (16.0 * T);
    r.cm_bound = beta * beta * n * n * n / (256.0 * T);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len_dist(1, 32);
    std::uniform_real_distribution<double> mag(-3.0, 3.0);
    for (long long it = 0; it < samples; ++it) {
        int l = len_dist(rng);
        std::vector<double> w(l);
        double sum2 = 0;
        for (double& v : w) {
            v = std::pow(10.0, mag(rng));
            sum2 += v * v;
        }
        double scale = std::sqrt(n / 2.0 / sum2); // pin sum w^2 = n/2
        double sum = 0, sum3 = 0;
        for (double& v : w) {
            v *= scale;
            sum += v;
            sum3 += v * v * v;
        }
        if (beta / 4.0 * std::sqrt(n) * sum > T) continue; // infeasible draw
        ++r.sampled;
        if (sum3 < r.w3_bound * (1 - 1e-9)) ++r.violations;
    }
    return r;
}

} // namespace cmlab
