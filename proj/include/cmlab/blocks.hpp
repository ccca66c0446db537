#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmlab {

/// Partition of a layered computation's time line. boundaries[0] = 0 and
/// boundaries.back() = T; block i spans [boundaries[i], boundaries[i+1]].
struct BlockDecomposition {
    std::vector<long long> boundaries;
    std::vector<double> boundary_log_width; // S_i at each boundary
    long long unit = 0;                     // segment length H (argmin-based modes)

    // adaptive mode
    std::vector<int> segments_consumed;      // per block
    std::vector<long long> output_targets;   // k_i per block
    bool k_rule_clamped = false;             // leftover block forced without h0 < k

    // exponential mode
    std::vector<int> kstar; // per block

    size_t block_count() const { return boundaries.empty() ? 0 : boundaries.size() - 1; }

    /// Sum of S_i * H over the interior boundaries (each an argmin of a
    /// disjoint length-H segment), a certified lower bound on the profile's
    /// cumulative memory.
    double certified_area() const {
        double a = 0;
        for (size_t i = 1; i + 1 < boundary_log_width.size(); ++i)
            a += boundary_log_width[i] * static_cast<double>(unit);
        return a;
    }
};

namespace detail {

inline double log2_width(long long w) {
    if (w < 1) throw std::invalid_argument("layer width must be positive");
    return std::log2(static_cast<double>(w));
}

// Min-width time steps of the backward length-H segments: candidate i (for
// 2 <= i <= l) is the earliest argmin of [T-(l-i+1)H, T-(l-i)H); candidate 1
// is pinned at step 0.
inline std::vector<long long> segment_argmins(const std::vector<long long>& widths,
                                              long long H, long long l) {
    const long long T = static_cast<long long>(widths.size()) - 1;
    std::vector<long long> tau(l + 1, 0); // 1-based; tau[1] = 0
    for (long long i = 2; i <= l; ++i) {
        long long lo = T - (l - i + 1) * H;
        long long hi = T - (l - i) * H; // exclusive
        long long best = lo;
        for (long long t = lo; t < hi; ++t)
            if (widths[t] < widths[best]) best = t;
        tau[i] = best;
    }
    return tau;
}

} // namespace detail

/// Fixed-unit decomposition: time is split into ceil(T/H) segments of length
/// H counted backward from T (the leftmost may be shorter), and each interior
/// boundary is the earliest min-width step of its segment. Guarantees block
/// length <= 2H and sum(S_i * H) <= CM.
inline BlockDecomposition simple_blocks(const std::vector<long long>& widths, long long H) {
    if (H < 1) throw std::invalid_argument("simple_blocks: H must be positive");
    if (widths.size() < 2) throw std::invalid_argument("simple_blocks: need at least two layers");
    const long long T = static_cast<long long>(widths.size()) - 1;
    BlockDecomposition bd;
    bd.unit = H;
    const long long l = (T + H - 1) / H;
    auto tau = detail::segment_argmins(widths, H, l);
    for (long long i = 1; i <= l; ++i) bd.boundaries.push_back(tau[i]);
    bd.boundaries.push_back(T);
    for (long long b : bd.boundaries) bd.boundary_log_width.push_back(detail::log2_width(widths[b]));
    return bd;
}

/// Adaptive decomposition for height budgets h(s,n) = h0(s) * h1(n).
///
/// Candidates are the min-width steps of the backward H = floor(h1/2)
/// segments. Blocks form right to left, each consuming the least k segments
/// whose left candidate satisfies h0(sigma) < k; per-block output targets
/// follow k_i = ceil((S_i + log2(2 C T^(c+1) / alpha)) / log2 K).
inline BlockDecomposition adaptive_blocks(const std::vector<long long>& widths,
                                          const std::function<double(double)>& h0,
                                          double h1, double K, double C, double alpha,
                                          double c_exponent) {
    if (widths.size() < 2) throw std::invalid_argument("adaptive_blocks: need at least two layers");
    if (!(h1 >= 2)) throw std::invalid_argument("adaptive_blocks: block unit h1 must be >= 2");
    if (!(K > 1)) throw std::invalid_argument("adaptive_blocks: K must exceed 1");
    if (!(C > 0) || !(alpha > 0)) throw std::invalid_argument("adaptive_blocks: C, alpha must be positive");

    const long long T = static_cast<long long>(widths.size()) - 1;
    const long long H = static_cast<long long>(std::floor(h1 / 2.0));
    const long long l = (T + H - 1) / H;

    // monotonicity spot-check of h0 on the sigma range we will probe
    double max_sigma = 0;
    for (long long w : widths) max_sigma = std::max(max_sigma, detail::log2_width(w));
    double prev = h0(0.0);
    for (int g = 1; g <= 64; ++g) {
        double s = max_sigma * g / 64.0;
        double v = h0(s);
        if (v + 1e-12 < prev)
            throw std::invalid_argument("adaptive_blocks: h0 is not non-decreasing");
        prev = v;
    }
    if (std::fabs(h0(1.0) - 1.0) > 1e-9)
        throw std::invalid_argument("adaptive_blocks: h0(1) must equal 1");

    auto tau = detail::segment_argmins(widths, H, l);
    std::vector<double> sigma(l + 1, 0.0);
    for (long long i = 1; i <= l; ++i) sigma[i] = detail::log2_width(widths[tau[i]]);

    BlockDecomposition bd;
    bd.unit = H;
    std::vector<long long> starts;       // candidate indices, collected right to left
    std::vector<int> consumed_rev;
    long long j = l;
    while (j >= 1) {
        long long k = 0;
        for (long long kk = 1; kk <= j; ++kk) {
            if (h0(sigma[j - kk + 1]) < static_cast<double>(kk)) {
                k = kk;
                break;
            }
        }
        if (k == 0) {
            k = j; // all remaining segments; the smallest-k rule has no witness
            bd.k_rule_clamped = true;
        }
        starts.push_back(j - k + 1);
        consumed_rev.push_back(static_cast<int>(k));
        j -= k;
    }

    const double log2K = std::log2(K);
    const double tail = std::log2(2.0 * C * std::pow(static_cast<double>(T), c_exponent + 1.0) / alpha);
    for (size_t b = starts.size(); b-- > 0;) {
        long long cand = starts[b];
        bd.boundaries.push_back(tau[cand]);
        bd.boundary_log_width.push_back(sigma[cand]);
        bd.segments_consumed.push_back(consumed_rev[b]);
        bd.output_targets.push_back(
            static_cast<long long>(std::ceil((sigma[cand] + tail) / log2K)));
    }
    bd.boundaries.push_back(T);
    bd.boundary_log_width.push_back(detail::log2_width(widths[T]));
    return bd;
}

/// Exponentially scaled decomposition driven by a per-layer space profile.
///
/// Working backward from layer T, each block ending at t starts at the first
/// layer t' inside I(k,t) = [t - (beta/2)(2^(k+1)-1)sqrt(n),
/// t - (beta/2)(2^k-1)sqrt(n)] with space at most 4^k - 1, where k = k*(t) is
/// the least k for which such a layer exists.
inline BlockDecomposition exp_blocks(const std::vector<double>& space, double beta, double n) {
    if (space.size() < 2) throw std::invalid_argument("exp_blocks: need at least two layers");
    if (!(beta > 0) || !(n > 0)) throw std::invalid_argument("exp_blocks: beta and n must be positive");
    if (space[0] != 0.0) throw std::invalid_argument("exp_blocks: space profile must start at 0");
    for (double s : space)
        if (s < 0) throw std::invalid_argument("exp_blocks: negative space");

    const long long T = static_cast<long long>(space.size()) - 1;
    const double scale = beta / 2.0 * std::sqrt(n);

    BlockDecomposition bd;
    std::vector<long long> starts_rev;
    std::vector<int> kstar_rev;
    long long end = T;
    while (end > 0) {
        long long chosen_start = -1;
        int chosen_k = -1;
        for (int k = 0;; ++k) {
            const double span = std::ldexp(1.0, k); // 2^k
            double lo = static_cast<double>(end) - scale * (2.0 * span - 1.0);
            double hi = static_cast<double>(end) - scale * (span - 1.0);
            long long tlo = std::max<long long>(0, static_cast<long long>(std::ceil(lo - 1e-9)));
            long long thi = std::min<long long>(end - 1, static_cast<long long>(std::floor(hi + 1e-9)));
            double space_cap = std::ldexp(1.0, 2 * k) - 1.0; // 4^k - 1
            for (long long t = tlo; t <= thi; ++t) {
                if (space[t] <= space_cap + 1e-12) {
                    chosen_start = t;
                    break;
                }
            }
            if (chosen_start >= 0) {
                chosen_k = k;
                break;
            }
            if (lo <= 0 && hi < 0)
                throw std::logic_error("exp_blocks: no admissible start found"); // unreachable: S_0 = 0
        }
        starts_rev.push_back(chosen_start);
        kstar_rev.push_back(chosen_k);
        end = chosen_start;
    }
    for (size_t b = starts_rev.size(); b-- > 0;) {
        bd.boundaries.push_back(starts_rev[b]);
        bd.kstar.push_back(kstar_rev[b]);
    }
    bd.boundaries.push_back(T);
    for (long long b : bd.boundaries) bd.boundary_log_width.push_back(space[b]);
    return bd;
}

} // namespace cmlab
