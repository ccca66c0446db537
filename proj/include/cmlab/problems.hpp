#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace cmlab {

/// Stable rank permutation pi (0-based): applying pi to x sorts it, and
/// equal values keep their input order.
inline std::vector<int> rank_permutation(const std::vector<int>& x) {
    std::vector<int> pi(x.size());
    std::iota(pi.begin(), pi.end(), 0);
    std::stable_sort(pi.begin(), pi.end(), [&](int a, int b) { return x[a] < x[b]; });
    return pi;
}

inline std::vector<int> sort_by_rank(const std::vector<int>& x) {
    std::vector<int> y;
    y.reserve(x.size());
    for (int i : rank_permutation(x)) y.push_back(x[i]);
    return y;
}

/// Values occurring exactly once in x.
inline std::set<int> unique_elements(const std::vector<int>& x) {
    std::set<int> once, repeated;
    for (int v : x) {
        if (repeated.count(v)) continue;
        if (once.count(v)) {
            once.erase(v);
            repeated.insert(v);
        } else {
            once.insert(v);
        }
    }
    return once;
}

inline int element_distinct(const std::vector<int>& x) {
    std::unordered_set<int> seen;
    for (int v : x)
        if (!seen.insert(v).second) return 0;
    return 1;
}

/// 1 iff two input values are within Hamming distance floor(log2(N)/8) of
/// each other in their binary representations.
inline int hamming_close(const std::vector<int>& x, long long N) {
    if (N < 2) throw std::invalid_argument("hamming_close: N must be at least 2");
    const long long threshold =
        static_cast<long long>(std::floor(std::log2(static_cast<double>(N)) / 8.0));
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = i + 1; j < x.size(); ++j)
            if (__builtin_popcountll(static_cast<unsigned long long>(x[i]) ^
                                     static_cast<unsigned long long>(x[j])) <= threshold)
                return 1;
    return 0;
}

using Matrix = std::vector<std::vector<int>>;

inline Matrix bool_matmul(const Matrix& a, const Matrix& b) {
    if (a.empty() || b.empty() || a[0].size() != b.size())
        throw std::invalid_argument("bool_matmul: shape mismatch");
    size_t n = a.size(), k = b.size(), m = b[0].size();
    Matrix c(n, std::vector<int>(m, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < k; ++t) {
            if (!a[i][t]) continue;
            for (size_t j = 0; j < m; ++j)
                if (b[t][j]) c[i][j] = 1;
        }
    return c;
}

/// A * x over the prime field F_p.
inline std::vector<int> mat_vec(const Matrix& a, const std::vector<int>& x, int p) {
    if (p < 2) throw std::invalid_argument("mat_vec: modulus must be at least 2");
    if (a.empty() || a[0].size() != x.size())
        throw std::invalid_argument("mat_vec: shape mismatch");
    std::vector<int> y(a.size(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        long long acc = 0;
        for (size_t j = 0; j < x.size(); ++j)
            acc = (acc + static_cast<long long>(a[i][j]) * x[j]) % p;
        y[i] = static_cast<int>((acc % p + p) % p);
    }
    return y;
}

inline Matrix matmul_field(const Matrix& a, const Matrix& b, int p) {
    if (a.empty() || b.empty() || a[0].size() != b.size())
        throw std::invalid_argument("matmul_field: shape mismatch");
    Matrix c(a.size(), std::vector<int>(b[0].size(), 0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t t = 0; t < b.size(); ++t)
            for (size_t j = 0; j < b[0].size(); ++j)
                c[i][j] = static_cast<int>(
                    (c[i][j] + static_cast<long long>(a[i][t]) * b[t][j]) % p);
    return c;
}

/// Rank of a matrix over F_p by Gaussian elimination.
inline int rank_mod_p(Matrix m, int p) {
    if (m.empty()) return 0;
    const size_t rows = m.size(), cols = m[0].size();
    for (auto& row : m)
        for (auto& v : row) v = ((v % p) + p) % p;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        // normalize pivot to 1 (p prime, so inverses exist)
        long long inv = 1, base = m[r][c], e = p - 2;
        while (e) {
            if (e & 1) inv = inv * base % p;
            base = base * base % p;
            e >>= 1;
        }
        for (size_t j = c; j < cols; ++j) m[r][j] = static_cast<int>(m[r][j] * inv % p);
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            long long f = m[i][c];
            for (size_t j = c; j < cols; ++j)
                m[i][j] = static_cast<int>(((m[i][j] - f * m[r][j]) % p + p) % p);
        }
        ++r;
    }
    return static_cast<int>(r);
}

/// Embedded rectangle R = R_A x R_B x sigma over disjoint coordinate sets
/// A and B of common size m.
struct EmbeddedRectangle {
    std::vector<int> coords_a, coords_b;       // disjoint, each of size m
    std::vector<int> sigma_coords;             // the remaining coordinates
    std::vector<int> sigma_values;             // assignment on sigma_coords
    std::vector<std::vector<int>> values_a;    // R_A, tuples over D^m
    std::vector<std::vector<int>> values_b;    // R_B

    int m() const { return static_cast<int>(coords_a.size()); }
};

struct RectAlphaResult {
    bool contained = false;
    double alpha = 0;
    long long min_side = 0;   // min(|R_A|, |R_B|)
    long long denom = 0;      // |D|^m
    std::vector<int> witness; // an input violating containment, when any
};

namespace detail {

inline std::vector<int> assemble_point(const EmbeddedRectangle& r, int n,
                                       const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> x(n, 0);
    for (size_t i = 0; i < r.coords_a.size(); ++i) x[r.coords_a[i]] = a[i];
    for (size_t i = 0; i < r.coords_b.size(); ++i) x[r.coords_b[i]] = b[i];
    for (size_t i = 0; i < r.sigma_coords.size(); ++i) x[r.sigma_coords[i]] = r.sigma_values[i];
    return x;
}

inline void check_rectangle_shape(const EmbeddedRectangle& r, int n, int d) {
    if (r.m() < 1) throw std::invalid_argument("rectangle: m must be at least 1");
    if (r.coords_a.size() != r.coords_b.size())
        throw std::invalid_argument("rectangle: |A| != |B|");
    std::vector<char> used(n, 0);
    auto mark = [&](const std::vector<int>& cs) {
        for (int c : cs) {
            if (c < 0 || c >= n || used[c])
                throw std::invalid_argument("rectangle: coordinate sets not disjoint/in range");
            used[c] = 1;
        }
    };
    mark(r.coords_a);
    mark(r.coords_b);
    mark(r.sigma_coords);
    for (char u : used)
        if (!u) throw std::invalid_argument("rectangle: sigma does not cover the remaining coordinates");
    if (r.sigma_values.size() != r.sigma_coords.size())
        throw std::invalid_argument("rectangle: sigma assignment size mismatch");
    auto check_vals = [&](const std::vector<std::vector<int>>& tuples) {
        for (const auto& t : tuples) {
            if (static_cast<int>(t.size()) != r.m())
                throw std::invalid_argument("rectangle: tuple length differs from m");
            for (int v : t)
                if (v < 0 || v >= d) throw std::invalid_argument("rectangle: value outside domain");
        }
    };
    check_vals(r.values_a);
    check_vals(r.values_b);
    for (int v : r.sigma_values)
        if (v < 0 || v >= d) throw std::invalid_argument("rectangle: sigma value outside domain");
}

} // namespace detail

/// Verifies R subseteq f^-1(1) pointwise, then reports
/// alpha(R) = min(|R_A|, |R_B|) / |D|^m.
template <typename F>
RectAlphaResult rect_alpha(const EmbeddedRectangle& r, F&& f, int n, int d) {
    detail::check_rectangle_shape(r, n, d);
    if (r.values_a.empty() || r.values_b.empty())
        throw std::invalid_argument("rect_alpha: R_A and R_B must be non-empty");
    RectAlphaResult res;
    res.denom = 1;
    for (int i = 0; i < r.m(); ++i) res.denom *= d;
    for (const auto& a : r.values_a)
        for (const auto& b : r.values_b) {
            std::vector<int> x = detail::assemble_point(r, n, a, b);
            if (f(x) != 1) {
                res.contained = false;
                res.witness = std::move(x);
                return res;
            }
        }
    res.contained = true;
    res.min_side = static_cast<long long>(std::min(r.values_a.size(), r.values_b.size()));
    res.alpha = static_cast<double>(res.min_side) / static_cast<double>(res.denom);
    return res;
}

struct MaxAlphaResult {
    long long best_min_side = 0;
    long long denom = 1;
    double alpha = 0;
    EmbeddedRectangle witness;
};

/// Exhaustive maximization of alpha over every embedded rectangle with the
/// given m inside f^-1(1).
///
/// For each (A, B, sigma) the admissible (R_A, R_B) pairs are exactly the
/// bicliques of the compatibility relation between value tuples; the best
/// min-side is attained at a closed pair, so it suffices to enumerate the
/// intersection-closure of the tuple neighborhoods.
template <typename F>
MaxAlphaResult max_alpha_search(F&& f, int n, int d, int m, int n_guard = 4, int d_guard = 6) {
    if (n > n_guard || d > d_guard)
        throw std::invalid_argument("max_alpha_search: instance exceeds the search guard");
    if (m < 1 || 2 * m > n)
        throw std::invalid_argument("max_alpha_search: need 1 <= m <= n/2");

    long long tuples = 1;
    for (int i = 0; i < m; ++i) tuples *= d;
    if (tuples > 64)
        throw std::invalid_argument("max_alpha_search: tuple space exceeds 64");
    const int tcount = static_cast<int>(tuples);

    MaxAlphaResult best;
    best.denom = tuples;

    auto decode_tuple = [&](int code) {
        std::vector<int> t(m);
        for (int i = m - 1; i >= 0; --i) {
            t[i] = code % d;
            code /= d;
        }
        return t;
    };

    auto run_sigma = [&](const std::vector<int>& A, const std::vector<int>& B) {
        std::vector<int> rest;
        for (int i = 0; i < n; ++i)
            if (std::find(A.begin(), A.end(), i) == A.end() &&
                std::find(B.begin(), B.end(), i) == B.end())
                rest.push_back(i);
        std::vector<int> sigma(rest.size(), 0);
        while (true) {
            // compatibility masks: for tuple u on A, the set of tuples v on B
            // with f(u, v, sigma) = 1
            std::vector<uint64_t> nbr(tcount, 0);
            std::vector<int> x(n, 0);
            for (size_t i = 0; i < rest.size(); ++i) x[rest[i]] = sigma[i];
            for (int u = 0; u < tcount; ++u) {
                auto tu = decode_tuple(u);
                for (int i = 0; i < m; ++i) x[A[i]] = tu[i];
                for (int v = 0; v < tcount; ++v) {
                    auto tv = decode_tuple(v);
                    for (int i = 0; i < m; ++i) x[B[i]] = tv[i];
                    if (f(x) == 1) nbr[u] |= uint64_t{1} << v;
                }
            }
            // closure of the A-side under intersections of neighborhoods
            const uint64_t full = tcount == 64 ? ~uint64_t{0} : (uint64_t{1} << tcount) - 1;
            std::unordered_set<uint64_t> closed;
            std::vector<uint64_t> queue{full};
            closed.insert(full);
            while (!queue.empty()) {
                uint64_t X = queue.back();
                queue.pop_back();
                for (int v = 0; v < tcount; ++v) {
                    uint64_t keep = 0;
                    for (int u = 0; u < tcount; ++u)
                        if ((X >> u & 1) && (nbr[u] >> v & 1)) keep |= uint64_t{1} << u;
                    if (keep && !closed.count(keep)) {
                        closed.insert(keep);
                        queue.push_back(keep);
                        if (closed.size() > 1u << 20)
                            throw std::runtime_error("max_alpha_search: closure blow-up guard hit");
                    }
                }
            }
            std::vector<uint64_t> closed_sorted(closed.begin(), closed.end());
            std::sort(closed_sorted.begin(), closed_sorted.end());
            for (uint64_t X : closed_sorted) {
                uint64_t Y = full;
                for (int u = 0; u < tcount && Y; ++u)
                    if (X >> u & 1) Y &= nbr[u];
                long long side = std::min<long long>(__builtin_popcountll(X), __builtin_popcountll(Y));
                if (side > best.best_min_side) {
                    best.best_min_side = side;
                    best.witness.coords_a = A;
                    best.witness.coords_b = B;
                    best.witness.sigma_coords = rest;
                    best.witness.sigma_values = sigma;
                    best.witness.values_a.clear();
                    best.witness.values_b.clear();
                    for (int u = 0; u < tcount; ++u)
                        if (X >> u & 1) best.witness.values_a.push_back(decode_tuple(u));
                    for (int v = 0; v < tcount; ++v)
                        if (Y >> v & 1) best.witness.values_b.push_back(decode_tuple(v));
                }
            }
            // next sigma assignment
            size_t pos = 0;
            while (pos < sigma.size() && ++sigma[pos] == d) sigma[pos++] = 0;
            if (pos == sigma.size() && !sigma.empty()) break;
            if (sigma.empty()) break;
        }
    };

    // enumerate ordered pairs of disjoint m-subsets (A, B)
    std::vector<int> cur_a;
    std::function<void(size_t, int)> pick_a = [&](size_t start, int need) {
        if (need == 0) {
            std::vector<int> remaining;
            for (int i = 0; i < n; ++i)
                if (std::find(cur_a.begin(), cur_a.end(), i) == cur_a.end())
                    remaining.push_back(i);
            std::vector<int> cur_b;
            std::function<void(size_t, int)> pick_b = [&](size_t bstart, int bneed) {
                if (bneed == 0) {
                    run_sigma(cur_a, cur_b);
                    return;
                }
                for (size_t i = bstart; i < remaining.size(); ++i) {
                    cur_b.push_back(remaining[i]);
                    pick_b(i + 1, bneed - 1);
                    cur_b.pop_back();
                }
            };
            pick_b(0, m);
            return;
        }
        for (size_t i = start; i < static_cast<size_t>(n); ++i) {
            cur_a.push_back(static_cast<int>(i));
            pick_a(i + 1, need - 1);
            cur_a.pop_back();
        }
    };
    pick_a(0, m);

    best.alpha = static_cast<double>(best.best_min_side) / static_cast<double>(best.denom);
    return best;
}

/// Def-style rigidity check: every k x w submatrix with k <= g rows and
/// w >= cols - h columns must have rank at least c * k over F_p.
/// Exhaustive over row subsets and minimal column keep-sets.
inline bool is_rigid(const Matrix& mat, int g, int h, double c, int p,
                     long long combination_guard = 2'000'000) {
    if (mat.empty()) throw std::invalid_argument("is_rigid: empty matrix");
    const int rows = static_cast<int>(mat.size());
    const int cols = static_cast<int>(mat[0].size());
    g = std::min(g, rows);
    const int keep = std::max(0, cols - h);

    auto binom = [](int a, int b) {
        if (b < 0 || b > a) return 0.0;
        double r = 1;
        for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
        return r;
    };
    double work = 0;
    for (int k = 1; k <= g; ++k) work += binom(rows, k);
    work *= binom(cols, keep);
    if (work > static_cast<double>(combination_guard))
        throw std::invalid_argument("is_rigid: submatrix enumeration exceeds guard");

    std::vector<int> row_sel, col_sel;
    bool rigid = true;

    std::function<void(int, int)> pick_cols = [&](int start, int need) {
        if (!rigid) return;
        if (need == 0) {
            Matrix sub(row_sel.size(), std::vector<int>(col_sel.size()));
            for (size_t i = 0; i < row_sel.size(); ++i)
                for (size_t j = 0; j < col_sel.size(); ++j)
                    sub[i][j] = mat[row_sel[i]][col_sel[j]];
            int rk = rank_mod_p(sub, p);
            if (static_cast<double>(rk) + 1e-9 < c * static_cast<double>(row_sel.size()))
                rigid = false;
            return;
        }
        for (int i = start; i <= cols - need; ++i) {
            col_sel.push_back(i);
            pick_cols(i + 1, need - 1);
            col_sel.pop_back();
        }
    };

    std::function<void(int, int)> pick_rows = [&](int start, int k) {
        if (!rigid) return;
        if (k == 0) {
            if (keep == 0) {
                rigid = false; // empty submatrix has rank 0 < c*k
                return;
            }
            pick_cols(0, keep);
            return;
        }
        for (int i = start; i <= rows - k; ++i) {
            row_sel.push_back(i);
            pick_rows(i + 1, k - 1);
            row_sel.pop_back();
        }
    };

    for (int k = 1; k <= g && rigid; ++k) pick_rows(0, k);
    return rigid;
}

} // namespace cmlab
