#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "onsetqlab/boolfn.hpp"

namespace oql {

using BigInt = boost::multiprecision::cpp_int;

inline int sensitivity_at(const BooleanFunction& f, const BitString& x) {
    if (x.length() != f.arity()) throw std::invalid_argument("sensitivity_at: length mismatch");
    bool fx = f.value(x);
    int count = 0;
    for (int i = 0; i < f.arity(); ++i)
        if (f.value(x.value() ^ (std::uint64_t{1} << (f.arity() - 1 - i))) != fx) ++count;
    return count;
}

inline int sensitivity(const BooleanFunction& f) {
    int best = 0;
    int n = f.arity();
    for (std::uint64_t idx = 0; idx < f.domain_size(); ++idx) {
        bool fx = f.value(idx);
        int s = 0;
        for (int b = 0; b < n; ++b)
            if (f.value(idx ^ (std::uint64_t{1} << b)) != fx) ++s;
        best = std::max(best, s);
    }
    return best;
}

// Hypercube edges with exactly one endpoint in the on-set. Equals the sum of
// pointwise sensitivities over the on-set (each boundary edge has exactly one
// on-set endpoint).
inline std::uint64_t edge_boundary(const BooleanFunction& f) {
    std::uint64_t total = 0;
    int n = f.arity();
    for (std::uint64_t idx = 0; idx < f.domain_size(); ++idx) {
        if (!f.value(idx)) continue;
        for (int b = 0; b < n; ++b)
            if (!f.value(idx ^ (std::uint64_t{1} << b))) ++total;
    }
    return total;
}

// Edge-isoperimetric floor for an m-element vertex set in the n-cube.
inline double isoperimetric_bound(int n, std::uint64_t m) {
    if (n < 1 || m < 1 || (n < 64 && m > (std::uint64_t{1} << n)))
        throw std::invalid_argument("isoperimetric_bound: out of range");
    return static_cast<double>(m) * (n - std::log2(static_cast<double>(m)));
}

// Growth exponent: the d with (en/d)^d tracking z from below; monotone
// non-decreasing in z. Needs z > 1 so the inner log-log is defined.
inline double d_of_z(double z, int n) {
    if (!(z > 1.0)) throw std::invalid_argument("d_of_z: requires z > 1");
    if (std::log2(z) > n + 1e-9) throw std::invalid_argument("d_of_z: z beyond 2^n");
    return std::log2(z) / (4.0 * (std::log2(std::exp(1.0) * n) - std::log2(std::log2(z))));
}

inline BigInt binom_exact(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

inline BigInt binom_partial_sum(int n, int d) {
    if (d < 0 || n < 0) throw std::invalid_argument("binom_partial_sum: negative argument");
    d = std::min(d, n);
    BigInt total = 0;
    BigInt term = 1;
    for (int i = 0; i <= d; ++i) {
        total += term;
        term *= (n - i);
        term /= (i + 1);
    }
    return total;
}

namespace detail {

inline double log2_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp2(b - a)) / std::log(2.0);
}

} // namespace detail

// log2 of twice the partial binomial sum Sigma_{i<D} C(2^n - 1, i), with
// D = Sigma_{i<=floor(d)} C(n, i). Counts the sign patterns reachable at
// degree floor(d); the full sum collapses to 2^n exactly.
inline double sign_count_T(int n, double d) {
    if (d < 0) throw std::invalid_argument("sign_count_T: d must be >= 0");
    if (n < 1 || n > 62) throw std::invalid_argument("sign_count_T: n out of range");
    BigInt D = binom_partial_sum(n, static_cast<int>(std::floor(std::min(d, static_cast<double>(n)))));
    std::uint64_t domain = std::uint64_t{1} << n;
    if (D >= BigInt(domain)) return static_cast<double>(domain);
    std::uint64_t terms = static_cast<std::uint64_t>(D);
    double big_n = static_cast<double>(domain - 1);
    double log_c = 0.0;
    double log_sum = -std::numeric_limits<double>::infinity();
    for (std::uint64_t i = 0; i < terms; ++i) {
        if (i > 0) log_c += std::log2((big_n - static_cast<double>(i) + 1.0) / static_cast<double>(i));
        log_sum = detail::log2_add(log_sum, log_c);
    }
    return 1.0 + log_sum;
}

// Almost-all query floor at on-set size m: the growth exponent of
// M(N - log M)/(N+1)^2 when that regime applies, never below sqrt(n).
inline double counting_lower_bound(int n, double m) {
    if (n < 1 || m < 1) throw std::invalid_argument("counting_lower_bound: out of range");
    double floor_val = std::sqrt(static_cast<double>(n));
    double log2m = std::log2(m);
    if (log2m <= std::sqrt(static_cast<double>(n))) return floor_val;
    double m_prime = m * (n - log2m);
    double z = m_prime / (static_cast<double>(n + 1) * (n + 1));
    if (!(z > 1.0)) return floor_val;
    return std::max(d_of_z(z, n), floor_val);
}

// Reporting constant shared by every bound expression that the source
// statements leave as an unnamed Theta constant.
inline double bound_constant_c() { return std::log2(std::exp(1.0)) + 2.0; }

namespace detail {

inline double copies_denominator(int n, double log2m) {
    return bound_constant_c() + std::log2(static_cast<double>(n)) - std::log2(log2m);
}

} // namespace detail

// Query scale of the hardest size-m member: sqrt(N log M / (c + log N -
// log log M)) + sqrt(N). At m = 1 only the search term is left.
inline double worst_case_query_bound(int n, std::uint64_t m) {
    if (n < 1 || m < 1) throw std::invalid_argument("worst_case_query_bound: out of range");
    double root_n = std::sqrt(static_cast<double>(n));
    if (m < 2) return root_n;
    double log2m = std::log2(static_cast<double>(m));
    return std::sqrt(n * log2m / detail::copies_denominator(n, log2m)) + root_n;
}

// Query scale of the easiest size-m member: sqrt(N - log M).
inline double best_case_query_bound(int n, std::uint64_t m) {
    if (n < 1 || m < 1 || (n < 64 && m > (std::uint64_t{1} << n)))
        throw std::invalid_argument("best_case_query_bound: out of range");
    return std::sqrt(n - std::log2(static_cast<double>(m)));
}

// Query scale of the typical size-m member: log M / (c + log N - log log M)
// + sqrt(N).
inline double average_case_query_bound(int n, std::uint64_t m) {
    if (n < 1 || m < 1) throw std::invalid_argument("average_case_query_bound: out of range");
    double root_n = std::sqrt(static_cast<double>(n));
    if (m < 2) return root_n;
    double log2m = std::log2(static_cast<double>(m));
    return log2m / detail::copies_denominator(n, log2m) + root_n;
}

inline double binom_log2(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::log(2.0);
}

// Query bound for testing a graph property over a family of log-size lf on
// n-vertex graphs (edge variables = C(n,2)). The denominator uses the log of
// the edge-variable count; with the vertex count instead it goes negative on
// families the statement itself covers.
inline double graph_property_query_bound(int n_vertices, double family_log_size) {
    if (n_vertices < 2) throw std::invalid_argument("graph_property_query_bound: need >= 2 vertices");
    double edge_vars = static_cast<double>(n_vertices) * (n_vertices - 1) / 2.0;
    if (family_log_size <= 0) return static_cast<double>(n_vertices);
    double denom = bound_constant_c() + std::log2(edge_vars) - std::log2(family_log_size);
    if (!(denom > 0)) throw std::domain_error("graph_property_query_bound: degenerate denominator");
    double n = n_vertices;
    return std::sqrt(n * n * family_log_size / denom) + n;
}

inline double genus_family_log_size(int n_vertices, int genus) {
    if (n_vertices < 3 || genus < 0) throw std::invalid_argument("genus_family_log_size: out of range");
    double m = 3.0 * (n_vertices - 2 + 2 * genus);
    return std::log2(m + 1.0) + 2.0 * m * std::log2(static_cast<double>(n_vertices));
}

inline double isomorphism_family_log_size(int n_vertices) {
    if (n_vertices < 1) throw std::invalid_argument("isomorphism_family_log_size: out of range");
    return std::lgamma(n_vertices + 1.0) / std::log(2.0);
}

// Everything the bound formulas derive from a problem size (n, m), kept
// together so reports and algorithms agree on one set of values. Raw values
// are stored even where the asymptotic regime assumptions fail at small n;
// the flags say when that happened.
struct BoundParams {
    int n = 0;
    std::uint64_t m = 0;
    double m_prime = 0;
    double z = 0;
    double d_z = 0;
    int d_ceil = 0;
    BigInt big_d = 0;
    double log2_t = 0;
    int k = 0;
    double beta_prime = 0;
    double beta_effective = 0;
    bool beta_out_of_range = false;
    double gamma_prime = 0;
    double overlap_bound_sq = 0;
    bool overlap_bound_vacuous = false;
    int copies_cap = 0;

    static BoundParams for_problem(int n, std::uint64_t m) {
        if (n < 1 || n > 62 || m < 1) throw std::invalid_argument("BoundParams: out of range");
        BoundParams p;
        p.n = n;
        p.m = m;
        double log2m = std::log2(static_cast<double>(m));
        p.m_prime = static_cast<double>(m) * (n - log2m);
        p.z = p.m_prime / (static_cast<double>(n + 1) * (n + 1));
        p.d_z = p.z > 1.0 ? d_of_z(p.z, n) : 0.0;
        p.d_ceil = static_cast<int>(std::ceil(p.d_z));
        p.big_d = binom_partial_sum(n, std::min(p.d_ceil, n));
        p.log2_t = sign_count_T(n, static_cast<double>(p.d_ceil));
        p.k = threshold_index(n, m);
        if (m >= 2) {
            double ll = std::log2(log2m);
            p.beta_prime = log2m * ll * ll * std::log2(std::exp(1.0) * n / log2m) / (2.0 * n);
        }
        p.beta_out_of_range = !(p.beta_prime > 0.0 && p.beta_prime < 1.0);
        p.beta_effective = std::min(std::max(p.beta_prime, 0.0), 0.5);
        double root_m = std::sqrt(static_cast<double>(m));
        p.gamma_prime = root_m > 1.0 ? d_of_z(root_m, n) / n : 0.0;
        p.overlap_bound_sq = 4.0 * log2m / n;
        p.overlap_bound_vacuous = p.overlap_bound_sq >= 1.0;
        if (m >= 2) {
            p.copies_cap = static_cast<int>(std::ceil(8.0 * log2m / detail::copies_denominator(n, log2m)));
        } else {
            p.copies_cap = 1;
        }
        return p;
    }
};

} // namespace oql
