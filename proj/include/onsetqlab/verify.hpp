#pragma once

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "onsetqlab/boolfn.hpp"
#include "onsetqlab/measures.hpp"
#include "onsetqlab/parallel.hpp"

namespace oql {

// One verification run: `trials` independent draws, counting how often the
// checked property fails, against a claimed failure-rate bound. Exact
// (non-sampling) checks use bound 0, where passing means zero violations.
struct TrialReport {
    std::string claim;
    int n = 0;
    std::uint64_t m = 0;
    double eps = 0.0;
    double r_star = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t violation_count = 0;
    double empirical_rate = 0.0;
    double bound = 0.0;
    bool passed = false;
    double wall_time_s = 0.0; // displayed only, never serialized
    std::map<std::string, double> details;
};

inline double three_sigma_margin(double bound, std::uint64_t trials) {
    if (trials == 0) return 0.0;
    return 3.0 * std::sqrt(std::max(bound * (1.0 - bound), 0.0) / static_cast<double>(trials));
}

namespace detail {

class WallClock {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

  private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline void finalize(TrialReport& r, const WallClock& clock) {
    r.empirical_rate =
        r.trials == 0 ? 0.0 : static_cast<double>(r.violation_count) / static_cast<double>(r.trials);
    r.passed = r.empirical_rate <= r.bound + three_sigma_margin(r.bound, r.trials);
    r.wall_time_s = clock.seconds();
}

inline int min_pairwise_distance(const std::vector<std::uint64_t>& vals) {
    int best = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j)
            best = std::min(best, std::popcount(vals[i] ^ vals[j]));
    return best;
}

inline int max_pairwise_agreement_gap(int n, const std::vector<std::uint64_t>& vals) {
    // largest |n - 2*Ham| over pairs, i.e. n * max pairwise |overlap|
    int best = 0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j)
            best = std::max(best, std::abs(n - 2 * std::popcount(vals[i] ^ vals[j])));
    return best;
}

} // namespace detail

inline double default_distance_eps() { return 2.0 * std::log2(std::exp(1.0)) - 2.0; }

inline double min_distance_r_star(int n, std::uint64_t m, double eps) {
    if (n < 1 || m < 1) throw std::invalid_argument("min_distance_r_star: bad parameters");
    if (!(eps > 0.0)) throw std::invalid_argument("min_distance_r_star: eps must be positive");
    double log2m = std::log2(static_cast<double>(m));
    double log2e = std::log2(std::exp(1.0));
    return n * (0.5 - std::sqrt((2.0 + eps) / log2e * log2m / (2.0 * n)));
}

// Sampled on-sets should have no close pair: violation when the minimum
// pairwise distance falls below the distance mark, claimed to happen with
// probability at most 2/M^eps. On-sets are sampled directly; no truth table
// is materialized.
inline TrialReport check_min_distance(int n, std::uint64_t m, double eps, std::uint64_t trials,
                                      std::uint64_t seed) {
    if (n < 1 || n > 64) throw std::invalid_argument("check_min_distance: n out of range");
    if (trials < 1) throw std::invalid_argument("check_min_distance: need at least one trial");
    detail::WallClock clock;
    TrialReport r;
    r.claim = "min-distance";
    r.n = n;
    r.m = m;
    r.eps = eps;
    r.seed = seed;
    r.trials = trials;
    r.r_star = min_distance_r_star(n, m, eps);
    if (r.r_star < 0.0) throw std::domain_error("check_min_distance: parameters outside claim regime");
    r.bound = 2.0 * std::pow(static_cast<double>(m), -eps);
    r.details["vacuous"] = r.r_star == 0.0 ? 1.0 : 0.0;

    std::vector<std::uint8_t> violated(trials, 0);
    parallel_for(trials, [&](std::uint64_t t) {
        Rng rng(seed, t);
        auto vals = sample_onset(n, m, rng);
        if (vals.size() >= 2 && detail::min_pairwise_distance(vals) < r.r_star) violated[t] = 1;
    });
    for (std::uint8_t v : violated) r.violation_count += v;
    detail::finalize(r, clock);
    return r;
}

// Sampled on-sets should be pairwise nearly orthogonal as signed index
// states: violation when some pair's |overlap| exceeds 2 sqrt(log2(M)/N),
// claimed to happen with probability at most 2/M^eps. A cap of at least 1
// can never be exceeded; such runs are reported as trivially satisfied.
inline TrialReport check_overlap_bound(int n, std::uint64_t m, std::uint64_t trials, std::uint64_t seed,
                                       double eps = 0.88) {
    if (n < 1 || n > 64) throw std::invalid_argument("check_overlap_bound: n out of range");
    if (trials < 1) throw std::invalid_argument("check_overlap_bound: need at least one trial");
    detail::WallClock clock;
    TrialReport r;
    r.claim = "overlap";
    r.n = n;
    r.m = m;
    r.eps = eps;
    r.seed = seed;
    r.trials = trials;
    double cap = 2.0 * std::sqrt(std::log2(static_cast<double>(m)) / n);
    r.bound = 2.0 * std::pow(static_cast<double>(m), -eps);
    r.details["overlap_cap"] = cap;
    r.details["vacuous"] = cap >= 1.0 ? 1.0 : 0.0;

    std::vector<std::uint8_t> violated(trials, 0);
    parallel_for(trials, [&](std::uint64_t t) {
        Rng rng(seed, t);
        auto vals = sample_onset(n, m, rng);
        if (vals.size() < 2) return;
        double gap = detail::max_pairwise_agreement_gap(n, vals);
        if (gap / n > cap) violated[t] = 1;
    });
    for (std::uint8_t v : violated) r.violation_count += v;
    detail::finalize(r, clock);
    return r;
}

// The covering-degree function: its defining inequality (eN/d)^d <= z and its
// monotonicity, on a log-spaced z grid per n. Both are exact numeric checks;
// tolerance is relative in the log domain.
inline TrialReport check_d_property(const std::vector<int>& n_grid, int points_per_n) {
    if (n_grid.empty() || points_per_n < 2) throw std::invalid_argument("check_d_property: empty grid");
    detail::WallClock clock;
    TrialReport r;
    r.claim = "d-property";
    r.bound = 0.0;
    const double tol = 1e-9;
    for (int n : n_grid) {
        if (n < 2 || n > 64) throw std::invalid_argument("check_d_property: n out of range");
        double prev_d = 0.0;
        for (int j = 1; j <= points_per_n; ++j) {
            double log2z = static_cast<double>(j) * n / points_per_n;
            double z = std::exp2(log2z);
            double d = d_of_z(z, n);
            ++r.trials;
            double lhs = d * std::log2(std::exp(1.0) * n / d);
            bool ineq_ok = lhs <= log2z + tol * std::max(1.0, std::abs(log2z));
            bool mono_ok = d + 1e-12 >= prev_d;
            if (!ineq_ok || !mono_ok) ++r.violation_count;
            prev_d = d;
        }
    }
    detail::finalize(r, clock);
    return r;
}

// The two-step count bound at a single (n, m): the sign-degree count stays
// below 2^(ND - N), and ND stays below M' = M(N - log2 M), both in the log
// domain at the rounded-up degree. Failures are reported, not hidden; the
// slack genuinely needs n large enough.
inline TrialReport check_counting_chain(int n, std::uint64_t m) {
    detail::WallClock clock;
    TrialReport r;
    r.claim = "counting-chain";
    r.n = n;
    r.m = m;
    r.trials = 2;
    r.bound = 0.0;
    auto params = BoundParams::for_problem(n, m);
    double big_d = params.big_d.convert_to<double>();
    double nd = static_cast<double>(n) * big_d;
    bool claim_count = params.log2_t <= nd - n;
    bool claim_budget = nd <= params.m_prime;
    r.violation_count = (claim_count ? 0 : 1) + (claim_budget ? 0 : 1);
    r.details["d_value"] = params.d_z;
    r.details["d_ceil"] = params.d_ceil;
    r.details["log2_count"] = params.log2_t;
    r.details["nd_minus_n"] = nd - n;
    r.details["nd"] = nd;
    r.details["m_prime"] = params.m_prime;
    int d_floor = static_cast<int>(std::floor(params.d_z));
    r.details["nd_floor"] =
        static_cast<double>(n) * binom_partial_sum(n, std::min(d_floor, n)).convert_to<double>();
    double sqrt_n = std::sqrt(static_cast<double>(n));
    r.details["in_regime"] =
        (std::log2(static_cast<double>(m)) > sqrt_n && m <= (std::uint64_t{1} << (n - 1))) ? 1.0 : 0.0;
    detail::finalize(r, clock);
    return r;
}

// Smallest n in [n_lo, n_hi] where both counting-chain inequalities hold with
// m = 2^round(alpha*n), or -1 when none does.
inline int counting_chain_smallest_n(double alpha, int n_lo, int n_hi) {
    if (!(alpha > 0.0 && alpha < 1.0) || n_lo < 2 || n_hi < n_lo)
        throw std::invalid_argument("counting_chain_smallest_n: bad scan range");
    for (int n = n_lo; n <= n_hi; ++n) {
        int exp = static_cast<int>(std::lround(alpha * n));
        exp = std::max(1, std::min(exp, n - 1));
        if (check_counting_chain(n, std::uint64_t{1} << exp).violation_count == 0) return n;
    }
    return -1;
}

// Sensitivity of the on-set dominates its mean, which dominates the
// isoperimetric floor. Exhaustive over every on-set for n <= 4; sampled on a
// power-of-two-ish m grid above that. The sampled path never builds a truth
// table: membership lives in a bit vector over the 2^n values.
inline TrialReport check_sensitivity_chain(int n_max, std::uint64_t samples_per_cell, std::uint64_t seed) {
    if (n_max < 1 || n_max > 12) throw std::invalid_argument("check_sensitivity_chain: n_max out of range");
    detail::WallClock clock;
    TrialReport r;
    r.claim = "sensitivity-chain";
    r.n = n_max;
    r.seed = seed;
    r.bound = 0.0;

    std::uint64_t exhaustive = 0;
    for (int n = 1; n <= std::min(n_max, 4); ++n) {
        for (std::uint64_t m = 1; m <= (std::uint64_t{1} << n); ++m) {
            FnmEnumerator en(n, m);
            while (auto f = en.next()) {
                ++exhaustive;
                std::uint64_t s = static_cast<std::uint64_t>(sensitivity(*f));
                std::uint64_t gamma = static_cast<std::uint64_t>(edge_boundary(*f));
                bool mean_ok = s * m >= gamma;
                bool floor_ok = static_cast<double>(gamma) + 1e-9 >= isoperimetric_bound(n, m);
                if (!mean_ok || !floor_ok) ++r.violation_count;
            }
        }
    }
    r.details["exhaustive_functions"] = static_cast<double>(exhaustive);
    r.trials += exhaustive;

    std::uint64_t sampled = 0;
    std::uint64_t cell_index = 0;
    for (int n = 5; n <= n_max; ++n) {
        std::vector<std::uint64_t> ms;
        for (std::uint64_t m = 1; m <= (std::uint64_t{1} << (n - 1)); m *= 2) {
            ms.push_back(m);
            if (m >= 2 && 3 * (m / 2) <= (std::uint64_t{1} << (n - 1))) ms.push_back(3 * (m / 2));
        }
        for (std::uint64_t m : ms) {
            ++cell_index;
            std::vector<std::uint8_t> violated(samples_per_cell, 0);
            double bound = isoperimetric_bound(n, m);
            parallel_for(samples_per_cell, [&](std::uint64_t t) {
                Rng rng(seed, cell_index * 0x10001 + t);
                auto vals = sample_onset(n, m, rng);
                std::vector<std::uint64_t> member((std::size_t{1} << n) / 64 + 1, 0);
                for (std::uint64_t v : vals) member[v >> 6] |= std::uint64_t{1} << (v & 63);
                std::uint64_t gamma = 0, s_on = 0;
                for (std::uint64_t v : vals) {
                    std::uint64_t s_x = 0;
                    for (int i = 0; i < n; ++i) {
                        std::uint64_t nb = v ^ (std::uint64_t{1} << i);
                        if (!((member[nb >> 6] >> (nb & 63)) & 1)) ++s_x;
                    }
                    gamma += s_x;
                    s_on = std::max(s_on, s_x);
                }
                bool mean_ok = s_on * m >= gamma;
                bool floor_ok = static_cast<double>(gamma) + 1e-9 >= bound;
                if (!mean_ok || !floor_ok) violated[t] = 1;
            });
            for (std::uint8_t v : violated) r.violation_count += v;
            sampled += samples_per_cell;
        }
    }
    r.details["sampled_functions"] = static_cast<double>(sampled);
    r.trials += sampled;
    detail::finalize(r, clock);
    return r;
}

} // namespace oql
