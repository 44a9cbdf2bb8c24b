#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "onsetqlab/bitstring.hpp"
#include "onsetqlab/rng.hpp"

namespace oql {

struct QueryCounter {
    std::uint64_t count = 0;
};

enum class OracleMode { BitFlip, Phase };

// Hidden input behind the query interface; the domain may be wider than 64
// positions, so bits live in a dynamic vector. The mask models free classical
// post-processing against a known string: effective_bit(i) = x_i xor mask_i,
// which is how a search over "positions where x differs from z" is run
// without extra queries.
struct Oracle {
    std::vector<bool> bits;
    OracleMode mode = OracleMode::BitFlip;
    std::vector<bool> mask; // empty = none

    static Oracle hiding(const BitString& input) {
        Oracle o;
        o.bits.resize(static_cast<std::size_t>(input.length()));
        for (int i = 0; i < input.length(); ++i) o.bits[static_cast<std::size_t>(i)] = input.bit(i);
        return o;
    }

    static Oracle hiding_bits(std::vector<bool> input) {
        Oracle o;
        o.bits = std::move(input);
        return o;
    }

    int domain_size() const { return static_cast<int>(bits.size()); }

    bool effective_bit(int i) const {
        bool b = bits[static_cast<std::size_t>(i)];
        if (!mask.empty()) b = b != mask[static_cast<std::size_t>(i)];
        return b;
    }

    int marked_count() const {
        int t = 0;
        for (int i = 0; i < domain_size(); ++i)
            if (effective_bit(i)) ++t;
        return t;
    }

    Oracle with_mode(OracleMode m) const {
        Oracle o = *this;
        o.mode = m;
        return o;
    }

    Oracle xor_mask(const BitString& z) const {
        if (z.length() != domain_size()) throw std::invalid_argument("Oracle::xor_mask: length mismatch");
        Oracle o = *this;
        if (o.mask.empty()) o.mask.assign(bits.size(), false);
        for (int i = 0; i < z.length(); ++i)
            if (z.bit(i)) o.mask[static_cast<std::size_t>(i)] = !o.mask[static_cast<std::size_t>(i)];
        return o;
    }
};

// State over |i>|b>|w>: index register of dimension K, one flag qubit, and a
// work register of dimension W. Every mutation re-checks the norm.
class SimRegister {
public:
    explicit SimRegister(int index_dim, int work_dim = 1)
        : k_(index_dim), w_(work_dim), a_(static_cast<std::size_t>(index_dim) * 2 * work_dim) {
        if (index_dim < 1 || work_dim < 1) throw std::invalid_argument("SimRegister: bad dimensions");
        a_[0] = 1.0;
    }

    static SimRegister basis(int index_dim, int i, int flag = 0, int work_dim = 1) {
        SimRegister s(index_dim, work_dim);
        s.a_[0] = 0.0;
        s.at(i, flag, 0) = 1.0;
        return s;
    }

    static SimRegister uniform(int index_dim, int work_dim = 1) {
        SimRegister s(index_dim, work_dim);
        s.a_[0] = 0.0;
        double amp = 1.0 / std::sqrt(static_cast<double>(index_dim));
        for (int i = 0; i < index_dim; ++i) s.at(i, 0, 0) = amp;
        return s;
    }

    static SimRegister uniform_over(int index_dim, std::span<const int> support, int work_dim = 1) {
        if (support.empty()) throw std::invalid_argument("SimRegister: empty support");
        SimRegister s(index_dim, work_dim);
        s.a_[0] = 0.0;
        double amp = 1.0 / std::sqrt(static_cast<double>(support.size()));
        for (int i : support) s.at(i, 0, 0) = amp;
        return s;
    }

    int index_dim() const { return k_; }
    int work_dim() const { return w_; }

    std::complex<double>& at(int i, int b = 0, int w = 0) {
        return a_[(static_cast<std::size_t>(i) * 2 + static_cast<std::size_t>(b)) * w_ + w];
    }
    const std::complex<double>& at(int i, int b = 0, int w = 0) const {
        return a_[(static_cast<std::size_t>(i) * 2 + static_cast<std::size_t>(b)) * w_ + w];
    }

    double norm_sq() const {
        double s = 0;
        for (const auto& c : a_) s += std::norm(c);
        return s;
    }

    void check_norm() const {
        if (std::abs(norm_sq() - 1.0) > 1e-9) throw std::logic_error("SimRegister: norm drifted");
    }

    void flag_hadamard() {
        double r = 1.0 / std::sqrt(2.0);
        for (int i = 0; i < k_; ++i)
            for (int w = 0; w < w_; ++w) {
                auto a0 = at(i, 0, w), a1 = at(i, 1, w);
                at(i, 0, w) = r * (a0 + a1);
                at(i, 1, w) = r * (a0 - a1);
            }
        check_norm();
    }

    // Inversion about the mean of the index register restricted to a support
    // subspace: 2|u_S><u_S| - I applied per (flag, work) slice.
    void diffuse(std::span<const int> support) {
        if (support.empty()) throw std::invalid_argument("SimRegister: empty diffusion support");
        std::vector<bool> in_support(static_cast<std::size_t>(k_), false);
        for (int i : support) in_support[static_cast<std::size_t>(i)] = true;
        for (int b = 0; b < 2; ++b)
            for (int w = 0; w < w_; ++w) {
                std::complex<double> mean = 0.0;
                for (int i : support) mean += at(i, b, w);
                mean /= static_cast<double>(support.size());
                for (int i = 0; i < k_; ++i) {
                    auto& amp = at(i, b, w);
                    amp = in_support[static_cast<std::size_t>(i)] ? 2.0 * mean - amp : -amp;
                }
            }
        check_norm();
    }

    void diffuse() {
        std::vector<int> all(static_cast<std::size_t>(k_));
        std::iota(all.begin(), all.end(), 0);
        diffuse(all);
    }

    std::vector<double> index_distribution() const {
        std::vector<double> p(static_cast<std::size_t>(k_), 0.0);
        for (int i = 0; i < k_; ++i)
            for (int b = 0; b < 2; ++b)
                for (int w = 0; w < w_; ++w) p[static_cast<std::size_t>(i)] += std::norm(at(i, b, w));
        return p;
    }

    int sample_index(Rng& rng) const {
        auto p = index_distribution();
        double u = rng.unit();
        double acc = 0.0;
        for (int i = 0; i < k_; ++i) {
            acc += p[static_cast<std::size_t>(i)];
            if (u < acc) return i;
        }
        return k_ - 1;
    }

    std::complex<double> inner(const SimRegister& other) const {
        if (other.k_ != k_ || other.w_ != w_) throw std::invalid_argument("SimRegister: inner dim mismatch");
        std::complex<double> s = 0.0;
        for (std::size_t idx = 0; idx < a_.size(); ++idx) s += std::conj(a_[idx]) * other.a_[idx];
        return s;
    }

private:
    int k_, w_;
    std::vector<std::complex<double>> a_;
};

inline SimRegister& apply_oracle(SimRegister& state, const Oracle& oracle, QueryCounter& counter) {
    if (state.index_dim() != oracle.domain_size()) throw std::invalid_argument("apply_oracle: dimension mismatch");
    ++counter.count;
    for (int i = 0; i < state.index_dim(); ++i) {
        if (!oracle.effective_bit(i)) continue;
        for (int w = 0; w < state.work_dim(); ++w) {
            if (oracle.mode == OracleMode::BitFlip) {
                std::swap(state.at(i, 0, w), state.at(i, 1, w));
            } else {
                state.at(i, 0, w) = -state.at(i, 0, w);
                state.at(i, 1, w) = -state.at(i, 1, w);
            }
        }
    }
    state.check_norm();
    return state;
}

// One classical bit read: a basis-state bit-flip query followed by a flag
// measurement, which is deterministic for basis states.
inline bool read_bit(const Oracle& oracle, int i, QueryCounter& counter) {
    SimRegister s = SimRegister::basis(oracle.domain_size(), i, 0);
    apply_oracle(s, oracle.with_mode(OracleMode::BitFlip), counter);
    return std::norm(s.at(i, 1, 0)) > 0.5;
}

struct GroverRun {
    int measured = -1;
    bool marked = false;
    double marked_mass = 0.0; // exact pre-measurement success probability
};

inline double grover_marked_mass(const SimRegister& state, const Oracle& oracle) {
    auto p = state.index_distribution();
    double mass = 0.0;
    for (int i = 0; i < state.index_dim(); ++i)
        if (oracle.effective_bit(i)) mass += p[static_cast<std::size_t>(i)];
    return mass;
}

inline GroverRun grover_search(const Oracle& oracle, int iterations, QueryCounter& counter, Rng& rng) {
    int k = oracle.domain_size();
    if (k < 1) throw std::invalid_argument("grover_search: empty domain");
    if (iterations < 0) throw std::invalid_argument("grover_search: negative iteration count");
    SimRegister state = SimRegister::uniform(k);
    Oracle phase = oracle.with_mode(OracleMode::Phase);
    for (int t = 0; t < iterations; ++t) {
        apply_oracle(state, phase, counter);
        state.diffuse();
    }
    GroverRun run;
    run.marked_mass = grover_marked_mass(state, oracle);
    run.measured = state.sample_index(rng);
    run.marked = oracle.effective_bit(run.measured);
    return run;
}

inline double grover_success_formula(std::uint64_t k, std::uint64_t marked, int iterations) {
    if (k == 0) throw std::invalid_argument("grover_success_formula: empty domain");
    if (marked == 0) return 0.0;
    double theta = std::asin(std::sqrt(static_cast<double>(marked) / static_cast<double>(k)));
    double s = std::sin((2.0 * iterations + 1.0) * theta);
    return s * s;
}

// Search schedule for an unknown number of marked items. The budget counts
// every oracle call (iterations plus the one verification read per round);
// round caps grow by 6/5 up to ceil(sqrt(K)) and the last round is truncated
// so the caps sum to the budget exactly. A round draws its iteration count
// uniformly below the cap, so worst-case cost is the budget itself and round
// success probabilities are exact averages.
struct MtSchedule {
    std::uint64_t budget = 0;
    std::vector<int> caps;
};

inline MtSchedule multi_target_schedule(std::uint64_t k) {
    if (k < 1) throw std::invalid_argument("multi_target_schedule: empty domain");
    MtSchedule s;
    double root = std::sqrt(static_cast<double>(k));
    s.budget = static_cast<std::uint64_t>(std::ceil(2.25 * root));
    std::uint64_t cap_max = static_cast<std::uint64_t>(std::ceil(root));
    std::uint64_t used = 0;
    std::uint64_t next = 1;
    while (used < s.budget) {
        std::uint64_t cap = std::min(next, s.budget - used);
        s.caps.push_back(static_cast<int>(cap));
        used += cap;
        next = std::min(static_cast<std::uint64_t>(std::ceil(1.2 * static_cast<double>(next))), cap_max);
    }
    return s;
}

inline double mt_round_success(std::uint64_t k, std::uint64_t t, int cap) {
    if (t == 0) return 0.0;
    double total = 0.0;
    for (int j = 0; j < cap; ++j) total += grover_success_formula(k, t, j);
    return total / cap;
}

// Exact single-pass probability that the schedule returns a verified marked
// index when t of the k positions are marked.
inline double mt_find_probability(std::uint64_t k, std::uint64_t t) {
    if (t == 0) return 0.0;
    auto sched = multi_target_schedule(k);
    double miss = 1.0;
    for (int cap : sched.caps) miss *= 1.0 - mt_round_success(k, t, cap);
    return 1.0 - miss;
}

inline double mt_expected_queries(std::uint64_t k, std::uint64_t t) {
    auto sched = multi_target_schedule(k);
    double reach = 1.0;
    double expected = 0.0;
    for (int cap : sched.caps) {
        expected += reach * ((cap - 1) / 2.0 + 1.0);
        reach *= 1.0 - mt_round_success(k, t, cap);
    }
    return expected;
}

// Runs the schedule on the simulator, searching the given index subset.
// Returns a verified marked index or nothing once the budget is exhausted.
inline std::optional<int> multi_target_grover(const Oracle& oracle, std::span<const int> domain,
                                              QueryCounter& counter, Rng& rng) {
    if (domain.empty()) throw std::invalid_argument("multi_target_grover: empty domain");
    auto sched = multi_target_schedule(domain.size());
    Oracle phase = oracle.with_mode(OracleMode::Phase);
    for (int cap : sched.caps) {
        int iters = static_cast<int>(rng.below(static_cast<std::uint64_t>(cap)));
        SimRegister state = SimRegister::uniform_over(oracle.domain_size(), domain);
        for (int j = 0; j < iters; ++j) {
            apply_oracle(state, phase, counter);
            state.diffuse(domain);
        }
        int measured = state.sample_index(rng);
        if (read_bit(oracle, measured, counter)) return measured;
    }
    return std::nullopt;
}

inline std::optional<int> multi_target_grover(const Oracle& oracle, QueryCounter& counter, Rng& rng) {
    std::vector<int> all(static_cast<std::size_t>(oracle.domain_size()));
    std::iota(all.begin(), all.end(), 0);
    return multi_target_grover(oracle, all, counter, rng);
}

inline int equality_reps(double max_error) {
    if (!(max_error > 0.0 && max_error < 1.0)) throw std::invalid_argument("equality_reps: error out of (0,1)");
    return std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / max_error))));
}

// One-sided equality test between the oracle's effective string and z on the
// given positions: search for a differing position. Agreement always passes;
// disagreement passes with probability at most max_error.
inline bool grover_equality_test(const Oracle& oracle, const BitString& z, std::span<const int> domain,
                                 QueryCounter& counter, Rng& rng, double max_error = 1.0 / 3.0) {
    Oracle derived = oracle.xor_mask(z);
    int reps = equality_reps(max_error);
    for (int r = 0; r < reps; ++r)
        if (multi_target_grover(derived, domain, counter, rng).has_value()) return false;
    return true;
}

inline bool grover_equality_test(const Oracle& oracle, const BitString& z, QueryCounter& counter, Rng& rng,
                                 double max_error = 1.0 / 3.0) {
    std::vector<int> all(static_cast<std::size_t>(oracle.domain_size()));
    std::iota(all.begin(), all.end(), 0);
    return grover_equality_test(oracle, z, all, counter, rng, max_error);
}

// P[test says equal] given the Hamming distance between the effective string
// and z.
inline double equality_accept_probability(int n, int ham, double max_error = 1.0 / 3.0) {
    if (ham == 0) return 1.0;
    double miss = 1.0 - mt_find_probability(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(ham));
    return std::pow(miss, equality_reps(max_error));
}

enum class CompareVerdict { LessOrEqual, Greater };

namespace detail {

inline int comparator_level_reps(int level) { return 3 * level; }

} // namespace detail

// Decides z <= threshold (as left-to-right binary integers) by binary search
// for the most significant disagreement: each halving level runs repeated
// multi-target searches over the more significant half, descending into it on
// a verified hit; windows of width <= 2 are read out directly.
inline CompareVerdict binary_grover_comparator(const Oracle& oracle, const BitString& threshold, int lo,
                                               int hi, QueryCounter& counter, Rng& rng) {
    if (threshold.length() != oracle.domain_size())
        throw std::invalid_argument("binary_grover_comparator: length mismatch");
    if (lo < 0 || hi > threshold.length() || lo >= hi)
        throw std::invalid_argument("binary_grover_comparator: bad window");
    Oracle derived = oracle.xor_mask(threshold);
    int level = 1;
    while (hi - lo > 2) {
        int half = (hi - lo + 1) / 2;
        std::vector<int> h1(static_cast<std::size_t>(half));
        std::iota(h1.begin(), h1.end(), lo);
        bool found = false;
        for (int r = 0; r < detail::comparator_level_reps(level) && !found; ++r)
            found = multi_target_grover(derived, h1, counter, rng).has_value();
        if (found) hi = lo + half;
        else lo = lo + half;
        ++level;
    }
    for (int i = lo; i < hi; ++i) {
        bool zi = read_bit(oracle, i, counter);
        if (zi != threshold.bit(i)) return zi ? CompareVerdict::Greater : CompareVerdict::LessOrEqual;
    }
    return CompareVerdict::LessOrEqual;
}

inline CompareVerdict binary_grover_comparator(const Oracle& oracle, const BitString& threshold,
                                               QueryCounter& counter, Rng& rng) {
    return binary_grover_comparator(oracle, threshold, 0, threshold.length(), counter, rng);
}

// Exact probability that the comparator answers LessOrEqual for concrete
// bit strings, walking the same window tree with exact branch probabilities.
inline double comparator_leq_probability(const BitString& z, const BitString& threshold, int lo, int hi) {
    if (z.length() != threshold.length()) throw std::invalid_argument("comparator_leq_probability: length mismatch");
    if (lo < 0 || hi > z.length() || lo >= hi) throw std::invalid_argument("comparator_leq_probability: bad window");
    struct Walker {
        const BitString& z;
        const BitString& tau;
        double leq(int lo, int hi, int level) const {
            if (hi - lo <= 2) {
                for (int i = lo; i < hi; ++i)
                    if (z.bit(i) != tau.bit(i)) return z.bit(i) ? 0.0 : 1.0;
                return 1.0;
            }
            int half = (hi - lo + 1) / 2;
            std::uint64_t t = 0;
            for (int i = lo; i < lo + half; ++i)
                if (z.bit(i) != tau.bit(i)) ++t;
            double p_pass = mt_find_probability(static_cast<std::uint64_t>(half), t);
            double p_found = 1.0 - std::pow(1.0 - p_pass, detail::comparator_level_reps(level));
            return p_found * leq(lo, lo + half, level + 1) + (1.0 - p_found) * leq(lo + half, hi, level + 1);
        }
    };
    return Walker{z, threshold}.leq(lo, hi, 1);
}

inline double comparator_leq_probability(const BitString& z, const BitString& threshold) {
    return comparator_leq_probability(z, threshold, 0, z.length());
}

// Index state with signs given by the hidden input: one phase query on the
// uniform superposition.
inline SimRegister prepare_psi_state(const Oracle& oracle, QueryCounter& counter) {
    SimRegister state = SimRegister::uniform(oracle.domain_size());
    apply_oracle(state, oracle.with_mode(OracleMode::Phase), counter);
    return state;
}

inline double inner_product_psi(const BitString& x, const BitString& y) {
    int n = x.length();
    if (n != y.length() || n == 0) throw std::invalid_argument("inner_product_psi: bad lengths");
    return 1.0 - 2.0 * static_cast<double>(hamming(x, y)) / static_cast<double>(n);
}

} // namespace oql
