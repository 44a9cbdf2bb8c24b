#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "onsetqlab/boolfn.hpp"
#include "onsetqlab/measures.hpp"
#include "onsetqlab/pgm.hpp"
#include "onsetqlab/qsim.hpp"

namespace oql {

struct RunRecord {
    std::string algorithm;
    int n = 0;
    std::uint64_t m = 0;
    std::uint64_t seed = 0;
    BitString input_x;
    int output = 0;
    bool correct = false;
    std::uint64_t queries = 0;
    BoundParams params;
    std::map<std::string, std::uint64_t> phase_queries;
    std::map<std::string, double> metrics;
    std::vector<std::string> flags;
};

// ---------------------------------------------------------------------------
// Subcube membership evaluation.
//
// The target family puts f(x) = 1 exactly when the bits past position L+1 are
// zero and either bit L+1 is zero too (base cube) or the L-bit prefix is at
// most delta-1 (the overflow strings). Three query phases mirror that shape:
// a search for a one in the far suffix, an equality test singling out the
// overflow pattern, and a prefix comparison against delta-1.

inline constexpr double kSubcubeEqualityError = 1.0 / 16.0;
inline constexpr int kSubcubeSuffixPasses = 3;

inline bool subcube_member(int n, std::uint64_t m, const BitString& x) {
    if (x.length() != n) throw std::invalid_argument("subcube_member: length mismatch");
    if (m < 1 || m > (std::uint64_t{1} << (n - 1))) throw std::invalid_argument("subcube_member: m out of range");
    int big_l = std::bit_width(m) - 1;
    std::uint64_t delta = m - (std::uint64_t{1} << big_l);
    for (int i = delta == 0 ? big_l : big_l + 1; i < n; ++i)
        if (x.bit(i)) return false;
    if (delta == 0) return true;
    if (!x.bit(big_l)) return true;
    return x.slice(0, big_l).value() <= delta - 1;
}

inline RunRecord subcube_evaluate(const Oracle& oracle, int n, std::uint64_t m, std::uint64_t seed) {
    if (oracle.domain_size() != n) throw std::invalid_argument("subcube_evaluate: oracle size mismatch");
    if (m < 1 || m > (std::uint64_t{1} << (n - 1))) throw std::invalid_argument("subcube_evaluate: m out of range");
    int big_l = std::bit_width(m) - 1;
    std::uint64_t delta = m - (std::uint64_t{1} << big_l);

    RunRecord rec;
    rec.algorithm = "subcube";
    rec.n = n;
    rec.m = m;
    rec.seed = seed;
    rec.params = BoundParams::for_problem(n, m);

    QueryCounter counter;
    Rng rng(seed);

    int suffix_start = delta == 0 ? big_l : big_l + 1;
    bool suffix_hit = false;
    if (suffix_start < n) {
        std::vector<int> suffix(static_cast<std::size_t>(n - suffix_start));
        std::iota(suffix.begin(), suffix.end(), suffix_start);
        for (int pass = 0; pass < kSubcubeSuffixPasses && !suffix_hit; ++pass)
            suffix_hit = multi_target_grover(oracle, suffix, counter, rng).has_value();
    }
    rec.phase_queries["suffix"] = counter.count;

    int output;
    if (suffix_hit) {
        output = 0;
    } else if (delta == 0) {
        output = 1;
    } else {
        BitString marker = BitString::all_zero(n).with_bit(big_l, true);
        std::vector<int> tail(static_cast<std::size_t>(n - big_l));
        std::iota(tail.begin(), tail.end(), big_l);
        std::uint64_t before = counter.count;
        bool on_marker = grover_equality_test(oracle, marker, tail, counter, rng, kSubcubeEqualityError);
        rec.phase_queries["marker"] = counter.count - before;
        if (!on_marker) {
            output = 1;
        } else {
            BitString tau(n, (delta - 1) << (n - big_l));
            before = counter.count;
            auto verdict = binary_grover_comparator(oracle, tau, 0, big_l, counter, rng);
            rec.phase_queries["prefix"] = counter.count - before;
            output = verdict == CompareVerdict::LessOrEqual ? 1 : 0;
        }
    }

    BitString x(n, 0);
    for (int i = 0; i < n; ++i) x = x.with_bit(i, oracle.effective_bit(i));
    rec.input_x = x;
    rec.output = output;
    rec.correct = output == (subcube_member(n, m, x) ? 1 : 0);
    rec.queries = counter.count;
    return rec;
}

// Exact probability that subcube_evaluate outputs 1 on input x, from the
// closed-form pass/accept probabilities of the three phases.
inline double subcube_output1_probability(int n, std::uint64_t m, const BitString& x) {
    if (x.length() != n) throw std::invalid_argument("subcube_output1_probability: length mismatch");
    int big_l = std::bit_width(m) - 1;
    std::uint64_t delta = m - (std::uint64_t{1} << big_l);
    int suffix_start = delta == 0 ? big_l : big_l + 1;

    double no_find = 1.0;
    if (suffix_start < n) {
        std::uint64_t ones = 0;
        for (int i = suffix_start; i < n; ++i) ones += x.bit(i) ? 1 : 0;
        double p = mt_find_probability(static_cast<std::uint64_t>(n - suffix_start), ones);
        no_find = std::pow(1.0 - p, kSubcubeSuffixPasses);
    }
    if (delta == 0) return no_find;

    BitString marker = BitString::all_zero(n).with_bit(big_l, true);
    int ham_tail = 0;
    for (int i = big_l; i < n; ++i) ham_tail += x.bit(i) != marker.bit(i) ? 1 : 0;
    double accept = equality_accept_probability(n - big_l, ham_tail, kSubcubeEqualityError);

    BitString tau(n, (delta - 1) << (n - big_l));
    double leq = comparator_leq_probability(x, tau, 0, big_l);

    return no_find * ((1.0 - accept) + accept * leq);
}

inline double subcube_success_probability(int n, std::uint64_t m, const BitString& x) {
    double p1 = subcube_output1_probability(n, m, x);
    return subcube_member(n, m, x) ? p1 : 1.0 - p1;
}

// ---------------------------------------------------------------------------
// Candidate identification: rounds of disjoint half-ish column covers searched
// together, falling back to a search over all still-informative positions once
// no column's cover fits the window. Every verified one shrinks the live set
// to that column's cover; a clean miss removes everything the searched
// positions would have exposed.

namespace detail {

inline std::uint64_t oip_cover_count(const std::vector<BitString>& cand, const std::vector<int>& live, int i) {
    std::uint64_t c = 0;
    for (int k : live) c += cand[static_cast<std::size_t>(k)].bit(i) ? 1 : 0;
    return c;
}

struct OipRoundPlan {
    std::vector<int> columns; // searched when nonempty
    std::vector<int> sparse;  // searched otherwise
};

inline OipRoundPlan oip_round_plan(const std::vector<BitString>& cand, const std::vector<int>& live,
                                   double beta) {
    const int n = cand.front().length();
    const std::uint64_t s = live.size();
    std::vector<std::uint64_t> cover(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cover[static_cast<std::size_t>(i)] = oip_cover_count(cand, live, i);

    std::uint64_t lo = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(beta * static_cast<double>(s))));
    std::uint64_t hi = s / 2;

    OipRoundPlan plan;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return cover[static_cast<std::size_t>(a)] > cover[static_cast<std::size_t>(b)];
    });
    std::vector<bool> taken(live.size(), false);
    for (int i : order) {
        std::uint64_t c = cover[static_cast<std::size_t>(i)];
        if (c < lo || c > hi) continue;
        bool disjoint = true;
        for (std::size_t k = 0; k < live.size() && disjoint; ++k)
            if (taken[k] && cand[static_cast<std::size_t>(live[k])].bit(i)) disjoint = false;
        if (!disjoint) continue;
        for (std::size_t k = 0; k < live.size(); ++k)
            if (cand[static_cast<std::size_t>(live[k])].bit(i)) taken[k] = true;
        plan.columns.push_back(i);
    }
    std::sort(plan.columns.begin(), plan.columns.end());
    if (!plan.columns.empty()) return plan;

    for (int i = 0; i < n; ++i) {
        std::uint64_t c = cover[static_cast<std::size_t>(i)];
        if (c >= 1 && c < s) plan.sparse.push_back(i);
    }
    return plan;
}

inline std::vector<int> oip_prune_found(const std::vector<BitString>& cand, const std::vector<int>& live,
                                        int i) {
    std::vector<int> next;
    for (int k : live)
        if (cand[static_cast<std::size_t>(k)].bit(i)) next.push_back(k);
    return next;
}

inline std::vector<int> oip_prune_missed(const std::vector<BitString>& cand, const std::vector<int>& live,
                                         const std::vector<int>& searched) {
    std::vector<int> next;
    for (int k : live) {
        bool covered = false;
        for (int i : searched)
            if (cand[static_cast<std::size_t>(k)].bit(i)) { covered = true; break; }
        if (!covered) next.push_back(k);
    }
    return next;
}

inline int oip_round_reps(int round) { return 3 + round; }

} // namespace detail

struct OipOutcome {
    BitString z;
    bool fallback = false;
    int rounds = 0;
    int column_rounds = 0;
    int sparse_rounds = 0;
    std::uint64_t column_queries = 0;
    std::uint64_t sparse_queries = 0;
};

inline void oip_check_candidates(const std::vector<BitString>& candidates, int n) {
    if (candidates.empty()) throw std::invalid_argument("oip: empty candidate set");
    for (const auto& c : candidates)
        if (c.length() != n) throw std::invalid_argument("oip: candidate length mismatch");
    for (std::size_t i = 0; i < candidates.size(); ++i)
        for (std::size_t j = i + 1; j < candidates.size(); ++j)
            if (candidates[i] == candidates[j]) throw std::invalid_argument("oip: duplicate candidate");
}

inline OipOutcome oip_identify(const Oracle& oracle, const std::vector<BitString>& candidates,
                               const BoundParams& params, QueryCounter& counter, Rng& rng) {
    oip_check_candidates(candidates, oracle.domain_size());
    std::vector<int> live(candidates.size());
    std::iota(live.begin(), live.end(), 0);

    OipOutcome out;
    int round = 1;
    while (live.size() > 1) {
        auto plan = detail::oip_round_plan(candidates, live, params.beta_effective);
        bool column = !plan.columns.empty();
        const std::vector<int>& domain = column ? plan.columns : plan.sparse;
        std::uint64_t before = counter.count;
        std::optional<int> found;
        for (int rep = 0; rep < detail::oip_round_reps(round) && !found; ++rep)
            found = multi_target_grover(oracle, domain, counter, rng);
        (column ? out.column_queries : out.sparse_queries) += counter.count - before;
        (column ? out.column_rounds : out.sparse_rounds) += 1;
        live = found ? detail::oip_prune_found(candidates, live, *found)
                     : detail::oip_prune_missed(candidates, live, domain);
        ++round;
    }
    out.rounds = round - 1;
    if (live.empty()) {
        out.z = candidates.front();
        out.fallback = true;
    } else {
        out.z = candidates[static_cast<std::size_t>(live.front())];
    }
    return out;
}

// Exact distribution over the identifier's returned string, by candidate
// index; a run that prunes everyone returns the first candidate, so that mass
// folds into index 0. Branches follow the plan's searched set with the exact
// per-pass find probability; a verified hit is uniform over the hidden
// string's ones within the searched set.
inline std::vector<double> oip_outcome_distribution(const std::vector<BitString>& candidates,
                                                    const BitString& x, const BoundParams& params) {
    oip_check_candidates(candidates, x.length());
    std::vector<double> out(candidates.size(), 0.0);

    struct Walker {
        const std::vector<BitString>& cand;
        const BitString& x;
        double beta;
        std::vector<double>& out;
        void run(const std::vector<int>& live, int round, double prob) {
            if (prob <= 0.0) return;
            if (live.empty()) { out[0] += prob; return; }
            if (live.size() == 1) { out[static_cast<std::size_t>(live.front())] += prob; return; }
            auto plan = detail::oip_round_plan(cand, live, beta);
            const std::vector<int>& domain = plan.columns.empty() ? plan.sparse : plan.columns;
            std::vector<int> marked;
            for (int i : domain)
                if (x.bit(i)) marked.push_back(i);
            double per_pass = mt_find_probability(domain.size(), marked.size());
            double p_found = 1.0 - std::pow(1.0 - per_pass, detail::oip_round_reps(round));
            if (!marked.empty()) {
                double share = prob * p_found / static_cast<double>(marked.size());
                for (int i : marked) run(detail::oip_prune_found(cand, live, i), round + 1, share);
            }
            run(detail::oip_prune_missed(cand, live, domain), round + 1, prob * (1.0 - p_found));
        }
    };

    std::vector<int> live(candidates.size());
    std::iota(live.begin(), live.end(), 0);
    Walker{candidates, x, params.beta_effective, out}.run(live, 1, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Whole-function evaluation through identification: identify the most likely
// on-set string, then test it against the hidden input. A hidden input off
// the on-set breaks the identifier's promise; the equality test is what
// catches that, so its error share is one-sided.

inline constexpr double kVerifyError = 1.0 / 6.0;

inline RunRecord worst_case_evaluate(const Oracle& oracle, const BooleanFunction& f, std::uint64_t seed) {
    if (oracle.domain_size() != f.arity()) throw std::invalid_argument("worst_case_evaluate: size mismatch");
    RunRecord rec;
    rec.algorithm = "worst_case";
    rec.n = f.arity();
    rec.m = f.onset_size();
    rec.seed = seed;
    rec.params = BoundParams::for_problem(rec.n, rec.m);
    if (rec.params.beta_out_of_range) rec.flags.push_back("beta_clamped");

    QueryCounter counter;
    Rng rng(seed);
    auto onset = f.onset();
    auto oip = oip_identify(oracle, onset, rec.params, counter, rng);
    rec.phase_queries["identify"] = counter.count;
    if (oip.fallback) rec.flags.push_back("identify_fallback");
    rec.metrics["rounds"] = oip.rounds;
    rec.metrics["column_rounds"] = oip.column_rounds;
    rec.metrics["sparse_rounds"] = oip.sparse_rounds;

    std::uint64_t before = counter.count;
    bool equal = grover_equality_test(oracle, oip.z, counter, rng, kVerifyError);
    rec.phase_queries["verify"] = counter.count - before;

    BitString x(rec.n, 0);
    for (int i = 0; i < rec.n; ++i) x = x.with_bit(i, oracle.effective_bit(i));
    rec.input_x = x;
    rec.output = equal ? 1 : 0;
    rec.correct = rec.output == (f.value(x) ? 1 : 0);
    rec.queries = counter.count;
    return rec;
}

inline double worst_case_output1_probability(const BooleanFunction& f, const BitString& x) {
    auto onset = f.onset();
    auto params = BoundParams::for_problem(f.arity(), f.onset_size());
    auto dist = oip_outcome_distribution(onset, x, params);
    double p1 = 0.0;
    for (std::size_t k = 0; k < onset.size(); ++k) {
        int ham = hamming(x, onset[k]);
        double accept = ham == 0 ? 1.0 : equality_accept_probability(f.arity(), ham, kVerifyError);
        p1 += dist[k] * accept;
    }
    return p1;
}

inline double worst_case_success_probability(const BooleanFunction& f, const BitString& x) {
    double p1 = worst_case_output1_probability(f, x);
    return f.value(x) ? p1 : 1.0 - p1;
}

// ---------------------------------------------------------------------------
// Evaluation through state discrimination: spend the copy budget on phase
// queries, identify the candidate by measuring, then equality-test the guess.
// Inputs outside the design set land wherever their overlaps point (the
// leftover mass goes to the largest-overlap candidate) and the equality test
// cleans up.

struct AvgCaseModel {
    BooleanFunction f;
    std::vector<BitString> onset;
    BoundParams params;
    CopyChoice choice;
    PgmModel pgm;
    std::vector<std::string> flags;

    static AvgCaseModel build(const BooleanFunction& f) {
        AvgCaseModel model{f, f.onset(), BoundParams::for_problem(f.arity(), f.onset_size()), {}, {}, {}};
        model.choice = choose_copies(model.onset, model.params.copies_cap);
        model.pgm = PgmModel::build(model.onset, model.choice.copies);
        double lemma_bound = std::sqrt(model.params.overlap_bound_sq);
        if (model.choice.degenerate) model.flags.push_back("degenerate_antipodal");
        if (model.params.overlap_bound_vacuous) model.flags.push_back("overlap_bound_vacuous");
        if (model.choice.max_abs_overlap > lemma_bound) model.flags.push_back("overlap_bound_violated");
        if (!model.choice.reached_target) model.flags.push_back("identification_target_missed");
        return model;
    }

    bool passes_overlap_check() const {
        return model_flag_absent("overlap_bound_violated") && model_flag_absent("degenerate_antipodal");
    }

  private:
    bool model_flag_absent(const char* name) const {
        return std::find(flags.begin(), flags.end(), name) == flags.end();
    }
};

namespace detail {

inline std::size_t pgm_best_overlap_index(const PgmModel& pgm, const BitString& x) {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t y = 0; y < pgm.onset.size(); ++y) {
        double mag = std::abs(std::pow(inner_product_psi(x, pgm.onset[y]), pgm.copies));
        if (mag > best_mag) {
            best_mag = mag;
            best = y;
        }
    }
    return best;
}

} // namespace detail

inline RunRecord average_case_evaluate(const Oracle& oracle, const AvgCaseModel& model, std::uint64_t seed) {
    if (oracle.domain_size() != model.f.arity())
        throw std::invalid_argument("average_case_evaluate: size mismatch");
    RunRecord rec;
    rec.algorithm = "average_case";
    rec.n = model.f.arity();
    rec.m = model.f.onset_size();
    rec.seed = seed;
    rec.params = model.params;
    rec.flags = model.flags;
    rec.metrics["copies"] = model.choice.copies;
    rec.metrics["min_pgm_success"] = model.choice.min_success;
    rec.metrics["max_abs_overlap"] = model.choice.max_abs_overlap;

    QueryCounter counter;
    Rng rng(seed);
    for (int c = 0; c < model.choice.copies; ++c) prepare_psi_state(oracle, counter);
    rec.phase_queries["prepare"] = counter.count;

    BitString x(rec.n, 0);
    for (int i = 0; i < rec.n; ++i) x = x.with_bit(i, oracle.effective_bit(i));

    auto outcome = pgm_outcome_distribution(model.pgm, x);
    double u = rng.unit();
    std::size_t picked = detail::pgm_best_overlap_index(model.pgm, x);
    for (std::size_t y = 0; y < outcome.p.size(); ++y) {
        if (u < outcome.p[y]) {
            picked = y;
            break;
        }
        u -= outcome.p[y];
    }
    const BitString& guess = model.onset[picked];

    std::uint64_t before = counter.count;
    bool equal = grover_equality_test(oracle, guess, counter, rng, kVerifyError);
    rec.phase_queries["verify"] = counter.count - before;

    rec.input_x = x;
    rec.output = equal ? 1 : 0;
    rec.correct = rec.output == (model.f.value(x) ? 1 : 0);
    rec.queries = counter.count;
    return rec;
}

inline RunRecord average_case_evaluate(const Oracle& oracle, const BooleanFunction& f, std::uint64_t seed) {
    return average_case_evaluate(oracle, AvgCaseModel::build(f), seed);
}

inline double average_case_output1_probability(const AvgCaseModel& model, const BitString& x) {
    auto outcome = pgm_outcome_distribution(model.pgm, x);
    int n = model.f.arity();
    double p1 = 0.0;
    for (std::size_t y = 0; y < outcome.p.size(); ++y) {
        int ham = hamming(x, model.onset[y]);
        double accept = ham == 0 ? 1.0 : equality_accept_probability(n, ham, kVerifyError);
        p1 += outcome.p[y] * accept;
    }
    if (outcome.inconclusive > 0.0) {
        std::size_t y = detail::pgm_best_overlap_index(model.pgm, x);
        int ham = hamming(x, model.onset[y]);
        double accept = ham == 0 ? 1.0 : equality_accept_probability(n, ham, kVerifyError);
        p1 += outcome.inconclusive * accept;
    }
    return p1;
}

inline double average_case_success_probability(const AvgCaseModel& model, const BitString& x) {
    double p1 = average_case_output1_probability(model, x);
    return model.f.value(x) ? p1 : 1.0 - p1;
}

} // namespace oql
