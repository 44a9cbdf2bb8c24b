#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "onsetqlab/qsim.hpp"

namespace oql {

// Square-root-measurement statistics for the signed index states of an
// on-set, raised to a copy count. Product-state geometry is fully determined
// by pairwise overlaps, so everything is computed on the M x M Gram matrix
// G_{xy} = overlap(x,y)^copies rather than on N^copies amplitudes.
struct PgmModel {
    int n = 0;
    int copies = 1;
    std::vector<BitString> onset;
    Eigen::MatrixXd gram;
    Eigen::MatrixXd sqrt_gram;     // G^{1/2}
    Eigen::MatrixXd inv_sqrt_gram; // pseudo-inverse of G^{1/2} on the support
    std::vector<double> success;   // ((G^{1/2})_{yy})^2

    static PgmModel build(const std::vector<BitString>& onset, int copies);
};

namespace detail {

struct GramRoots {
    Eigen::MatrixXd sqrt;
    Eigen::MatrixXd inv_sqrt;
};

inline GramRoots gram_roots(const Eigen::MatrixXd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw std::runtime_error("pgm: eigendecomposition failed");
    Eigen::VectorXd ev = solver.eigenvalues();
    double top = std::max(ev.maxCoeff(), 0.0);
    for (int i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-9) throw std::runtime_error("pgm: Gram matrix is not positive semidefinite");
        if (ev[i] < 0) ev[i] = 0;
    }
    Eigen::VectorXd root = ev.cwiseSqrt();
    Eigen::VectorXd inv_root(ev.size());
    for (int i = 0; i < ev.size(); ++i)
        inv_root[i] = ev[i] > top * 1e-12 ? 1.0 / root[i] : 0.0;
    const Eigen::MatrixXd& v = solver.eigenvectors();
    return {v * root.asDiagonal() * v.transpose(), v * inv_root.asDiagonal() * v.transpose()};
}

} // namespace detail

inline std::vector<double> pgm_success_from_gram(const Eigen::MatrixXd& gram) {
    Eigen::MatrixXd root = detail::gram_roots(gram).sqrt;
    std::vector<double> out(static_cast<std::size_t>(gram.rows()));
    for (int i = 0; i < gram.rows(); ++i) out[static_cast<std::size_t>(i)] = root(i, i) * root(i, i);
    return out;
}

inline Eigen::MatrixXd psi_gram(const std::vector<BitString>& onset, int copies) {
    const int m = static_cast<int>(onset.size());
    Eigen::MatrixXd gram(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            gram(i, j) = std::pow(inner_product_psi(onset[static_cast<std::size_t>(i)],
                                                    onset[static_cast<std::size_t>(j)]),
                                  copies);
    return gram;
}

inline PgmModel PgmModel::build(const std::vector<BitString>& onset, int copies) {
    if (onset.empty()) throw std::invalid_argument("pgm: empty on-set");
    if (copies < 1) throw std::invalid_argument("pgm: copies must be >= 1");
    for (std::size_t i = 0; i < onset.size(); ++i)
        for (std::size_t j = i + 1; j < onset.size(); ++j)
            if (onset[i] == onset[j]) throw std::invalid_argument("pgm: duplicate design state");
    PgmModel model;
    model.n = onset.front().length();
    model.copies = copies;
    model.onset = onset;
    model.gram = psi_gram(onset, copies);
    auto roots = detail::gram_roots(model.gram);
    model.sqrt_gram = std::move(roots.sqrt);
    model.inv_sqrt_gram = std::move(roots.inv_sqrt);
    model.success.resize(onset.size());
    for (std::size_t i = 0; i < onset.size(); ++i) {
        double v = model.sqrt_gram(static_cast<int>(i), static_cast<int>(i));
        model.success[i] = v * v;
    }
    return model;
}

inline std::vector<double> pgm_success_probabilities(const std::vector<BitString>& onset, int copies) {
    return PgmModel::build(onset, copies).success;
}

// Measurement statistics for an arbitrary input string: overlaps with the
// design states determine the conclusive outcome weights; whatever mass the
// input carries outside the design span lands on the inconclusive outcome.
struct PgmOutcome {
    std::vector<double> p;
    double inconclusive = 0.0;
};

inline PgmOutcome pgm_outcome_distribution(const PgmModel& model, const BitString& x) {
    if (x.length() != model.n) throw std::invalid_argument("pgm: input length mismatch");
    const int m = static_cast<int>(model.onset.size());
    Eigen::VectorXd g(m);
    for (int y = 0; y < m; ++y)
        g[y] = std::pow(inner_product_psi(x, model.onset[static_cast<std::size_t>(y)]), model.copies);
    Eigen::VectorXd amp = model.inv_sqrt_gram * g;
    PgmOutcome out;
    out.p.resize(static_cast<std::size_t>(m));
    double total = 0.0;
    for (int y = 0; y < m; ++y) {
        out.p[static_cast<std::size_t>(y)] = amp[y] * amp[y];
        total += out.p[static_cast<std::size_t>(y)];
    }
    out.inconclusive = std::max(0.0, 1.0 - total);
    return out;
}

// Smallest copy count reaching the identification target, capped by the
// problem-size formula. Pairs at overlap magnitude 1 (antipodal strings) can
// never be separated by these states; that case is flagged, not served.
struct CopyChoice {
    int copies = 1;
    int cap = 1;
    bool reached_target = false;
    double min_success = 0.0;
    double max_abs_overlap = 0.0;
    bool degenerate = false;
};

inline constexpr double kIdentificationTarget = 5.0 / 6.0;

inline CopyChoice choose_copies(const std::vector<BitString>& onset, int cap) {
    if (onset.empty()) throw std::invalid_argument("choose_copies: empty on-set");
    CopyChoice choice;
    choice.cap = std::max(1, cap);
    for (std::size_t i = 0; i < onset.size(); ++i)
        for (std::size_t j = i + 1; j < onset.size(); ++j)
            choice.max_abs_overlap = std::max(choice.max_abs_overlap,
                                              std::abs(inner_product_psi(onset[i], onset[j])));
    if (onset.size() == 1) {
        choice.reached_target = true;
        choice.min_success = 1.0;
        return choice;
    }
    choice.degenerate = choice.max_abs_overlap >= 1.0 - 1e-12;
    for (int m = 1; m <= choice.cap; ++m) {
        auto success = pgm_success_probabilities(onset, m);
        choice.copies = m;
        choice.min_success = *std::min_element(success.begin(), success.end());
        if (choice.min_success >= kIdentificationTarget) {
            choice.reached_target = true;
            break;
        }
    }
    return choice;
}

} // namespace oql
