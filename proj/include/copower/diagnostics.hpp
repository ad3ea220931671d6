#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "copower/iteration.hpp"
#include "copower/spectrum.hpp"

namespace copower {

// ---------------------------------------------------------------------------
// Convergence-limit prediction
// ---------------------------------------------------------------------------

/// Which simultaneous eigenstate the extended iteration will converge to:
/// the one maximizing |e_i / (s_i - mu)|. rate_ratio (second-largest factor
/// over largest) is the asymptotic per-step contraction of the runner-up.
struct ConvergencePrediction {
    int winner_index = 0;        // zero-based position in the spectrum
    std::vector<double> factors; // |e_i / (s_i - mu)|
    double rate_ratio = 0.0;     // in [0, 1]
    std::vector<int> tied_indices; // nonempty only for a degenerate prediction

    bool degenerate() const { return tied_indices.size() > 1; }
};

inline ConvergencePrediction predict_limit(const SpectrumSpec& spec, double mu) {
    if (spec.pairs.empty()) throw ContractError("predict_limit: empty spectrum");
    const int n = spec.dim();

    ConvergencePrediction pred;
    pred.factors.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double gap = spec.pairs[static_cast<std::size_t>(i)].second - mu;
        if (std::abs(gap) <= 1e-12)
            throw SingularShiftError("predict_limit: shift " + detail::format_double(mu, "%.6g") +
                                     " coincides with s eigenvalue of state " + std::to_string(i + 1));
        pred.factors[static_cast<std::size_t>(i)] =
            std::abs(spec.pairs[static_cast<std::size_t>(i)].first / gap);
    }

    int winner = 0;
    for (int i = 1; i < n; ++i)
        if (pred.factors[static_cast<std::size_t>(i)] > pred.factors[static_cast<std::size_t>(winner)])
            winner = i;
    const double fmax = pred.factors[static_cast<std::size_t>(winner)];

    double runner_up = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = pred.factors[static_cast<std::size_t>(i)];
        if (fmax - f <= 1e-12 * fmax)
            pred.tied_indices.push_back(i);
        else
            runner_up = std::max(runner_up, f);
    }
    pred.winner_index = pred.tied_indices.front();
    if (pred.tied_indices.size() > 1)
        pred.rate_ratio = 1.0;
    else if (n == 1)
        pred.rate_ratio = 0.0;
    else
        pred.rate_ratio = (fmax > 0.0) ? runner_up / fmax : 1.0;
    if (pred.tied_indices.size() == 1) pred.tied_indices.clear();
    return pred;
}

// ---------------------------------------------------------------------------
// Pseudo-convergence detection
// ---------------------------------------------------------------------------

struct PseudoConvergenceCriterion {
    int window = 5;
    double value_eps = 1e-3;
    double residual_floor = 1e-2;
};

struct FlaggedWindow {
    int start_step = 0; // full_step_index of the first record in the window
    int end_step = 0;   // and of the last
};

struct PseudoConvergenceReport {
    std::vector<FlaggedWindow> flagged_windows;
    PseudoConvergenceCriterion criterion;
};

/// Scans the power-half eigenvalue estimates for stretches where the value
/// drifts by at most value_eps while the H-residual stays at or above
/// residual_floor: the estimate looks settled but the iterate is nowhere
/// near an eigenvector. Windows shorter than `window` are not reported.
inline PseudoConvergenceReport detect_pseudo_convergence(const IterationTrace& trace,
                                                         int window = 5,
                                                         double value_eps = 1e-3,
                                                         double residual_floor = 1e-2) {
    if (window < 2) throw ContractError("detect_pseudo_convergence: window must be >= 2");
    PseudoConvergenceReport report;
    report.criterion = {window, value_eps, residual_floor};

    std::vector<const StepRecord*> series;
    for (const StepRecord& rec : trace.records)
        if (rec.phase == Phase::power) series.push_back(&rec);
    const int n = static_cast<int>(series.size());

    int i = 0;
    while (i < n) {
        if (series[static_cast<std::size_t>(i)]->h_residual < residual_floor) {
            ++i;
            continue;
        }
        double lo = series[static_cast<std::size_t>(i)]->e_estimate;
        double hi = lo;
        int j = i;
        while (j + 1 < n) {
            const StepRecord* next = series[static_cast<std::size_t>(j + 1)];
            if (next->h_residual < residual_floor) break;
            const double nlo = std::min(lo, next->e_estimate);
            const double nhi = std::max(hi, next->e_estimate);
            if (nhi - nlo > value_eps) break;
            lo = nlo;
            hi = nhi;
            ++j;
        }
        if (j - i + 1 >= window)
            report.flagged_windows.push_back({series[static_cast<std::size_t>(i)]->full_step_index,
                                              series[static_cast<std::size_t>(j)]->full_step_index});
        i = j + 1;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Work accounting
// ---------------------------------------------------------------------------

struct CostSummary {
    long matvecs = 0;
    long solves = 0;
    int full_steps = 0;
};

inline CostSummary cost_summary(const IterationTrace& trace) {
    if (trace.records.empty()) return {};
    const StepRecord& last = trace.records.back();
    return {last.matvec_count, last.solve_count, last.full_step_index};
}

} // namespace copower
