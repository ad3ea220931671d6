#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "copower/operators.hpp"
#include "copower/solvers.hpp"

namespace copower {

// ---------------------------------------------------------------------------
// Configuration and trace types
// ---------------------------------------------------------------------------

enum class RitzMode { lowest, highest };

struct IterationConfig {
    double preselected_s = 1.0; // target eigenvalue s of S (extended scheme)
    double shift_mu = 0.0;      // spectral shift mu
    double residual_tolerance = 1e-10;
    int max_full_steps = 10000;
    SolveOptions solve_options{};
    std::optional<StateVector> start; // absent: all ones, normalized
    RitzMode rr2x2_mode = RitzMode::lowest;
    bool warm_start_solves = false; // reuse the previous solution as sweep start

    void validate() const {
        if (!(residual_tolerance > 0.0))
            throw ContractError("IterationConfig: residual_tolerance must be > 0");
        if (max_full_steps < 0)
            throw ContractError("IterationConfig: max_full_steps must be >= 0");
        solve_options.validate();
    }

    StateVector resolved_start(int dim) const {
        if (!start) return StateVector::uniform(dim);
        if (start->dim() != dim)
            throw ContractError("IterationConfig: start vector dim " + std::to_string(start->dim()) +
                                " vs operator dim " + std::to_string(dim));
        return *start;
    }
};

enum class Phase { start, power, inverse, rr2x2 };

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::start: return "start";
        case Phase::power: return "power";
        case Phase::inverse: return "inverse";
        case Phase::rr2x2: return "rr2x2";
    }
    return "?";
}

struct WorkCounters {
    long matvecs = 0;
    long solves = 0;
};

/// One recorded half step. Estimates are Rayleigh quotients; `growth` is the
/// raw normalization constant of the half step (a norm, sign-less) and stays
/// out of the CSV schema.
struct StepRecord {
    int full_step_index;
    Phase phase;
    StateVector state;
    double e_estimate;  // <v|H|v>
    double s_estimate;  // <v|S|v>, 0 when no S is observed
    double h_residual;  // ||Hv - e v||
    double s_residual;  // ||Sv - s_estimate v||
    double p2n;         // ||Hv||
    long matvec_count;  // cumulative
    long solve_count;   // cumulative
    double growth;
    double solve_residual; // relative residual of this half's solve (0 otherwise)
    int solve_sweeps;
};

enum class Termination { converged, converged_elsewhere, max_steps, collapse, singular_shift };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::converged_elsewhere: return "converged-elsewhere";
        case Termination::max_steps: return "max-steps";
        case Termination::collapse: return "collapse";
        case Termination::singular_shift: return "singular-shift";
    }
    return "?";
}

struct IterationTrace {
    std::vector<StepRecord> records;
    bool converged = false;
    Termination termination = Termination::max_steps;
};

namespace detail {

// Diagnostic products here are bookkeeping, not counted method work: the
// power half's H|n> is reused and the rest would be free in a production
// loop that tracks estimates incrementally.
inline StepRecord make_record(const SymmetricOperator& h, const SymmetricOperator* s_obs,
                              int full_step, Phase phase, StateVector state,
                              const WorkCounters& work, double growth,
                              double solve_residual, int solve_sweeps) {
    const Vector hv = h.apply(state.components());
    const double e = dot(state.components(), hv);
    const double h_res = norm2(subtracted(hv, scaled(state.components(), e)));
    const double p2n = norm2(hv);
    double s_est = 0.0;
    double s_res = 0.0;
    if (s_obs != nullptr) {
        const Vector sv = s_obs->apply(state.components());
        s_est = dot(state.components(), sv);
        s_res = norm2(subtracted(sv, scaled(state.components(), s_est)));
    }
    return StepRecord{full_step, phase,    std::move(state), e,
                      s_est,     h_res,    s_res,            p2n,
                      work.matvecs, work.solves, growth, solve_residual, solve_sweeps};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Single steps
// ---------------------------------------------------------------------------

/// One power step: v_next = Hv/||Hv||, returns (||Hv||, v_next).
inline std::pair<double, StateVector> power_step(const SymmetricOperator& h, const StateVector& v) {
    auto [next, growth] = normalize(h.apply(v));
    return {growth, std::move(next)};
}

/// One shifted inverse-iteration step: solve (A - mu E) x = v and normalize.
/// growth = ||x||, which approaches 1/|sigma - mu| near convergence.
inline std::pair<double, StateVector> inverse_step(const SymmetricOperator& a, double mu,
                                                   const StateVector& v,
                                                   const SolveOptions& opts = {}) {
    const SolveReport report = solve(shifted(a, mu), v.components(), opts);
    auto [next, growth] = normalize(report.solution);
    return {growth, std::move(next)};
}

/// Rayleigh-Ritz on span{v, Hv}; returns the selected Ritz value and vector.
/// A (numerically) invariant direction is a fixed point and is returned
/// unchanged with its Rayleigh quotient.
inline std::pair<double, StateVector> rr2x2_step(const SymmetricOperator& h, const StateVector& v,
                                                 RitzMode mode = RitzMode::lowest) {
    const Vector w = h.apply(v);
    const double wnorm = norm2(w);
    if (!(wnorm > 1e-300))
        throw ZeroVectorError("rr2x2_step: H v is numerically zero");
    const double t11 = dot(v.components(), w);

    Vector u = subtracted(w, scaled(v.components(), t11));
    const double unorm = norm2(u);
    if (unorm <= 1e-12 * wnorm)
        return {t11, v}; // eigendirection
    for (double& c : u) c /= unorm;

    const Vector hu = h.apply(u);
    const double t12 = dot(u, w); // == <u|H|v>
    const double t22 = dot(u, hu);

    // Jacobi-rotation eigenpair of [[t11, t12], [t12, t22]]; the rotation
    // form stays accurate when t12 is many orders below the gap, where the
    // (value - t11) eigenvector formula cancels to zero and stalls.
    double coeff_v;
    double coeff_u;
    double value;
    if (t12 == 0.0) {
        const bool keep_v = (mode == RitzMode::lowest) ? (t11 <= t22) : (t11 >= t22);
        coeff_v = keep_v ? 1.0 : 0.0;
        coeff_u = keep_v ? 0.0 : 1.0;
        value = keep_v ? t11 : t22;
    } else {
        const double tau = (t22 - t11) / (2.0 * t12);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double value_v = t11 - t * t12; // Ritz pair along (c, -s)
        const double value_u = t22 + t * t12; // Ritz pair along (s, c)
        const bool pick_v = (mode == RitzMode::lowest) ? (value_v <= value_u) : (value_v >= value_u);
        coeff_v = pick_v ? c : s;
        coeff_u = pick_v ? -s : c;
        value = pick_v ? value_v : value_u;
    }
    Vector next(v.components().size());
    for (std::size_t i = 0; i < next.size(); ++i)
        next[i] = coeff_v * v.components()[i] + coeff_u * u[i];
    return {value, normalize(next).first};
}

/// One full extended step: power half w = Hv, then the inverse half solving
/// (S - mu E) x = (s - mu) w. Both halves are recorded.
struct ExtendedStepResult {
    StateVector next;
    StepRecord power_half;
    StepRecord inverse_half;
};

inline ExtendedStepResult extended_step(const CommutingPair& pair, const IterationConfig& config,
                                        const StateVector& v, WorkCounters& work,
                                        int full_step_index = 1) {
    config.validate();
    const double s = config.preselected_s;
    const double mu = config.shift_mu;
    if (s - mu == 0.0)
        throw ContractError("extended_step: preselected s equals shift mu");

    const Vector w = pair.H().apply(v);
    ++work.matvecs;
    auto [w_hat, w_growth] = normalize(w);
    StepRecord power_half = detail::make_record(pair.H(), &pair.S(), full_step_index, Phase::power,
                                                w_hat, work, w_growth, 0.0, 0);

    const SolveReport report = solve(shifted(pair.S(), mu),
                                     scaled(w_hat.components(), s - mu), config.solve_options);
    ++work.solves;
    if (config.solve_options.method != SolveMethod::direct_gauss)
        work.matvecs += report.sweeps_used;
    auto [x_hat, x_growth] = normalize(report.solution);
    StepRecord inverse_half = detail::make_record(pair.H(), &pair.S(), full_step_index, Phase::inverse,
                                                  x_hat, work, x_growth,
                                                  report.relative_residual, report.sweeps_used);

    return {std::move(x_hat), std::move(power_half), std::move(inverse_half)};
}

// ---------------------------------------------------------------------------
// Run loops
// ---------------------------------------------------------------------------

namespace detail {

struct HalfStepOutcome {
    StateVector state;
    double growth;
    double solve_residual;
    int solve_sweeps;
};

template <typename StepFn>
IterationTrace run_simple(const SymmetricOperator& h, const SymmetricOperator* s_obs,
                          const IterationConfig& config, Phase phase, StepFn&& step) {
    config.validate();
    StateVector v = config.resolved_start(h.dim());
    IterationTrace trace;
    WorkCounters work;
    for (int k = 1; k <= config.max_full_steps; ++k) {
        try {
            HalfStepOutcome out = step(v, work);
            v = std::move(out.state);
            trace.records.push_back(make_record(h, s_obs, k, phase, v, work, out.growth,
                                                out.solve_residual, out.solve_sweeps));
        } catch (const SingularSystemError&) {
            trace.termination = Termination::singular_shift;
            return trace;
        } catch (const ZeroVectorError&) {
            trace.termination = Termination::collapse;
            return trace;
        }
        if (trace.records.back().h_residual <= config.residual_tolerance) {
            trace.converged = true;
            trace.termination = Termination::converged;
            return trace;
        }
    }
    trace.termination = Termination::max_steps;
    return trace;
}

} // namespace detail

/// Plain power iteration on H until ||Hv - <H>v|| meets the tolerance.
inline IterationTrace power_run(const SymmetricOperator& h, const IterationConfig& config,
                                const SymmetricOperator* s_observer = nullptr) {
    return detail::run_simple(h, s_observer, config, Phase::power,
                              [&](const StateVector& v, WorkCounters& work) {
                                  auto [growth, next] = power_step(h, v);
                                  ++work.matvecs;
                                  return detail::HalfStepOutcome{std::move(next), growth, 0.0, 0};
                              });
}

/// Shifted inverse iteration on A (one linear solve per step).
inline IterationTrace inverse_run(const SymmetricOperator& a, const IterationConfig& config,
                                  const SymmetricOperator* s_observer = nullptr) {
    const SymmetricOperator a_mu = shifted(a, config.shift_mu);
    return detail::run_simple(a, s_observer, config, Phase::inverse,
                              [&](const StateVector& v, WorkCounters& work) {
                                  const SolveReport report = solve(a_mu, v.components(), config.solve_options);
                                  ++work.solves;
                                  if (config.solve_options.method != SolveMethod::direct_gauss)
                                      work.matvecs += report.sweeps_used;
                                  auto [next, growth] = normalize(report.solution);
                                  return detail::HalfStepOutcome{std::move(next), growth,
                                                                 report.relative_residual,
                                                                 report.sweeps_used};
                              });
}

/// Repeated 2x2 Rayleigh-Ritz steps (two matrix products per step).
inline IterationTrace rr2x2_run(const SymmetricOperator& h, const IterationConfig& config,
                                const SymmetricOperator* s_observer = nullptr) {
    return detail::run_simple(h, s_observer, config, Phase::rr2x2,
                              [&](const StateVector& v, WorkCounters& work) {
                                  auto [value, next] = rr2x2_step(h, v, config.rr2x2_mode);
                                  (void)value;
                                  work.matvecs += 2;
                                  return detail::HalfStepOutcome{std::move(next), 0.0, 0.0, 0};
                              });
}

/// The coupled scheme. Convergence requires both the H-residual and the
/// residual against the *preselected* s to vanish; if the self-residuals
/// vanish while s_estimate sits away from the pre-selection by more than
/// 100x the tolerance, the run stops as converged-elsewhere.
inline IterationTrace extended_run(const CommutingPair& pair, const IterationConfig& config) {
    config.validate();
    if (config.preselected_s - config.shift_mu == 0.0)
        throw ContractError("extended_run: preselected s equals shift mu");
    StateVector v = config.resolved_start(pair.dim());
    IterationTrace trace;
    WorkCounters work;
    IterationConfig step_config = config;
    const double tol = config.residual_tolerance;

    for (int k = 1; k <= config.max_full_steps; ++k) {
        try {
            ExtendedStepResult step = extended_step(pair, step_config, v, work, k);
            v = step.next;
            if (config.warm_start_solves) {
                // scale-free warm start: consecutive solutions are nearly parallel
                step_config.solve_options.initial_guess =
                    scaled(v.components(), step.inverse_half.growth);
            }
            trace.records.push_back(std::move(step.power_half));
            trace.records.push_back(std::move(step.inverse_half));
        } catch (const SingularSystemError&) {
            trace.termination = Termination::singular_shift;
            return trace;
        } catch (const ZeroVectorError&) {
            trace.termination = Termination::collapse;
            return trace;
        }
        const StepRecord& rec = trace.records.back();
        const Vector sv = pair.S().apply(v.components());
        const double presel_residual =
            norm2(subtracted(sv, scaled(v.components(), config.preselected_s)));
        if (std::max(rec.h_residual, presel_residual) <= tol) {
            trace.converged = true;
            trace.termination = Termination::converged;
            return trace;
        }
        if (rec.h_residual <= tol && rec.s_residual <= tol &&
            std::abs(rec.s_estimate - config.preselected_s) > 100.0 * tol) {
            trace.termination = Termination::converged_elsewhere;
            return trace;
        }
    }
    trace.termination = Termination::max_steps;
    return trace;
}

} // namespace copower
