#pragma once

#include <ostream>
#include <sstream>
#include <string>

#include "copower/diagnostics.hpp"
#include "copower/iteration.hpp"

namespace copower {

inline constexpr const char* kTraceCsvHeader =
    "full_step,phase,e_estimate,s_estimate,h_residual,s_residual,p2n,matvecs,solves";

namespace detail {

inline void write_csv_row(std::ostream& os, int full_step, Phase phase, double e, double s,
                          double h_res, double s_res, double p2n, long matvecs, long solves) {
    os << full_step << ',' << to_string(phase) << ',' << format_double(e) << ','
       << format_double(s) << ',' << format_double(h_res) << ',' << format_double(s_res) << ','
       << format_double(p2n) << ',' << matvecs << ',' << solves << '\n';
}

} // namespace detail

/// Writes the pinned trace schema: a synthesized start row followed by one
/// row per recorded half step. Floating values carry 17 significant digits
/// for exact round-trips.
inline void write_trace_csv(std::ostream& os, const SymmetricOperator& h,
                            const SymmetricOperator* s, const StateVector& start,
                            const IterationTrace& trace) {
    os << kTraceCsvHeader << '\n';
    const WorkCounters zero;
    const StepRecord start_rec = detail::make_record(h, s, 0, Phase::start, start, zero, 0.0, 0.0, 0);
    detail::write_csv_row(os, 0, Phase::start, start_rec.e_estimate, start_rec.s_estimate,
                          start_rec.h_residual, start_rec.s_residual, start_rec.p2n, 0, 0);
    for (const StepRecord& rec : trace.records)
        detail::write_csv_row(os, rec.full_step_index, rec.phase, rec.e_estimate, rec.s_estimate,
                              rec.h_residual, rec.s_residual, rec.p2n, rec.matvec_count,
                              rec.solve_count);
}

inline std::string trace_csv_string(const SymmetricOperator& h, const SymmetricOperator* s,
                                    const StateVector& start, const IterationTrace& trace) {
    std::ostringstream os;
    write_trace_csv(os, h, s, start, trace);
    return os.str();
}

/// Human-readable run summary for standard output.
inline void print_run_summary(std::ostream& os, const IterationTrace& trace) {
    const CostSummary cost = cost_summary(trace);
    os << "termination:   " << to_string(trace.termination) << '\n'
       << "full steps:    " << cost.full_steps << '\n'
       << "matvecs:       " << cost.matvecs << '\n'
       << "solves:        " << cost.solves << '\n';
    if (!trace.records.empty()) {
        const StepRecord& last = trace.records.back();
        os << "e_estimate:    " << detail::format_double(last.e_estimate, "%.12g") << '\n'
           << "s_estimate:    " << detail::format_double(last.s_estimate, "%.12g") << '\n'
           << "h_residual:    " << detail::format_double(last.h_residual, "%.6g") << '\n'
           << "s_residual:    " << detail::format_double(last.s_residual, "%.6g") << '\n';
    }
}

} // namespace copower
