#pragma once

#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "copower/iteration.hpp"
#include "copower/spectrum.hpp"

namespace copower {

/// Malformed or inconsistent problem document.
class ProblemFormatError : public Error {
public:
    using Error::Error;
};

enum class RunMethod { power, inverse, rr2x2, extended };

inline const char* to_string(RunMethod m) {
    switch (m) {
        case RunMethod::power: return "power";
        case RunMethod::inverse: return "inverse";
        case RunMethod::rr2x2: return "rr2x2";
        case RunMethod::extended: return "extended";
    }
    return "?";
}

/// A parsed problem file: either a declared spectrum or explicit matrices,
/// plus the method and iteration settings. Operators are materialized by
/// build().
struct ProblemDocument {
    std::optional<SpectrumSpec> spectrum;
    std::optional<SymmetricOperator> matrix_h;
    std::optional<SymmetricOperator> matrix_s;
    RunMethod method = RunMethod::power;
    IterationConfig config{};

    struct Operators {
        SymmetricOperator h;
        std::optional<SymmetricOperator> s;
        std::optional<Matrix> basis; // eigenbasis when built from a spectrum
    };

    int dim() const {
        if (spectrum) return spectrum->dim();
        return matrix_h ? matrix_h->dim() : 0;
    }

    Operators build() const {
        if (spectrum) {
            auto [pair, basis] = build_commuting_pair(*spectrum);
            return Operators{pair.H(), pair.S(), std::move(basis)};
        }
        return Operators{*matrix_h, matrix_s, std::nullopt};
    }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const char* field) {
    if (!j.contains(field))
        throw ProblemFormatError(std::string("problem document: missing field '") + field + "'");
    if (!j.at(field).is_number())
        throw ProblemFormatError(std::string("problem document: field '") + field + "' must be a number");
    return j.at(field).get<double>();
}

inline SymmetricOperator parse_matrix(const nlohmann::json& j, const char* field) {
    const auto& m = j.at(field);
    if (!m.is_array() || m.empty())
        throw ProblemFormatError(std::string("problem document: '") + field +
                                 "' must be a nonempty array of rows");
    std::vector<Vector> rows;
    for (const auto& row : m) {
        if (!row.is_array())
            throw ProblemFormatError(std::string("problem document: '") + field +
                                     "' rows must be arrays");
        rows.push_back(row.get<Vector>());
    }
    try {
        return SymmetricOperator::from_rows(rows);
    } catch (const ContractError& e) {
        throw ProblemFormatError(std::string("problem document: '") + field + "': " + e.what());
    }
}

} // namespace detail

namespace detail {
ProblemDocument parse_problem_object(const nlohmann::json& j);
} // namespace detail

/// Parses and validates a JSON problem document. Defaults: start vector all
/// ones (normalized), tolerance 1e-10, direct-gauss solver, 10000 steps.
inline ProblemDocument parse_problem(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ProblemFormatError(std::string("problem document: invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ProblemFormatError("problem document: top level must be an object");
    try {
        return detail::parse_problem_object(j);
    } catch (const nlohmann::json::exception& e) {
        throw ProblemFormatError(std::string("problem document: ") + e.what());
    }
}

namespace detail {

inline ProblemDocument parse_problem_object(const nlohmann::json& j) {
    ProblemDocument doc;

    const bool has_pairs = j.contains("pairs");
    const bool has_matrices = j.contains("matrix_h") || j.contains("matrix_s");
    if (has_pairs && has_matrices)
        throw ProblemFormatError("problem document: give either 'pairs' or explicit matrices, not both");
    if (!has_pairs && !j.contains("matrix_h"))
        throw ProblemFormatError("problem document: missing field 'pairs' (or 'matrix_h')");

    if (has_pairs) {
        const auto& pairs = j.at("pairs");
        if (!pairs.is_array() || pairs.empty())
            throw ProblemFormatError("problem document: 'pairs' must be a nonempty array of [e, s]");
        SpectrumSpec spec;
        for (const auto& p : pairs) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ProblemFormatError("problem document: each entry of 'pairs' must be [e, s]");
            spec.pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        if (j.contains("rotation_seed")) {
            if (!j.at("rotation_seed").is_number_integer() ||
                j.at("rotation_seed").get<long long>() < 0)
                throw ProblemFormatError(
                    "problem document: 'rotation_seed' must be a nonnegative integer");
            spec.rotation_seed = j.at("rotation_seed").get<std::uint64_t>();
        }
        doc.spectrum = std::move(spec);
    } else {
        doc.matrix_h = detail::parse_matrix(j, "matrix_h");
        if (j.contains("matrix_s")) {
            doc.matrix_s = detail::parse_matrix(j, "matrix_s");
            if (doc.matrix_s->dim() != doc.matrix_h->dim())
                throw ProblemFormatError("problem document: matrix_h and matrix_s dimensions differ");
            const double comm = commutator_norm(*doc.matrix_h, *doc.matrix_s);
            if (comm > 1e-10)
                throw ProblemFormatError("problem document: H and S do not commute (commutator norm " +
                                         detail::format_double(comm, "%.6g") + ")");
        }
    }

    const int dim = doc.dim();
    if (j.contains("dim")) {
        if (!j.at("dim").is_number_integer() || j.at("dim").get<int>() != dim)
            throw ProblemFormatError("problem document: 'dim' does not match the declared problem (" +
                                     std::to_string(dim) + ")");
    }

    if (!j.contains("method"))
        throw ProblemFormatError("problem document: missing field 'method'");
    const std::string method = j.at("method").get<std::string>();
    if (method == "power") doc.method = RunMethod::power;
    else if (method == "inverse") doc.method = RunMethod::inverse;
    else if (method == "rr2x2") doc.method = RunMethod::rr2x2;
    else if (method == "extended") doc.method = RunMethod::extended;
    else throw ProblemFormatError("problem document: unknown method '" + method +
                                  "' (expected power|inverse|rr2x2|extended)");

    IterationConfig cfg;
    if (j.contains("tolerance")) {
        cfg.residual_tolerance = detail::require_number(j, "tolerance");
        if (!(cfg.residual_tolerance > 0.0))
            throw ProblemFormatError("problem document: 'tolerance' must be > 0");
    }
    if (j.contains("max_steps")) {
        if (!j.at("max_steps").is_number_integer() || j.at("max_steps").get<long>() < 0)
            throw ProblemFormatError("problem document: 'max_steps' must be a nonnegative integer");
        cfg.max_full_steps = j.at("max_steps").get<int>();
    }
    if (j.contains("solver")) {
        const std::string solver = j.at("solver").get<std::string>();
        if (solver == "direct-gauss") cfg.solve_options.method = SolveMethod::direct_gauss;
        else if (solver == "jacobi") cfg.solve_options.method = SolveMethod::jacobi;
        else if (solver == "gauss-seidel") cfg.solve_options.method = SolveMethod::gauss_seidel;
        else throw ProblemFormatError("problem document: unknown solver '" + solver +
                                      "' (expected direct-gauss|jacobi|gauss-seidel)");
    }

    if (doc.method == RunMethod::extended) {
        cfg.preselected_s = detail::require_number(j, "preselected_s");
        cfg.shift_mu = detail::require_number(j, "shift_mu");
        if (cfg.preselected_s - cfg.shift_mu == 0.0)
            throw ProblemFormatError("problem document: preselected_s equals shift_mu");
        if (has_pairs == false && !doc.matrix_s)
            throw ProblemFormatError("problem document: method 'extended' requires 'matrix_s'");
    } else if (j.contains("shift_mu")) {
        cfg.shift_mu = detail::require_number(j, "shift_mu");
    } else if (doc.method == RunMethod::inverse) {
        throw ProblemFormatError("problem document: method 'inverse' requires field 'shift_mu'");
    }

    if (j.contains("start")) {
        const auto& st = j.at("start");
        if (!st.is_array() || static_cast<int>(st.size()) != dim)
            throw ProblemFormatError("problem document: 'start' must be an array of length " +
                                     std::to_string(dim));
        try {
            cfg.start = StateVector::normalized(st.get<Vector>());
        } catch (const ZeroVectorError&) {
            throw ProblemFormatError("problem document: 'start' is numerically the zero vector");
        }
    }

    doc.config = std::move(cfg);
    return doc;
}

} // namespace detail

} // namespace copower
