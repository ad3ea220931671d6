// Batch front door: run an iteration from a problem file, predict the
// convergence limit for a shift, dump the oracle eigendecomposition, or
// regenerate the built-in reference scenarios.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "copower/copower.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw copower::Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw copower::Error("cannot write '" + path + "'");
    out << content;
}

copower::SpectrumSpec spectrum_of(const copower::ProblemDocument& doc) {
    if (doc.spectrum) return *doc.spectrum;
    if (!doc.matrix_s)
        throw copower::Error("this command needs paired eigenvalues: give 'pairs' or both matrices");
    const copower::CommutingPair pair(*doc.matrix_h, *doc.matrix_s);
    const copower::SimultaneousDecomposition dec = copower::simultaneous_eigensolve(pair);
    copower::SpectrumSpec spec;
    for (int i = 0; i < pair.dim(); ++i)
        spec.pairs.emplace_back(dec.e_values[static_cast<std::size_t>(i)],
                                dec.s_values[static_cast<std::size_t>(i)]);
    return spec;
}

int cmd_run(const std::string& problem_path, const std::string& out_path) {
    const copower::ProblemDocument doc = copower::parse_problem(read_file(problem_path));
    const copower::ProblemDocument::Operators ops = doc.build();
    const copower::SymmetricOperator* s_obs = ops.s ? &*ops.s : nullptr;

    copower::IterationTrace trace;
    switch (doc.method) {
        case copower::RunMethod::power:
            trace = copower::power_run(ops.h, doc.config, s_obs);
            break;
        case copower::RunMethod::inverse:
            trace = copower::inverse_run(ops.h, doc.config, s_obs);
            break;
        case copower::RunMethod::rr2x2:
            trace = copower::rr2x2_run(ops.h, doc.config, s_obs);
            break;
        case copower::RunMethod::extended: {
            copower::CommutingPair pair(ops.h, *ops.s);
            trace = copower::extended_run(pair, doc.config);
            break;
        }
    }

    const copower::StateVector start = doc.config.resolved_start(ops.h.dim());
    write_file(out_path, copower::trace_csv_string(ops.h, s_obs, start, trace));

    std::cout << "method:        " << copower::to_string(doc.method) << '\n';
    copower::print_run_summary(std::cout, trace);
    std::cout << "trace written: " << out_path << '\n';

    if (trace.termination == copower::Termination::collapse ||
        trace.termination == copower::Termination::singular_shift) {
        std::cerr << "run ended abnormally: " << copower::to_string(trace.termination) << '\n';
        return 1;
    }
    return 0;
}

int cmd_predict(const std::string& problem_path, double mu) {
    const copower::ProblemDocument doc = copower::parse_problem(read_file(problem_path));
    const copower::SpectrumSpec spec = spectrum_of(doc);
    const copower::ConvergencePrediction pred = copower::predict_limit(spec, mu);

    std::cout << "state        e            s            |e/(s-mu)|\n";
    for (int i = 0; i < spec.dim(); ++i) {
        const bool winner = i == pred.winner_index;
        std::printf("%-5d %12.6g %12.6g %14.6g%s\n", i + 1,
                    spec.pairs[static_cast<std::size_t>(i)].first,
                    spec.pairs[static_cast<std::size_t>(i)].second,
                    pred.factors[static_cast<std::size_t>(i)], winner ? "  <- winner" : "");
    }
    std::printf("winner: state %d (e = %.6g, s = %.6g)\n", pred.winner_index + 1,
                spec.pairs[static_cast<std::size_t>(pred.winner_index)].first,
                spec.pairs[static_cast<std::size_t>(pred.winner_index)].second);
    std::printf("rate_ratio: %.6g\n", pred.rate_ratio);
    if (pred.degenerate()) {
        std::cout << "degenerate prediction; tied states:";
        for (const int i : pred.tied_indices) std::cout << ' ' << i + 1;
        std::cout << '\n';
    }
    return 0;
}

int cmd_oracle(const std::string& problem_path) {
    const copower::ProblemDocument doc = copower::parse_problem(read_file(problem_path));
    const copower::ProblemDocument::Operators ops = doc.build();

    if (ops.s) {
        const copower::CommutingPair pair(ops.h, *ops.s);
        const copower::SimultaneousDecomposition dec = copower::simultaneous_eigensolve(pair);
        std::cout << "simultaneous eigenpairs (ascending in s):\n";
        std::cout << "state        e            s\n";
        for (int i = 0; i < pair.dim(); ++i)
            std::printf("%-5d %12.9g %12.9g\n", i + 1, dec.e_values[static_cast<std::size_t>(i)],
                        dec.s_values[static_cast<std::size_t>(i)]);
        std::printf("decomposition residual: %.3g\n", dec.residual);
        std::cout << "eigenvectors (columns):\n";
        for (int i = 0; i < pair.dim(); ++i) {
            for (int j = 0; j < pair.dim(); ++j)
                std::printf("%15.9g", dec.basis(i, j));
            std::cout << '\n';
        }
    } else {
        const copower::EigenDecomposition dec = copower::jacobi_eigensolve(ops.h);
        std::cout << "eigenvalues of H (ascending):\n";
        for (int i = 0; i < ops.h.dim(); ++i)
            std::printf("%-5d %12.9g\n", i + 1, dec.eigenvalues[static_cast<std::size_t>(i)]);
        std::printf("decomposition residual: %.3g\n", dec.residual);
        std::cout << "eigenvectors (columns):\n";
        for (int i = 0; i < ops.h.dim(); ++i) {
            for (int j = 0; j < ops.h.dim(); ++j)
                std::printf("%15.9g", dec.eigenvectors(i, j));
            std::cout << '\n';
        }
    }
    return 0;
}

int cmd_reproduce(const std::string& which, std::string out_path) {
    copower::ReproduceOutcome outcome;
    if (which == "table1") outcome = copower::reproduce_table1();
    else if (which == "table3") outcome = copower::reproduce_table3();
    else if (which == "fig1") outcome = copower::reproduce_fig1();
    else if (which == "fig2") outcome = copower::reproduce_fig2();
    else throw copower::Error("unknown scenario '" + which + "' (expected table1|table3|fig1|fig2)");

    if (out_path.empty()) out_path = which + ".csv";
    write_file(out_path, outcome.csv);

    for (const copower::CheckResult& c : outcome.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    std::cout << "data written:  " << out_path << '\n';
    return outcome.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterative eigensolvers for commuting symmetric operator pairs"};
    app.require_subcommand(1);

    std::string problem_path;
    std::string out_path;
    double mu = 0.0;
    std::string scenario;

    CLI::App* run = app.add_subcommand("run", "execute the configured iteration, write a trace CSV");
    run->add_option("problem", problem_path, "problem document (JSON)")->required();
    run->add_option("--out", out_path, "trace CSV path (default: trace.csv)");

    CLI::App* predict = app.add_subcommand("predict", "predict the convergence limit for a shift");
    predict->add_option("problem", problem_path, "problem document (JSON)")->required();
    predict->add_option("--mu", mu, "spectral shift")->required();

    CLI::App* oracle = app.add_subcommand("oracle", "dump the full eigendecomposition");
    oracle->add_option("problem", problem_path, "problem document (JSON)")->required();

    CLI::App* reproduce = app.add_subcommand("reproduce", "regenerate a built-in reference scenario");
    reproduce->add_option("scenario", scenario, "table1|table3|fig1|fig2")->required();
    reproduce->add_option("--out", out_path, "CSV path (default: <scenario>.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(problem_path, out_path.empty() ? "trace.csv" : out_path);
        if (predict->parsed()) return cmd_predict(problem_path, mu);
        if (oracle->parsed()) return cmd_oracle(problem_path);
        if (reproduce->parsed()) return cmd_reproduce(scenario, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
