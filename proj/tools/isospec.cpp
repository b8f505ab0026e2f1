#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "job.hpp"

int main(int argc, char** argv) {
    namespace ic = isospec::cli;

    CLI::App app{"Forward and inverse spectral computations for periodic discrete Schroedinger operators.\n"
                 "Reads a JSON job from --input or standard input and writes the result to standard output."};
    std::string input;
    ic::overrides flags;
    app.add_option("--input", input, "job document (default: standard input)");
    app.add_option("--format", flags.format, "json or csv (csv only for asymptotics)")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--tol", flags.tol, "root bracket tolerance (default 1e-12)");
    app.add_option("--newton-tol", flags.newton_tol, "Newton residual tolerance (default 1e-12)");
    app.add_option("--max-iter", flags.max_iter, "Newton iteration limit (default 100)");
    app.add_option("--t-grid", flags.t_grid, "geometric scale grid a:b:n (default 1e-1:1e-3:9)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::string text;
    if (input.empty()) {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        std::ifstream f(input);
        if (!f) {
            std::cerr << "input error: cannot open " << input << "\n";
            return 2;
        }
        text.assign(std::istreambuf_iterator<char>(f), {});
    }

    ic::json job;
    try {
        job = ic::json::parse(text);
    } catch (const ic::json::parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }

    const auto out = ic::run(job, flags);
    std::cout << out.output;
    if (!out.diagnostic.empty()) std::cerr << out.diagnostic << "\n";
    return out.exit_code;
}
