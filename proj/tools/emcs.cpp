// emcs: command-line front end for the evolving multi-context system engine.

#include "emcs/emcs.hpp"
#include "emcs/run.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <optional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw emcs::Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolving multi-context system engine"};
    app.require_subcommand(1);

    std::string system_file;
    std::string observations_file;
    std::string trace_file;
    std::optional<std::size_t> size;
    std::string criterion = "strong";
    std::optional<std::size_t> budget;
    std::string format = "json";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--system", system_file, "System description file")->required();
        sub->add_option("--observations", observations_file, "Observation sequence file");
        sub->add_option("--size", size, "Size of evolving equilibria (default: number of steps)");
        sub->add_option("--budget", budget, "Search budget (candidate states)");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
    };
    auto* solve = app.add_subcommand("solve", "Static equilibria at the first observation step");
    auto* evolve = app.add_subcommand("evolve", "All evolving equilibria of the given size");
    auto* select = app.add_subcommand("select", "Evolving equilibria satisfying a minimal change criterion");
    auto* check = app.add_subcommand("check", "Verify a trace against the evolving equilibrium definition");
    auto* oracle = app.add_subcommand("oracle", "Compare the solver against the brute-force oracle");
    for (auto* sub : {solve, evolve, select, check, oracle}) add_common(sub);
    select->add_option("--criterion", criterion, "strong | weak | global-cost")
        ->check(CLI::IsMember({"strong", "weak", "global-cost"}));
    check->add_option("--trace", trace_file, "Trace document (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : emcs::exit_code::input_error;
    }

    const auto command = *emcs::parse_command(app.get_subcommands().front()->get_name());
    emcs::RunFlags flags;
    if (const char* env = std::getenv("EMCS_BUDGET")) {
        try {
            flags.options.budget = std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "emcs: EMCS_BUDGET is not a number\n";
            return emcs::exit_code::input_error;
        }
    }
    if (budget) flags.options.budget = *budget;
    flags.size = size;
    flags.criterion = *emcs::parse_criterion(criterion);

    const auto started = std::chrono::steady_clock::now();
    emcs::RunResult result;
    try {
        const auto sys = emcs::parse_system(slurp(system_file));
        emcs::validate_system(sys.system);
        emcs::ObservationSequence obs;
        if (!observations_file.empty()) obs = emcs::parse_observations(slurp(observations_file), sys.system);
        if (obs.empty()) obs.push_back(emcs::empty_observation(sys.system));
        if (command == emcs::Command::check) flags.trace = nlohmann::json::parse(slurp(trace_file));
        result = emcs::run(command, sys, obs, flags);
    } catch (const emcs::BudgetExceeded& e) {
        std::cerr << "emcs: " << e.what() << "\n";
        return emcs::exit_code::budget_exceeded;
    } catch (const emcs::OracleCapExceeded& e) {
        std::cerr << "emcs: " << e.what() << "\n";
        return emcs::exit_code::budget_exceeded;
    } catch (const emcs::ParseError& e) {
        std::cerr << "emcs: " << e.what() << "\n";
        return emcs::exit_code::input_error;
    } catch (const std::exception& e) {
        std::cerr << "emcs: " << e.what() << "\n";
        return emcs::exit_code::input_error;
    }
    const auto elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

    if (format == "text") {
        std::cout << emcs::render_text(result.report);
        std::cout << "# volatile: elapsed_ms " << elapsed << "\n";
    } else {
        nlohmann::json doc;
        doc["report"] = result.report;
        doc["volatile"] = {{"elapsed_ms", elapsed}};
        std::cout << doc.dump(2) << "\n";
    }
    return result.exit_code;
}
