#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "jetvar/errors.hpp"
#include "jetvar/report.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jetvar: variational calculus on jet bundles"};
    app.require_subcommand(1);
    app.set_version_flag("--version", jetvar::kToolVersion);

    jetvar::RunOptions options;
    std::string input, format = "json";
    auto common = [&](CLI::App* sub) {
        sub->add_option("--max-generations", options.max_generations, "Generation limit of the constraint algorithm")
            ->check(CLI::PositiveNumber);
        sub->add_option("--points", options.points, "Sample points for numeric checks")->check(CLI::PositiveNumber);
        sub->add_option("--seed", options.seed, "Seed for every random sample");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
        sub->add_flag("--timing", options.timing, "Add wall-clock timing to the report");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "Cartan coefficients and projectability");
    analyze->add_option("file", input, "Lagrangian file")->required()->check(CLI::ExistingFile);
    common(analyze);
    CLI::App* constraints = app.add_subcommand("constraints", "Full constraint chain with provenance");
    constraints->add_option("file", input, "Lagrangian file")->required()->check(CLI::ExistingFile);
    common(constraints);
    CLI::App* gravity = app.add_subcommand("gravity-verify", "Verify the Hilbert Lagrangian identities");
    gravity->add_option("file", input, "builtin:hilbert file (optional)")->check(CLI::ExistingFile);
    gravity->add_option("--dim,--d", options.dim, "Spacetime dimension (2, 3 or 4)")->check(CLI::Range(2, 4));
    common(gravity);
    CLI::App* fixtures = app.add_subcommand("fixtures-check", "Compare against an oracle fixture file");
    fixtures->add_option("--fixtures", options.fixtures, "Fixture JSON")->required()->check(CLI::ExistingFile);
    common(fixtures);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        jetvar::ReportDocument doc;
        if (command == "fixtures-check") {
            doc = jetvar::fixtures_check(nlohmann::json::parse(slurp(options.fixtures)), options);
        } else {
            jetvar::LagrangianSpec spec;
            if (!input.empty()) {
                spec = jetvar::parse_spec(slurp(input));
            } else {
                spec.kind = jetvar::LagrangianKind::Hilbert;
                spec.base_dim = options.dim.value_or(4);
            }
            if (command == "gravity-verify" && spec.kind != jetvar::LagrangianKind::Hilbert)
                throw std::invalid_argument("gravity-verify needs a builtin:hilbert input");
            doc = jetvar::run(command, spec, options);
        }
        if (format == "text") {
            std::cout << jetvar::render_text(doc.body);
        } else {
            std::cout << doc.body.dump(2) << "\n";
        }
        return doc.exit_code;
    } catch (const jetvar::VerificationFailed& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
