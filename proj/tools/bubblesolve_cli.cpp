// Command-line front end: config ingestion, scenario execution, parameter
// sweeps, machine-readable reports.
//
// Exit codes: 0 success, 2 config error, 3 solver failure, 4 verification
// failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "bubblesolve/cli/config.hpp"
#include "bubblesolve/cli/run.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    double tol = -1.0;
    int horizon = -1;
    bool timing = false;
    std::string plot_script_path;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw bubblesolve::ToolkitError(bubblesolve::ErrorCode::ConfigInvalid,
                                        "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw bubblesolve::ToolkitError(bubblesolve::ErrorCode::ConfigInvalid,
                                        "cannot open output file '" + path + "'");
    out << content;
}

int run(bubblesolve::cli::RunKind kind, const Options& opt) {
    using namespace bubblesolve;
    cli::ScenarioConfig cfg = cli::parse_config(read_file(opt.config_path));
    if (cfg.run_specified && cfg.run != kind)
        throw ToolkitError(ErrorCode::ConfigInvalid,
                           std::string("config declares run '") + cli::to_string(cfg.run) +
                               "' but the subcommand is '" + cli::to_string(kind) + "'");
    cfg.run = kind;
    if (opt.tol > 0.0) cfg.tolerances.verify = opt.tol;
    if (opt.horizon > 0) cfg.horizon = opt.horizon;
    if (opt.format != "json" && opt.format != "csv")
        throw ToolkitError(ErrorCode::ConfigInvalid, "--format must be json or csv");
    bool csv_capable = kind == cli::RunKind::Sweep || kind == cli::RunKind::Path;
    if (opt.format == "csv" && !csv_capable)
        throw ToolkitError(ErrorCode::ConfigInvalid,
                           "--format csv applies to sweep and path runs; use json here");
    if (!opt.plot_script_path.empty() && (opt.format != "csv" || opt.out_path.empty()))
        throw ToolkitError(ErrorCode::ConfigInvalid,
                           "--plot-script needs --format csv and an --out file to point at");

    auto t0 = std::chrono::steady_clock::now();
    cli::RunOutput out = cli::run_scenario(cfg);
    auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.report.set("timing_ms", opt.timing ? report::Json(ms) : report::Json::null());

    if (opt.format == "csv")
        write_output(opt.out_path, out.csv);
    else
        write_output(opt.out_path, out.report.dump());

    if (!opt.plot_script_path.empty())
        write_output(opt.plot_script_path, cli::plot_script(cfg, opt.out_path));

    return out.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bubblesolve: steady states, determinacy verdicts and selected equilibrium paths "
                 "for rational-bubble economies"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "scenario config file (JSON)")->required();
        sub->add_option("--out", opt.out_path, "output file (default: stdout)");
        sub->add_option("--format", opt.format, "output format: json|csv (default json)");
        sub->add_option("--tol", opt.tol, "verification/terminal tolerance override");
        sub->add_option("--horizon", opt.horizon, "horizon override for path runs");
        sub->add_flag("--timing", opt.timing, "record wall time in the report (nondeterministic)");
        sub->add_option("--plot-script", opt.plot_script_path,
                        "write a gnuplot script consuming the CSV output");
    };

    CLI::App* steady = app.add_subcommand("steady", "solve steady states / balanced growth paths");
    CLI::App* determinacy = app.add_subcommand("determinacy", "eigenvalue counts and verdicts");
    CLI::App* path = app.add_subcommand("path", "construct the selected equilibrium path");
    CLI::App* sweep = app.add_subcommand("sweep", "run a scenario over a parameter grid");
    CLI::App* verify = app.add_subcommand("verify", "construct a path and check every equilibrium condition");
    for (CLI::App* sub : {steady, determinacy, path, sweep, verify}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    using bubblesolve::cli::RunKind;
    RunKind kind = RunKind::Steady;
    if (determinacy->parsed()) kind = RunKind::Determinacy;
    if (path->parsed()) kind = RunKind::Path;
    if (sweep->parsed()) kind = RunKind::Sweep;
    if (verify->parsed()) kind = RunKind::Verify;

    try {
        return run(kind, opt);
    } catch (const bubblesolve::ToolkitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bubblesolve::exit_status(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
