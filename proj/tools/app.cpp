#include "app.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "conncoord/config.hpp"
#include "conncoord/errors.hpp"
#include "conncoord/report.hpp"
#include "conncoord/simulator.hpp"
#include "conncoord/svg.hpp"
#include "conncoord/verify.hpp"

namespace conncoord::app {
namespace {

namespace fs = std::filesystem;

// Residuals above -kSuiteTolerance * scale count as holding.
constexpr double kSuiteTolerance = 1e-8;

struct Options {
    std::string config;
    std::optional<std::string> out_dir;  // run writes to "." when unset
    bool svg = false;
    std::optional<std::uint64_t> seed;
    std::optional<double> step;
    std::optional<double> horizon;
    std::size_t count = 1000;
};

std::string fixed(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

ParsedConfig load(const Options& opt, std::vector<std::string>& overrides) {
    ParsedConfig parsed = parse_config(opt.config);
    ScenarioConfig& cfg = parsed.config;
    if (opt.seed) {
        cfg.delay.seed = *opt.seed;
        overrides.push_back("delay.seed=" + std::to_string(*opt.seed));
    }
    if (opt.step) {
        cfg.integrator.step = *opt.step;
        overrides.push_back("integrator.step=" + fixed(*opt.step));
    }
    if (opt.horizon) {
        cfg.integrator.horizon = *opt.horizon;
        overrides.push_back("integrator.horizon=" + fixed(*opt.horizon));
    }
    cfg.validate();
    return parsed;
}

fs::path prepare_out(const Options& opt) {
    fs::path dir(opt.out_dir.value_or("."));
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << text;
}

void print_certificate(std::ostream& out, const ScenarioCertificate& cert) {
    if (!cert.computed) {
        out << "gain certificate: unavailable (" << cert.reason << ")\n";
        return;
    }
    out << "gain certificate: Delta=" << fixed(cert.constants.Delta) << " gamma=" << fixed(cert.constants.gamma)
        << " eta=" << fixed(cert.constants.eta) << '\n';
    for (std::size_t i = 0; i < cert.certificate.k.size(); ++i) {
        out << "  agent " << i << ": k_min=" << fixed(cert.certificate.k[i])
            << " bound=" << fixed(cert.certificate.bound[i])
            << (cert.certificate.agent_passes(i) ? "  ok" : "  FAIL") << '\n';
    }
    out << "gain certificate: " << (cert.passes() ? "pass" : "fail") << '\n';
}

void print_feasibility(std::ostream& out, const char* label, const FeasibilityReport& f) {
    out << label << ": " << (f.feasible ? "feasible" : "infeasible");
    if (f.feasible || f.searched) {
        out << " Q=" << fixed(f.Q) << " p=" << fixed(f.p) << " Delta=" << fixed(f.Delta);
    }
    if (!f.violated.empty()) out << " (" << f.violated << ")";
    out << '\n';
    for (const auto& c : f.checks) {
        out << "  " << c.name << ": " << fixed(c.lhs) << " vs " << fixed(c.rhs) << (c.pass ? "  ok" : "  FAIL")
            << '\n';
    }
}

int cmd_run(const Options& opt, std::ostream& out) {
    RunReport report;
    report.command = "run";
    ParsedConfig parsed = load(opt, report.overrides);
    report.config = parsed.config;
    report.defaults_applied = parsed.defaults_applied;
    const ScenarioConfig& cfg = report.config;
    report.graph = cfg.graph();
    report.certificate = certify_scenario_gains(cfg, *report.graph);

    const fs::path dir = prepare_out(opt);
    report.artifacts.report = (dir / (cfg.name + "_report.json")).string();

    TrajectoryRecord record;
    try {
        record = run_scenario(cfg);
    } catch (const InfeasibleError& e) {
        report.passed = false;
        write_text(report.artifacts.report, report_json(report));
        out << "run refused: " << e.what() << '\n';
        print_certificate(out, *report.certificate);
        return kFail;
    }
    report.verdicts = monitors(record, cfg.monitors);

    const fs::path csv = dir / (cfg.name + ".csv");
    {
        std::ofstream f(csv);
        write_csv(f, trajectory_table(record));
    }
    report.artifacts.csv = csv.string();

    if (opt.svg) {
        std::ifstream f(csv);
        const CsvTable table = read_csv(f);
        const fs::path pos = dir / (cfg.name + "_positions.svg");
        const fs::path dist = dir / (cfg.name + "_distances.svg");
        write_text(pos, positions_svg(table, cfg.name + ": positions"));
        write_text(dist, distances_svg(table, cfg.broadcast_radius, cfg.name + ": initial link distances"));
        report.artifacts.svg = {pos.string(), dist.string()};
    }

    const MonitorVerdicts& v = *report.verdicts;
    report.record = std::move(record);
    report.passed = v.passed();
    write_text(report.artifacts.report, report_json(report));

    out << cfg.name << ": " << report.record->samples.size() << " samples to t="
        << fixed(report.record->samples.back().t) << (v.aborted ? " (aborted: " + report.record->abort_reason + ")" : "")
        << '\n';
    out << "  V0=" << fixed(v.V0) << " max V excess=" << fixed(v.max_V_excess)
        << (v.first_V_violation ? " first violation t=" + fixed(*v.first_V_violation) : "") << '\n';
    out << "  min link margin=" << fixed(v.min_margin)
        << (v.first_link_violation ? " first violation t=" + fixed(*v.first_link_violation) : "") << '\n';
    out << "  final spread=" << fixed(v.final_spread) << '\n';
    out << "  lyapunov " << (v.lyapunov_ok ? "ok" : "FAIL") << ", links " << (v.links_ok ? "ok" : "FAIL")
        << ", consensus " << (v.consensus_ok ? "ok" : "FAIL") << '\n';
    out << "  csv: " << report.artifacts.csv << "\n  report: " << report.artifacts.report << '\n';
    for (const auto& s : report.artifacts.svg) out << "  svg: " << s << '\n';
    return v.passed() ? kPass : kFail;
}

int cmd_check_gains(const Options& opt, std::ostream& out) {
    RunReport report;
    report.command = "check-gains";
    ParsedConfig parsed = load(opt, report.overrides);
    report.config = parsed.config;
    report.defaults_applied = parsed.defaults_applied;
    report.graph = report.config.graph();
    report.certificate = certify_scenario_gains(report.config, *report.graph);
    report.passed = report.certificate->passes();
    print_certificate(out, *report.certificate);
    if (opt.out_dir) {
        const fs::path dir = prepare_out(opt);
        report.artifacts.report = (dir / (report.config.name + "_gains.json")).string();
        write_text(report.artifacts.report, report_json(report));
    }
    return *report.passed ? kPass : kFail;
}

int cmd_feasibility(const Options& opt, std::ostream& out) {
    RunReport report;
    report.command = "feasibility";
    ParsedConfig parsed = load(opt, report.overrides);
    report.config = parsed.config;
    report.defaults_applied = parsed.defaults_applied;
    report.graph = report.config.graph();
    report.feasibility = scenario_feasibility(report.config);
    report.feasibility_search = scenario_feasibility_search(report.config);
    report.passed = report.feasibility->feasible;
    print_feasibility(out, "configured (Q, p)", *report.feasibility);
    print_feasibility(out, "search", *report.feasibility_search);
    if (opt.out_dir) {
        const fs::path dir = prepare_out(opt);
        report.artifacts.report = (dir / (report.config.name + "_feasibility.json")).string();
        write_text(report.artifacts.report, report_json(report));
    }
    return *report.passed ? kPass : kFail;
}

int cmd_verify(const Options& opt, std::ostream& out) {
    const std::uint64_t seed = opt.seed.value_or(1);
    const SuiteResult l1 = lemma1_suite(opt.count, seed);
    const SuiteResult p2 = prop2_suite(opt.count, seed);
    const bool l1_ok = l1.worst_normalized >= -kSuiteTolerance;
    const bool p2_ok = p2.worst_normalized >= -kSuiteTolerance;
    out << "cross-term bound: " << l1.instances << " instances, worst residual/scale=" << l1.worst_normalized
        << (l1_ok ? "  ok" : "  FAIL") << '\n';
    out << "delay-integral bound: " << p2.instances << " instances, worst residual/scale=" << p2.worst_normalized
        << (p2_ok ? "  ok" : "  FAIL") << '\n';
    if (opt.out_dir) {
        RunReport report;
        report.command = "verify";
        report.lemma1 = l1;
        report.prop2 = p2;
        report.suite_seed = seed;
        report.passed = l1_ok && p2_ok;
        const fs::path dir = prepare_out(opt);
        report.artifacts.report = (dir / "verify_report.json").string();
        write_text(report.artifacts.report, report_json(report));
    }
    return l1_ok && p2_ok ? kPass : kFail;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delay-robust connectivity-preserving coordination: simulation and certificates", "conncoord"};
    app.require_subcommand(1);
    Options opt;

    auto add_scenario_flags = [&](CLI::App* sub) {
        sub->add_option("config", opt.config, "scenario JSON file")->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "delay profile seed (overrides delay.seed)");
        sub->add_option("--step", opt.step, "integrator step [s]");
        sub->add_option("--horizon", opt.horizon, "simulated horizon [s]");
    };
    CLI::App* run = app.add_subcommand("run", "simulate a scenario; write CSV, report and optional SVG");
    add_scenario_flags(run);
    run->add_flag("--svg", opt.svg, "also write position and link-distance charts");
    CLI::App* gains = app.add_subcommand("check-gains", "damping-gain certificate only");
    add_scenario_flags(gains);
    CLI::App* feas = app.add_subcommand("feasibility", "certify the scenario's (Q, p) and search for a feasible pair");
    add_scenario_flags(feas);
    CLI::App* verify = app.add_subcommand("verify", "randomized integral-inequality suites");
    verify->add_option("--seed", opt.seed, "suite seed");
    verify->add_option("--count", opt.count, "instances per suite");
    verify->add_option("--out", opt.out_dir, "output directory for the report");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return kUsage;
    }

    try {
        if (run->parsed()) return cmd_run(opt, out);
        if (gains->parsed()) return cmd_check_gains(opt, out);
        if (feas->parsed()) return cmd_feasibility(opt, out);
        return cmd_verify(opt, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFail;
    }
}

}  // namespace conncoord::app
