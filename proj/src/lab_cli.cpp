#include "spectral/pasting_lab.hpp"

#include <CLI11.hpp>

#include <fstream>

namespace spectral {

namespace {

void write_dat(const std::filesystem::path& path, const ExperimentReport& rep)
{
    // gnuplot-ready: whitespace separated, header commented, empty cells as '?'
    std::ofstream os(path);
    os << '#';
    for (const auto& h : rep.sweep_header) os << ' ' << h;
    os << '\n';
    for (const auto& row : rep.sweep_rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << (row[i].empty() ? "?" : row[i]);
        os << '\n';
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"spectral-lab: pasting and eta-invariant experiments"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "run one experiment or all");
    std::string experiment, config, out_dir, format = "json";
    double tol_scale = 1.0;
    std::uint64_t seed = 0;
    run->add_option("experiment", experiment, "experiment name or 'all'")->required();
    run->add_option("--config", config, "TOML configuration")->required();
    auto* out_opt = run->add_option("--out", out_dir, "output directory");
    run->add_option("--tol-scale", tol_scale, "multiply upper-bound tolerances")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "override the configured seed");
    run->add_option("--format", format, "summary format on stdout")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    std::vector<std::string> names;
    if (experiment == "all") names = experiment_names();
    else if (std::find(experiment_names().begin(), experiment_names().end(), experiment) != experiment_names().end())
        names = {experiment};
    else {
        err << "unknown experiment '" << experiment << "'; expected one of:";
        for (const auto& n : experiment_names()) err << ' ' << n;
        err << " or all\n";
        return 2;
    }

    ExperimentConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }
    cfg.tol.scale = tol_scale;
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.out = out_dir;

    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) {
        err << "cannot create " << cfg.out << ": " << ec.message() << '\n';
        return 2;
    }

    bool all_pass = true;
    nlohmann::json summary = nlohmann::json::array();
    if (format == "csv") out << "experiment,verdict,checks,failing,wall_time_s\n";
    for (const auto& name : names) {
        ExperimentReport rep;
        try {
            rep = run_experiment(name, cfg);
        } catch (const std::exception& e) {
            err << name << ": " << e.what() << '\n';
            all_pass = false;
            continue;
        }
        std::ofstream(cfg.out / (name + ".report.json")) << rep.to_json().dump(2) << '\n';
        {
            std::ofstream csv(cfg.out / (name + ".sweep.csv"));
            rep.write_csv(csv);
        }
        write_dat(cfg.out / (name + ".dat"), rep);
        size_t checks = 0;
        for (const auto& c : rep.cases) checks += c.checks.size();
        const auto failing = rep.failing();
        if (rep.verdict != Verdict::pass) all_pass = false;
        if (format == "csv") {
            out << name << ',' << to_string(rep.verdict) << ',' << checks << ',' << failing.size() << ','
                << rep.wall_time << '\n';
        } else {
            nlohmann::json fails = nlohmann::json::array();
            for (const auto* k : failing)
                fails.push_back({{"quantity", k->quantity}, {"gap", k->gap}, {"tolerance", k->tolerance}});
            summary.push_back({{"experiment", name},
                               {"verdict", to_string(rep.verdict)},
                               {"checks", checks},
                               {"failing", fails},
                               {"wall_time_s", rep.wall_time}});
        }
        for (const auto* k : failing)
            err << name << ": FAIL " << k->quantity << " computed " << k->computed << " oracle " << k->oracle
                << " gap " << k->gap << '\n';
    }
    if (format == "json") out << summary.dump(2) << '\n';
    return all_pass ? 0 : 1;
}

}  // namespace spectral
