// freqcal command-line front end: run, order, scale, exp.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "freqcal/harness.hpp"

namespace fs = std::filesystem;
using namespace freqcal;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Writes to `out`, or stdout when `out` is empty or "-".
void write_output(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + out + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + out + "' failed");
}

ReportFormat format_for(const std::string& format, const std::string& out) {
    if (!format.empty()) return parse_format(format);
    return fs::path(out).extension() == ".json" ? ReportFormat::json : ReportFormat::csv;
}

ExperimentConfig config_or_default(const std::string& path) {
    return path.empty() ? ExperimentConfig{} : load_config(path);
}

int cmd_run(const std::string& config_path, std::uint64_t seed, const std::string& out,
            const std::string& format) {
    const auto cfg = config_or_default(config_path);
    const auto rep = make_replica(cfg, cfg.topology.rows, cfg.topology.cols, seed);
    const auto hyp = make_hypothesis(cfg.bcd.hypothesis, rep.topology);
    const auto result = run_bcd(cfg.bcd.bcd, rep.topology, rep.model, hyp, rep.start, seed);
    std::ostringstream os;
    if (format_for(format, out) == ReportFormat::csv) {
        write_trace_csv(os, result.trace);
    } else {
        os << bcd_result_to_json(result, rep.topology).dump(2) << '\n';
    }
    write_output(out, os.str());
    std::cerr << "G " << format_double(result.g_initial) << " -> " << format_double(result.g_final)
              << " in " << result.epochs_run << " epochs, " << result.evaluations
              << " evaluations\n";
    return 0;
}

int cmd_order(const std::string& topology_path, const std::string& config_path,
              const std::string& mode, const std::string& method, std::uint64_t seed,
              const std::string& out) {
    ChipTopology topo;
    if (!topology_path.empty()) {
        topo = topology_from_json(json::parse(read_file(topology_path)));
    } else {
        const auto cfg = config_or_default(config_path);
        topo = build_grid_topology(cfg.topology.rows, cfg.topology.cols);
    }
    const auto hyp = CrosstalkHypothesis::exact(topo);
    SdCostFunction cf{parse_sd_mode(mode), CostModel::search(100.0, 2.0, 1)};
    auto rng = make_rng(derive_seed(seed, stream::order));
    const auto order = make_order(parse_order_method(method), topo, hyp, cf, rng);
    const json j{{"route", order}, {"log_cost", route_cost(order, cf, topo, hyp)}};
    write_output(out, j.dump() + "\n");
    return 0;
}

int cmd_scale(const std::string& sizes, const std::string& order, const std::string& model,
              std::uint64_t seed, const std::string& out) {
    const auto kind = parse_cost_kind(model);
    const auto cost = kind == CostKind::empirical ? CostModel::empirical(1, 2.0)
                                                  : CostModel::search(100.0, 2.0, 1);
    const auto size_list = parse_size_list(sizes);
    const auto report = scaling_report(size_list, parse_order_method(order), cost, seed);
    std::ostringstream os;
    os << "n_qubits,order,log_epoch_cost,cost_per_qubit_bound\n";
    for (const auto& r : report.rows) {
        os << r.n_qubits << ',' << r.order << ',' << format_double(r.log_epoch_cost) << ','
           << format_double(r.log_max_block) << '\n';
    }
    write_output(out, os.str());
    std::cerr << "cost/N spread " << format_double(report.per_qubit_spread()) << '\n';
    return 0;
}

int cmd_exp(const std::string& config_path, std::uint64_t seed, const std::string& out,
            const std::string& format) {
    const auto cfg = config_or_default(config_path);
    const auto report = run_experiment(cfg, seed);
    write_output(out, report_to_string(report, format_for(format, out)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topology-aware block coordinate descent for qubit frequency calibration"};
    app.require_subcommand(1);

    std::string config_path, out, format, topology_path, mode = "complexity", method = "nna";
    std::string sizes = "2x2,3x3,4x4,5x5,6x6", order = "nna", model = "search";
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Base seed");
        sub->add_option("--out", out, "Output path (stdout if omitted)");
    };

    auto* run = app.add_subcommand("run", "Single BCD run; writes the trace");
    run->add_option("--config", config_path, "TOML config")->check(CLI::ExistingFile);
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    add_common(run);

    auto* ord = app.add_subcommand("order", "Block order for a topology");
    ord->add_option("--topology", topology_path, "Topology JSON")->check(CLI::ExistingFile);
    ord->add_option("--config", config_path, "TOML config (grid from [topology])")
        ->check(CLI::ExistingFile);
    ord->add_option("--mode", mode, "complexity or neighbors")
        ->check(CLI::IsMember({"complexity", "neighbors"}));
    ord->add_option("--method", method, "nna, bfs, dfs, random or oracle")
        ->check(CLI::IsMember({"nna", "bfs", "dfs", "random", "oracle"}));
    add_common(ord);

    auto* scale = app.add_subcommand("scale", "Epoch cost across grid sizes");
    scale->add_option("--sizes", sizes, "Comma-separated RxC list");
    scale->add_option("--order", order, "nna, bfs, dfs or random")
        ->check(CLI::IsMember({"nna", "bfs", "dfs", "random"}));
    scale->add_option("--model", model, "empirical or search")
        ->check(CLI::IsMember({"empirical", "search"}));
    add_common(scale);

    auto* exp = app.add_subcommand("exp", "Seeded experiment from [experiment]");
    exp->add_option("--config", config_path, "TOML config")->check(CLI::ExistingFile);
    exp->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    add_common(exp);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seed, out, format);
        if (ord->parsed()) return cmd_order(topology_path, config_path, mode, method, seed, out);
        if (scale->parsed()) return cmd_scale(sizes, order, model, seed, out);
        if (exp->parsed()) return cmd_exp(config_path, seed, out, format);
    } catch (const std::exception& e) {
        std::cerr << "freqcal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
