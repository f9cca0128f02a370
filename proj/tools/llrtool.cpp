// llrtool: analytic and simulation front end for low-latency link
// planning. Subcommands: llr, allocate, simulate, sweep, trace-stats,
// figures, synth-trace.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "llr/allocator.hpp"
#include "llr/queueing.hpp"
#include "llr/sim.hpp"
#include "llr/traffic.hpp"

using json = nlohmann::ordered_json;
using namespace llr;

namespace {

constexpr const char* kVersion = "0.1.0";

// Config or flag problems that should exit with the usage code.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

class ManifestWriter {
public:
    ManifestWriter(std::string subcommand, json parameters)
        : subcommand_(std::move(subcommand)), parameters_(std::move(parameters)),
          start_(std::chrono::steady_clock::now()) {}

    void add_output(const std::string& path) { outputs_.push_back(path); }

    void write(const std::string& path) {
        json m;
        m["tool"] = "llrtool";
        m["version"] = kVersion;
        m["subcommand"] = subcommand_;
        m["parameters"] = parameters_;
        m["outputs"] = outputs_;
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        m["wall_clock_s"] = elapsed;
        write_file(path, m.dump(2) + "\n");
    }

private:
    std::string subcommand_;
    json parameters_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

// --mu or --link-rate + --mean-size-bits; converts at the boundary.
struct ServiceSpec {
    double mu = 0.0;
    double cv = 1.0;
    double mean_size_bits = 1.0; // for bits/s <-> packets/s conversion

    ServiceModel model() const { return ServiceModel::from_rate(mu, cv); }
};

void add_service_flags(CLI::App* cmd, double& mu, double& link_rate, double& size_bits) {
    cmd->add_option("--mu", mu, "Service rate in packets/second");
    cmd->add_option("--link-rate", link_rate, "Link rate in bits/second");
    cmd->add_option("--mean-size-bits", size_bits, "Mean packet size in bits");
}

ServiceSpec resolve_service(double mu, double link_rate, double size_bits, double cv) {
    ServiceSpec s;
    s.cv = cv;
    if (mu > 0.0) {
        s.mu = mu;
        s.mean_size_bits = size_bits > 0.0 ? size_bits : 1.0;
    } else if (link_rate > 0.0 && size_bits > 0.0) {
        s.mu = link_rate / size_bits;
        s.mean_size_bits = size_bits;
    } else {
        throw usage_error("provide --mu, or --link-rate together with --mean-size-bits");
    }
    return s;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw usage_error("config '" + path + "': " + e.what());
    }
}

// ---- config file -> sim structures ------------------------------------

ArrivalModel parse_arrivals(const json& j, std::uint64_t seed, const std::string& who) {
    const std::string type = j.value("type", "");
    if (type == "poisson") {
        return PoissonArrivals{j.at("rate").get<double>()};
    }
    if (type == "trace") {
        bool reordered = false;
        auto recs = std::make_shared<std::vector<TraceRecord>>(
            load_trace_file(j.at("path").get<std::string>(), &reordered));
        if (reordered)
            std::cerr << "warning: " << who << " trace was out of order; records sorted\n";
        return TraceReplayArrivals{std::move(recs), j.value("loop", false)};
    }
    if (type == "synthetic") {
        // Generated on the fly from a workload profile, then replayed.
        const auto stats = profiles::by_name(j.at("profile").get<std::string>());
        auto recs = std::make_shared<std::vector<TraceRecord>>(
            synthesize_trace(stats, j.value("duration_s", 30.0), seed));
        return TraceReplayArrivals{std::move(recs), j.value("loop", true)};
    }
    if (type == "batch-poisson") {
        BatchPoissonArrivals b;
        b.batch_rate = j.at("batch_rate").get<double>();
        const auto& bs = j.at("batch_size");
        const std::string kind = bs.value("kind", "geometric");
        b.batch_size.kind = kind == "deterministic" ? BatchSizeDist::Kind::deterministic
                                                    : BatchSizeDist::Kind::geometric;
        b.batch_size.mean = bs.at("mean").get<double>();
        b.intra_batch_gap = j.value("intra_batch_gap_s", 10e-6);
        return b;
    }
    throw usage_error(who + ".arrivals.type must be poisson|trace|synthetic|batch-poisson");
}

SizeModel parse_sizes(const json& j, const std::string& who) {
    const std::string type = j.value("type", "");
    if (type == "exponential") return ExponentialSizes{j.at("mean_bits").get<double>()};
    if (type == "deterministic") return DeterministicSizes{j.at("bits").get<double>()};
    if (type == "empirical") return EmpiricalSizes{};
    throw usage_error(who + ".sizes.type must be exponential|deterministic|empirical");
}

SimConfig parse_sim_config(const json& j, std::uint64_t seed) {
    SimConfig cfg;
    if (!j.contains("link_rate_bps")) throw usage_error("config: link_rate_bps is required");
    cfg.link_rate_bps = j.at("link_rate_bps").get<double>();
    if (!j.contains("ds")) throw usage_error("config: ds section is required");
    cfg.ds_seed = seed;
    cfg.nds_seed = seed ^ 0x9E3779B97F4A7C15ull;
    cfg.ds_arrivals = parse_arrivals(j.at("ds").at("arrivals"), cfg.ds_seed, "ds");
    cfg.ds_sizes = parse_sizes(j.at("ds").at("sizes"), "ds");
    if (j.contains("nds")) {
        if (j.at("nds").contains("arrivals"))
            cfg.nds_arrivals = parse_arrivals(j.at("nds").at("arrivals"), cfg.nds_seed, "nds");
        cfg.nds_sizes = parse_sizes(j.at("nds").at("sizes"), "nds");
    }
    if (j.contains("horizon")) {
        const auto& h = j.at("horizon");
        if (h.contains("max_time_s")) cfg.horizon.max_time_s = h.at("max_time_s").get<double>();
        if (h.contains("max_delivered"))
            cfg.horizon.max_delivered = h.at("max_delivered").get<std::uint64_t>();
    }
    cfg.warmup_fraction = j.value("warmup_fraction", 0.1);
    cfg.queue_abort_threshold = j.value("queue_abort_threshold", std::uint64_t{10'000'000});
    return cfg;
}

// ---- subcommand bodies -------------------------------------------------

int cmd_llr(const std::vector<double>& cvs, double mu, double link_rate, double size_bits,
            int points, const std::string& output) {
    const auto spec = resolve_service(mu, link_rate, size_bits, 1.0);
    ManifestWriter manifest("llr", {{"mu", spec.mu},
                                    {"mean_size_bits", spec.mean_size_bits},
                                    {"cv", cvs},
                                    {"points", points}});
    std::string csv = "cs,lambda_s,mean_delay_s,mean_packets,one_over_lambda_s,lambda_s_plus\n";
    for (double cv : cvs) {
        const auto s = ServiceModel::from_rate(spec.mu, cv);
        const double limit = llr_limit(s);
        for (int i = 1; i <= points; ++i) {
            const double ls = spec.mu * i / (points + 1);
            csv += fmt(cv) + "," + fmt(ls) + "," + fmt(mean_delay({ls, 0.0}, s)) + "," +
                   fmt(mean_packets({ls, 0.0}, s)) + "," + fmt(1.0 / ls) + "," + fmt(limit) +
                   "\n";
        }
    }
    write_file(output, csv);
    manifest.add_output(output);
    manifest.write(output + ".manifest.json");
    return 0;
}

int cmd_allocate(double lambda_s, double mu, double link_rate, double size_bits, double cv,
                 const std::string& strategy, const std::string& output) {
    const auto spec = resolve_service(mu, link_rate, size_bits, cv);
    const auto s = spec.model();
    json out;
    out["lambda_s"] = lambda_s;
    out["mu"] = spec.mu;
    out["cv"] = cv;
    out["lambda_s_plus"] = llr_limit(s);
    out["beta"] = beta(lambda_s, s);
    out["delay_at_zero_s"] = mean_delay({lambda_s, 0.0}, s);
    if (strategy == "max" || strategy == "both") {
        const double mx = max_alloc(lambda_s, s);
        out["kappa_plus"] = kappa_plus(lambda_s, s);
        out["max"] = mx;
        out["max_bps"] = mx * spec.mean_size_bits;
        out["delay_at_max_s"] = mean_delay({lambda_s, mx}, s);
    }
    if (strategy == "pfll" || strategy == "both") {
        const double pf = pfll_alloc(lambda_s, s);
        out["kappa_star"] = kappa_star(lambda_s, s);
        out["pfll"] = pf;
        out["pfll_bps"] = pf * spec.mean_size_bits;
        out["delay_at_pfll_s"] = mean_delay({lambda_s, pf}, s);
    }
    const std::string text = out.dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        ManifestWriter manifest("allocate", {{"lambda_s", lambda_s},
                                             {"mu", spec.mu},
                                             {"cv", cv},
                                             {"strategy", strategy}});
        write_file(output, text);
        manifest.add_output(output);
        manifest.write(output + ".manifest.json");
    }
    return 0;
}

json flow_summary(const SimResult& r, const FlowStats& fs, Flow flow) {
    json f;
    f["arrived"] = fs.arrived;
    f["delivered"] = fs.delivered;
    f["delivered_bits"] = fs.delivered_bits;
    f["warmup_discarded"] = fs.warmup_discarded;
    if (!fs.delays.empty()) {
        f["mean_delay_s"] = fs.mean_delay();
        f["delay_stderr_s"] = fs.delay_stderr();
        f["p50_s"] = delay_percentile(r, flow, 0.5);
        f["p90_s"] = delay_percentile(r, flow, 0.9);
        f["p99_s"] = delay_percentile(r, flow, 0.99);
        f["arrival_rate_pps"] = r.arrival_rate(flow);
    }
    return f;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed, bool packets_csv) {
    const json cfg_json = load_json(config_path);
    ManifestWriter manifest("simulate",
                            {{"config", config_path}, {"config_body", cfg_json},
                             {"seed", seed}, {"packets_csv", packets_csv}});
    SimConfig cfg = parse_sim_config(cfg_json, seed);
    cfg.record_packets = packets_csv;
    const SimResult r = run(cfg);

    json summary;
    summary["seed"] = seed;
    summary["duration_s"] = r.duration_s;
    summary["ds"] = flow_summary(r, r.ds, Flow::ds);
    summary["nds"] = flow_summary(r, r.nds, Flow::nds);
    const std::string summary_path = out_dir + "/summary.json";
    write_file(summary_path, summary.dump(2) + "\n");
    manifest.add_output(summary_path);

    if (packets_csv) {
        std::string csv = "flow,arrival_s,departure_s,delay_s\n";
        csv.reserve(r.packets.size() * 48 + 64);
        for (const auto& p : r.packets) {
            csv += p.flow == Flow::ds ? "ds," : "nds,";
            csv += fmt(p.arrival_s) + "," + fmt(p.departure_s) + "," +
                   fmt(p.departure_s - p.arrival_s) + "\n";
        }
        const std::string packets_path = out_dir + "/packets.csv";
        write_file(packets_path, csv);
        manifest.add_output(packets_path);
    }
    manifest.write(out_dir + "/simulate.manifest.json");
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              std::uint64_t seed) {
    const json cfg_json = load_json(config_path);
    ManifestWriter manifest("sweep", {{"config", config_path},
                                      {"config_body", cfg_json},
                                      {"seed", seed}});
    SimConfig base = parse_sim_config(cfg_json, seed);
    if (!cfg_json.contains("sweep")) throw usage_error("config: sweep section is required");
    const auto& sj = cfg_json.at("sweep");
    SweepConfig sweep;
    sweep.lambda_b_start = sj.value("lambda_b_start", 0.0);
    sweep.lambda_b_stop = sj.at("lambda_b_stop").get<double>();
    sweep.points = sj.at("points").get<int>();
    sweep.base_seed = seed;

    std::optional<ServiceModel> svc;
    if (cfg_json.contains("analytic")) {
        const auto& a = cfg_json.at("analytic");
        svc = ServiceModel::from_rate(a.at("mu").get<double>(), a.at("cv").get<double>());
    }
    const AllocationReport report = empirical_pfll(base, sweep, svc);

    std::ostringstream js, cs;
    write_report_json(js, report);
    write_curves_csv(cs, report);
    const std::string report_path = out_dir + "/report.json";
    const std::string curves_path = out_dir + "/curves.csv";
    write_file(report_path, js.str());
    write_file(curves_path, cs.str());
    manifest.add_output(report_path);
    manifest.add_output(curves_path);
    manifest.write(out_dir + "/sweep.manifest.json");
    return 0;
}

int cmd_trace_stats(const std::string& trace_path, double link_rate, double gap_threshold,
                    const std::string& output) {
    bool reordered = false;
    const auto recs = load_trace_file(trace_path, &reordered);
    if (reordered)
        std::cerr << "warning: trace was out of order; records sorted by timestamp\n";
    const auto s = trace_stats(recs, link_rate, gap_threshold);
    json out;
    out["load_bps"] = s.load_bps;
    out["mean_iat_s"] = s.mean_iat_s;
    out["cv_iat"] = s.cv_iat;
    out["mean_size_bytes"] = s.mean_size_bytes;
    out["cv_service"] = s.cv_service;
    out["mean_batch_size"] = s.mean_batch_size;
    out["link_rate_bps"] = s.link_rate_bps;
    out["packet_count"] = s.packet_count;
    out["batch_count"] = s.batch_count;
    const std::string text = out.dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        ManifestWriter manifest("trace-stats", {{"trace", trace_path},
                                                {"link_rate_bps", link_rate},
                                                {"batch_gap_threshold_s", gap_threshold}});
        write_file(output, text);
        manifest.add_output(output);
        manifest.write(output + ".manifest.json");
    }
    return 0;
}

int cmd_synth_trace(const std::string& profile, double duration, std::uint64_t seed,
                    const std::string& output) {
    const auto stats = profiles::by_name(profile);
    ManifestWriter manifest("synth-trace", {{"profile", profile},
                                            {"duration_s", duration},
                                            {"seed", seed}});
    const auto recs = synthesize_trace(stats, duration, seed);
    std::ostringstream out;
    write_trace(out, recs);
    write_file(output, out.str());
    manifest.add_output(output);
    manifest.write(output + ".manifest.json");
    return 0;
}

int cmd_figures(int figure, const std::string& out_dir) {
    const std::vector<double> cvs{0.0, 0.5, 1.0, 2.0};
    ManifestWriter manifest("figures", {{"figure", figure}});
    auto emit = [&](const std::string& name, const std::string& content) {
        const std::string path = out_dir + "/" + name;
        write_file(path, content);
        manifest.add_output(path);
    };

    if (figure == 2) {
        std::string csv =
            "cs,lambda_s,mean_delay_s,mean_packets,one_over_lambda_s,lambda_s_plus\n";
        for (double cv : cvs) {
            const auto s = ServiceModel::from_rate(1.0, cv);
            const double limit = llr_limit(s);
            for (int i = 1; i <= 199; ++i) {
                const double ls = i / 200.0;
                csv += fmt(cv) + "," + fmt(ls) + "," + fmt(mean_delay({ls, 0.0}, s)) + "," +
                       fmt(mean_packets({ls, 0.0}, s)) + "," + fmt(1.0 / ls) + "," +
                       fmt(limit) + "\n";
            }
        }
        emit("fig2_llr.csv", csv);
    } else if (figure == 3) {
        std::string csv = "cs,lambda_s,lambda_b_star,lambda_b_plus\n";
        for (double cv : cvs) {
            const auto s = ServiceModel::from_rate(1.0, cv);
            const double limit = llr_limit(s);
            for (double ls = 0.005; ls <= limit + 1e-12; ls += 0.005) {
                csv += fmt(cv) + "," + fmt(ls) + "," + fmt(pfll_alloc(ls, s)) + "," +
                       fmt(max_alloc(ls, s)) + "\n";
            }
        }
        emit("fig3_pfll.csv", csv);
    } else if (figure == 4) {
        std::string csv = "cs,lambda_s,delay_ratio,throughput_ratio\n";
        for (double cv : cvs) {
            const auto s = ServiceModel::from_rate(1.0, cv);
            const double limit = llr_limit(s);
            for (double ls = 0.005; ls <= 0.98 * limit; ls += 0.005) {
                const auto [dr, tr] = compare_strategies(ls, s);
                csv += fmt(cv) + "," + fmt(ls) + "," + fmt(dr) + "," + fmt(tr) + "\n";
            }
        }
        emit("fig4_comparison.csv", csv);
    } else if (figure == 5) {
        std::string summary = "cs,lambda_s,g_argmax,f_argmax,lambda_b_star\n";
        const std::vector<std::pair<double, double>> pairs{
            {0.1, 0.0}, {0.25, 0.0}, {0.1, 1.0}, {0.25, 1.0}};
        int panel = 0;
        for (const auto& [ls, cv] : pairs) {
            const auto s = ServiceModel::from_rate(1.0, cv);
            const double lb_plus = max_alloc(ls, s);
            DelayFn d = [&, ls](double lb) { return mean_delay({ls, lb}, s); };
            std::vector<double> grid;
            for (double x = 0.0; x <= lb_plus + 1e-12; x += 1e-4) grid.push_back(x);
            const auto g_curve =
                build_curve(grid, [&](double lb) { return gain({ls, lb}, s); });
            const auto f_curve =
                build_curve(grid, [&](double lb) { return f_alt(lb, d, lb_plus); });
            const auto g_hat = normalize_curve(g_curve);
            const auto f_hat = normalize_curve(f_curve);
            std::string csv = "lambda_b,g_hat,f_hat,dg_dlambda_b,df_dlambda_b\n";
            const double h = 1e-6;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double lb = grid[i];
                const double dg = gain_derivative({ls, lb}, s);
                const double lo = std::max(lb - h, 0.0);
                const double hi = std::min(lb + h, lb_plus);
                const double df =
                    (f_alt(hi, d, lb_plus) - f_alt(lo, d, lb_plus)) / (hi - lo);
                csv += fmt(lb) + "," + fmt(g_hat.values[i]) + "," + fmt(f_hat.values[i]) +
                       "," + fmt(dg) + "," + fmt(df) + "\n";
            }
            emit("fig5_panel" + std::to_string(panel++) + ".csv", csv);
            summary += fmt(cv) + "," + fmt(ls) + "," + fmt(g_curve.argmax_rate) + "," +
                       fmt(f_curve.argmax_rate) + "," + fmt(pfll_alloc(ls, s)) + "\n";
        }
        emit("fig5_argmax.csv", summary);
    } else {
        throw usage_error("unknown figure id (expected 2, 3, 4 or 5)");
    }
    manifest.write(out_dir + "/figures.manifest.json");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-latency region analysis for best-effort FIFO links"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // llr
    auto* llr_cmd = app.add_subcommand("llr", "Sweep the DS-only delay curve and region limit");
    double mu = 0.0, link_rate = 0.0, size_bits = 0.0;
    std::vector<double> cvs{1.0};
    int points = 199;
    std::string output;
    add_service_flags(llr_cmd, mu, link_rate, size_bits);
    llr_cmd->add_option("--cv", cvs, "Service-time coefficient(s) of variation");
    llr_cmd->add_option("--points", points, "Grid points over (0, mu)");
    llr_cmd->add_option("-o,--output", output, "Output CSV path")->required();

    // allocate
    auto* alloc_cmd = app.add_subcommand("allocate", "Closed-form max and PFLL allocations");
    double a_mu = 0.0, a_rate = 0.0, a_bits = 0.0, a_cv = 1.0, a_ls = 0.0;
    std::string strategy = "both", alloc_out;
    add_service_flags(alloc_cmd, a_mu, a_rate, a_bits);
    alloc_cmd->add_option("--lambda-s", a_ls, "DS rate in packets/second")->required();
    alloc_cmd->add_option("--cv", a_cv, "Service-time coefficient of variation");
    alloc_cmd->add_option("--strategy", strategy, "max|pfll|both")
        ->check(CLI::IsMember({"max", "pfll", "both"}));
    alloc_cmd->add_option("-o,--output", alloc_out, "Output JSON path (default stdout)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Run one link simulation from a config file");
    std::string sim_config, sim_outdir = ".";
    std::uint64_t sim_seed = 0;
    bool sim_packets = false;
    sim_cmd->add_option("--config", sim_config, "JSON config file")->required();
    sim_cmd->add_option("--out-dir", sim_outdir, "Output directory");
    sim_cmd->add_option("--seed", sim_seed, "RNG seed")->required();
    sim_cmd->add_flag("--packets", sim_packets, "Also write the per-packet CSV");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Empirical allocation sweep from a config file");
    std::string sweep_config, sweep_outdir = ".";
    std::uint64_t sweep_seed = 0;
    sweep_cmd->add_option("--config", sweep_config, "JSON config file")->required();
    sweep_cmd->add_option("--out-dir", sweep_outdir, "Output directory");
    sweep_cmd->add_option("--seed", sweep_seed, "RNG seed")->required();

    // trace-stats
    auto* ts_cmd = app.add_subcommand("trace-stats", "Characterize a packet trace");
    std::string ts_trace, ts_out;
    double ts_rate = 0.0, ts_threshold = kDefaultBatchGapThreshold;
    ts_cmd->add_option("--trace", ts_trace, "Trace CSV file")->required();
    ts_cmd->add_option("--link-rate", ts_rate, "Link rate in bits/second")->required();
    ts_cmd->add_option("--batch-gap-threshold", ts_threshold,
                       "Gap below which packets belong to the same batch (seconds)");
    ts_cmd->add_option("-o,--output", ts_out, "Output JSON path (default stdout)");

    // figures
    auto* fig_cmd = app.add_subcommand("figures", "Emit analytic curve data as CSV");
    int figure = 0;
    std::string fig_outdir = ".";
    fig_cmd->add_option("--figure", figure, "Figure id: 2|3|4|5")->required();
    fig_cmd->add_option("--out-dir", fig_outdir, "Output directory");

    // synth-trace
    auto* synth_cmd = app.add_subcommand("synth-trace", "Export a synthetic batch-arrival trace");
    std::string synth_profile, synth_out;
    double synth_duration = 30.0;
    std::uint64_t synth_seed = 0;
    synth_cmd->add_option("--profile", synth_profile, "720p|1080p|2160p")->required();
    synth_cmd->add_option("--duration", synth_duration, "Trace duration in seconds");
    synth_cmd->add_option("--seed", synth_seed, "RNG seed")->required();
    synth_cmd->add_option("-o,--output", synth_out, "Output trace CSV path")->required();

    try {
        app.parse(argc, argv);
        if (llr_cmd->parsed())
            return cmd_llr(cvs, mu, link_rate, size_bits, points, output);
        if (alloc_cmd->parsed())
            return cmd_allocate(a_ls, a_mu, a_rate, a_bits, a_cv, strategy, alloc_out);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_config, sim_outdir, sim_seed, sim_packets);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_config, sweep_outdir, sweep_seed);
        if (ts_cmd->parsed())
            return cmd_trace_stats(ts_trace, ts_rate, ts_threshold, ts_out);
        if (fig_cmd->parsed()) return cmd_figures(figure, fig_outdir);
        if (synth_cmd->parsed())
            return cmd_synth_trace(synth_profile, synth_duration, synth_seed, synth_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion" ? 0 : 2;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const unstable_link_error& e) {
        std::cerr << "error: unstable: " << e.what() << "\n";
        return 4;
    } catch (const queue_overflow_error& e) {
        std::cerr << "error: unstable: " << e.what() << "\n";
        return 4;
    } catch (const out_of_region_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const trace_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
