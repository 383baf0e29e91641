// Command-line front end: analyze / threshold / simulate / sweep / optimize /
// capture subcommands, flat key=value config files (flags override the file),
// CSV + JSON outputs and a JSON run manifest next to every result file.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "irsa/de.hpp"
#include "irsa/degree.hpp"
#include "irsa/errors.hpp"
#include "irsa/opt.hpp"
#include "irsa/parallel.hpp"
#include "irsa/sim.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

std::string fmt(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

// one result sink: '-' means stdout (no manifest is written for a pipe)
class OutputFile {
public:
    explicit OutputFile(const std::string& path) : path_(path) {
        if (path_ != "-") {
            stream_.open(path_);
            if (!stream_) throw std::invalid_argument("cannot open output file: " + path_);
        }
    }
    std::ostream& stream() { return path_ == "-" ? std::cout : stream_; }
    bool is_file() const { return path_ != "-"; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream stream_;
};

class RunManifest {
public:
    RunManifest(std::string command, nlohmann::json config)
        : command_(std::move(command)),
          config_(std::move(config)),
          start_(std::chrono::steady_clock::now()) {}

    void add_output(const std::string& path) { outputs_.push_back(path); }

    void write() const {
        if (outputs_.empty()) return;
        const double duration =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        nlohmann::json doc{{"command", command_},
                           {"version", kVersion},
                           {"config", config_},
                           {"outputs", outputs_},
                           {"duration_seconds", duration}};
        const std::string path = manifest_path(outputs_.front());
        std::ofstream out(path);
        out << doc.dump(2) << '\n';
    }

    static std::string manifest_path(const std::string& output) {
        const auto dot = output.find_last_of('.');
        const auto base = dot == std::string::npos ? output : output.substr(0, dot);
        return base + ".manifest.json";
    }

private:
    std::string command_;
    nlohmann::json config_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

nlohmann::json dist_to_json(const irsa::DegreeDistribution& dist) {
    nlohmann::json probs = nlohmann::json::object();
    for (const auto& [d, p] : dist.probs()) probs[std::to_string(d)] = p;
    return nlohmann::json{{"dist", probs}};
}

// flat key=value file: '#'/';' comments, optional quotes around the value,
// later duplicates win
std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: " + line);
        const std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        if (key.empty()) throw std::invalid_argument("config line has an empty key: " + line);
        entries.emplace_back(key, value);
    }
    return entries;
}

std::vector<double> resolve_loads(const std::vector<double>& loads, double lo, double hi,
                                  double step) {
    std::vector<double> grid = loads;
    if (grid.empty() && step > 0.0) {
        for (double g = lo; g <= hi + 0.5 * step; g += step) grid.push_back(std::min(g, hi));
    }
    if (grid.empty()) throw std::invalid_argument("no loads: give --loads or a load range");
    return grid;
}

// options shared by every subcommand
struct Common {
    double snr_db = 20.0;
    double threshold_db = 3.0;
    std::string distribution = "0.59 x^2 + 0.27 x^3 + 0.02 x^5 + 0.12 x^16";
    std::uint64_t seed = 1;
    std::string output;
    std::string config_path;
    int threads = irsa::default_workers();

    void attach(CLI::App& cmd, const std::string& default_output) {
        output = default_output;
        cmd.add_option("--config", config_path, "flat key=value config file; flags override it");
        cmd.add_option("--snr_db", snr_db, "average SNR in dB")->capture_default_str();
        cmd.add_option("--threshold_db", threshold_db, "capture threshold in dB (>= 0)")
            ->capture_default_str();
        cmd.add_option("--seed", seed, "master RNG seed")->capture_default_str();
        cmd.add_option("-o,--output", output, "result file ('-' for stdout)")
            ->capture_default_str();
        cmd.add_option("--threads", threads, "worker threads (env IRSA_THREADS)")
            ->capture_default_str();
    }
    void attach_distribution(CLI::App& cmd) {
        cmd.add_option("--distribution", distribution, "burst degree polynomial")
            ->capture_default_str();
    }

    irsa::ChannelModel channel() const {
        return irsa::ChannelModel::from_db(snr_db, threshold_db);
    }
    nlohmann::json base_config() const {
        return {{"snr_db", snr_db},
                {"threshold_db", threshold_db},
                {"seed", seed},
                {"threads", threads}};
    }
};

struct DeOpts {
    irsa::DeConfig cfg;
    void attach(CLI::App& cmd) {
        cmd.add_option("--max_iterations", cfg.max_iterations, "fixed-point iteration cap")
            ->capture_default_str();
        cmd.add_option("--convergence_eps", cfg.convergence_eps, "fixed-point stop tolerance")
            ->capture_default_str();
        cmd.add_option("--series_term_tol", cfg.series_term_tol, "series term truncation")
            ->capture_default_str();
        cmd.add_option("--series_max_terms", cfg.series_max_terms, "series length cap")
            ->capture_default_str();
    }
};

int cmd_analyze(const Common& common, const DeOpts& de, const std::vector<double>& loads,
                double lo, double hi, double step) {
    const auto grid = resolve_loads(loads, lo, hi, step);
    const auto dist = irsa::parse_polynomial(common.distribution);
    const auto ch = common.channel();

    auto config = common.base_config();
    config["distribution"] = common.distribution;
    config["loads"] = grid;
    RunManifest manifest("analyze", config);

    std::vector<irsa::DeResult> results(grid.size());
    irsa::parallel_for(grid.size(), common.threads, [&](std::size_t i) {
        results[i] = de_fixed_point(dist, grid[i], ch, de.cfg);
    });

    OutputFile out(common.output);
    out.stream() << "load,p_inf,plr,iterations\n";
    bool all_converged = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.stream() << fmt(grid[i]) << ',' << fmt(results[i].p_inf) << ',' << fmt(results[i].plr)
                     << ',' << results[i].iterations_used << '\n';
        all_converged = all_converged && results[i].converged;
    }
    if (out.is_file()) manifest.add_output(out.path());
    manifest.write();
    if (!all_converged) {
        std::cerr << "analyze: some loads did not converge within the iteration cap\n";
        return kExitNumericalError;
    }
    return 0;
}

int cmd_threshold(const Common& common, const DeOpts& de, const irsa::ThresholdSearch& search,
                  double plr_target) {
    const auto dist = irsa::parse_polynomial(common.distribution);
    const auto ch = common.channel();

    auto config = common.base_config();
    config["distribution"] = common.distribution;
    config["plr_target"] = plr_target;
    config["g_lo"] = search.g_lo;
    config["g_hi"] = search.g_hi;
    config["resolution"] = search.resolution;
    RunManifest manifest("threshold", config);

    const auto res = irsa::decoding_threshold(dist, ch, plr_target, de.cfg, search);

    OutputFile out(common.output);
    out.stream() << "distribution,snr_db,threshold_db,plr_target,g_star\n";
    out.stream() << '"' << common.distribution << "\"," << fmt(common.snr_db) << ','
                 << fmt(common.threshold_db) << ',' << fmt(plr_target) << ','
                 << fmt(res.threshold) << '\n';
    if (out.is_file()) manifest.add_output(out.path());
    manifest.write();
    if (!res.diagnostic.empty()) std::cerr << "threshold: " << res.diagnostic << '\n';
    return 0;
}

int cmd_sweep(const char* name, const Common& common, irsa::SimConfig sim,
              const std::vector<double>& loads, double lo, double hi, double step, long n_users) {
    const auto dist = irsa::parse_polynomial(common.distribution);
    sim.channel = common.channel();
    sim.seed = common.seed;
    sim.workers = common.threads;

    std::vector<double> grid;
    if (n_users >= 0)
        grid.push_back(static_cast<double>(n_users) / sim.n_slots);
    else
        grid = resolve_loads(loads, lo, hi, step);

    auto config = common.base_config();
    config["distribution"] = common.distribution;
    config["n_slots"] = sim.n_slots;
    config["n_frames"] = sim.n_frames;
    config["max_sic_iterations"] = sim.max_sic_iterations;
    config["loads"] = grid;
    RunManifest manifest(name, config);

    OutputFile out(common.output);
    out.stream()
        << "load,n_slots,n_frames,throughput,throughput_stderr,plr,plr_stderr,avg_sic_iterations\n";
    for (const auto& row : irsa::load_sweep(sim, dist, grid)) {
        const auto& s = row.stats;
        out.stream() << fmt(row.load) << ',' << s.n_slots << ',' << s.n_frames << ','
                     << fmt(s.throughput) << ',' << fmt(s.throughput_std_error) << ','
                     << fmt(s.plr) << ',' << fmt(s.plr_std_error) << ','
                     << fmt(s.avg_sic_iterations) << '\n';
    }
    if (out.is_file()) manifest.add_output(out.path());
    manifest.write();
    return 0;
}

int cmd_capture(const Common& common, int r_max, long samples) {
    const auto ch = common.channel();
    auto config = common.base_config();
    config["r_max"] = r_max;
    config["samples"] = samples;
    RunManifest manifest("capture", config);

    OutputFile out(common.output);
    out.stream() << "r,t,estimate,stderr\n";
    for (int r = 1; r <= r_max; ++r) {
        const auto est = irsa::capture_oracle(r, ch, samples, common.seed + r);
        for (int t = 1; t <= r; ++t)
            out.stream() << r << ',' << t << ',' << fmt(est[t - 1].estimate) << ','
                         << fmt(est[t - 1].std_error) << '\n';
    }
    if (out.is_file()) manifest.add_output(out.path());
    manifest.write();
    return 0;
}

int cmd_optimize(const Common& common, const irsa::OptConstraints& cons, irsa::OptConfig cfg,
                 const std::string& history_path) {
    const auto ch = common.channel();
    cfg.seed = common.seed;
    cfg.workers = common.threads;

    auto config = common.base_config();
    config["avg_degree"] = cons.target_avg_degree;
    config["d_max"] = cons.d_max;
    config["min_degree"] = cons.min_degree;
    config["plr_target"] = cons.plr_target;
    config["population"] = cfg.population_size;
    config["generations"] = cfg.max_generations;
    config["mutation_f"] = cfg.mutation_factor;
    config["crossover_cr"] = cfg.crossover_rate;
    config["target_fitness"] = cfg.target_fitness;
    RunManifest manifest("optimize", config);

    const auto res = irsa::optimize_distribution(cons, ch, cfg);

    OutputFile out(common.output);
    nlohmann::json doc = dist_to_json(res.best);
    doc["polynomial"] = irsa::format_polynomial(res.best);
    doc["threshold"] = res.threshold;
    doc["generations_run"] = res.generations_run;
    doc["fitness_evaluations"] = res.fitness_evaluations;
    out.stream() << doc.dump(2) << '\n';
    if (out.is_file()) manifest.add_output(out.path());

    if (!history_path.empty()) {
        std::ofstream hist(history_path);
        if (!hist) throw std::invalid_argument("cannot open history file: " + history_path);
        hist << "generation,best_threshold\n";
        for (std::size_t g = 0; g < res.best_history.size(); ++g)
            hist << g << ',' << fmt(res.best_history[g]) << '\n';
        manifest.add_output(history_path);
    }
    manifest.write();
    std::cerr << "optimize: best " << irsa::format_polynomial(res.best) << "  threshold "
              << fmt(res.threshold) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IRSA over Rayleigh block fading with capture: density evolution, "
                 "finite-frame simulation and degree-distribution design"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common common;
    DeOpts de;
    std::vector<double> loads;
    double load_min = 0.0, load_max = 0.0, load_step = 0.0;

    auto* analyze = app.add_subcommand("analyze", "asymptotic PLR over a load grid (CSV)");
    common.attach(*analyze, "analyze.csv");
    common.attach_distribution(*analyze);
    de.attach(*analyze);
    analyze->add_option("--loads", loads, "explicit load list")->delimiter(',');
    analyze->add_option("--load_min", load_min, "grid start");
    analyze->add_option("--load_max", load_max, "grid end");
    analyze->add_option("--load_step", load_step, "grid step");

    irsa::ThresholdSearch search;
    double plr_target = 1e-2;
    auto* threshold = app.add_subcommand("threshold", "asymptotic decoding threshold (CSV)");
    common.attach(*threshold, "threshold.csv");
    common.attach_distribution(*threshold);
    de.attach(*threshold);
    threshold->add_option("--plr_target", plr_target, "target PLR")->capture_default_str();
    threshold->add_option("--g_lo", search.g_lo, "search window start")->capture_default_str();
    threshold->add_option("--g_hi", search.g_hi, "search window end")->capture_default_str();
    threshold->add_option("--resolution", search.resolution, "bisection resolution")
        ->capture_default_str();

    irsa::SimConfig sim;
    long n_users = -1;
    auto* simulate = app.add_subcommand("simulate", "finite-frame Monte Carlo, one load point");
    auto* sweep = app.add_subcommand("sweep", "finite-frame Monte Carlo over a load grid (CSV)");
    for (auto* cmd : {simulate, sweep}) {
        common.attach(*cmd, cmd == simulate ? "simulate.csv" : "sweep.csv");
        common.attach_distribution(*cmd);
        cmd->add_option("--n_slots", sim.n_slots, "slots per frame")->capture_default_str();
        cmd->add_option("--n_frames", sim.n_frames, "frames to simulate")->capture_default_str();
        cmd->add_option("--max_sic_iterations", sim.max_sic_iterations, "SIC iteration cap")
            ->capture_default_str();
    }
    simulate->add_option("--load", load_min, "offered load (users = round(load * n_slots))");
    simulate->add_option("--n_users", n_users, "explicit user count (overrides --load)");
    sweep->add_option("--loads", loads, "explicit load list")->delimiter(',');
    sweep->add_option("--load_min", load_min, "grid start");
    sweep->add_option("--load_max", load_max, "grid end");
    sweep->add_option("--load_step", load_step, "grid step");

    int r_max = 6;
    long samples = 1000000;
    auto* capture = app.add_subcommand("capture", "Monte Carlo capture-step estimates (CSV)");
    common.attach(*capture, "capture.csv");
    capture->add_option("--r_max", r_max, "largest slot degree")->capture_default_str();
    capture->add_option("--samples", samples, "samples per degree")->capture_default_str();

    irsa::OptConstraints cons;
    irsa::OptConfig opt_cfg;
    std::string history_path = "optimize_history.csv";
    auto* optimize = app.add_subcommand("optimize", "degree-distribution design (JSON + CSV)");
    common.attach(*optimize, "optimize.json");
    optimize->add_option("--avg_degree", cons.target_avg_degree, "mean degree constraint")
        ->capture_default_str();
    optimize->add_option("--d_max", cons.d_max, "largest degree")->capture_default_str();
    optimize->add_option("--min_degree", cons.min_degree, "smallest degree")
        ->capture_default_str();
    optimize->add_flag("--mean_upper_bound", cons.mean_is_upper_bound,
                       "treat the mean as an upper bound instead of an equality");
    optimize->add_option("--plr_target", cons.plr_target, "target PLR")->capture_default_str();
    optimize->add_option("--population", opt_cfg.population_size, "population size")
        ->capture_default_str();
    optimize->add_option("--generations", opt_cfg.max_generations, "generation cap")
        ->capture_default_str();
    optimize->add_option("--mutation_f", opt_cfg.mutation_factor, "DE mutation factor")
        ->capture_default_str();
    optimize->add_option("--crossover_cr", opt_cfg.crossover_rate, "DE crossover rate")
        ->capture_default_str();
    optimize->add_option("--target_fitness", opt_cfg.target_fitness,
                         "stop once the coarse threshold reaches this (0 = off)")
        ->capture_default_str();
    optimize->add_option("--search_resolution", opt_cfg.search.resolution,
                         "coarse threshold resolution during the search")
        ->capture_default_str();
    optimize->add_option("--final_resolution", opt_cfg.final_resolution,
                         "resolution of the winner's re-evaluation")
        ->capture_default_str();
    optimize->add_option("--history", history_path, "per-generation best-fitness CSV")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        // second pass when a config file is given: inject file values for
        // every option the command line left untouched, then re-parse
        if (!common.config_path.empty()) {
            CLI::App* sub = app.get_subcommands().front();
            std::vector<std::string> args(argv + 1, argv + argc);
            for (const auto& [key, value] : read_flat_config(common.config_path)) {
                CLI::Option* opt = sub->get_option_no_throw("--" + key);
                if (opt == nullptr)
                    throw std::invalid_argument("unknown config key for " + sub->get_name() +
                                                ": " + key);
                if (opt->count() > 0) continue;  // flags override the file
                if (opt->get_expected_min() == 0) {
                    args.push_back("--" + key + "=" + value);
                } else {
                    args.push_back("--" + key);
                    args.push_back(value);
                }
            }
            std::reverse(args.begin(), args.end());
            app.parse(std::move(args));
        }
        if (analyze->parsed())
            return cmd_analyze(common, de, loads, load_min, load_max, load_step);
        if (threshold->parsed()) return cmd_threshold(common, de, search, plr_target);
        if (simulate->parsed())
            return cmd_sweep("simulate", common, sim, {load_min}, 0, 0, 0, n_users);
        if (sweep->parsed())
            return cmd_sweep("sweep", common, sim, loads, load_min, load_max, load_step, -1);
        if (capture->parsed()) return cmd_capture(common, r_max, samples);
        if (optimize->parsed()) return cmd_optimize(common, cons, opt_cfg, history_path);
        return kExitConfigError;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    } catch (const irsa::NumericalError& e) {
        std::cerr << "numerical diagnostic: " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}
