// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Budgets are sized for a single core; the whole run takes
// a few minutes, dominated by the finite-frame Monte Carlo sweeps.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "irsa/capture.hpp"
#include "irsa/de.hpp"
#include "irsa/degree.hpp"
#include "irsa/opt.hpp"
#include "irsa/sim.hpp"
#include "support/oracles.hpp"

using namespace irsa;
namespace ts = irsa::testsupport;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_start;

void begin() { g_start = std::chrono::steady_clock::now(); }

void gate(const char* id, bool pass, const std::string& detail) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - g_start).count();
    std::printf("criterion %-3s [%s] %s (%.1fs)\n", id, pass ? "PASS" : "FAIL", detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

DegreeDistribution table_one(int row) {
    static const char* text[] = {
        "0.59 x^2 + 0.27 x^3 + 0.02 x^5 + 0.12 x^16",
        "0.61 x^2 + 0.25 x^3 + 0.03 x^6 + 0.02 x^7 + 0.07 x^8 + 0.02 x^10",
        "0.66 x^2 + 0.16 x^3 + 0.18 x^4",
        "0.65 x^2 + 0.33 x^3 + 0.02 x^4",
        "0.49 x^2 + 0.25 x^3 + 0.01 x^4 + 0.03 x^5 + 0.13 x^6 + 0.01 x^13 + 0.02 x^14 + 0.06 x^16",
    };
    return parse_polynomial(text[row - 1]);
}

const ChannelModel kReference = ChannelModel::from_db(20.0, 3.0);

// ---------------------------------------------------------------- criterion 1
void criterion_capture_oracle() {
    begin();
    const long samples = 1000000;
    double worst_z = 0.0;
    int checks = 0;
    bool pass = true;
    for (const double snr_db : {10.0, 20.0, 30.0}) {
        for (const double thr_db : {0.0, 3.0, 6.0}) {
            const auto ch = ChannelModel::from_db(snr_db, thr_db);
            for (int r = 1; r <= 6; ++r) {
                const auto est = capture_oracle(
                    r, ch, samples,
                    2 * 0x9e3779b9ULL +
                        0x1000 * static_cast<std::uint64_t>(snr_db + 10.0 * thr_db) + r);
                for (int t = 1; t <= r; ++t) {
                    const double p = capture_step_prob(r, t, ch);
                    const double sigma = std::sqrt(p * (1.0 - p) / samples);
                    const double z = sigma > 0.0
                                         ? std::abs(est[t - 1].estimate - p) / sigma
                                         : (est[t - 1].estimate == p ? 0.0 : 1e9);
                    worst_z = std::max(worst_z, z);
                    pass = pass && z < 3.0;
                    ++checks;
                }
            }
        }
    }
    gate("1", pass,
         fmt("capture closed form within 3 sigma of the 1e6-sample oracle; "
             "%d (r,t,channel) checks, worst z = %.2f",
             checks, worst_z));
}

// ---------------------------------------------------------------- criterion 2
void criterion_slot_update_identity() {
    begin();
    double worst = 0.0;
    for (int iq = 0; iq < 10; ++iq) {
        for (int ig = 0; ig < 10; ++ig) {
            const double q = iq / 9.0;
            const double offered = 0.1 + ig * (7.9 / 9.0);
            worst = std::max(worst, std::abs(f_s(q, offered, kReference) -
                                             f_s_reference(q, offered, kReference)));
        }
    }
    gate("2", worst < 1e-9,
         fmt("series form of the slot update matches the double-sum form on a "
             "10x10 grid, max |diff| = %.2e",
             worst));
}

// ---------------------------------------------------------------- criterion 3
void criterion_table_reproduction() {
    begin();
    const double expected[] = {1.863, 1.820, 1.703, 1.644, 1.734};
    bool pass = true;
    std::string detail = "published thresholds at 20 dB / 3 dB:";
    for (int row = 1; row <= 5; ++row) {
        const auto res = decoding_threshold(table_one(row), kReference, 1e-2);
        const double delta = res.threshold - expected[row - 1];
        pass = pass && res.feasible && std::abs(delta) < 0.015;
        detail += fmt(" %.3f(%+.3f)", res.threshold, delta);
    }
    gate("3", pass, detail + ", tolerance 0.015");
}

// ---------------------------------------------------------------- criterion 4
void criterion_collision_regression() {
    begin();
    const ChannelModel degenerate(1e12, 1e6);  // 120 dB average SNR, 60 dB threshold
    ThresholdSearch fine;
    fine.resolution = 1e-4;
    const auto fading =
        decoding_threshold(DegreeDistribution::single(3), degenerate, 1e-2, DeConfig{}, fine);
    const double collision = ts::collision_threshold({{3, 1.0}}, 1e-2);
    const double diff = std::abs(fading.threshold - collision);
    gate("4", diff < 1e-3,
         fmt("degenerate-channel threshold %.4f vs collision-channel recursion %.4f, "
             "|diff| = %.1e",
             fading.threshold, collision, diff));
}

// ---------------------------------------------------------------- criterion 5
void criterion_optimizer() {
    begin();
    {
        OptConstraints cons;
        cons.target_avg_degree = 4.0;
        OptConfig cfg;
        cfg.seed = 12345;
        cfg.max_generations = 500;
        cfg.target_fitness = 1.85;
        const auto res = optimize_distribution(cons, kReference, cfg);
        gate("5a", res.threshold >= 1.84,
             fmt("optimizer at mean degree 4 reached %.4f (>= 1.84, published optimum 1.863) "
                 "in %d generations",
                 res.threshold, res.generations_run));
    }
    begin();
    {
        OptConstraints cons;
        cons.target_avg_degree = 2.25;
        OptConfig cfg;
        cfg.seed = 7;
        cfg.max_generations = 500;
        cfg.target_fitness = 1.63;
        const auto res = optimize_distribution(cons, kReference, cfg);
        const bool pass = res.threshold >= 1.62;
        std::string detail = fmt(
            "optimizer at mean degree 2.25 reached %.4f after %d generations (target 1.62)",
            res.threshold, res.generations_run);
        if (!pass) {
            detail +=
                "; the published table is internally inconsistent here: its printed row-4 "
                "distribution has mean 2.37, not 2.25, and its threshold 1.644 belongs to "
                "that mean-2.37 distribution. Under an exact mean-2.25 constraint the "
                "optimum is the two-point {2: 0.75, 3: 0.25} at about 1.49; at mean 2.37 "
                "this optimizer reaches about 1.645";
        }
        gate("5b", pass, detail);
    }
}

// ------------------------------------------------------------ criteria 6 and 7
struct Sweep {
    std::vector<SweepRow> rows;
    double peak = 0.0;
    double peak_load = 0.0;
};

Sweep run_sweep(const DegreeDistribution& dist, int n_slots, double lo, double hi,
                std::uint64_t seed) {
    SimConfig cfg;
    cfg.n_slots = n_slots;
    cfg.channel = kReference;
    cfg.max_sic_iterations = 20;
    cfg.n_frames = 20000;
    cfg.seed = seed;
    std::vector<double> loads;
    for (double g = lo; g <= hi + 1e-9; g += 0.05) loads.push_back(g);
    Sweep sweep;
    sweep.rows = load_sweep(cfg, dist, loads);
    for (const auto& row : sweep.rows) {
        if (row.stats.throughput > sweep.peak) {
            sweep.peak = row.stats.throughput;
            sweep.peak_load = row.load;
        }
    }
    return sweep;
}

void criteria_finite_frame() {
    begin();
    const auto lambda1 = table_one(1);
    const auto lambda2 = table_one(2);

    const auto l2_n200 = run_sweep(lambda2, 200, 1.40, 1.80, 1);
    gate("6a", std::abs(l2_n200.peak - 1.52) <= 0.05,
         fmt("second design, n=200: peak throughput %.4f at load %.2f (published 1.52 +- 0.05)",
             l2_n200.peak, l2_n200.peak_load));

    begin();
    const auto l1_n200 = run_sweep(lambda1, 200, 1.20, 1.70, 1);
    gate("6b", std::abs(l1_n200.peak - 1.49) <= 0.05,
         fmt("first design, n=200: peak throughput %.4f at load %.2f (published 1.49 +- 0.05)",
             l1_n200.peak, l1_n200.peak_load));

    begin();
    const auto l1_n500 = run_sweep(lambda1, 500, 1.45, 1.75, 2);
    gate("6c", std::abs(l1_n500.peak - 1.61) <= 0.05,
         fmt("first design, n=500: peak throughput %.4f at load %.2f (published 1.61 +- 0.05)",
             l1_n500.peak, l1_n500.peak_load));

    begin();
    const auto l1_n1000 = run_sweep(lambda1, 1000, 1.45, 1.75, 2);
    const bool trend = l1_n200.peak < l1_n500.peak && l1_n500.peak < l1_n1000.peak;
    gate("6d", trend,
         fmt("peak throughput grows with frame size: %.4f (n=200) < %.4f (n=500) < %.4f "
             "(n=1000)",
             l1_n200.peak, l1_n500.peak, l1_n1000.peak));

    begin();
    // criterion 7 reuses the n=200 sweep of the first design: the largest
    // grid load that keeps PLR under 1e-2
    double plr_edge = 0.0;
    bool monotone_below = true;
    for (const auto& row : l1_n200.rows) {
        if (row.stats.plr < 1e-2)
            plr_edge = row.load;
        else
            break;
    }
    for (const auto& row : l1_n200.rows)
        if (row.load <= plr_edge && row.stats.plr >= 1e-2) monotone_below = false;
    gate("7", monotone_below && std::abs(plr_edge - 1.45) <= 0.05,
         fmt("first design, n=200: PLR stays below 1e-2 up to load %.2f (published 1.45 +- 0.05)",
             plr_edge));
}

// ---------------------------------------------------------------- criterion 8
void criterion_properties() {
    begin();
    bool pass = true;

    // slot-update boundary identity and monotonicity in q
    const double p_empty = 1.0 - std::exp(-kReference.threshold / kReference.avg_snr);
    pass = pass && std::abs(f_s(0.0, 3.0, kReference) - p_empty) < 1e-14;
    for (const double offered : {0.5, 3.0, 7.0}) {
        double prev = -1.0;
        for (int i = 0; i <= 100; ++i) {
            const double v = f_s(i / 100.0, offered, kReference);
            pass = pass && v >= prev - 1e-13 && v >= 0.0 && v <= 1.0;
            prev = v;
        }
    }

    // capture probability monotonicities
    for (const double snr : {10.0, 100.0, 1e4}) {
        double prev_r = 1.0;
        for (int r = 1; r <= 64; ++r) {
            const double d = capture_prob(r, ChannelModel(snr, 2.0));
            pass = pass && d >= 0.0 && d <= 1.0 && d <= prev_r + 1e-12;
            prev_r = d;
        }
    }

    // degree algebra normalization round trip
    {
        Rng rng(515151);
        for (int it = 0; it < 200; ++it) {
            std::map<int, double> probs;
            double sum = 0.0;
            for (int k = 0; k < 4; ++k) {
                const double w = rng.uniform_open();
                probs[1 + static_cast<int>(rng.uniform_int(16))] += w;
                sum += w;
            }
            for (auto& [d, p] : probs) p /= sum;
            const DegreeDistribution dist(probs);
            const auto back = to_node_perspective(to_edge_perspective(dist));
            for (const auto& [d, p] : dist.probs())
                pass = pass && std::abs(back.prob(d) - p) < 1e-10;
        }
    }

    // simulator reproducibility across runs and worker counts, plus the
    // throughput identity
    {
        SimConfig cfg;
        cfg.n_slots = 100;
        cfg.n_users = 130;
        cfg.channel = kReference;
        cfg.n_frames = 300;
        cfg.seed = 77;
        const auto a = run_simulation(cfg, table_one(3));
        auto cfg_parallel = cfg;
        cfg_parallel.workers = 4;
        const auto b = run_simulation(cfg_parallel, table_one(3));
        pass = pass && a.throughput == b.throughput && a.plr == b.plr &&
               a.per_frame_decoded == b.per_frame_decoded;
        const double realized = 130.0 / 100.0;
        pass = pass && std::abs(a.throughput - realized * (1.0 - a.plr)) < 1e-12;
    }

    // threshold search is stable under tighter numerics
    {
        const auto base = decoding_threshold(table_one(3), kReference, 1e-2);
        DeConfig tight;
        tight.max_iterations = 20000;
        tight.series_term_tol = 5e-16;
        const auto refined = decoding_threshold(table_one(3), kReference, 1e-2, tight);
        pass = pass && std::abs(base.threshold - refined.threshold) <= 1e-3 + 1e-12;
    }

    gate("8a", pass,
         "module invariants: slot-update identity and monotonicity, capture monotonicity, "
         "normalization round trip, bit-exact reproducibility, throughput identity, "
         "threshold stability");

    begin();
    // frame-level decoder against the all-orders brute force
    Rng rng(424242);
    int order_sensitive = 0;
    int mismatches = 0;
    int raise_findings = 0;
    const int frames = 1000;
    for (int it = 0; it < frames; ++it) {
        const auto frame = ts::random_small_frame(rng);
        const auto brute = ts::decode_all_orders(frame, kReference);
        const auto ours = decode_frame(frame, kReference, 20);
        if (ours.decoded != brute.ascending) ++mismatches;
        if (brute.order_sensitive) ++order_sensitive;

        // capture non-monotonicity findings, counted for the record: raising
        // an interferer's SNR can legitimately suppress its slot mates
        auto raised = frame;
        const auto u = rng.uniform_int(raised.users.size());
        const auto k = rng.uniform_int(raised.users[u].snr.size());
        raised.users[u].snr[k] *= 1.0 + 3.0 * rng.uniform();
        const auto after = decode_frame(raised, kReference, 20);
        for (std::size_t i = 0; i < frame.users.size(); ++i)
            if (ours.decoded[i] && !after.decoded[i]) {
                ++raise_findings;
                break;
            }
    }
    gate("8b", mismatches == 0,
         fmt("decoder matches the all-orders brute force on %d random small frames "
             "(%d mismatches, %d order-sensitivity findings, %d raise-SNR "
             "non-monotonicity findings logged)",
             frames, mismatches, order_sensitive, raise_findings));
}

}  // namespace

int main() {
    std::printf("acceptance suite: IRSA over Rayleigh block fading with capture\n");
    criterion_capture_oracle();
    criterion_slot_update_identity();
    criterion_table_reproduction();
    criterion_collision_regression();
    criterion_optimizer();
    criteria_finite_frame();
    criterion_properties();
    std::printf("%d criterion gate(s) failed\n", g_failures);
    return g_failures;
}
