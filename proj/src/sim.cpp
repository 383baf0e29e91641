#include "irsa/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "irsa/parallel.hpp"

namespace irsa {

int SimConfig::load_users(double load, int n_slots) {
    if (!(load >= 0.0)) throw std::invalid_argument("load must be >= 0");
    return static_cast<int>(std::lround(load * n_slots));
}

namespace {

int sample_degree(const DegreeDistribution& dist, Rng& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    int last = dist.min_degree();
    for (const auto& [d, p] : dist.probs()) {
        cum += p;
        last = d;
        if (u < cum) return d;
    }
    return last;  // u landed in the 1e-16 rounding sliver
}

// Floyd's sampling: d distinct values from [0, n) using exactly d draws
void sample_distinct_slots(int n, int d, Rng& rng, std::vector<int>& out) {
    out.clear();
    for (int j = n - d; j < n; ++j) {
        const int t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(j) + 1));
        if (std::find(out.begin(), out.end(), t) != out.end())
            out.push_back(j);
        else
            out.push_back(t);
    }
    std::sort(out.begin(), out.end());
}

}  // namespace

FrameRealization generate_frame(const SimConfig& cfg, const DegreeDistribution& dist, Rng& rng) {
    if (cfg.n_slots < 1) throw std::invalid_argument("generate_frame: n_slots must be >= 1");
    if (dist.min_degree() < 1)
        throw std::invalid_argument("generate_frame: burst degrees must be >= 1");
    if (dist.max_degree() > cfg.n_slots)
        throw std::invalid_argument("generate_frame: max degree exceeds slot count");
    FrameRealization frame;
    frame.n_slots = cfg.n_slots;
    frame.users.resize(cfg.n_users);
    for (auto& user : frame.users) {
        const int d = sample_degree(dist, rng);
        sample_distinct_slots(cfg.n_slots, d, rng, user.slots);
        user.snr.resize(user.slots.size());
        for (auto& b : user.snr) b = rng.exponential(cfg.channel.avg_snr);
    }
    return frame;
}

namespace {

struct Replica {
    int user;
    double snr;
};

}  // namespace

DecodeResult decode_frame(const FrameRealization& frame, const ChannelModel& ch, int max_iters) {
    if (max_iters < 1) throw std::invalid_argument("decode_frame: max_iters must be >= 1");
    const int n = frame.n_slots;
    const int m = static_cast<int>(frame.users.size());
    std::vector<std::vector<Replica>> slots(n);
    for (int u = 0; u < m; ++u) {
        const auto& user = frame.users[u];
        for (std::size_t k = 0; k < user.slots.size(); ++k)
            slots[user.slots[k]].push_back({u, user.snr[k]});
    }

    DecodeResult result;
    result.decoded.assign(m, 0);
    long remaining = m;
    std::vector<int> decoded_here;
    for (int iter = 1; iter <= max_iters && remaining > 0; ++iter) {
        bool progress = false;
        for (int j = 0; j < n; ++j) {
            auto& slot = slots[j];
            if (slot.empty()) continue;
            decoded_here.clear();
            double total = 0.0;
            for (const auto& rep : slot) total += rep.snr;
            // intra-slot IC: peel the one replica above threshold until stall
            while (!slot.empty()) {
                std::size_t best = 0;
                int qualifying = 0;
                for (std::size_t k = 0; k < slot.size(); ++k) {
                    const double interference = std::max(total - slot[k].snr, 0.0);
                    if (slot[k].snr >= ch.threshold * (1.0 + interference)) ++qualifying;
                    if (slot[k].snr > slot[best].snr) best = k;
                }
                if (qualifying > 1)
                    throw std::logic_error("decode_frame: multiple replicas met the threshold");
                const double interference = std::max(total - slot[best].snr, 0.0);
                if (slot[best].snr < ch.threshold * (1.0 + interference)) break;
                const int u = slot[best].user;
                result.decoded[u] = 1;
                --remaining;
                progress = true;
                decoded_here.push_back(u);
                total -= slot[best].snr;
                slot[best] = slot.back();
                slot.pop_back();
            }
            // inter-slot IC: cancel the other replicas of users decoded here
            for (const int u : decoded_here) {
                for (const int s : frame.users[u].slots) {
                    if (s == j) continue;
                    auto& other = slots[s];
                    for (std::size_t k = 0; k < other.size(); ++k) {
                        if (other[k].user == u) {
                            other[k] = other.back();
                            other.pop_back();
                            break;
                        }
                    }
                }
            }
        }
        result.iterations_used = iter;
        if (remaining == 0) {
            result.cause = Termination::Success;
            break;
        }
        if (!progress) {
            result.cause = Termination::Stalled;
            break;
        }
        result.cause = Termination::IterationLimit;
    }
    if (remaining == 0) result.cause = Termination::Success;
    result.decoded_count = m - remaining;
    return result;
}

SimStats run_simulation(const SimConfig& cfg, const DegreeDistribution& dist) {
    if (cfg.n_frames < 1) throw std::invalid_argument("run_simulation: n_frames must be >= 1");
    if (cfg.n_users < 0) throw std::invalid_argument("run_simulation: n_users must be >= 0");
    if (cfg.n_slots < 1) throw std::invalid_argument("run_simulation: n_slots must be >= 1");
    if (cfg.max_sic_iterations < 1)
        throw std::invalid_argument("run_simulation: max_sic_iterations must be >= 1");

    const auto frames = static_cast<std::size_t>(cfg.n_frames);
    std::vector<long> decoded(frames, 0);
    std::vector<int> iterations(frames, 0);
    parallel_for(frames, cfg.workers, [&](std::size_t f) {
        Rng rng = substream(cfg.seed, f);
        const FrameRealization frame = generate_frame(cfg, dist, rng);
        const DecodeResult res = decode_frame(frame, cfg.channel, cfg.max_sic_iterations);
        decoded[f] = res.decoded_count;
        iterations[f] = res.iterations_used;
    });

    SimStats stats;
    stats.n_frames = cfg.n_frames;
    stats.n_slots = cfg.n_slots;
    stats.n_users = cfg.n_users;
    stats.per_frame_decoded = decoded;

    // fixed-order reduction by frame index keeps results worker-independent
    double sum_t = 0.0, sum_t2 = 0.0, sum_iters = 0.0;
    for (std::size_t f = 0; f < frames; ++f) {
        const double t = static_cast<double>(decoded[f]) / cfg.n_slots;
        sum_t += t;
        sum_t2 += t * t;
        sum_iters += iterations[f];
    }
    const double nf = static_cast<double>(cfg.n_frames);
    stats.throughput = sum_t / nf;
    stats.avg_sic_iterations = sum_iters / nf;
    const double var_t = nf > 1 ? std::max(sum_t2 - nf * stats.throughput * stats.throughput, 0.0) / (nf - 1.0)
                                : 0.0;
    stats.throughput_std_error = std::sqrt(var_t / nf);
    if (cfg.n_users > 0) {
        const double scale = static_cast<double>(cfg.n_slots) / cfg.n_users;
        stats.plr = 1.0 - stats.throughput * scale;
        stats.plr_std_error = stats.throughput_std_error * scale;
    }
    return stats;
}

std::vector<SweepRow> load_sweep(const SimConfig& cfg, const DegreeDistribution& dist,
                                 const std::vector<double>& loads) {
    if (loads.empty()) throw std::invalid_argument("load_sweep: no loads");
    std::vector<SweepRow> rows;
    rows.reserve(loads.size());
    for (const double load : loads) {
        SimConfig point = cfg;
        point.n_users = SimConfig::load_users(load, cfg.n_slots);
        SweepRow row;
        row.load = load;
        row.stats = run_simulation(point, dist);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace irsa
