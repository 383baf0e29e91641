#pragma once

#include <cstdint>
#include <vector>

#include "irsa/capture.hpp"
#include "irsa/degree.hpp"
#include "irsa/rng.hpp"

namespace irsa {

// One sampled MAC frame: the bipartite user/slot graph plus an independent
// exponential SNR draw per replica.
struct FrameRealization {
    struct User {
        std::vector<int> slots;   // distinct slot indices, ascending
        std::vector<double> snr;  // linear SNR per replica, > 0
    };
    int n_slots = 0;
    std::vector<User> users;
};

struct SimConfig {
    int n_slots = 200;
    int n_users = 0;  // use load_users() to derive from a target load
    ChannelModel channel = ChannelModel::from_db(20.0, 3.0);
    int max_sic_iterations = 20;
    long n_frames = 10000;
    std::uint64_t seed = 1;
    int workers = 1;

    static int load_users(double load, int n_slots);
};

enum class Termination { Success, Stalled, IterationLimit };

struct DecodeResult {
    std::vector<std::uint8_t> decoded;  // one flag per user
    int iterations_used = 0;
    Termination cause = Termination::Success;
    long decoded_count = 0;
};

// Each user samples a repetition degree from `dist` and places that many
// replicas in distinct uniformly chosen slots, one SNR draw per replica.
FrameRealization generate_frame(const SimConfig& cfg, const DegreeDistribution& dist, Rng& rng);

// SIC receiver: one iteration processes slots in ascending order; within a
// slot, intra-slot IC repeatedly decodes the single replica whose SINR meets
// the threshold, then inter-slot IC removes the other replicas of users
// decoded in that slot before moving on. Stops on success (all users
// decoded), stall (no new user decoded in a full iteration) or the iteration
// cap. Deterministic: no RNG inside.
DecodeResult decode_frame(const FrameRealization& frame, const ChannelModel& ch, int max_iters);

struct SimStats {
    double throughput = 0.0;  // decoded packets per slot
    double throughput_std_error = 0.0;
    double plr = 0.0;  // 1 - decoded/offered (0 when no users are offered)
    double plr_std_error = 0.0;
    double avg_sic_iterations = 0.0;
    long n_frames = 0;
    int n_slots = 0;
    int n_users = 0;
    std::vector<long> per_frame_decoded;
};

// Aggregates decode_frame over cfg.n_frames independent frames. Per-frame
// RNG streams derive from (seed, frame index); results are reduced in frame
// order, so output is bit-identical for any worker count.
SimStats run_simulation(const SimConfig& cfg, const DegreeDistribution& dist);

struct SweepRow {
    double load = 0.0;
    SimStats stats;
};

std::vector<SweepRow> load_sweep(const SimConfig& cfg, const DegreeDistribution& dist,
                                 const std::vector<double>& loads);

}  // namespace irsa
