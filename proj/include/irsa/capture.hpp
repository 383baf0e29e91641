#pragma once

#include <cstdint>
#include <vector>

namespace irsa {

// Rayleigh block fading channel with threshold capture: per-replica SNR is
// exponential with mean avg_snr, and a replica is decoded iff its SINR is at
// least threshold. All members are linear power ratios; dB conversion happens
// only at configuration boundaries.
struct ChannelModel {
    double avg_snr;    // mean SNR, > 0
    double threshold;  // capture threshold, >= 1 (single decode per SIC step)

    ChannelModel(double avg_snr_linear, double threshold_linear);
    static ChannelModel from_db(double snr_db, double threshold_db);
};

double db_to_linear(double db);
double linear_to_db(double linear);

// D(r,t): probability that a randomly chosen reference replica among r in a
// slot is decoded exactly at intra-slot SIC step t, 1 <= t <= r. Evaluated in
// log domain; underflows return 0.
double capture_step_prob(int r, int t, const ChannelModel& ch);

// D(r) = sum_t D(r,t).
double capture_prob(int r, const ChannelModel& ch);

struct CaptureEstimate {
    double estimate;
    double std_error;
};

// Monte Carlo estimate of D(r,1..r): draws r i.i.d. exponential SNRs, runs
// intra-slot SIC (repeatedly decode the single replica meeting the SINR
// threshold, cancel it, repeat) and records the step at which a uniformly
// chosen reference replica decodes. Reproducible for a fixed seed.
std::vector<CaptureEstimate> capture_oracle(int r, const ChannelModel& ch, long samples,
                                            std::uint64_t seed);

}  // namespace irsa
