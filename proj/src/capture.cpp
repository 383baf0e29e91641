#include "irsa/capture.hpp"

#include <cmath>
#include <stdexcept>

#include "irsa/rng.hpp"

namespace irsa {

ChannelModel::ChannelModel(double avg_snr_linear, double threshold_linear)
    : avg_snr(avg_snr_linear), threshold(threshold_linear) {
    if (!(avg_snr > 0.0)) throw std::invalid_argument("ChannelModel: average SNR must be > 0");
    if (!(threshold >= 1.0))
        throw std::invalid_argument("ChannelModel: capture threshold must be >= 1 (0 dB)");
}

ChannelModel ChannelModel::from_db(double snr_db, double threshold_db) {
    return ChannelModel(db_to_linear(snr_db), db_to_linear(threshold_db));
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double capture_step_prob(int r, int t, const ChannelModel& ch) {
    if (r < 1) throw std::invalid_argument("capture_step_prob: r must be >= 1");
    if (t < 1 || t > r) throw std::invalid_argument("capture_step_prob: t out of range [1, r]");
    const double log_b1 = std::log1p(ch.threshold);
    // (1+b)^t as exp(t log1p(b)); bail out to 0 before it can overflow the
    // exponential's argument
    const double w = t * log_b1;
    if (w > std::log(745.0 * ch.avg_snr)) return 0.0;
    const double z = std::exp(w);
    const double log_d = std::lgamma(r) - std::lgamma(r - t + 1) - (z - 1.0) / ch.avg_snr -
                         t * (r - 0.5 * (t + 1)) * log_b1;
    if (log_d < -745.0) return 0.0;
    const double d = std::exp(log_d);
    return d > 1.0 ? 1.0 : d;
}

double capture_prob(int r, const ChannelModel& ch) {
    if (r < 1) throw std::invalid_argument("capture_prob: r must be >= 1");
    double sum = 0.0;
    for (int t = 1; t <= r; ++t) sum += capture_step_prob(r, t, ch);
    return sum > 1.0 ? 1.0 : sum;
}

std::vector<CaptureEstimate> capture_oracle(int r, const ChannelModel& ch, long samples,
                                            std::uint64_t seed) {
    if (r < 1) throw std::invalid_argument("capture_oracle: r must be >= 1");
    if (samples < 1) throw std::invalid_argument("capture_oracle: samples must be >= 1");
    Rng rng(splitmix64(seed));
    std::vector<long> step_counts(static_cast<std::size_t>(r) + 1, 0);  // [0] = never decoded
    std::vector<double> snr(r);
    std::vector<int> alive(r);
    for (long s = 0; s < samples; ++s) {
        double total = 0.0;
        for (int i = 0; i < r; ++i) {
            snr[i] = rng.exponential(ch.avg_snr);
            alive[i] = i;
            total += snr[i];
        }
        const int reference = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(r)));
        int n_alive = r;
        int decoded_step = 0;
        for (int step = 1; n_alive > 0; ++step) {
            // with threshold >= 1 only the strongest replica can qualify
            int best = 0;
            int qualifying = 0;
            for (int k = 0; k < n_alive; ++k) {
                const int i = alive[k];
                if (snr[i] >= ch.threshold * (1.0 + (total - snr[i]))) ++qualifying;
                if (snr[i] > snr[alive[best]]) best = k;
            }
            if (qualifying > 1)
                throw std::logic_error("capture_oracle: multiple replicas met the threshold");
            const int winner = alive[best];
            if (qualifying == 0 ||
                snr[winner] < ch.threshold * (1.0 + (total - snr[winner])))
                break;
            if (winner == reference) {
                decoded_step = step;
                break;
            }
            total -= snr[winner];
            alive[best] = alive[--n_alive];
        }
        ++step_counts[decoded_step];
    }
    std::vector<CaptureEstimate> out(r);
    const double n = static_cast<double>(samples);
    for (int t = 1; t <= r; ++t) {
        const double p = step_counts[t] / n;
        out[t - 1] = {p, std::sqrt(p * (1.0 - p) / n)};
    }
    return out;
}

}  // namespace irsa
