#include "epc/sim/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epc/errors.hpp"
#include "epc/kernels/kernels.hpp"
#include "epc/sim/rng.hpp"

namespace epc {

namespace {

constexpr double kFwhmToSigma = 1.0 / 2.35482004503094938;  // Gaussian FWHM -> sigma
constexpr double kMaxDurationS = 2000.0;  // keeps |t_ps| < 2^51 for the quantize kernel
constexpr std::size_t kTargetCandidatesPerSlab = 1u << 18;

// RNG stream tags, one independent stream per generating process
enum : std::uint64_t {
    kStreamPairs = 1,
    kStreamSinglesA = 2,
    kStreamSinglesB = 3,
    kStreamDarkA = 4,
    kStreamDarkB = 5,
};

struct ArmModel {
    bool analyzer_present = false;
    double single_pass_prob = 1.0;  // Tr(rho_arm P) for unpaired photons
    double survival = 1.0;          // gamma
    double eta_q = 1.0;
    double jitter_sigma_s = 0.0;
    double disp_delay_s_per_nm = 0.0;  // D * L * 1e-12; 0 when no fiber or no bandwidth
    double afterpulse_prob = 0.0;
    double afterpulse_tau_s = 0.0;
    std::int64_t dead_ps = 0;
};

struct JointOutcomeProbs {
    // cumulative thresholds for (pass,pass), (pass,fail), (fail,pass); remainder = (fail,fail)
    double c_both = 1.0;
    double c_a_only = 1.0;
    double c_b_only = 1.0;
    bool trivial = true;  // no analyzer on either arm
};

Mat2 analyzer_projector_or_identity(const std::optional<PolarizationAxis>& axis) {
    return axis ? axis_projector(*axis) : Mat2::identity();
}

JointOutcomeProbs make_joint_probs(const DensityMatrix& rho,
                                   const std::optional<PolarizationAxis>& ax_a,
                                   const std::optional<PolarizationAxis>& ax_b) {
    JointOutcomeProbs jp;
    if (!ax_a && !ax_b) return jp;
    jp.trivial = false;
    const Mat2 pa = analyzer_projector_or_identity(ax_a);
    const Mat2 pb = analyzer_projector_or_identity(ax_b);
    const Mat2 qa = Mat2::identity() - pa;
    const Mat2 qb = Mat2::identity() - pb;
    const double p_tt = joint_pass_probability(rho, pa, pb);
    const double p_tf = joint_pass_probability(rho, pa, qb);
    const double p_ft = joint_pass_probability(rho, qa, pb);
    jp.c_both = p_tt;
    jp.c_a_only = p_tt + p_tf;
    jp.c_b_only = p_tt + p_tf + p_ft;
    return jp;
}

double single_pass_prob(const DensityMatrix& rho, Side side,
                        const std::optional<PolarizationAxis>& axis) {
    if (!axis) return 1.0;
    const Mat2 reduced = partial_trace(rho, side);
    const Mat2 p = axis_projector(*axis);
    Cx t{};
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) t += reduced(r, c) * p(c, r);
    return std::clamp(t.real(), 0.0, 1.0);
}

// Pending candidate times (seconds) for one channel, flushed in sorted ps chunks
// once the generation frontier guarantees nothing earlier can still appear.
class ChannelAssembler {
public:
    void configure(const ArmModel& arm, double duration_s) {
        duration_s_ = duration_s;
        duration_ps_ = static_cast<std::int64_t>(std::llround(duration_s * 1e12));
        dead_ps_ = arm.dead_ps;
    }

    void add(double t_s) {
        if (t_s < duration_s_) pending_.push_back(t_s);
    }

    // Emit every pending event strictly below frontier_s through the dead-time filter.
    void flush(double frontier_s, Channel ch, EventSink& sink) {
        if (pending_.empty()) return;
        std::sort(pending_.begin(), pending_.end());
        const auto split = std::lower_bound(pending_.begin(), pending_.end(), frontier_s);
        const std::size_t n = static_cast<std::size_t>(split - pending_.begin());
        if (n == 0) return;

        quantized_.resize(n);
        kernels::scale_round_i64(pending_.data(), 1e12, quantized_.data(), n);
        pending_.erase(pending_.begin(), split);

        accepted_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t t = quantized_[i];
            if (t < 0 || t >= duration_ps_) continue;
            if (dead_ps_ > 0 && t - last_accepted_ < dead_ps_) continue;
            last_accepted_ = t;
            accepted_.push_back(t);
        }
        count_ += accepted_.size();
        if (!accepted_.empty()) sink.on_events(ch, accepted_);
    }

    std::uint64_t count() const { return count_; }

private:
    std::vector<double> pending_;
    std::vector<std::int64_t> quantized_;
    std::vector<std::int64_t> accepted_;
    double duration_s_ = 0.0;
    std::int64_t duration_ps_ = 0;
    std::int64_t dead_ps_ = 0;
    std::int64_t last_accepted_ = std::numeric_limits<std::int64_t>::min() / 4;
    std::uint64_t count_ = 0;
};

class Generator {
public:
    Generator(const ExperimentConfig& cfg, EventSink& sink)
        : cfg_(cfg),
          sink_(sink),
          rho_(cfg.state.to_density_matrix()),
          pair_rng_(Rng::derive(cfg.seed, kStreamPairs)),
          singles_a_rng_(Rng::derive(cfg.seed, kStreamSinglesA)),
          singles_b_rng_(Rng::derive(cfg.seed, kStreamSinglesB)),
          dark_a_rng_(Rng::derive(cfg.seed, kStreamDarkA)),
          dark_b_rng_(Rng::derive(cfg.seed, kStreamDarkB)) {
        arm_[0] = make_arm(Side::A);
        arm_[1] = make_arm(Side::B);
        joint_ = make_joint_probs(rho_, cfg.analyzer_a, cfg.analyzer_b);
        assembler_[0].configure(arm_[0], cfg.duration_s);
        assembler_[1].configure(arm_[1], cfg.duration_s);
        sigma_lambda_nm_ = cfg.source_bandwidth_nm * kFwhmToSigma;
        pair_needs_detuning_ = sigma_lambda_nm_ > 0.0 && (arm_[0].disp_delay_s_per_nm != 0.0 ||
                                                          arm_[1].disp_delay_s_per_nm != 0.0);
    }

    RunStats run() {
        const double duration = cfg_.duration_s;
        const double singles_rate = cfg_.rates.total_rate_hz - cfg_.rates.pair_rate_hz;
        double t_pair = next_arrival(pair_rng_, cfg_.rates.pair_rate_hz, 0.0);
        double t_sa = next_arrival(singles_a_rng_, singles_rate, 0.0);
        double t_sb = next_arrival(singles_b_rng_, singles_rate, 0.0);
        double t_da = next_arrival(dark_a_rng_, cfg_.detector_a.dark_rate_hz, 0.0);
        double t_db = next_arrival(dark_b_rng_, cfg_.detector_b.dark_rate_hz, 0.0);

        const double slab = slab_length();
        double t0 = 0.0;
        RunStats stats;
        while (t0 < duration) {
            const double t1 = std::min(t0 + slab, duration);
            while (t_pair < t1) {
                emit_pair(t_pair);
                ++stats.emitted_pairs;
                t_pair = next_arrival(pair_rng_, cfg_.rates.pair_rate_hz, t_pair);
            }
            while (t_sa < t1) {
                emit_single(Channel::A, t_sa, singles_a_rng_);
                t_sa = next_arrival(singles_a_rng_, singles_rate, t_sa);
            }
            while (t_sb < t1) {
                emit_single(Channel::B, t_sb, singles_b_rng_);
                t_sb = next_arrival(singles_b_rng_, singles_rate, t_sb);
            }
            while (t_da < t1) {
                register_event(Channel::A, t_da, dark_a_rng_);
                t_da = next_arrival(dark_a_rng_, cfg_.detector_a.dark_rate_hz, t_da);
            }
            while (t_db < t1) {
                register_event(Channel::B, t_db, dark_b_rng_);
                t_db = next_arrival(dark_b_rng_, cfg_.detector_b.dark_rate_hz, t_db);
            }
            flush(t1);
            t0 = t1;
        }
        flush(std::numeric_limits<double>::infinity());
        sink_.on_finish();
        stats.accepted_a = assembler_[0].count();
        stats.accepted_b = assembler_[1].count();
        stats.duration_s = duration;
        return stats;
    }

private:
    ArmModel make_arm(Side side) const {
        const bool is_a = side == Side::A;
        const DetectorParams& det = is_a ? cfg_.detector_a : cfg_.detector_b;
        const FiberParams& fiber = is_a ? cfg_.fiber_a : cfg_.fiber_b;
        const auto& axis = is_a ? cfg_.analyzer_a : cfg_.analyzer_b;
        ArmModel arm;
        arm.analyzer_present = axis.has_value();
        arm.single_pass_prob = single_pass_prob(rho_, side, axis);
        arm.survival = is_a ? cfg_.rates.transmissivity_a : cfg_.rates.transmissivity_b;
        arm.eta_q = det.eta_q;
        arm.jitter_sigma_s = det.jitter_sigma_s;
        if (cfg_.source_bandwidth_nm > 0.0 && fiber.length_km > 0.0)
            arm.disp_delay_s_per_nm = fiber.dispersion_ps_per_km_nm * fiber.length_km * 1e-12;
        arm.afterpulse_prob = det.afterpulse_prob;
        arm.afterpulse_tau_s = det.afterpulse_tau_s;
        arm.dead_ps = static_cast<std::int64_t>(std::llround(det.dead_time_s * 1e12));
        return arm;
    }

    static double next_arrival(Rng& rng, double rate_hz, double t) {
        if (rate_hz <= 0.0) return std::numeric_limits<double>::infinity();
        return t + rng.exponential(1.0 / rate_hz);
    }

    double slab_length() const {
        const double ap_boost =
            1.0 / (1.0 - std::max(cfg_.detector_a.afterpulse_prob, cfg_.detector_b.afterpulse_prob));
        const double rate = (cfg_.rates.pair_rate_hz +
                             2.0 * (cfg_.rates.total_rate_hz - cfg_.rates.pair_rate_hz) +
                             cfg_.detector_a.dark_rate_hz + cfg_.detector_b.dark_rate_hz) *
                            ap_boost;
        if (rate <= 0.0) return cfg_.duration_s;
        return std::clamp(static_cast<double>(kTargetCandidatesPerSlab) / rate, 1e-4,
                          cfg_.duration_s);
    }

    // Maximum amount by which post-processing can shift a candidate backwards in time.
    double guard(const ArmModel& arm) const {
        return 8.0 * arm.jitter_sigma_s + 8.0 * sigma_lambda_nm_ * std::abs(arm.disp_delay_s_per_nm) +
               1e-12;
    }

    void flush(double t1) {
        assembler_[0].flush(t1 - guard(arm_[0]), Channel::A, sink_);
        assembler_[1].flush(t1 - guard(arm_[1]), Channel::B, sink_);
    }

    // Detection chain shared by pair arms and singletons; detuning_nm is the photon's
    // wavelength offset from line center (0 when irrelevant to this arm).
    void detect_photon(Channel ch, double t_emit, double detuning_nm, Rng& rng) {
        const ArmModel& arm = arm_[static_cast<int>(ch)];
        if (arm.survival <= 0.0) return;
        if (arm.survival < 1.0 && !rng.bernoulli(arm.survival)) return;
        double t = t_emit;
        if (arm.disp_delay_s_per_nm != 0.0) t += arm.disp_delay_s_per_nm * detuning_nm;
        if (arm.jitter_sigma_s > 0.0) t += arm.jitter_sigma_s * rng.normal();
        if (arm.eta_q < 1.0 && !rng.bernoulli(arm.eta_q)) return;
        register_event(ch, t, rng);
    }

    // A registered event (photon detection, dark count or afterpulse) enters the
    // pending stream and may spawn a geometric afterpulse cascade.
    void register_event(Channel ch, double t, Rng& rng) {
        const ArmModel& arm = arm_[static_cast<int>(ch)];
        assembler_[static_cast<int>(ch)].add(t);
        while (arm.afterpulse_prob > 0.0 && rng.bernoulli(arm.afterpulse_prob)) {
            t += rng.exponential(arm.afterpulse_tau_s);
            assembler_[static_cast<int>(ch)].add(t);
        }
    }

    void emit_pair(double t) {
        bool pass_a = true;
        bool pass_b = true;
        if (!joint_.trivial) {
            const double u = pair_rng_.uniform();
            if (u < joint_.c_both) {
                // both pass
            } else if (u < joint_.c_a_only) {
                pass_b = false;
            } else if (u < joint_.c_b_only) {
                pass_a = false;
            } else {
                return;
            }
        }
        double detuning_nm = 0.0;
        if (pair_needs_detuning_ && (pass_a || pass_b))
            detuning_nm = sigma_lambda_nm_ * pair_rng_.normal();
        // energy conservation: the partner photon carries the opposite detuning
        if (pass_a) detect_photon(Channel::A, t, detuning_nm, pair_rng_);
        if (pass_b) detect_photon(Channel::B, t, -detuning_nm, pair_rng_);
    }

    void emit_single(Channel ch, double t, Rng& rng) {
        const ArmModel& arm = arm_[static_cast<int>(ch)];
        if (arm.analyzer_present && !rng.bernoulli(arm.single_pass_prob)) return;
        double detuning_nm = 0.0;
        if (arm.disp_delay_s_per_nm != 0.0 && sigma_lambda_nm_ > 0.0)
            detuning_nm = sigma_lambda_nm_ * rng.normal();
        detect_photon(ch, t, detuning_nm, rng);
    }

    const ExperimentConfig& cfg_;
    EventSink& sink_;
    DensityMatrix rho_;
    Rng pair_rng_, singles_a_rng_, singles_b_rng_, dark_a_rng_, dark_b_rng_;
    ArmModel arm_[2];
    JointOutcomeProbs joint_;
    ChannelAssembler assembler_[2];
    double sigma_lambda_nm_ = 0.0;
    bool pair_needs_detuning_ = false;
};

} // namespace

void ExperimentConfig::validate() const {
    try {
        state.validate();
        rates.validate();
        detector_a.validate();
        detector_b.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (fiber_a.length_km < 0.0 || fiber_b.length_km < 0.0)
        throw ConfigError("fiber length must be nonnegative");
    if (fiber_a.dispersion_ps_per_km_nm < 0.0 || fiber_b.dispersion_ps_per_km_nm < 0.0)
        throw ConfigError("fiber dispersion must be nonnegative");
    if (source_bandwidth_nm < 0.0) throw ConfigError("source bandwidth must be nonnegative");
    if (!(duration_s > 0.0)) throw ConfigError("duration must be positive");
    if (duration_s > kMaxDurationS)
        throw ConfigError("duration above 2000 s exceeds the picosecond timeline range");
}

std::int64_t ExperimentConfig::duration_ps() const {
    return static_cast<std::int64_t>(std::llround(duration_s * 1e12));
}

RunStats simulate(const ExperimentConfig& config, EventSink& sink) {
    config.validate();
    Generator gen(config, sink);
    return gen.run();
}

RunStats simulate_to_vectors(const ExperimentConfig& config, std::vector<std::int64_t>& a,
                             std::vector<std::int64_t>& b) {
    VectorSink sink;
    const RunStats stats = simulate(config, sink);
    a = std::move(sink.a);
    b = std::move(sink.b);
    return stats;
}

} // namespace epc
