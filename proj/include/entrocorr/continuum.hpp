#ifndef ENTROCORR_CONTINUUM_HPP
#define ENTROCORR_CONTINUUM_HPP

// Empirical side of the toolkit: sample Maxwell velocity components,
// check the independence and isotropy assumptions from data with the
// library's own mutual-information machinery, and run the bin-refinement
// sweep that shows the plug-in entropy of a binned continuous variable
// diverging as the bins shrink.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "entrocorr/accum.hpp"
#include "entrocorr/dist.hpp"
#include "entrocorr/entropy.hpp"
#include "entrocorr/error.hpp"
#include "entrocorr/rng.hpp"

namespace entrocorr {

/// Parameters of the velocity ensemble exp(-alpha v^2): each component is
/// an independent centered normal with variance 1/(2 alpha).
struct MaxwellParams {
    double alpha = 0.5;
    std::size_t n_samples = 1'000'000;
    std::uint64_t seed = 1;
};

class SampleSet {
public:
    SampleSet(std::vector<double> vx, std::vector<double> vy, std::vector<double> vz)
        : vx_(std::move(vx)), vy_(std::move(vy)), vz_(std::move(vz))
    {
        if (vx_.size() != vy_.size() || vx_.size() != vz_.size())
            fail(errc::shape_mismatch, "SampleSet: component streams of unequal length");
        for (const auto* v : {&vx_, &vy_, &vz_})
            for (double x : *v)
                if (!std::isfinite(x)) fail(errc::domain_error, "SampleSet: non-finite velocity");
    }

    std::size_t size() const noexcept { return vx_.size(); }
    std::span<const double> vx() const noexcept { return vx_; }
    std::span<const double> vy() const noexcept { return vy_; }
    std::span<const double> vz() const noexcept { return vz_; }

private:
    std::vector<double> vx_, vy_, vz_;
};

/// Uniform binning of [lo, hi) into `bins` cells; the top edge belongs to
/// the last cell.
struct BinSpec {
    double lo;
    double hi;
    std::size_t bins;

    BinSpec(double lo_, double hi_, std::size_t bins_) : lo(lo_), hi(hi_), bins(bins_)
    {
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
            fail(errc::domain_error, "BinSpec: need finite lo < hi");
        if (bins < 2) fail(errc::domain_error, "BinSpec: need at least 2 bins");
    }

    double width() const noexcept { return (hi - lo) / static_cast<double>(bins); }

    /// Cell index for v; out-of-range values land in the nearest edge cell
    /// and set `clamped`.
    std::size_t index(double v, bool& clamped) const noexcept
    {
        clamped = false;
        if (v < lo) {
            clamped = true;
            return 0;
        }
        if (v >= hi) {
            clamped = v > hi;
            return bins - 1;
        }
        const auto i = static_cast<std::size_t>((v - lo) / width());
        return std::min(i, bins - 1);
    }

    double midpoint(std::size_t i) const noexcept
    {
        return lo + (static_cast<double>(i) + 0.5) * width();
    }
};

/// Three independent component streams of exp(-alpha v^2) velocities.
/// Bit-identical for identical params; generator recorded in kRngId.
inline SampleSet sample_maxwell(const MaxwellParams& params)
{
    if (!(params.alpha > 0.0)) fail(errc::domain_error, "sample_maxwell: alpha must be > 0");
    if (params.n_samples < 1) fail(errc::domain_error, "sample_maxwell: need n_samples >= 1");

    const double stddev = std::sqrt(1.0 / (2.0 * params.alpha));
    SplitMix64 sm(params.seed);
    std::vector<std::vector<double>> streams;
    streams.reserve(3);
    for (int c = 0; c < 3; ++c) {
        NormalSampler sampler(sm.next(), 0.0, stddev);
        std::vector<double> v(params.n_samples);
        for (double& x : v) x = sampler.next();
        streams.push_back(std::move(v));
    }
    return SampleSet(std::move(streams[0]), std::move(streams[1]), std::move(streams[2]));
}

/// Histogram of one stream, normalized to a Marginal.  Out-of-range
/// samples are clamped to edge bins (mass is conserved); their count is
/// reported through `clamped` when given.
inline Marginal bin_marginal(std::span<const double> x, const BinSpec& spec,
                             std::size_t* clamped = nullptr)
{
    if (x.empty()) fail(errc::empty_input, "bin_marginal: no samples");
    std::vector<double> counts(spec.bins, 0.0);
    std::size_t n_clamped = 0;
    for (double v : x) {
        bool c = false;
        counts[spec.index(v, c)] += 1.0;
        n_clamped += c ? 1 : 0;
    }
    if (clamped) *clamped = n_clamped;
    return Marginal(std::move(counts), Normalize::renormalize);
}

/// Pairs (x_i, y_i) counted into a bx x by grid and normalized.
inline JointDist bin_joint(std::span<const double> x, std::span<const double> y,
                           const BinSpec& bx, const BinSpec& by, std::size_t* clamped = nullptr)
{
    if (x.empty()) fail(errc::empty_input, "bin_joint: no samples");
    if (x.size() != y.size()) fail(errc::shape_mismatch, "bin_joint: streams of unequal length");
    std::vector<double> counts(bx.bins * by.bins, 0.0);
    std::size_t n_clamped = 0;
    for (std::size_t s = 0; s < x.size(); ++s) {
        bool cx = false, cy = false;
        const std::size_t i = bx.index(x[s], cx);
        const std::size_t j = by.index(y[s], cy);
        counts[i * by.bins + j] += 1.0;
        n_clamped += (cx || cy) ? 1 : 0;
    }
    if (clamped) *clamped = n_clamped;
    return JointDist(bx.bins, by.bins, std::move(counts), Normalize::renormalize);
}

namespace detail {

inline double sample_variance(std::span<const double> x)
{
    StableSum m;
    for (double v : x) m.add(v);
    const double mean = m.value() / static_cast<double>(x.size());
    StableSum s;
    for (double v : x) s.add((v - mean) * (v - mean));
    return s.value() / static_cast<double>(x.size());
}

}  // namespace detail

inline constexpr std::size_t kSpeedHistBins = 200;

/// Empirical check of the two Maxwell assumptions.  mi_* are the pairwise
/// component mutual informations from binned joints (independence: all
/// near 0); speed_mode is the modal-bin midpoint of the speed histogram;
/// angular_deviation is the worst per-bin departure from uniformity of
/// binned cos(theta) and phi (isotropy: near 0).
struct MaxwellReport {
    double mi_xy;
    double mi_xz;
    double mi_yz;
    double speed_mode;
    double angular_deviation;
};

inline MaxwellReport maxwell_assumption_report(const SampleSet& s, std::size_t bins)
{
    if (s.size() == 0) fail(errc::empty_input, "maxwell_assumption_report: no samples");
    if (bins < 10) fail(errc::domain_error, "maxwell_assumption_report: need bins >= 10");

    // One scale estimate for the whole set; components share it by isotropy.
    const double var_pooled = (detail::sample_variance(s.vx()) + detail::sample_variance(s.vy()) +
                               detail::sample_variance(s.vz())) /
                              3.0;
    if (!(var_pooled > 0.0))
        fail(errc::domain_error, "maxwell_assumption_report: zero-variance samples");
    const double sd = std::sqrt(var_pooled);
    const BinSpec vspec(-6.0 * sd, 6.0 * sd, bins);

    MaxwellReport r{};
    r.mi_xy = mutual_information(bin_joint(s.vx(), s.vy(), vspec, vspec)).nats();
    r.mi_xz = mutual_information(bin_joint(s.vx(), s.vz(), vspec, vspec)).nats();
    r.mi_yz = mutual_information(bin_joint(s.vy(), s.vz(), vspec, vspec)).nats();

    // Speed histogram; alpha recovered from the pooled variance 1/(2 alpha).
    const double alpha_hat = 1.0 / (2.0 * var_pooled);
    const BinSpec sspec(0.0, 5.0 / std::sqrt(alpha_hat), kSpeedHistBins);
    std::vector<double> speed_counts(sspec.bins, 0.0);
    std::vector<double> cos_theta, phi;
    cos_theta.reserve(s.size());
    phi.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double vx = s.vx()[i], vy = s.vy()[i], vz = s.vz()[i];
        const double v = std::sqrt(vx * vx + vy * vy + vz * vz);
        bool c = false;
        speed_counts[sspec.index(v, c)] += 1.0;
        if (v > 0.0) {
            cos_theta.push_back(vz / v);
            phi.push_back(std::atan2(vy, vx));
        }
    }
    const std::size_t modal =
        static_cast<std::size_t>(std::max_element(speed_counts.begin(), speed_counts.end()) -
                                 speed_counts.begin());
    r.speed_mode = sspec.midpoint(modal);

    const double uniform_mass = 1.0 / static_cast<double>(bins);
    double dev = 0.0;
    const Marginal hcos = bin_marginal(cos_theta, BinSpec(-1.0, 1.0, bins));
    const Marginal hphi =
        bin_marginal(phi, BinSpec(-std::numbers::pi, std::numbers::pi, bins));
    for (std::size_t b = 0; b < bins; ++b) {
        dev = std::max(dev, std::abs(hcos[b] - uniform_mass));
        dev = std::max(dev, std::abs(hphi[b] - uniform_mass));
    }
    r.angular_deviation = dev;
    return r;
}

/// One row of the refinement study: plug-in entropy of the binned stream
/// and its bin-width-corrected value s_binned + ln(delta).
struct SweepRow {
    std::size_t bins;
    double delta;
    double s_binned;     // nats
    double s_corrected;  // nats, comparable to differential entropy
};

inline std::vector<SweepRow> bin_sweep(std::span<const double> x,
                                       std::span<const std::size_t> bin_counts, double lo,
                                       double hi)
{
    if (x.empty()) fail(errc::empty_input, "bin_sweep: no samples");
    if (bin_counts.empty()) fail(errc::empty_input, "bin_sweep: no bin counts");
    for (std::size_t i = 0; i < bin_counts.size(); ++i) {
        if (bin_counts[i] < 2) fail(errc::domain_error, "bin_sweep: bin counts must be >= 2");
        if (i > 0 && bin_counts[i] <= bin_counts[i - 1])
            fail(errc::non_ascending_bin_counts, "bin_sweep: bin counts must strictly ascend");
    }

    std::vector<SweepRow> table;
    table.reserve(bin_counts.size());
    for (std::size_t k : bin_counts) {
        const BinSpec spec(lo, hi, k);
        const double s = entropy(bin_marginal(x, spec)).nats();
        table.push_back({k, spec.width(), s, s + std::log(spec.width())});
    }
    return table;
}

}  // namespace entrocorr

#endif  // ENTROCORR_CONTINUUM_HPP
