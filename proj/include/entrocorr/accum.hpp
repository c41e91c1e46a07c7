#ifndef ENTROCORR_ACCUM_HPP
#define ENTROCORR_ACCUM_HPP

#include <cmath>
#include <span>

namespace entrocorr {

// Kahan-Babuska (Neumaier) compensated accumulator.  Probability and
// entropy sums in this library run through it so that identities stated
// at 1e-12 stay honest even for ~10^6 terms.
class StableSum {
public:
    StableSum() = default;
    explicit StableSum(double v) : sum_(v) {}

    void add(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            corr_ += (sum_ - t) + v;
        else
            corr_ += (v - t) + sum_;
        sum_ = t;
    }

    StableSum& operator+=(double v) noexcept
    {
        add(v);
        return *this;
    }

    double value() const noexcept { return sum_ + corr_; }

    void reset() noexcept { sum_ = corr_ = 0.0; }

private:
    double sum_ = 0.0;
    double corr_ = 0.0;
};

inline double stable_total(std::span<const double> xs) noexcept
{
    StableSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

}  // namespace entrocorr

#endif  // ENTROCORR_ACCUM_HPP
