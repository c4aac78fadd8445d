// =============================================================================
// entropy.hpp - Closed-form entropy kernels for a biallelic locus.
//
//   tsallis_bern(p, q)  = (1 − p^q − (1−p)^q) / (q − 1)      q > 0, q ≠ 1
//   shannon_bern(p)     = −p ln p − (1−p) ln(1−p)            (q → 1 limit)
//   heterozygosity(p)   = 2 p (1−p)                           (= q = 2 case)
//
// All logarithms are natural, so absolute entropies are in nats at q = 1.
// The boundary conventions 0·ln 0 = 0 and 0^q = 0 are applied explicitly.
// =============================================================================
#pragma once

namespace fqlens {

/// Below this distance from 1 the Tsallis form is replaced by its Shannon limit.
inline constexpr double kLimitEps = 1e-9;

/// Entropy order q; strictly positive and finite.
class QOrder {
public:
    explicit QOrder(double value);
    double value() const noexcept { return value_; }
    bool is_shannon() const noexcept;

    friend bool operator==(QOrder a, QOrder b) noexcept { return a.value_ == b.value_; }

private:
    double value_;
};

/// Frequency of the alternate allele in one group, in [0, 1].
class AlleleFreq {
public:
    explicit AlleleFreq(double p);
    double value() const noexcept { return p_; }

private:
    double p_;
};

double tsallis_bern(AlleleFreq p, QOrder q);
double shannon_bern(AlleleFreq p);
double heterozygosity(AlleleFreq p);

namespace detail {

// Unvalidated kernels for inner loops; callers guarantee p ∈ [0,1], q > 0.
double tsallis_unchecked(double p, double q) noexcept;
double shannon_unchecked(double p) noexcept;

}  // namespace detail

}  // namespace fqlens
