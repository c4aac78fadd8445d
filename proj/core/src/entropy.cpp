#include "fqlens/entropy.hpp"

#include "fqlens/error.hpp"

#include <cmath>
#include <string>

namespace fqlens {

QOrder::QOrder(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError("entropy order q must be a finite value > 0, got " +
                          std::to_string(value));
    }
}

bool QOrder::is_shannon() const noexcept { return std::fabs(value_ - 1.0) < kLimitEps; }

AlleleFreq::AlleleFreq(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("allele frequency must lie in [0, 1], got " + std::to_string(p));
    }
}

namespace detail {
namespace {

// x^q − x, written as x·expm1((q−1)·ln x) so that the numerator of the
// Tsallis form carries no cancellation when q is close to 1.
double power_excess(double x, double q) noexcept {
    if (x == 0.0) return 0.0;
    const double lx = std::log(x);
    const double t = (q - 1.0) * lx;
    if (t > 1.0) {
        // x^q is tiny but expm1 alone could overflow; no cancellation here.
        return std::exp(q * lx) - x;
    }
    return x * std::expm1(t);
}

double xlogx(double x) noexcept { return x == 0.0 ? 0.0 : x * std::log(x); }

// Both allele classes as (lo, hi) with hi = max(p, 1 − p) and lo = 1 − hi,
// which is exact for hi ≥ ½. p and fl(1 − p) map to the same pair, so the
// kernels are exactly symmetric; lo carries an absolute error ≤ 2^-54.
struct Classes {
    double lo, hi;
};

Classes classes(double p) noexcept {
    const double hi = p >= 0.5 ? p : 1.0 - p;
    return {1.0 - hi, hi};
}

}  // namespace

double tsallis_unchecked(double p, double q) noexcept {
    if (std::fabs(q - 1.0) < kLimitEps) return shannon_unchecked(p);
    const auto [lo, hi] = classes(p);
    // (1 − lo^q − hi^q)/(q−1) = −[(lo^q − lo) + (hi^q − hi)]/(q−1) since lo + hi = 1.
    const double s = -(power_excess(lo, q) + power_excess(hi, q)) / (q - 1.0);
    return s > 0.0 ? s : 0.0;
}

double shannon_unchecked(double p) noexcept {
    const auto [lo, hi] = classes(p);
    const double s = -(xlogx(lo) + xlogx(hi));
    return s > 0.0 ? s : 0.0;
}

}  // namespace detail

double tsallis_bern(AlleleFreq p, QOrder q) { return detail::tsallis_unchecked(p.value(), q.value()); }

double shannon_bern(AlleleFreq p) { return detail::shannon_unchecked(p.value()); }

double heterozygosity(AlleleFreq p) {
    const double x = p.value();
    return 2.0 * x * (1.0 - x);
}

}  // namespace fqlens
