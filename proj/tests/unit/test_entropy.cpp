#include "fqlens/entropy.hpp"
#include "fqlens/error.hpp"

#include "information.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace fqlens;

namespace {

const std::vector<double> kGrid{0.0, 1e-12, 1e-6, 0.01, 0.1, 0.25, 1.0 / 3, 0.5, 0.7, 0.9, 0.999, 1.0};
const std::vector<double> kQs{0.25, 0.5, 0.75, 0.999, 1.25, 1.5, 2.0, 3.0, 4.0, 10.0};

}  // namespace

TEST_SUITE("entropy") {

TEST_CASE("argument domains") {
    CHECK_THROWS_AS(AlleleFreq(-1e-9), DomainError);
    CHECK_THROWS_AS(AlleleFreq(1.0 + 1e-9), DomainError);
    CHECK_THROWS_AS(AlleleFreq(std::nan("")), DomainError);
    CHECK_THROWS_AS(QOrder(0.0), DomainError);
    CHECK_THROWS_AS(QOrder(-2.0), DomainError);
    CHECK_THROWS_AS(QOrder(std::numeric_limits<double>::infinity()), DomainError);
    CHECK_THROWS_AS(QOrder(std::nan("")), DomainError);
    CHECK_NOTHROW(AlleleFreq(0.0));
    CHECK_NOTHROW(AlleleFreq(1.0));
}

TEST_CASE("monomorphic loci carry no entropy") {
    for (double q : kQs) {
        CHECK(tsallis_bern(AlleleFreq(0.0), QOrder(q)) == 0.0);
        CHECK(tsallis_bern(AlleleFreq(1.0), QOrder(q)) == 0.0);
    }
    CHECK(shannon_bern(AlleleFreq(0.0)) == 0.0);
    CHECK(shannon_bern(AlleleFreq(1.0)) == 0.0);
    CHECK(heterozygosity(AlleleFreq(1.0)) == 0.0);
}

TEST_CASE("reflection p <-> 1-p is exact") {
    for (double p : kGrid) {
        for (double q : kQs) {
            CHECK(tsallis_bern(AlleleFreq(p), QOrder(q)) == tsallis_bern(AlleleFreq(1.0 - p), QOrder(q)));
        }
        CHECK(shannon_bern(AlleleFreq(p)) == shannon_bern(AlleleFreq(1.0 - p)));
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double p = u(rng);
        const double q = 0.1 + 5.0 * u(rng);
        CHECK(tsallis_bern(AlleleFreq(p), QOrder(q)) == tsallis_bern(AlleleFreq(1.0 - p), QOrder(q)));
    }
}

TEST_CASE("matches the defining formula") {
    // The rarer class is rebuilt as 1 - max(p, 1 - p), so p stays clear of the
    // subnormal-relative regime here.
    for (double p : {0.0, 0.001, 0.01, 0.1, 0.25, 1.0 / 3, 0.5, 0.7, 0.9, 0.999, 1.0}) {
        for (double q : kQs) {
            const long double ref = oracle::tsallis(p, q);
            const double got = tsallis_bern(AlleleFreq(p), QOrder(q));
            CHECK(got >= 0.0);
            CHECK(std::fabs(got - static_cast<double>(ref)) <= 1e-13 * std::max(1.0L, ref));
        }
        CHECK(std::fabs(shannon_bern(AlleleFreq(p)) - static_cast<double>(oracle::shannon(p))) < 1e-15);
    }
}

TEST_CASE("q = 2 is expected heterozygosity") {
    for (double p : kGrid) {
        const double h = 2.0 * p * (1.0 - p);
        CHECK(std::fabs(heterozygosity(AlleleFreq(p)) - h) < 1e-16);
        CHECK(std::fabs(tsallis_bern(AlleleFreq(p), QOrder(2.0)) - h) < 1e-15);
    }
}

TEST_CASE("q near 1 switches to Shannon and stays continuous") {
    QOrder near(1.0 + kLimitEps / 2);
    CHECK(near.is_shannon());
    CHECK_FALSE(QOrder(1.0 + 1e-6).is_shannon());
    for (double p : kGrid) {
        const double h = shannon_bern(AlleleFreq(p));
        CHECK(tsallis_bern(AlleleFreq(p), QOrder(1.0)) == h);
        CHECK(tsallis_bern(AlleleFreq(p), near) == h);
        CHECK(std::fabs(tsallis_bern(AlleleFreq(p), QOrder(1.0 + 1e-7)) - h) < 1e-6);
        CHECK(std::fabs(tsallis_bern(AlleleFreq(p), QOrder(1.0 - 1e-7)) - h) < 1e-6);
    }
}

TEST_CASE("positive exactly on the interior") {
    for (double p : kGrid) {
        for (double q : kQs) {
            const double s = tsallis_bern(AlleleFreq(p), QOrder(q));
            if (p == 0.0 || p == 1.0) {
                CHECK(s == 0.0);
            } else {
                CHECK(s > 0.0);
            }
        }
    }
}

TEST_CASE("concave on a grid") {
    const std::vector<double> ps{0.0, 0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95, 1.0};
    for (double q : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
        const QOrder qo(q);
        for (double p1 : ps) {
            for (double p2 : ps) {
                for (double lam = 0.0; lam <= 1.0; lam += 0.125) {
                    const double mix = lam * p1 + (1.0 - lam) * p2;
                    const double lhs = tsallis_bern(AlleleFreq(mix), qo);
                    const double rhs = lam * tsallis_bern(AlleleFreq(p1), qo) +
                                       (1.0 - lam) * tsallis_bern(AlleleFreq(p2), qo);
                    CHECK(lhs >= rhs - 1e-12);
                }
            }
        }
    }
}

TEST_CASE("entropy peaks at p = 1/2") {
    for (double q : kQs) {
        const double top = tsallis_bern(AlleleFreq(0.5), QOrder(q));
        for (double p : kGrid) CHECK(tsallis_bern(AlleleFreq(p), QOrder(q)) <= top);
    }
    CHECK(shannon_bern(AlleleFreq(0.5)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

}  // TEST_SUITE
