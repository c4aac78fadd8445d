#include "fqlens/digest.hpp"
#include "fqlens/parallel.hpp"
#include "fqlens/rng.hpp"
#include "fqlens/summation.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <array>
#include <fstream>
#include <set>
#include <stdexcept>

using namespace fqlens;

TEST_SUITE("rng") {

TEST_CASE("philox known-answer vectors") {
    using B = std::array<std::uint32_t, 4>;
    CHECK(Philox::block({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("engine output is the block sequence of its stream") {
    const std::uint64_t seed = 0x0123456789abcdefULL;
    const std::uint64_t stream = stream_id(StreamTag::test, 3, 7);
    Philox eng(seed, stream);
    const std::array<std::uint32_t, 2> key{0x89abcdefu, 0x01234567u};
    for (std::uint32_t n = 0; n < 5; ++n) {
        const auto b = Philox::block({n, 0, static_cast<std::uint32_t>(stream),
                                      static_cast<std::uint32_t>(stream >> 32)},
                                     key);
        for (auto w : b) CHECK(eng() == w);
    }
}

TEST_CASE("stream ids pack tag, group and index") {
    CHECK(stream_id(StreamTag::bootstrap, 0, 5) == ((1ULL << 56) | 5));
    CHECK(stream_id(StreamTag::gametes, 2, 1) == ((5ULL << 56) | (2ULL << 32) | 1));
    CHECK(stream_id(StreamTag::test, 0xFFFFFF, 0xFFFFFFFF) == ~0ULL);
    // Group overflow is masked rather than bleeding into the tag.
    CHECK(stream_id(StreamTag::founders, 0x1000000, 0) == (2ULL << 56));
}

TEST_CASE("distinct streams and seeds give distinct sequences") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t s = 0; s < 64; ++s) {
        Philox a(1, stream_id(StreamTag::test, 0, s));
        firsts.insert((std::uint64_t{a()} << 32) | a());
        Philox b(s + 2, stream_id(StreamTag::test, 0, 0));
        firsts.insert((std::uint64_t{b()} << 32) | b());
    }
    CHECK(firsts.size() == 128);

    Philox x(9, 4), y(9, 4);
    for (int i = 0; i < 1000; ++i) CHECK(x() == y());
}

TEST_CASE("uniform and below stay in range and are roughly flat") {
    Philox eng(42, stream_id(StreamTag::test, 1, 0));
    for (int i = 0; i < 100000; ++i) {
        const double u = eng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    // Chi-square over 7 cells; 99.99% quantile with 6 df is about 27.9.
    constexpr std::uint64_t k = 7;
    constexpr int n = 70000;
    std::array<int, k> cells{};
    for (int i = 0; i < n; ++i) {
        const auto v = eng.below(k);
        REQUIRE(v < k);
        ++cells[v];
    }
    double chi2 = 0.0;
    for (int c : cells) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    CHECK(chi2 < 27.9);
    CHECK(eng.below(1) == 0);
    // Large bounds exercise the rejection path without hanging.
    const std::uint64_t big = (1ULL << 63) + 1;
    for (int i = 0; i < 1000; ++i) CHECK(eng.below(big) < big);
}

TEST_CASE("sha256 matches published digests") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto dir = testing::temp_dir("digest");
    const auto f = dir / "abc.txt";
    std::ofstream(f, std::ios::binary) << "abc";
    CHECK(sha256_file(f) == sha256_hex("abc"));
}

TEST_CASE("compensated sum recovers cancelled terms") {
    CompensatedSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    CHECK(s.value() == 2.0);

    CompensatedSum a, b;
    for (int i = 0; i < 10; ++i) a.add(0.1);
    b.add(-1.0);
    a.merge(b);
    CHECK(std::fabs(a.value()) < 1e-16);
}

TEST_CASE("chunk runner visits every chunk once and propagates errors") {
    for (unsigned threads : {1u, 3u, 8u}) {
        std::vector<int> hits(50, 0);
        for_each_chunk(hits.size(), threads, [&](std::size_t c) { ++hits[c]; });
        for (int h : hits) CHECK(h == 1);
        CHECK_THROWS_AS(for_each_chunk(20, threads,
                                       [](std::size_t c) {
                                           if (c == 13) throw std::runtime_error("chunk");
                                       }),
                        std::runtime_error);
    }
}

}  // TEST_SUITE
