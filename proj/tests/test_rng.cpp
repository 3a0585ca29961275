#include <doctest.h>

#include <set>

#include "genaug/rng.hpp"

using namespace genaug;

TEST_CASE("rng is deterministic and seed-sensitive") {
    Rng a(7), b(7), c(8);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
    }
    bool any_diff = false;
    Rng a2(7);
    for (int i = 0; i < 100; ++i) any_diff = any_diff || (a2.next_u64() != c.next_u64());
    CHECK(any_diff);
}

TEST_CASE("next_double stays in [0,1)") {
    Rng rng(123);
    for (int i = 0; i < 10000; ++i) {
        const double d = rng.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
}

TEST_CASE("bounded covers the full range without bias artifacts") {
    Rng rng(42);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) seen.insert(rng.bounded(7));
    CHECK(seen.size() == 7);
    CHECK(*seen.rbegin() == 6);
}

TEST_CASE("mix64 separates per-item streams") {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(mix64(99, i));
    CHECK(seeds.size() == 1000);
    CHECK(mix64(99, 5) == mix64(99, 5));
    CHECK(mix64(99, 5) != mix64(100, 5));
}

TEST_CASE("shuffle permutes, preserving the multiset") {
    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    auto sorted = v;
    Rng rng(3);
    rng.shuffle(v);
    auto resorted = v;
    std::sort(resorted.begin(), resorted.end());
    CHECK(resorted == sorted);
}

TEST_CASE("sample_indices draws k distinct indices") {
    Rng rng(11);
    const auto idx = rng.sample_indices(50, 10);
    CHECK(idx.size() == 10);
    std::set<std::size_t> unique(idx.begin(), idx.end());
    CHECK(unique.size() == 10);
    for (auto i : idx) CHECK(i < 50);
}
