#include <doctest.h>

#include <set>
#include <vector>

#include "ferropuf/rng.hpp"

using namespace ferropuf;

TEST_CASE("same key reproduces the same draw sequence") {
    RngStream a(42);
    RngStream b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    RngStream c(42);
    RngStream d(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(c.normal(0.0, 1.0) == d.normal(0.0, 1.0));
        CHECK(c.uniform(-1.0, 1.0) == d.uniform(-1.0, 1.0));
    }
}

TEST_CASE("derived children are independent of sibling order") {
    RngStream root(7);
    RngStream a1 = root.child("alpha", 3);
    RngStream b = root.child("beta", 0);
    RngStream a2 = root.child("alpha", 3);
    (void)b;
    for (int i = 0; i < 20; ++i) CHECK(a1.next_u64() == a2.next_u64());
}

TEST_CASE("distinct labels and indices give distinct streams") {
    RngStream root(7);
    std::set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 100; ++i) keys.insert(root.child("cell", i).key());
    keys.insert(root.child("row", 0).key());
    keys.insert(root.child("cellx", 0).key());
    CHECK(keys.size() == 102);
}

TEST_CASE("fair bit is roughly balanced") {
    RngStream rng(123);
    int ones = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) ones += rng.bit();
    const double p = static_cast<double>(ones) / n;
    CHECK(p > 0.48);
    CHECK(p < 0.52);
}
