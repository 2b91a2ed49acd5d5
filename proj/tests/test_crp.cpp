#include <doctest.h>

#include <filesystem>

#include "ferropuf/crp.hpp"

using namespace ferropuf;

namespace {

PufRow registered_row(int n, std::uint64_t seed) {
    DeviceParams params;
    RngStream rng(seed);
    PufRow row(n, params, CapMismatchModel{0.01}, SenseConfig{}, 0.5, rng);
    RngStream reg = rng.child("reg");
    row.register_cells(WriteConfig{}, reg);
    return row;
}

}  // namespace

TEST_CASE("generation requires a positive count") {
    const PufRow row = registered_row(9, 1);
    RngStream rng(2);
    CHECK_THROWS_AS(crp_generate(row, 0, rng), std::invalid_argument);
}

TEST_CASE("header records the group parameters") {
    const PufRow row = registered_row(9, 3);
    RngStream rng(4);
    const CrpSet set = crp_generate(row, 5, rng);
    const std::string text = serialize_crps(set);
    const std::string expected =
        "# n=9 k=1 kind=proposed seed=" + std::to_string(set.seed) + "\n";
    CHECK(text.substr(0, expected.size()) == expected);
    CHECK(set.seed == RngStream(4).key());
}

TEST_CASE("serialize/parse round trip preserves the set") {
    const PufRow row = registered_row(27, 5);
    RngStream rng(6);
    const CrpSet set = crp_generate(row, 200, rng);
    const CrpSet back = parse_crps(serialize_crps(set));
    CHECK(back.n == set.n);
    CHECK(back.k == set.k);
    CHECK(back.kind == set.kind);
    CHECK(back.seed == set.seed);
    CHECK(back.challenges == set.challenges);
    CHECK(back.responses == set.responses);

    RngStream arng(7);
    const ArbiterPuf puf(12, 3, arng);
    RngStream gen_rng(8);
    const CrpSet aset = crp_generate(puf, 100, gen_rng);
    CHECK(aset.k == 3);
    CHECK(aset.kind == PufKind::arbiter);
    const CrpSet aback = parse_crps(serialize_crps(aset));
    CHECK(aback.challenges == aset.challenges);
    CHECK(aback.responses == aset.responses);
}

TEST_CASE("regeneration with the same seed is byte-identical") {
    const PufRow row = registered_row(27, 9);
    RngStream r1(10);
    RngStream r2(10);
    CHECK(serialize_crps(crp_generate(row, 500, r1)) ==
          serialize_crps(crp_generate(row, 500, r2)));
}

TEST_CASE("challenges are uniform per bit") {
    const PufRow row = registered_row(27, 11);
    RngStream rng(12);
    const CrpSet set = crp_generate(row, 10000, rng);
    for (int j = 0; j < 27; ++j) {
        double ones = 0.0;
        for (const auto& c : set.challenges) ones += c[static_cast<std::size_t>(j)];
        const double p = ones / set.size();
        CHECK(std::abs(p - 0.5) < 4.0 * 0.005);  // 4 sigma binomial bound
    }
}

TEST_CASE("malformed files are rejected") {
    CHECK_THROWS(parse_crps(""));
    CHECK_THROWS(parse_crps("no header\n"));
    CHECK_THROWS(parse_crps("# n=3 k=1 kind=proposed seed=0\n01,1\n"));       // wrong length
    CHECK_THROWS(parse_crps("# n=3 k=1 kind=proposed seed=0\n012,1\n"));      // non-binary
    CHECK_THROWS(parse_crps("# n=3 k=1 kind=proposed seed=0\n010,2\n"));      // bad response
    CHECK_THROWS(parse_crps("# n=3 k=1 kind=banana seed=0\n"));               // bad kind
}

TEST_CASE("file save/load round trip") {
    const PufRow row = registered_row(9, 13);
    RngStream rng(14);
    const CrpSet set = crp_generate(row, 50, rng);
    const auto path = std::filesystem::temp_directory_path() / "ferropuf_test_crps.txt";
    save_crps(set, path);
    const CrpSet back = load_crps(path);
    CHECK(back.challenges == set.challenges);
    CHECK(back.responses == set.responses);
    std::filesystem::remove(path);
}
