#ifndef FERROPUF_CRP_HPP
#define FERROPUF_CRP_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ferropuf/arbiter.hpp"
#include "ferropuf/puf.hpp"

namespace ferropuf {

enum class PufKind { proposed, arbiter };

std::string to_string(PufKind kind);
PufKind puf_kind_from_string(const std::string& s);

/// Challenge-response pairs plus the provenance recorded in the file header.
struct CrpSet {
    int n = 0;
    int k = 1;
    PufKind kind = PufKind::proposed;
    std::uint64_t seed = 0;
    std::vector<Challenge> challenges;
    BitVector responses;

    int size() const { return static_cast<int>(responses.size()); }
};

/// Uniformly random challenges (with replacement) paired with responses.
/// Throws std::invalid_argument when count < 1.
CrpSet crp_generate(const PufRow& row, int count, RngStream& rng);
CrpSet crp_generate(std::span<const PufRow* const> xor_rows, int count, RngStream& rng);
CrpSet crp_generate(const ArbiterPuf& puf, int count, RngStream& rng);

/// Text format: header `# n=<N> k=<K> kind=<proposed|arbiter> seed=<u64>`,
/// then one `<challenge-bitstring>,<response-bit>` line per pair,
/// most-significant cell first.
std::string serialize_crps(const CrpSet& set);
CrpSet parse_crps(const std::string& text);

void save_crps(const CrpSet& set, const std::filesystem::path& path);
CrpSet load_crps(const std::filesystem::path& path);

}  // namespace ferropuf

#endif
