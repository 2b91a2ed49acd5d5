#include "ferropuf/crp.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ferropuf {

std::string to_string(PufKind kind) {
    return kind == PufKind::proposed ? "proposed" : "arbiter";
}

PufKind puf_kind_from_string(const std::string& s) {
    if (s == "proposed") return PufKind::proposed;
    if (s == "arbiter") return PufKind::arbiter;
    throw std::invalid_argument("unknown PUF kind '" + s + "'");
}

namespace {

template <typename RespondFn>
CrpSet generate(int n, int k, PufKind kind, int count, RngStream& rng, RespondFn&& respond) {
    if (count < 1) throw std::invalid_argument("CRP count must be >= 1");
    CrpSet set;
    set.n = n;
    set.k = k;
    set.kind = kind;
    set.seed = rng.key();
    set.challenges.reserve(static_cast<std::size_t>(count));
    set.responses.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Challenge c = random_challenge(n, rng);
        set.responses.push_back(static_cast<std::uint8_t>(respond(c)));
        set.challenges.push_back(std::move(c));
    }
    return set;
}

}  // namespace

CrpSet crp_generate(const PufRow& row, int count, RngStream& rng) {
    return generate(row.size(), 1, PufKind::proposed, count, rng,
                    [&](const Challenge& c) { return row.response_bit(c); });
}

CrpSet crp_generate(std::span<const PufRow* const> xor_rows, int count, RngStream& rng) {
    if (xor_rows.empty()) throw std::invalid_argument("XOR group needs at least one row");
    const int n = xor_rows.front()->size();
    return generate(n, static_cast<int>(xor_rows.size()), PufKind::proposed, count, rng,
                    [&](const Challenge& c) {
                        int bit = 0;
                        for (const PufRow* row : xor_rows) bit ^= row->response_bit(c);
                        return bit;
                    });
}

CrpSet crp_generate(const ArbiterPuf& puf, int count, RngStream& rng) {
    return generate(puf.n(), puf.k(), PufKind::arbiter, count, rng,
                    [&](const Challenge& c) { return puf.response(c); });
}

std::string serialize_crps(const CrpSet& set) {
    std::ostringstream out;
    out << "# n=" << set.n << " k=" << set.k << " kind=" << to_string(set.kind)
        << " seed=" << set.seed << "\n";
    for (std::size_t i = 0; i < set.challenges.size(); ++i) {
        for (std::uint8_t b : set.challenges[i]) out << static_cast<char>('0' + b);
        out << ',' << static_cast<char>('0' + set.responses[i]) << "\n";
    }
    return out.str();
}

CrpSet parse_crps(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CRP data");

    CrpSet set;
    {
        std::istringstream header(line);
        std::string hash, field;
        header >> hash;
        if (hash != "#") throw std::runtime_error("CRP header must start with '#'");
        while (header >> field) {
            const auto eq = field.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("malformed CRP header field '" + field + "'");
            const std::string key = field.substr(0, eq);
            const std::string value = field.substr(eq + 1);
            if (key == "n") set.n = std::stoi(value);
            else if (key == "k") set.k = std::stoi(value);
            else if (key == "kind") set.kind = puf_kind_from_string(value);
            else if (key == "seed") set.seed = std::stoull(value);
            else throw std::runtime_error("unknown CRP header field '" + key + "'");
        }
    }

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || comma + 2 != line.size()) {
            throw std::runtime_error("malformed CRP line " + std::to_string(lineno));
        }
        Challenge c(comma);
        for (std::size_t i = 0; i < comma; ++i) {
            const char ch = line[i];
            if (ch != '0' && ch != '1')
                throw std::runtime_error("non-binary challenge on line " + std::to_string(lineno));
            c[i] = static_cast<std::uint8_t>(ch - '0');
        }
        if (static_cast<int>(c.size()) != set.n)
            throw std::runtime_error("challenge length mismatch on line " + std::to_string(lineno));
        const char r = line[comma + 1];
        if (r != '0' && r != '1')
            throw std::runtime_error("non-binary response on line " + std::to_string(lineno));
        set.challenges.push_back(std::move(c));
        set.responses.push_back(static_cast<std::uint8_t>(r - '0'));
    }
    return set;
}

void save_crps(const CrpSet& set, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << serialize_crps(set);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

CrpSet load_crps(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_crps(buf.str());
}

}  // namespace ferropuf
