#include "ferropuf/arbiter.hpp"

#include <stdexcept>

namespace ferropuf {

Eigen::VectorXd parity_transform(const Challenge& challenge) {
    const int n = static_cast<int>(challenge.size());
    Eigen::VectorXd phi(n + 1);
    phi[n] = 1.0;
    double prod = 1.0;
    for (int i = n - 1; i >= 0; --i) {
        prod *= 1.0 - 2.0 * challenge[static_cast<std::size_t>(i)];
        phi[i] = prod;
    }
    return phi;
}

ArbiterPuf::ArbiterPuf(int n, int k, RngStream& rng) {
    if (n < 1 || k < 1) throw std::invalid_argument("arbiter needs n >= 1 and k >= 1");
    weights_.resize(k, n + 1);
    for (int j = 0; j < k; ++j) {
        RngStream arm_rng = rng.child("arm", static_cast<std::uint64_t>(j));
        for (int i = 0; i <= n; ++i) weights_(j, i) = arm_rng.normal(0.0, 1.0);
    }
}

int ArbiterPuf::response(const Challenge& challenge) const {
    if (static_cast<int>(challenge.size()) != n())
        throw std::invalid_argument("challenge length mismatch");
    const Eigen::VectorXd phi = parity_transform(challenge);
    int bit = 0;
    for (int j = 0; j < k(); ++j) bit ^= (weights_.row(j).dot(phi) > 0.0) ? 1 : 0;
    return bit;
}

}  // namespace ferropuf
