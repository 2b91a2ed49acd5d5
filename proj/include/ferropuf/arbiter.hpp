#ifndef FERROPUF_ARBITER_HPP
#define FERROPUF_ARBITER_HPP

#include <Eigen/Dense>

#include "ferropuf/puf.hpp"
#include "ferropuf/rng.hpp"

namespace ferropuf {

/// Parity transform of a challenge: Phi_i = prod_{j=i..n-1} (1 - 2*c_j),
/// with a constant 1 appended (dimension n+1). Each feature is the sign
/// the remaining challenge bits apply to a stage's delay difference.
Eigen::VectorXd parity_transform(const Challenge& challenge);

/// Additive-delay arbiter PUF, optionally XOR-composed from k arms.
/// Each arm holds n+1 delay-difference weights ~ Normal(0,1); an arm
/// responds [parity(c) . w > 0] and the group response XORs the arms.
class ArbiterPuf {
public:
    ArbiterPuf(int n, int k, RngStream& rng);

    int n() const { return static_cast<int>(weights_.cols()) - 1; }
    int k() const { return static_cast<int>(weights_.rows()); }
    const Eigen::MatrixXd& weights() const { return weights_; }

    /// Group response; an exact zero score counts as 0.
    int response(const Challenge& challenge) const;

private:
    Eigen::MatrixXd weights_;  // k x (n+1)
};

}  // namespace ferropuf

#endif
