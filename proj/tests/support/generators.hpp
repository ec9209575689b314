#pragma once

// Seeded random inputs for property tests.

#include <Eigen/Dense>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gen {

class Source {
public:
    explicit Source(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        return boost::random::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    double normal() { return boost::random::normal_distribution<double>()(rng_); }
    std::size_t index(std::size_t n) {
        return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    }
    bool coin() { return index(2) == 1; }

    Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            m.data()[i] = normal();
        }
        return m;
    }
    Eigen::VectorXd gaussian(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v[i] = normal();
        }
        return v;
    }

    /// Random orthogonal matrix from the QR factor of a Gaussian matrix.
    Eigen::MatrixXd orthogonal(Eigen::Index n) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, n));
        return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    }

    /// k distinct indices from [0, n), in draw order.
    std::vector<std::size_t> subset(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::swap(pool[i], pool[i + index(n - i)]);
        }
        pool.resize(k);
        return pool;
    }

    struct LogParams {
        double lambda, delta, x0;
    };

    /// lambda in [0.01, 2], delta in [1e-4, 0.1], redrawn until
    /// lambda >= 2 delta^2 so that the dead zone is at least delta.
    LogParams log_params() {
        LogParams p{};
        do {
            p.lambda = uniform(0.01, 2.0);
            p.delta = uniform(1e-4, 0.1);
        } while (p.lambda < 2.0 * p.delta * p.delta);
        p.x0 = std::sqrt(2.0 * p.lambda) - p.delta;
        return p;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace gen
