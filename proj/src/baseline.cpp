#include "ucs/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ucs {

RealSignal ista_decode(const MeasurementSet& ms, const IstaConfig& cfg) {
    if (ms.y.size() != ms.m()) throw std::domain_error("measurement vector length mismatch");
    const double sigma = sigma_max_check(ms.A).sigma_max;
    if (sigma == 0.0) return RealSignal(static_cast<std::size_t>(ms.n()), 0.0);
    const double step = 1.0 / (sigma * sigma);
    const double mu = cfg.mu * (ms.A.transpose() * ms.y).cwiseAbs().maxCoeff();

    Vector x = Vector::Zero(ms.n());
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        const Vector g = ms.A.transpose() * (ms.A * x - ms.y);
        x -= step * g;
        for (auto& v : x) {
            const double shrunk = std::copysign(std::max(std::abs(v) - step * mu, 0.0), v);
            v = std::clamp(shrunk, 0.0, 1.0);
        }
    }
    return RealSignal(x.data(), x.data() + x.size());
}

}  // namespace ucs
