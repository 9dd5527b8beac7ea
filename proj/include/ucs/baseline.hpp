#pragma once

#include <cstddef>

#include "ucs/quantize.hpp"
#include "ucs/sensing.hpp"

namespace ucs {

struct IstaConfig {
    double mu = 1e-3;  // l1 weight, relative to ||A^T y||_inf
    std::size_t iterations = 2000;
};

// l1 baseline (not a minimum-entropy decoder): iterative soft thresholding for
// 0.5 ||A x - y||^2 + mu' ||x||_1, iterates projected onto [0, 1]^n.
RealSignal ista_decode(const MeasurementSet& ms, const IstaConfig& cfg = {});

}  // namespace ucs
