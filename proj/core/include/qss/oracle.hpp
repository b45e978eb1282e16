#pragma once

#include <string>
#include <vector>

#include "qss/protocol.hpp"

// Brute-force ground truth: builds the explicit 2N-mode state, applies
// channels, the relay interferometer, detector beamsplitters and the N
// homodyne conditionings, then localizes. No closed-form shortcuts, so
// every analytic reduction can be checked against it.

namespace qss {

struct PipelineTrace {
    struct Stage {
        std::string label;
        CovarianceMatrix cm;
    };
    std::vector<Stage> stages;
    std::string dump() const;  // structured text for debugging, not a stable format
};

struct OracleResult {
    CovarianceMatrix reduced;  // effective M-mode CM, group order
    PipelineTrace trace;
};

/// Runs the full pipeline for cfg (N <= 12). Dummy ports carry unmodulated
/// vacua through their group channel. Residual cross-correlations of the
/// discarded thermal modes above 1e-8 raise std::runtime_error (a bug signal,
/// not bad input).
OracleResult oracle_reduced_cm(const ProtocolConfig& cfg);

}  // namespace qss
