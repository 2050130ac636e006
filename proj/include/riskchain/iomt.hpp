#pragma once
// Bundled IoMT edge-network threat model and the published probability table
// it reproduces, including the rows the source data cannot support.

#include "riskchain/model.hpp"

#include <vector>

namespace riskchain {

// The 11-vulnerability / 12-threat IoMT model with alpha=0.0318, uniform
// mu=0.98, denominator_override=390.
ThreatModel builtin_iomt_model();

enum class ReferenceStatus {
    Consistent,    // engine output matches the published value within 2%
    Inconsistent,  // published value disagrees with its own stated formula
    Excluded,      // published value cannot be derived from the source tables
};

struct ReferenceRow {
    std::string threat_id;
    double published_p_attack = 0.0;
    ReferenceStatus status = ReferenceStatus::Consistent;
    std::string note;  // for non-consistent rows: what the source prints vs what follows
};

// Published per-threat attack probabilities with a consistency audit. The
// Excluded/Inconsistent notes form the discrepancy ledger the golden tests
// assert against.
std::vector<ReferenceRow> iomt_reference_rows();

} // namespace riskchain
