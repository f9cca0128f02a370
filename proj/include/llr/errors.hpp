#pragma once

#include <stdexcept>
#include <string>

namespace llr {

// Delay formulas are undefined at utilization >= 1; sweeps need a clean stop.
class unstable_link_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Requested operating point lies outside the low-latency region.
class out_of_region_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Simulated queue crossed the abort threshold (effectively unstable input).
class queue_overflow_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Trace ingestion problems (malformed rows, empty files).
class trace_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace llr
