#pragma once

// Functional, operation-counting model of the stacked-filters dataflow: one
// input channel streams through a line buffer and window registers while the
// m CSF-encoded filters of the active batch sit in a local buffer; at every
// window position each kernel element multiplies one stored column of m
// weights. Counts operations, not cycles.

#include <cstdint>
#include <vector>

#include "sfscsf/csf.hpp"
#include "sfscsf/dense_conv.hpp"
#include "sfscsf/tensor.hpp"

namespace sfs {

// How the reference (element-indexed) design is charged for lookups when
// computing the lookup ratio.
enum class BaselineLookupModel {
    PerNonzero, // one locate per nonzero weight access
    PerColumn,  // one locate per column visit, same unit as the CSF path
};

struct ArchConfig {
    int m = 1;                 // PE column width; must match the blocks
    int line_buffer_rows = 0;  // feature rows buffered; 0 means "use K"
    BaselineLookupModel count_lookups = BaselineLookupModel::PerNonzero;
};

struct SimCounters {
    std::uint64_t total_macs = 0;       // dense-equivalent MACs
    std::uint64_t nz_macs = 0;          // MACs on nonzero weights
    std::uint64_t csf_macs = 0;         // MACs issued (nonzero + padding)
    std::uint64_t csf_lookups = 0;      // column locate operations
    std::uint64_t baseline_lookups = 0; // reference-design locate operations
    std::uint64_t feature_loads = 0;    // input elements read
    std::uint64_t filter_loads = 0;     // weight entries fetched

    SimCounters& operator+=(const SimCounters& o);

    bool operator==(const SimCounters&) const = default;
};

struct LayerReport {
    SimCounters counters;
    double util_dense = 0.0;   // nz_macs / total_macs
    double util_csf = 0.0;     // nz_macs / csf_macs
    double speedup = 0.0;      // total_macs / csf_macs
    double lookup_ratio = 0.0; // csf_lookups / baseline_lookups
};

struct SimResult {
    FeatureMap output;
    SimCounters counters;
};

// Runs one layer through the dataflow. blocks holds the M/m encoded filter
// batches in order; output equals dense_conv of the decoded weights.
SimResult simulate_layer(const LayerSpec& spec, const std::vector<CsfBlock>& blocks,
                         const FeatureMap& input, const ArchConfig& config,
                         ArithMode mode = ArithMode::Integer,
                         const QuantCodebook* codebook = nullptr);

struct MacCounts {
    std::uint64_t total = 0;
    std::uint64_t nz = 0;
    std::uint64_t csf = 0;
};

// Closed-form MAC totals from the layer shape and entry counts.
MacCounts mac_counts(const LayerSpec& spec, std::uint64_t nz_entries,
                     std::uint64_t padding_entries);

// Ratios for one counter set; DivisionError when total_macs is zero.
LayerReport report(const SimCounters& counters);

// Network totals: counters summed, ratios recomputed from the sums.
LayerReport aggregate(const std::vector<LayerReport>& reports);

} // namespace sfs
