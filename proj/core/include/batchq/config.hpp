#pragma once

#include <string>

#include "batchq/model.hpp"

namespace batchq::config {

// Model configuration schema (JSON):
//   arrival.mu            positive rate
//   batch.pmf             array of weights for sizes 1,2,... (sums to 1), or
//   batch.family          "unit" | "deterministic" (size) |
//                         "geometric" (p, optional cap)
//   service.family        "exponential" (rate) | "erlang" (shape, rate) |
//                         "hyperexponential" (weights, rates) |
//                         "deterministic" (value) | "empirical" (points)
//   jump.lambda           geometric departure parameter in [0, 1)
//   buffer.B              nonnegative integer
// Rates are per unit time; times share the same unit.
QueueModel load_model(const std::string& path);
QueueModel model_from_json_text(const std::string& text);

// FNV-1a 64-bit hash of the canonical (sorted-key) dump, for provenance.
std::string config_hash_text(const std::string& json_text);

}  // namespace batchq::config
