#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oran/common/bytes.hpp"
#include "oran/common/slicing.hpp"

namespace oran::xapps {

using PrbVector = std::vector<std::uint32_t>;  // indexed by slice id

struct SlicingDecision {
  std::uint32_t cell_id = 0;
  PrbVector dedicated_prb;
  TimeMs epoch = 0;
  bool operator==(const SlicingDecision&) const = default;
};

struct ValidationRecord {
  double pass_rate = 0.0;
  std::vector<std::string> scenarios;
  bool operator==(const ValidationRecord&) const = default;
};

/// Tabular slicing policy: quantized demand vector -> PRB split.
struct PolicyModel {
  std::string model_id;
  std::uint32_t capacity = 50;
  std::uint32_t step = 5;
  std::map<PrbVector, PrbVector> table;
  std::string dataset_hash;
  std::vector<std::string> training_scenarios;
  std::optional<ValidationRecord> validation;

  bool operator==(const PolicyModel&) const = default;

  /// Demand rounded up to a multiple of step, clamped to capacity. Rounding
  /// up keeps a cell's split large enough for every demand inside it.
  PrbVector quantize(const PrbVector& demand) const;
  /// Entry of the quantized demand, or of the nearest trained cell (L1
  /// distance, ties to the smaller key) when that cell was never visited.
  /// Throws not_found on an empty table.
  const PrbVector& lookup(const PrbVector& demand) const;
};

/// Strict-priority fill: each slice in priority order gets min(demand,
/// remaining); leftover capacity goes to unmet demand in proportion, and
/// any rounding remainder to the highest-priority unmet slice. With a
/// model the split comes from the table instead.
SlicingDecision decide_allocation(const PrbVector& demand, std::uint32_t capacity, const SlicingObjectives& objectives,
                                  const PolicyModel* model = nullptr);

/// Line format:
///   model_id = <id>
///   capacity = <n>
///   step = <n>
///   dataset_hash = <hex>
///   training_scenarios = a, b
///   d0,d1,d2 -> p0,p1,p2
std::string write_model_table(const PolicyModel& model);
/// Throws parse_error naming the line.
PolicyModel read_model_table(std::string_view text);

/// Reads <dir>/model.tbl and, when present, the validation record from
/// <dir>/manifest.txt.
PolicyModel load_model_dir(const std::string& model_path);

/// Loads a model for inference. Throws model_rejected unless a validation
/// record with pass_rate >= threshold is present.
PolicyModel load_deployable_model(const std::string& model_path, double threshold = 0.95);

}  // namespace oran::xapps
