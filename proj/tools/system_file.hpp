#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfs/diracsea.hpp"
#include "cfs/measure.hpp"

namespace cfs::cli {

inline constexpr int kSchemaVersion = 1;

struct LatticeProvenance {
  LatticeSpec spec;
  OccupationEdits edits;
};

struct FamilyProvenance {
  std::string name;
  std::vector<double> parameters;
};

/// A persisted measure plus enough metadata to rebuild it.
struct SystemFile {
  int spin_dim = 2;
  Eigen::Index hilbert_dim = 0;
  std::optional<LatticeProvenance> lattice;  // builder "lattice" when set, else "abstract"
  std::optional<FamilyProvenance> family;    // abstract systems written by the optimizer
  WeightConvention convention = WeightConvention::Counting;
  double counting_weight = 1.0;
  DiscreteMeasure measure{{}};
};

SystemFile system_from_lattice(const LatticeSeaSystem& sys, const OccupationEdits& edits);
SystemFile system_from_measure(DiscreteMeasure measure);

nlohmann::ordered_json to_json(const SystemFile& file);
/// Throws cfs::Error(InvalidArgument) on schema problems.
SystemFile system_from_json(const nlohmann::ordered_json& doc);

/// Serialized form written to disk (two-space indent, trailing newline).
std::string dump_system(const SystemFile& file);
void save_system(const SystemFile& file, const std::filesystem::path& path);
SystemFile load_system(const std::filesystem::path& path);

}  // namespace cfs::cli
