#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "exbt/ml/model.hpp"

namespace exbt::ml {

inline constexpr char kModelMagic[4] = {'E', 'X', 'B', 'T'};
inline constexpr std::uint16_t kModelFormatVersion = 1;

/// Layout, little-endian:
///   "EXBT" | u16 version | u16 len + family bytes | u32 block count |
///   blocks: u16 len + name bytes | u32 rows | u32 cols | rows*cols f64 (column-major)
void save_model(const FittedModel& model, const std::filesystem::path& path);

struct SavedModel {
  std::uint16_t version = 0;
  std::string family;
  std::vector<ParameterBlock> blocks;
};

SavedModel read_model_file(const std::filesystem::path& path);
std::unique_ptr<FittedModel> load_model(const std::filesystem::path& path);

}  // namespace exbt::ml
