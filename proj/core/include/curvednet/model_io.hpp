#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "curvednet/models.hpp"

namespace curvednet {

/// First line of every model file.
inline constexpr std::string_view kModelMagic = "CURVEDNET-MODEL-v1";

/// Line-oriented text format: magic, architecture and geometry tags with their
/// curvatures, extractor shape, run metadata, then every parameter tensor with
/// its shape and constraint. Doubles are written in shortest round-trip form,
/// so save -> load reproduces the model bit for bit.
void save_model(std::ostream& out, const Model& model);
Model load_model(std::istream& in);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace curvednet
