#pragma once

#include <string>

#include "trivol/decoder.hpp"
#include "trivol/encoding.hpp"
#include "trivol/field.hpp"

namespace trivol {

// A complete reconstruction model: the factorized geometry field (or
// monostate for the dense implicit baseline, whose features are the raw
// coordinates), the sinusoidal encoding applied to sampled features, and the
// decoder that maps encoded features to one intensity in (0, 1).
struct Model {
  FieldVariant field;
  EncodingConfig encoding;
  Mlp decoder;
};

// Throws ShapeError unless decoder input width == channels * encoded width.
void validate_model(const Model& model);

// Binary checkpoint, 8-byte magic "RFLDv001", little-endian integers,
// float32 payloads in parameter-storage order. Round-trips bitwise.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace trivol
