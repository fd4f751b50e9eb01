#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lockbreak/lstm.hpp"

namespace lockbreak {

class ModelFormatError : public ModelError {
public:
    using ModelError::ModelError;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Little-endian binary: "LBRNN\0" magic, u32 version, shape (input bits,
// chunk width, layer count, hidden widths, outputs), init seed, then every
// parameter array in canonical order, each prefixed by its u64 rows and cols.
std::vector<std::uint8_t> save_model(const LstmNetwork& net);
LstmNetwork load_model(std::span<const std::uint8_t> bytes);

void save_model_file(const LstmNetwork& net, const std::filesystem::path& path);
LstmNetwork load_model_file(const std::filesystem::path& path);

}  // namespace lockbreak
