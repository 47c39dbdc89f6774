// Deterministic text output: fixed-precision number formatting, CSV rows,
// and the PGM intensity strip.
#pragma once

#include <string>
#include <vector>

namespace cavity {

inline constexpr const char* kToolVersion = "0.1.0";

/// Scientific notation with 12 significant digits, C locale. All numeric
/// output goes through here so identical runs produce identical bytes.
std::string format_number(double value);

/// P5 binary grayscale strip: each column carries one intensity sample,
/// scaled to the row maximum, repeated over `rows` lines per block.
void write_pgm_strip(const std::string& path, const std::vector<std::vector<double>>& blocks,
                     int rows_per_block = 48);

}  // namespace cavity
