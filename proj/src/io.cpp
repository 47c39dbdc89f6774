#include "cavity/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cavity {

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", value);
    return buf;
}

void write_pgm_strip(const std::string& path, const std::vector<std::vector<double>>& blocks,
                     int rows_per_block) {
    if (blocks.empty() || blocks.front().empty())
        throw std::invalid_argument("pgm: nothing to write");
    const std::size_t width = blocks.front().size();
    double peak = 0.0;
    for (const auto& block : blocks) {
        if (block.size() != width) throw std::invalid_argument("pgm: ragged blocks");
        for (double v : block) peak = std::max(peak, v);
    }
    if (peak <= 0.0) peak = 1.0;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pgm: cannot open " + path);
    out << "P5\n" << width << " " << blocks.size() * static_cast<std::size_t>(rows_per_block)
        << "\n255\n";
    std::string row(width, '\0');
    for (const auto& block : blocks) {
        for (std::size_t i = 0; i < width; ++i) {
            double scaled = 255.0 * block[i] / peak;
            row[i] = static_cast<char>(static_cast<unsigned char>(
                std::clamp(std::lround(scaled), 0L, 255L)));
        }
        for (int r = 0; r < rows_per_block; ++r) out.write(row.data(), static_cast<long>(width));
    }
}

}  // namespace cavity
