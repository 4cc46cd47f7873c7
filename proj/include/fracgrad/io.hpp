#ifndef FRACGRAD_IO_HPP
#define FRACGRAD_IO_HPP

#include <string>

#include "fracgrad/grid.hpp"

namespace fracgrad {

// Binary field format FSF1: magic "FSF1", little-endian u32 d, u32 n,
// f64 L, then n^d little-endian f64 values in row-major axis order.
// Masks use the same layout with u8 0/1 values and magic "FSM1".
void write_field(const std::string& path, const ScalarField& f);
ScalarField read_field(const std::string& path);

void write_mask(const std::string& path, const GridSpec& spec, const Mask& mask);
std::pair<GridSpec, Mask> read_mask(const std::string& path);

}  // namespace fracgrad

#endif
