// Binary raster mask over a plane or image grid. Cells are strictly {0, 1}.
#pragma once

#include "vsd/raster.hpp"

namespace vsd {

struct BinaryMask {
  Raster<uint8_t> cells;
  GridSpec grid;
  Space space = Space::plane();

  size_t foreground_count() const {
    size_t n = 0;
    for (uint8_t v : cells.data()) n += v;
    return n;
  }
};

}  // namespace vsd
